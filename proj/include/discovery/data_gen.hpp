// Copyright 2026 The discovery authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <vector>

#include "discovery/model_space.hpp"
#include "discovery/rng.hpp"

namespace discovery {

/// Mean of the discrete uniform predictor distribution on {1..100}.
inline constexpr double kPredictorMean = 50.5;
inline constexpr int kPredictorLevels = 100;

/// Everything needed to simulate data from the true model.
struct GroundTruth
{
    ModelSpec true_model;
    std::vector<double> beta; ///< one coefficient per term of true_model, canonical term order
    double sigma_level = 0.2; ///< noise fraction f: sigma^2 = f, E(y|mu_x) = 1 - f
    double correlation = 0.2; ///< target Pearson correlation between x1 and every other factor
    int n = 100;
};

struct Dataset
{
    Eigen::MatrixXd x_raw; ///< n x k, integer levels in 1..100
    Eigen::VectorXd y;     ///< standardized response
};

/// Latent Gaussian correlation that yields the target Pearson correlation
/// between two uniform marginals: rho* = 2 sin(pi r / 6).
double latent_correlation(double target);

/// n x k predictor levels with uniform marginals on {1..100} and Pearson
/// correlation `correlation` between column 1 and each other column
/// (Gaussian copula). Requires n >= k + 2 and 0 <= correlation < 0.9.
Eigen::MatrixXd gen_predictors(int n, int k, double correlation, RngStream& rng);

/// Dirichlet(1, ..., 1) coefficients, one per term of the model.
std::vector<double> gen_coefficients(const ModelSpec& true_model, RngStream& rng);

/// Standardized response under the ground truth. The deterministic part is
/// scaled to equal 1 - sigma_level at the mean predictor vector, Gaussian noise
/// with variance sigma_level is added, and the result is standardized.
Dataset gen_response(Eigen::MatrixXd x_raw, const GroundTruth& truth, RngStream& rng);

/// y -> (y - mean) / sd with the n-1 sample standard deviation.
/// Throws GenerationError when y has zero variance.
Eigen::VectorXd standardize(const Eigen::VectorXd& y);

/// Column of products of raw factor levels for one term.
Eigen::VectorXd term_column(const Eigen::MatrixXd& x_raw, Term term);

/// Validates a ground truth descriptor; throws ConfigError.
void validate(const GroundTruth& truth);

} // namespace discovery
