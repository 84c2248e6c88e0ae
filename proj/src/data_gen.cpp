// Copyright 2026 The discovery authors
// SPDX-License-Identifier: Apache-2.0
#include "discovery/data_gen.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "discovery/error.hpp"

namespace discovery {

namespace {

int to_level(double z)
{
    double u = 0.5 * std::erfc(-z / std::numbers::sqrt2);
    int level = static_cast<int>(u * kPredictorLevels) + 1;
    return level > kPredictorLevels ? kPredictorLevels : level;
}

} // namespace

double latent_correlation(double target) { return 2.0 * std::sin(std::numbers::pi * target / 6.0); }

void validate(const GroundTruth& truth)
{
    if (!truth.true_model.is_valid())
        throw ConfigError("true model is not a valid hierarchical model");
    if (truth.beta.size() != static_cast<std::size_t>(truth.true_model.parameter_count()))
        throw ConfigError("coefficient count does not match the true model");
    if (!(truth.sigma_level > 0.0 && truth.sigma_level < 1.0))
        throw ConfigError("sigma level must lie in (0, 1), got " + std::to_string(truth.sigma_level));
    if (!(truth.correlation >= 0.0 && truth.correlation < 0.9))
        throw ConfigError("predictor correlation must lie in [0, 0.9), got " + std::to_string(truth.correlation));
    if (truth.n < truth.true_model.k() + 2)
        throw ConfigError("sample size too small for k factors");
}

Eigen::MatrixXd gen_predictors(int n, int k, double correlation, RngStream& rng)
{
    if (k < 1 || n < k + 2)
        throw ConfigError("gen_predictors requires n >= k + 2");
    if (!(correlation >= 0.0 && correlation < 0.9))
        throw ConfigError("predictor correlation must lie in [0, 0.9), got " + std::to_string(correlation));

    const double rho = latent_correlation(correlation);
    const double resid = std::sqrt(1.0 - rho * rho);
    Eigen::MatrixXd x(n, k);
    for (int i = 0; i < n; ++i) {
        double z1 = rng.normal();
        x(i, 0) = to_level(z1);
        for (int j = 1; j < k; ++j)
            x(i, j) = to_level(rho * z1 + resid * rng.normal());
    }
    return x;
}

std::vector<double> gen_coefficients(const ModelSpec& true_model, RngStream& rng)
{
    const int p = true_model.parameter_count();
    std::vector<double> beta(p);
    if (p == 1) {
        beta[0] = 1.0;
        return beta;
    }
    double total = 0.0;
    for (double& b : beta) {
        b = rng.exponential();
        total += b;
    }
    for (double& b : beta)
        b /= total;
    return beta;
}

Eigen::VectorXd term_column(const Eigen::MatrixXd& x_raw, Term term)
{
    Eigen::VectorXd col = Eigen::VectorXd::Ones(x_raw.rows());
    for (int f : term_factors(term))
        col.array() *= x_raw.col(f - 1).array();
    return col;
}

Eigen::VectorXd standardize(const Eigen::VectorXd& y)
{
    const auto n = y.size();
    if (n < 2)
        throw GenerationError("cannot standardize fewer than two observations");
    double mean = y.mean();
    Eigen::VectorXd c = y.array() - mean;
    double sd = std::sqrt(c.squaredNorm() / static_cast<double>(n - 1));
    if (!(sd > 0.0) || !std::isfinite(sd))
        throw GenerationError("response has zero variance");
    c /= sd;
    // second pass removes the O(eps) residual mean left by rounding
    c.array() -= c.mean();
    return c;
}

Dataset gen_response(Eigen::MatrixXd x_raw, const GroundTruth& truth, RngStream& rng)
{
    const auto terms = truth.true_model.terms();
    if (x_raw.rows() != truth.n || x_raw.cols() != truth.true_model.k())
        throw ConfigError("predictor matrix dimensions do not match the ground truth");
    if (terms.size() != truth.beta.size())
        throw ConfigError("coefficient count does not match the true model");

    Eigen::VectorXd det = Eigen::VectorXd::Zero(truth.n);
    double at_mean = 0.0;
    for (std::size_t t = 0; t < terms.size(); ++t) {
        det += truth.beta[t] * term_column(x_raw, terms[t]);
        at_mean += truth.beta[t] * std::pow(kPredictorMean, term_order(terms[t]));
    }
    if (!(at_mean > 0.0))
        throw GenerationError("deterministic part vanishes at the mean predictor");
    det *= (1.0 - truth.sigma_level) / at_mean;
    if ((det.array() - det.mean()).matrix().squaredNorm() <= 0.0)
        throw GenerationError("deterministic part has zero variance");

    const double noise_sd = std::sqrt(truth.sigma_level);
    Eigen::VectorXd y(truth.n);
    for (int i = 0; i < truth.n; ++i)
        y(i) = det(i) + noise_sd * rng.normal();
    return Dataset{std::move(x_raw), standardize(y)};
}

} // namespace discovery
