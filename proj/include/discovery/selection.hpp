// Copyright 2026 The discovery authors
// SPDX-License-Identifier: Apache-2.0
//
// Least-squares fits, information criteria and pairwise model comparison.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "discovery/data_gen.hpp"
#include "discovery/model_space.hpp"

namespace discovery {

enum class Statistic
{
    AIC,
    SC
};

/// "AIC" -> AIC; "SC" or "BIC" -> SC (case-insensitive).
Statistic parse_statistic(std::string_view text);
std::string to_string(Statistic s);

struct OlsFit
{
    double rss = 0.0;
    int p = 0;
};

/// Design matrix for a model: one column per term (products of raw factor
/// levels), centered. Centering is equivalent to fitting an intercept that is
/// not counted in p.
Eigen::MatrixXd design_matrix(const Eigen::MatrixXd& x_raw, const ModelSpec& model);

/// Centered term columns of one predictor matrix, shared across the fits of
/// several models on the same data.
class TermColumns
{
  public:
    explicit TermColumns(const Eigen::MatrixXd& x_raw);

    int rows() const { return rows_; }
    /// Residual sum of squares of y on the model's design via column-pivoted
    /// Householder QR. Throws FitError on rank deficiency or an exact fit.
    OlsFit fit(const Eigen::VectorXd& y, const ModelSpec& model) const;

  private:
    int rows_ = 0;
    int k_ = 0;
    std::vector<Eigen::VectorXd> columns_; // indexed by term mask
};

/// One-shot form of TermColumns::fit.
OlsFit fit_ols(const Eigen::VectorXd& y, const ModelSpec& model, const Eigen::MatrixXd& x_raw);

/// Rounds to `ndec` decimals (half away from zero).
double round_to(double value, int ndec);

/// AIC = 2p + n ln(rss/n); SC = p ln(n) + n ln(rss/n); rounded to ndec.
/// A negative ndec disables rounding.
double score(double rss, int p, int n, Statistic statistic, int ndec);

struct FitScore
{
    double rss = 0.0;
    int p = 0;
    int n = 0;
    Statistic statistic = Statistic::SC;
    double value = 0.0;
};

FitScore score_model(const Dataset& data, const ModelSpec& model, Statistic statistic, int ndec);

enum class Outcome
{
    ProposedWins,
    IncumbentStays
};

/// The proposed model wins only when its rounded score is strictly smaller.
Outcome compare(const ModelSpec& proposed, const ModelSpec& incumbent, const Dataset& data, Statistic statistic,
                int ndec);

/// What a win matrix is estimated under.
struct TruthSpec
{
    ModelSpec true_model;
    double sigma_level = 0.2;
    double correlation = 0.2;
    int n = 100;
    /// When set, every replicate uses these coefficients; otherwise a fresh
    /// Dirichlet draw per replicate.
    std::optional<std::vector<double>> fixed_beta;

    std::string descriptor() const;
};

enum class WinEstimator
{
    Frequency, ///< wins / trials
    Jeffreys,  ///< (wins + 1/2) / (trials + 1); never exactly 0 or 1
};

struct WinEstimateOptions
{
    Statistic statistic = Statistic::SC;
    int replicates = 10000; ///< V
    int ndec = 4;
    std::uint64_t root_seed = 1;
    int workers = 0; ///< 0: hardware concurrency
    WinEstimator estimator = WinEstimator::Jeffreys;
};

/// w(l, i) = estimated P(S(M_l) < S(M_i)) under data from the truth.
/// Diagonal entries are 1 by convention.
class WinMatrix
{
  public:
    WinMatrix() = default;
    /// Takes off-diagonal probabilities from `probs`; the diagonal is set to 1.
    WinMatrix(const Eigen::MatrixXd& probs, int replicates, std::string descriptor = {});

    std::size_t size() const { return static_cast<std::size_t>(probs_.rows()); }
    int replicates() const { return replicates_; }
    const std::string& descriptor() const { return descriptor_; }
    const Eigen::MatrixXd& matrix() const { return probs_; }

    double operator()(std::size_t proposed, std::size_t incumbent) const { return probs_(proposed, incumbent); }

  private:
    Eigen::MatrixXd probs_;
    int replicates_ = 0;
    std::string descriptor_;
};

/// Monte Carlo estimate over V independent datasets, each with fresh
/// predictors, coefficients (unless fixed) and noise. Every dataset scores all
/// models once, so all pairs share the same V draws. Replicate v uses its own
/// RNG stream, so the result does not depend on the worker count.
/// Throws EstimationError when a pair loses more than 1% of draws to fit errors.
WinMatrix estimate_win_matrix(const TruthSpec& truth, const ModelSpace& space, const WinEstimateOptions& options);

/// CSV with a header row of incumbent model strings and one row per proposed
/// model: "proposed,<m_1>,...,<m_L>".
std::string win_matrix_to_csv(const WinMatrix& w, const ModelSpace& space);
/// Throws IoError on malformed input or labels that do not match the space.
WinMatrix win_matrix_from_csv(std::string_view text, const ModelSpace& space, int replicates);

} // namespace discovery
