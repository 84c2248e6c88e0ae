// Copyright 2026 The discovery authors
// SPDX-License-Identifier: Apache-2.0
#include "discovery/selection.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

#include "discovery/csv.hpp"
#include "discovery/error.hpp"
#include "discovery/parallel.hpp"

namespace discovery {

namespace {

constexpr std::uint64_t kWinMatrixStreamTag = 0x57494E4D; // "WINM"
constexpr double kExactFitTolerance = 1e-20;
constexpr double kRankThreshold = 1e-10;

} // namespace

Statistic parse_statistic(std::string_view text)
{
    std::string up;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c)))
            up += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (up == "AIC")
        return Statistic::AIC;
    if (up == "SC" || up == "BIC")
        return Statistic::SC;
    throw ConfigError("unknown model comparison statistic '" + std::string(text) + "'");
}

std::string to_string(Statistic s) { return s == Statistic::AIC ? "AIC" : "SC"; }

Eigen::MatrixXd design_matrix(const Eigen::MatrixXd& x_raw, const ModelSpec& model)
{
    const auto terms = model.terms();
    Eigen::MatrixXd x(x_raw.rows(), static_cast<Eigen::Index>(terms.size()));
    for (std::size_t t = 0; t < terms.size(); ++t) {
        Eigen::VectorXd col = term_column(x_raw, terms[t]);
        x.col(static_cast<Eigen::Index>(t)) = col.array() - col.mean();
    }
    return x;
}

TermColumns::TermColumns(const Eigen::MatrixXd& x_raw)
    : rows_(static_cast<int>(x_raw.rows())), k_(static_cast<int>(x_raw.cols()))
{
    const Term full = (Term{1} << k_) - 1;
    columns_.resize(full + 1);
    for (Term t = 1; t <= full; ++t) {
        Eigen::VectorXd col = term_column(x_raw, t);
        col.array() -= col.mean();
        double norm = col.norm();
        // unit-norm columns keep the rank test scale-free; rss is unaffected
        if (norm > 0.0)
            col /= norm;
        columns_[t] = std::move(col);
    }
}

OlsFit TermColumns::fit(const Eigen::VectorXd& y, const ModelSpec& model) const
{
    if (model.k() != k_)
        throw FitError("model and predictor matrix disagree on k");
    if (y.size() != rows_)
        throw FitError("response length does not match the predictor matrix");
    const auto terms = model.terms();
    const int p = static_cast<int>(terms.size());
    if (p >= rows_)
        throw FitError("model has at least as many parameters as observations");

    Eigen::MatrixXd x(rows_, p);
    for (int j = 0; j < p; ++j) {
        const auto& col = columns_[terms[j]];
        if (col.squaredNorm() == 0.0)
            throw FitError("term " + term_to_string(terms[j]) + " is constant");
        x.col(j) = col;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    qr.setThreshold(kRankThreshold);
    if (qr.rank() < p)
        throw FitError("design for '" + model.to_string() + "' is rank deficient");

    // centered y with centered columns: the intercept is profiled out
    Eigen::VectorXd qty = y.array() - y.mean();
    qty.applyOnTheLeft(qr.householderQ().adjoint());
    double rss = qty.tail(rows_ - p).squaredNorm();
    if (!(rss > kExactFitTolerance * (y.array() - y.mean()).matrix().squaredNorm()))
        throw FitError("exact fit for '" + model.to_string() + "' (zero residual)");
    return OlsFit{rss, p};
}

OlsFit fit_ols(const Eigen::VectorXd& y, const ModelSpec& model, const Eigen::MatrixXd& x_raw)
{
    return TermColumns(x_raw).fit(y, model);
}

double round_to(double value, int ndec)
{
    if (ndec < 0)
        return value;
    double scale = std::pow(10.0, ndec);
    return std::round(value * scale) / scale;
}

double score(double rss, int p, int n, Statistic statistic, int ndec)
{
    const double fit = n * std::log(rss / n);
    const double penalty = statistic == Statistic::AIC ? 2.0 * p : p * std::log(static_cast<double>(n));
    return round_to(penalty + fit, ndec);
}

FitScore score_model(const Dataset& data, const ModelSpec& model, Statistic statistic, int ndec)
{
    OlsFit f = fit_ols(data.y, model, data.x_raw);
    const int n = static_cast<int>(data.y.size());
    return FitScore{f.rss, f.p, n, statistic, score(f.rss, f.p, n, statistic, ndec)};
}

Outcome compare(const ModelSpec& proposed, const ModelSpec& incumbent, const Dataset& data, Statistic statistic,
                int ndec)
{
    if (proposed == incumbent)
        return Outcome::IncumbentStays;
    TermColumns cols(data.x_raw);
    const int n = static_cast<int>(data.y.size());
    OlsFit fp = cols.fit(data.y, proposed);
    OlsFit fg = cols.fit(data.y, incumbent);
    return score(fp.rss, fp.p, n, statistic, ndec) < score(fg.rss, fg.p, n, statistic, ndec)
               ? Outcome::ProposedWins
               : Outcome::IncumbentStays;
}

std::string TruthSpec::descriptor() const
{
    std::ostringstream ss;
    ss << "true=" << true_model.to_string() << ";k=" << true_model.k() << ";sigma=" << csv::format_double(sigma_level)
       << ";correlation=" << csv::format_double(correlation) << ";n=" << n << ";beta=";
    if (fixed_beta) {
        for (std::size_t i = 0; i < fixed_beta->size(); ++i)
            ss << (i ? "/" : "") << csv::format_double((*fixed_beta)[i]);
    } else {
        ss << "fresh";
    }
    return ss.str();
}

WinMatrix::WinMatrix(const Eigen::MatrixXd& probs, int replicates, std::string descriptor)
    : probs_(probs), replicates_(replicates), descriptor_(std::move(descriptor))
{
    if (probs_.rows() != probs_.cols())
        throw ConfigError("win matrix must be square");
    probs_.diagonal().setOnes();
}

WinMatrix estimate_win_matrix(const TruthSpec& truth, const ModelSpace& space, const WinEstimateOptions& options)
{
    if (options.replicates < 1)
        throw ConfigError("win matrix needs at least one replicate");
    if (truth.true_model.k() != space.k() || !space.index_of(truth.true_model))
        throw ConfigError("true model is not a member of the model space");
    if (truth.fixed_beta && truth.fixed_beta->size() != static_cast<std::size_t>(truth.true_model.parameter_count()))
        throw ConfigError("fixed coefficient count does not match the true model");

    const std::size_t L = space.size();
    const auto V = static_cast<std::size_t>(options.replicates);
    const std::string descriptor = truth.descriptor();
    const std::uint64_t truth_hash = hash_text(descriptor);
    const double nan = std::numeric_limits<double>::quiet_NaN();

    GroundTruth base{truth.true_model, {}, truth.sigma_level, truth.correlation, truth.n};
    base.beta.assign(static_cast<std::size_t>(truth.true_model.parameter_count()), 1.0);
    validate(base);

    // scores[v * L + m]: rounded score of model m on dataset v, NaN on fit failure
    std::vector<double> scores(V * L, nan);
    parallel_for(V, options.workers, [&](std::size_t v) {
        RngStream rng(options.root_seed, derive_stream_id({kWinMatrixStreamTag, truth_hash, v}));
        GroundTruth g = base;
        g.beta = truth.fixed_beta ? *truth.fixed_beta : gen_coefficients(truth.true_model, rng);
        Dataset d;
        try {
            d = gen_response(gen_predictors(truth.n, space.k(), truth.correlation, rng), g, rng);
        } catch (const GenerationError&) {
            return;
        }
        TermColumns cols(d.x_raw);
        for (std::size_t m = 0; m < L; ++m) {
            try {
                OlsFit f = cols.fit(d.y, space[m]);
                scores[v * L + m] = score(f.rss, f.p, truth.n, options.statistic, options.ndec);
            } catch (const FitError&) {
            }
        }
    });

    Eigen::MatrixXd wins = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(L), static_cast<Eigen::Index>(L));
    Eigen::MatrixXd trials = wins;
    for (std::size_t v = 0; v < V; ++v) {
        const double* s = &scores[v * L];
        for (std::size_t a = 0; a < L; ++a) {
            if (std::isnan(s[a]))
                continue;
            for (std::size_t b = 0; b < L; ++b) {
                if (a == b || std::isnan(s[b]))
                    continue;
                trials(a, b) += 1.0;
                if (s[a] < s[b])
                    wins(a, b) += 1.0;
            }
        }
    }
    Eigen::MatrixXd probs(static_cast<Eigen::Index>(L), static_cast<Eigen::Index>(L));
    for (std::size_t a = 0; a < L; ++a)
        for (std::size_t b = 0; b < L; ++b) {
            if (a == b)
                continue;
            if (trials(a, b) < 0.99 * static_cast<double>(V))
                throw EstimationError("more than 1% of draws failed to fit for pair (" + space[a].to_string() + ", "
                                      + space[b].to_string() + ")");
            probs(a, b) = options.estimator == WinEstimator::Jeffreys ? (wins(a, b) + 0.5) / (trials(a, b) + 1.0)
                                                                      : wins(a, b) / trials(a, b);
        }
    return WinMatrix(probs, options.replicates, descriptor);
}

std::string win_matrix_to_csv(const WinMatrix& w, const ModelSpace& space)
{
    csv::Table t;
    t.header.push_back("proposed");
    for (const auto& m : space.models())
        t.header.push_back(m.to_string());
    for (std::size_t a = 0; a < w.size(); ++a) {
        csv::Row row{space[a].to_string()};
        for (std::size_t b = 0; b < w.size(); ++b)
            row.push_back(csv::format_double(w(a, b)));
        t.rows.push_back(std::move(row));
    }
    return csv::format_table(t);
}

WinMatrix win_matrix_from_csv(std::string_view text, const ModelSpace& space, int replicates)
{
    csv::Table t = csv::parse_table(text);
    const std::size_t L = space.size();
    if (t.header.size() != L + 1 || t.rows.size() != L)
        throw IoError("win matrix CSV has the wrong shape for this model space");
    for (std::size_t b = 0; b < L; ++b)
        if (space.index_of(parse_model(t.header[b + 1], space.k())) != b)
            throw IoError("win matrix CSV column labels are not canonical");
    Eigen::MatrixXd probs(static_cast<Eigen::Index>(L), static_cast<Eigen::Index>(L));
    for (std::size_t a = 0; a < L; ++a) {
        if (space.index_of(parse_model(t.rows[a][0], space.k())) != a)
            throw IoError("win matrix CSV row labels are not canonical");
        for (std::size_t b = 0; b < L; ++b) {
            const std::string& cell = t.rows[a][b + 1];
            try {
                probs(a, b) = std::stod(cell);
            } catch (const std::exception&) {
                throw IoError("bad win matrix entry '" + cell + "'");
            }
        }
    }
    return WinMatrix(probs, replicates);
}

} // namespace discovery
