// Copyright 2026 The discovery authors
// SPDX-License-Identifier: Apache-2.0
#include "discovery/chain.hpp"

#include <cmath>
#include <string>

#include "discovery/error.hpp"

namespace discovery {

namespace {

constexpr double kDiagonalTolerance = 1e-9;

// sum_a P(M_l | R_a, M_i) P(R_a) for every l
std::vector<double> mixed_proposals(const Population& population, const ModelSpace& space, std::size_t i)
{
    std::vector<double> mix(space.size(), 0.0);
    for (Strategy st : kStrategies) {
        double w = population.weight(st);
        if (w <= 0.0)
            continue;
        auto probs = proposal_distribution(st, i, space, population.mode);
        for (std::size_t l = 0; l < mix.size(); ++l)
            mix[l] += w * probs[l];
    }
    return mix;
}

} // namespace

void require_chain_population(const Population& population)
{
    validate(population);
    if (population.has_replicator())
        throw ConfigError("the replicator makes the process a higher-order chain; exact chain analysis needs a "
                          "population without Rey (use the agent-based engine instead)");
    if (population.mode != ProposalMode::Soft)
        throw ConfigError("exact chain analysis needs Soft proposal mode so the chain is ergodic");
}

double stickiness(const WinMatrix& win, const Population& population, const ModelSpace& space, std::size_t model)
{
    require_chain_population(population);
    const auto mix = mixed_proposals(population, space, model);
    double stay = 0.0;
    for (std::size_t l = 0; l < space.size(); ++l)
        stay += (l == model ? 1.0 : 1.0 - win(l, model)) * mix[l];
    return stay;
}

TransitionMatrix build_transition_matrix(const WinMatrix& win, const Population& population, const ModelSpace& space)
{
    require_chain_population(population);
    const std::size_t L = space.size();
    if (win.size() != L)
        throw ConfigError("win matrix size does not match the model space");

    TransitionMatrix p = TransitionMatrix::Zero(static_cast<Eigen::Index>(L), static_cast<Eigen::Index>(L));
    for (std::size_t i = 0; i < L; ++i) {
        const auto mix = mixed_proposals(population, space, i);
        double off = 0.0;
        for (std::size_t l = 0; l < L; ++l) {
            if (l == i)
                continue;
            p(i, l) = win(l, i) * mix[l];
            off += p(i, l);
        }
        p(i, i) = 1.0 - off;
        const double stay = stickiness(win, population, space, i);
        if (std::abs(stay - p(i, i)) > kDiagonalTolerance)
            throw AnalysisError("stickiness and transition diagonal disagree for model " + space[i].to_string());
    }
    return p;
}

Eigen::VectorXd stationary_distribution(const TransitionMatrix& p, double tol)
{
    const auto L = p.rows();
    if (L == 0 || p.cols() != L)
        throw AnalysisError("transition matrix must be square and nonempty");
    // (P' - I) pi = 0 with the first equation replaced by sum(pi) = 1
    Eigen::MatrixXd a = p.transpose() - Eigen::MatrixXd::Identity(L, L);
    a.row(0).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(L);
    rhs(0) = 1.0;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (!lu.isInvertible())
        throw AnalysisError("stationary system is singular; the chain is not ergodic");
    Eigen::VectorXd pi = lu.solve(rhs);
    double residual = (pi.transpose() * p - pi.transpose()).cwiseAbs().maxCoeff();
    if (!(residual < tol) || (pi.array() < -tol).any())
        throw AnalysisError("stationary solve did not converge (residual " + std::to_string(residual) + ")");
    return pi.cwiseMax(0.0) / pi.cwiseMax(0.0).sum();
}

Eigen::VectorXd mean_first_passage(const TransitionMatrix& p, std::size_t target)
{
    const auto L = p.rows();
    const auto t = static_cast<Eigen::Index>(target);
    if (t >= L)
        throw AnalysisError("target state out of range");
    // (I - Q) tau = 1 over the non-target states
    std::vector<Eigen::Index> others;
    for (Eigen::Index i = 0; i < L; ++i)
        if (i != t)
            others.push_back(i);
    const auto m = static_cast<Eigen::Index>(others.size());
    Eigen::VectorXd tau(L);
    if (m > 0) {
        Eigen::MatrixXd a(m, m);
        for (Eigen::Index r = 0; r < m; ++r)
            for (Eigen::Index c = 0; c < m; ++c)
                a(r, c) = (r == c ? 1.0 : 0.0) - p(others[r], others[c]);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
        if (!lu.isInvertible())
            throw AnalysisError("first passage system is singular; target unreachable");
        Eigen::VectorXd sol = lu.solve(Eigen::VectorXd::Ones(m));
        if (!sol.allFinite() || (sol.array() < 1.0 - 1e-9).any())
            throw AnalysisError("first passage solve produced invalid times");
        for (Eigen::Index r = 0; r < m; ++r)
            tau(others[r]) = sol(r);
    }
    double ret = 1.0;
    for (Eigen::Index l : others)
        ret += p(t, l) * tau(l);
    tau(t) = ret;
    return tau;
}

double ChainSummary::unconditional_mfpt() const
{
    const auto L = mfpt.size();
    double total = 0.0;
    for (Eigen::Index i = 0; i < L; ++i)
        if (static_cast<std::size_t>(i) != true_index)
            total += mfpt(i);
    return total / static_cast<double>(L);
}

double ChainSummary::mean_mfpt_excluding_target() const
{
    const auto L = mfpt.size();
    if (L < 2)
        return 0.0;
    return unconditional_mfpt() * static_cast<double>(L) / static_cast<double>(L - 1);
}

ChainSummary analyze(const WinMatrix& win, const Population& population, const ModelSpace& space,
                     std::size_t true_index)
{
    ChainSummary s;
    s.true_index = true_index;
    s.transition = build_transition_matrix(win, population, space);
    s.stationary = stationary_distribution(s.transition);
    s.mfpt = mean_first_passage(s.transition, true_index);
    s.stickiness = s.transition.diagonal();
    return s;
}

} // namespace discovery
