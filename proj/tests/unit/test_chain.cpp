// Copyright 2026 The discovery authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "discovery/chain.hpp"
#include "discovery/error.hpp"

using namespace discovery;

namespace {

// Deterministic win matrix with entries in (0, 1) that favor larger indices.
WinMatrix synthetic_wins(std::size_t L)
{
    Eigen::MatrixXd w(L, L);
    for (std::size_t l = 0; l < L; ++l)
        for (std::size_t i = 0; i < L; ++i)
            w(l, i) = l == i ? 1.0 : 0.1 + 0.8 / (1.0 + std::exp(double(i) - double(l))) * ((l + 2 * i) % 3 + 1) / 3.0;
    return WinMatrix(w, 1000);
}

} // namespace

TEST_CASE("three-state chain solved by hand")
{
    Eigen::Matrix3d p;
    p << 0.5, 0.5, 0.0, 0.25, 0.5, 0.25, 0.0, 0.5, 0.5;
    auto pi = stationary_distribution(p);
    CHECK(pi(0) == doctest::Approx(0.25));
    CHECK(pi(1) == doctest::Approx(0.5));
    CHECK(pi(2) == doctest::Approx(0.25));
    auto tau = mean_first_passage(p, 0);
    CHECK(tau(1) == doctest::Approx(6.0));
    CHECK(tau(2) == doctest::Approx(8.0));
    CHECK(tau(0) == doctest::Approx(4.0)); // return time = 1 / pi
}

TEST_CASE("reducible chains are rejected")
{
    Eigen::Matrix3d p;
    p << 1, 0, 0, 0, 1, 0, 0.5, 0, 0.5;
    CHECK_THROWS_AS(stationary_distribution(p), AnalysisError);
    Eigen::Matrix2d q;
    q << 1, 0, 0, 1;
    CHECK_THROWS_AS(mean_first_passage(q, 0), AnalysisError);
}

TEST_CASE("transition matrix properties")
{
    const auto space = enumerate_models(3);
    const auto win = synthetic_wins(space.size());
    for (auto name : {"tess-dominant", "mave-dominant", "bo-dominant", "all-equal"}) {
        CAPTURE(name);
        auto pop = population_preset(name, false, ProposalMode::Soft);
        auto p = build_transition_matrix(win, pop, space);
        CHECK((p.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
        CHECK(p.minCoeff() > 0.0);
        for (std::size_t i = 0; i < space.size(); ++i)
            CHECK(p(i, i) == doctest::Approx(stickiness(win, pop, space, i)).epsilon(1e-12));

        auto s = analyze(win, pop, space, 5);
        CHECK((s.stationary.transpose() * p - s.stationary.transpose()).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(s.stationary.sum() == doctest::Approx(1.0));
        CHECK(s.mfpt(5) * s.stationary(5) == doctest::Approx(1.0));
        double others = 0;
        for (std::size_t i = 0; i < space.size(); ++i)
            if (i != 5)
                others += s.mfpt(i);
        CHECK(s.mean_mfpt_excluding_target() == doctest::Approx(others / 13));
        CHECK(s.unconditional_mfpt() == doctest::Approx(others / 14));
    }
}

TEST_CASE("transition matrix agrees with simulation of the proposal process")
{
    const auto space = enumerate_models(3);
    const auto win = synthetic_wins(space.size());
    auto pop = population_from_counts(0, 1, 1, 1, ProposalMode::Soft);
    auto p = build_transition_matrix(win, pop, space);

    ProposalTable table(space, ProposalMode::Soft);
    RngStream rng(17, 0);
    const std::size_t from = 2;
    const int n = 200000;
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(space.size());
    for (int t = 0; t < n; ++t) {
        auto st = sample_strategy(pop, rng);
        auto l = sample_proposal(table.get(st, from), rng);
        bool moves = l != from && rng.uniform01() < win(l, from);
        counts(moves ? l : from) += 1;
    }
    for (std::size_t l = 0; l < space.size(); ++l) {
        double se = std::sqrt(p(from, l) * (1 - p(from, l)) / n);
        CHECK(std::abs(counts(l) / n - p(from, l)) < 5 * se + 1e-12);
    }
}

TEST_CASE("chain analysis needs a soft population without replicators")
{
    const auto space = enumerate_models(2);
    const auto win = synthetic_wins(space.size());
    CHECK_THROWS_AS(require_chain_population(population_preset("all-equal", true, ProposalMode::Soft)), ConfigError);
    CHECK_THROWS_AS(require_chain_population(population_preset("all-equal", false, ProposalMode::Hard)), ConfigError);
    CHECK_THROWS_AS(build_transition_matrix(win, population_preset("all-equal", true, ProposalMode::Soft), space),
                    ConfigError);
}
