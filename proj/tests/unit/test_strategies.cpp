// Copyright 2026 The discovery authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <numeric>

#include "discovery/error.hpp"
#include "discovery/strategies.hpp"

using namespace discovery;

namespace {

double total(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

} // namespace

TEST_CASE("presets")
{
    for (auto name : kPresetNames) {
        auto with = population_preset(name, true, ProposalMode::Hard);
        CHECK(total({with.weights.begin(), with.weights.end()}) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK_NOTHROW(validate(with));
        if (name == "rey-dominant") {
            CHECK_THROWS_AS(population_preset(name, false, ProposalMode::Soft), ConfigError);
            continue;
        }
        auto without = population_preset(name, false, ProposalMode::Soft);
        CHECK(without.weight(Strategy::Rey) == 0.0);
        CHECK(without.mode == ProposalMode::Soft);
        CHECK(total({without.weights.begin(), without.weights.end()}) == doctest::Approx(1.0).epsilon(1e-14));
    }
    auto tess = population_preset("tess-dominant", true, ProposalMode::Hard);
    CHECK(tess.weight(Strategy::Tess) == 0.99);
    CHECK(tess.weight(Strategy::Bo) == doctest::Approx(0.01 / 3));
    auto bo = population_preset("bo-dominant", false, ProposalMode::Soft);
    CHECK(bo.weight(Strategy::Bo) == 0.99);
    CHECK(bo.weight(Strategy::Mave) == 0.005);
    auto eq = population_preset("all-equal", false, ProposalMode::Soft);
    CHECK(eq.weight(Strategy::Tess) == doctest::Approx(1.0 / 3));
    CHECK_THROWS_AS(population_preset("nobody", true, ProposalMode::Hard), ConfigError);
}

TEST_CASE("populations from head counts")
{
    auto p = population_from_counts(1, 1, 2, 0, ProposalMode::Hard);
    CHECK(p.weight(Strategy::Rey) == 0.25);
    CHECK(p.weight(Strategy::Mave) == 0.5);
    CHECK(p.weight(Strategy::Bo) == 0.0);
    CHECK(p.has_replicator());
    CHECK_THROWS_AS(population_from_counts(0, 0, 0, 0, ProposalMode::Hard), ConfigError);
    CHECK_THROWS_AS(population_from_counts(-1, 1, 1, 1, ProposalMode::Hard), ConfigError);
}

TEST_CASE("proposal distributions sum to one")
{
    const auto space = enumerate_models(3);
    for (auto mode : {ProposalMode::Hard, ProposalMode::Soft})
        for (auto st : {Strategy::Tess, Strategy::Mave, Strategy::Bo})
            for (auto res : {HardResidual::Self, HardResidual::Renormalize})
                for (std::size_t g = 0; g < space.size(); ++g) {
                    auto d = proposal_distribution(st, g, space, mode, res);
                    CHECK(total(d) == doctest::Approx(1.0).epsilon(1e-14));
                    if (mode == ProposalMode::Soft)
                        for (double x : d)
                            CHECK(x > 0.0);
                }
    CHECK_THROWS_AS(proposal_distribution(Strategy::Rey, 0, space, ProposalMode::Hard), ConfigError);
}

TEST_CASE("proposal weights by hand")
{
    const auto space = enumerate_models(3);
    const auto x1 = space.index_of("x1");
    const auto a = space.index_of("x1 + x2"), b = space.index_of("x1 + x3");

    auto hard = proposal_distribution(Strategy::Tess, x1, space, ProposalMode::Hard, HardResidual::Self);
    CHECK(hard[a] == doctest::Approx(1.0 / 3));
    CHECK(hard[b] == doctest::Approx(1.0 / 3));
    CHECK(hard[x1] == doctest::Approx(1.0 / 3));

    auto renorm = proposal_distribution(Strategy::Tess, x1, space, ProposalMode::Hard, HardResidual::Renormalize);
    CHECK(renorm[a] == 0.5);
    CHECK(renorm[x1] == 0.0);

    auto soft = proposal_distribution(Strategy::Tess, x1, space, ProposalMode::Soft);
    CHECK(soft[a] == doctest::Approx(1.0 / 3));
    CHECK(soft[x1] == doctest::Approx(1.0 / 36));

    auto mave = proposal_distribution(Strategy::Mave, x1, space, ProposalMode::Hard);
    for (double x : mave)
        CHECK(x == doctest::Approx(1.0 / 14));

    const auto full = space.size() - 1;
    auto stuck = proposal_distribution(Strategy::Bo, full, space, ProposalMode::Hard);
    CHECK(stuck[full] == 1.0);
    auto soft_full = proposal_distribution(Strategy::Bo, full, space, ProposalMode::Soft);
    CHECK(soft_full[0] == doctest::Approx(1.0 / 14));
}

TEST_CASE("proposal table matches direct computation")
{
    const auto space = enumerate_models(3);
    ProposalTable table(space, ProposalMode::Soft);
    for (auto st : {Strategy::Tess, Strategy::Mave, Strategy::Bo})
        for (std::size_t g = 0; g < space.size(); ++g)
            CHECK(table.get(st, g) == proposal_distribution(st, g, space, ProposalMode::Soft));
}

TEST_CASE("sampling follows the weights")
{
    RngStream rng(2, 2);
    auto pop = population_from_counts(1, 2, 3, 4, ProposalMode::Hard);
    std::array<int, 4> counts{};
    const int n = 100000;
    for (int i = 0; i < n; ++i)
        ++counts[static_cast<std::size_t>(sample_strategy(pop, rng))];
    for (int s = 0; s < 4; ++s)
        CHECK(counts[s] / double(n) == doctest::Approx((s + 1) / 10.0).epsilon(0.03));
}

TEST_CASE("names")
{
    CHECK(parse_strategy("tess") == Strategy::Tess);
    CHECK(to_string(Strategy::Bo) == "Bo");
    CHECK(parse_mode("soft") == ProposalMode::Soft);
    CHECK(to_string(ProposalMode::Hard) == "hard");
    CHECK(parse_hard_residual("renormalize") == HardResidual::Renormalize);
    CHECK_THROWS_AS(parse_mode("medium"), ConfigError);
}
