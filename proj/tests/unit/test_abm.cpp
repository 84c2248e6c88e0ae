// Copyright 2026 The discovery authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <set>

#include "discovery/abm.hpp"
#include "discovery/error.hpp"

using namespace discovery;

namespace {

// Winners after each of 20 steps, starting from model 0; truth is model 1.
// Replications at t = 4 (inside burn-in), 8, 9, 11, 16, 18.
std::vector<ExperimentRecord> fixture()
{
    const int winners[20] = {0, 0, 1, 1, 1, 0, 1, 1, 1, 0, 0, 1, 1, 1, 1, 0, 0, 0, 1, 1};
    const std::set<int> reps{4, 8, 9, 11, 16, 18};
    std::vector<ExperimentRecord> out;
    std::size_t global = 0;
    for (int t = 0; t < 20; ++t) {
        ExperimentRecord r;
        r.t = t;
        r.incumbent = global;
        r.proposed = static_cast<std::size_t>(winners[t]);
        r.winner = static_cast<std::size_t>(winners[t]);
        r.was_replication = reps.count(t) > 0;
        if (r.was_replication)
            r.reproduced = r.winner == global;
        out.push_back(r);
        global = r.winner;
    }
    return out;
}

CellSpec small_cell(const ModelSpace& space, const char* population, ProposalMode mode = ProposalMode::Hard)
{
    CellSpec c;
    c.true_model = parse_model("x1 + x2", space.k());
    c.population = population_preset(population, true, mode);
    c.timesteps = 300;
    c.burn_in = 50;
    return c;
}

} // namespace

TEST_CASE("metrics of a hand-checked trajectory")
{
    const auto recs = fixture();
    const auto m = compute_metrics(recs, 1, 5);
    // global before step t: 0 0 0 1 1 | 1 0 1 1 1 0 0 1 1 1 1 0 0 0 1
    CHECK(m.first_passage == 3);
    CHECK_FALSE(m.censored);
    CHECK(m.time_at_true == doctest::Approx(9.0 / 15));
    REQUIRE(m.stickiness);
    CHECK(*m.stickiness == doctest::Approx(6.0 / 9));
    CHECK(m.replications == 5);
    CHECK(m.replications_at_true == 2);
    CHECK(m.replications_not_true == 3);
    CHECK(*m.repro_overall == doctest::Approx(0.4));
    CHECK(*m.repro_at_true == doctest::Approx(0.5));
    CHECK(*m.repro_not_true == doctest::Approx(1.0 / 3));
}

TEST_CASE("first passage edge cases")
{
    auto recs = fixture();
    auto never = compute_metrics(recs, 7, 5);
    CHECK(never.censored);
    CHECK(never.first_passage == 20);
    CHECK(never.time_at_true == 0.0);
    CHECK_FALSE(never.stickiness);
    CHECK_FALSE(never.repro_at_true);

    auto start = compute_metrics(recs, 0, 0);
    CHECK(start.first_passage == 0);

    // reached only by the last step
    for (auto& r : recs) {
        r.winner = r.incumbent = r.proposed = 0;
        r.was_replication = false;
    }
    recs.back().winner = 3;
    auto late = compute_metrics(recs, 3, 0);
    CHECK(late.first_passage == 20);
    CHECK_FALSE(late.censored);
    CHECK_FALSE(late.repro_overall);
    CHECK_THROWS_AS(compute_metrics({}, 0, 0), ConfigError);
}

TEST_CASE("runs are reproducible and internally consistent")
{
    const auto space = enumerate_models(3);
    auto cell = small_cell(space, "all-equal");
    auto a = run(space, cell, 99, 5, true);
    auto b = run(space, cell, 99, 5, true);
    auto c = run(space, cell, 99, 6, true);
    REQUIRE(a.trajectory.size() == 300);
    CHECK(a.initial_global == b.initial_global);
    bool differs = a.initial_global != c.initial_global;
    std::size_t global = a.initial_global;
    for (std::size_t t = 0; t < a.trajectory.size(); ++t) {
        const auto& r = a.trajectory[t];
        CHECK(r.winner == b.trajectory[t].winner);
        differs = differs || r.winner != c.trajectory[t].winner;
        CHECK((r.winner == r.proposed || r.winner == r.incumbent));
        if (r.was_replication) {
            CHECK(r.strategy == Strategy::Rey);
            REQUIRE(t > 0);
            CHECK(r.proposed == a.trajectory[t - 1].proposed);
            CHECK(r.incumbent == a.trajectory[t - 1].incumbent);
            CHECK(*r.reproduced == (r.winner == global));
        } else {
            CHECK(r.incumbent == global);
            CHECK_FALSE(r.reproduced);
        }
        global = r.winner;
    }
    CHECK(differs);

    auto again = compute_metrics(a.trajectory, space.index_of("x1 + x2"), 50);
    CHECK(again.time_at_true == a.metrics.time_at_true);
    CHECK(again.replications == a.metrics.replications);
}

TEST_CASE("hard mode keeps non-replicating proposals in the neighborhood")
{
    const auto space = enumerate_models(3);
    auto cell = small_cell(space, "tess-dominant");
    cell.population = population_from_counts(0, 1, 0, 0, ProposalMode::Hard);
    auto r = run(space, cell, 3, 3, true);
    for (const auto& rec : r.trajectory) {
        auto hood = tess_neighbors(rec.incumbent, space);
        bool ok = rec.proposed == rec.incumbent;
        for (auto j : hood)
            ok = ok || j == rec.proposed;
        CHECK(ok);
    }
}

TEST_CASE("fresh coefficients per experiment")
{
    const auto space = enumerate_models(2);
    CellSpec cell;
    cell.true_model = parse_model("x1 + x2", 2);
    cell.population = population_preset("mave-dominant", false, ProposalMode::Hard);
    cell.timesteps = 200;
    cell.burn_in = 20;
    cell.beta_policy = BetaPolicy::FreshPerExperiment;
    auto a = run(space, cell, 1, 1);
    auto b = run(space, cell, 1, 1);
    CHECK(a.metrics.time_at_true == b.metrics.time_at_true);
    CHECK(a.metrics.time_at_true > 0.3);
}

TEST_CASE("cell validation")
{
    const auto space = enumerate_models(3);
    auto cell = small_cell(space, "all-equal");
    CHECK_NOTHROW(validate(cell, space));
    auto bad = cell;
    bad.population = population_from_counts(1, 0, 0, 0, ProposalMode::Hard);
    CHECK_THROWS_AS(validate(bad, space), ConfigError);
    bad = cell;
    bad.burn_in = bad.timesteps;
    CHECK_THROWS_AS(validate(bad, space), ConfigError);
    bad = cell;
    bad.timesteps = 0;
    CHECK_THROWS_AS(validate(bad, space), ConfigError);
    bad = cell;
    bad.true_model = parse_model("x1 + x2", 2);
    CHECK_THROWS_AS(validate(bad, space), ConfigError);
    bad = cell;
    bad.sigma_level = 0.0;
    CHECK_THROWS_AS(validate(bad, space), ConfigError);
}

TEST_CASE("trajectory csv")
{
    const auto space = enumerate_models(3);
    auto text = trajectory_to_csv(fixture(), space);
    CHECK(text.rfind("t,", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 21);
}
