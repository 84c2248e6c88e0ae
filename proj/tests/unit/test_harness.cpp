// Copyright 2026 The discovery authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include <unistd.h>

#include <json.hpp>

#include "discovery/error.hpp"
#include "discovery/harness.hpp"

using namespace discovery;
namespace fs = std::filesystem;

namespace {

struct TempDir
{
    fs::path path;
    TempDir()
    {
        path = fs::temp_directory_path() / ("discovery-test-" + std::to_string(::getpid()) + "-"
                                            + std::to_string(counter++));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static inline int counter = 0;
};

RunConfig tiny_config(const fs::path& out)
{
    return parse_config("k = 2\n"
                        "replications = 2\n"
                        "timesteps = 40\n"
                        "burnIn = 4\n"
                        "sigma = 0.5\n"
                        "trueModel = x1 + x2\n"
                        "population = all-equal, mave-dominant\n"
                        "modelCompare = SC\n"
                        "workers = 1\n"
                        "output = "
                        + out.string() + "\n");
}

// Pearson correlation of average ranks, computed independently.
double rank_correlation(const std::vector<double>& x, const std::vector<double>& y)
{
    auto ranks = [](const std::vector<double>& v) {
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            double less = 0, equal = 0;
            for (double w : v) {
                less += w < v[i];
                equal += w == v[i];
            }
            r[i] = less + (equal + 1) / 2;
        }
        return r;
    };
    auto a = ranks(x), b = ranks(y);
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i] / a.size();
        mb += b[i] / b.size();
    }
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

} // namespace

TEST_CASE("config files")
{
    auto c = parse_config("# comment\n"
                          "replications = 7   # trailing\n"
                          "sigma = 0.2, 0.8\n"
                          "modelCompare = aic\n"
                          "nRey = 1\nnTess = 2\nnMave = 3\nnBo = 4\n"
                          "mode = soft\n"
                          "beta = fresh\n");
    CHECK(c.replications == 7);
    CHECK(c.sigma == std::vector<double>{0.2, 0.8});
    CHECK(c.statistics == std::vector<Statistic>{Statistic::AIC});
    REQUIRE(c.counts);
    CHECK((*c.counts)[3] == 4);
    CHECK(c.mode == ProposalMode::Soft);
    CHECK(c.beta_policy == BetaPolicy::FreshPerExperiment);
    CHECK(c.explicit_keys.count("sigma"));
    CHECK_FALSE(c.explicit_keys.count("k"));
    CHECK(config_value(c, "replications") == "7");
    CHECK_NOTHROW(validate(c));

    CHECK_THROWS_AS(parse_config("bogus = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("replications\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("replications = many\n"), ConfigError);
    CHECK_THROWS_AS(validate(parse_config("sigma = 1.5\n")), ConfigError);
    CHECK_THROWS_AS(validate(parse_config("sampleSize = 8\n")), ConfigError);
    CHECK_THROWS_AS(validate(parse_config("trueModel = x1 + x1x2\n")), ConfigError);
    CHECK_THROWS_AS(validate(parse_config("burnIn = 11000\n")), ConfigError);
}

TEST_CASE("default factorial size")
{
    RunConfig c;
    const auto space = enumerate_models(c.k);
    const auto cells = factorial_cells(c, space);
    CHECK(cells.size() == 90);
    CHECK(cells.size() * static_cast<std::size_t>(c.replications) == 9000);
    CHECK(cells.front().true_model == "x1 + x2");
    CHECK(cells.front().statistic == Statistic::AIC);
    CHECK(cells[1].statistic == Statistic::SC);
    CHECK(cells[2].population == "tess-dominant");
}

TEST_CASE("other k use the whole space by default")
{
    auto c = parse_config("k = 2\nsampleSize = 50\n");
    CHECK_NOTHROW(validate(c));
    CHECK(factorial_cells(c, enumerate_models(2)).size() == 3 * 3 * 5 * 2);
}

TEST_CASE("quantiles use linear interpolation")
{
    const std::vector<double> v{100, 3, 1, 4, 2};
    CHECK(quantile(v, 0.5) == 3.0);
    CHECK(quantile(v, 0.25) == 2.0);
    CHECK(quantile(v, 0.75) == 4.0);
    CHECK(quantile(v, 0.1) == doctest::Approx(1.4));
    CHECK(quantile(v, 0.9) == doctest::Approx(61.6));
    CHECK(quantile({5}, 0.3) == 5.0);
    CHECK_THROWS_AS(quantile({}, 0.5), ConfigError);
}

TEST_CASE("spearman")
{
    CHECK(*spearman({1, 2, 3, 4, 5}, {2, 1, 4, 3, 5}) == doctest::Approx(0.8));
    CHECK(*spearman({1, 2, 3}, {30, 20, 10}) == doctest::Approx(-1.0));
    CHECK_FALSE(spearman({1, 1, 1, 1}, {1, 2, 3, 4}));
    CHECK_THROWS_AS(spearman({1, 2}, {1, 2}), ConfigError);
    CHECK_THROWS_AS(spearman({1, 2, 3}, {1, 2}), ConfigError);

    RngStream rng(1, 1);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> x(30), y(30);
        for (int i = 0; i < 30; ++i) {
            x[i] = static_cast<double>(rng.uniform_index(6));
            y[i] = x[i] + static_cast<double>(rng.uniform_index(4));
        }
        CHECK(*spearman(x, y) == doctest::Approx(rank_correlation(x, y)).epsilon(1e-12));
    }
}

TEST_CASE("summary table")
{
    csv::Table t;
    t.header = result_columns();
    auto row = [&](const std::string& pop, const std::string& rep, double time, const std::string& status,
                   const std::string& stick) {
        csv::Row r(t.header.size(), "");
        r[0] = "x1 + x2";
        r[1] = "0.2";
        r[2] = pop;
        r[3] = "SC";
        r[4] = "hard";
        r[5] = rep;
        r[8] = status;
        r[11] = csv::format_double(time);
        r[12] = "10";
        r[13] = "0";
        r[14] = stick;
        t.rows.push_back(r);
    };
    row("a", "0", 0.1, "ok", "0.5");
    row("a", "1", 0.3, "ok", "NA");
    row("a", "2", 0.9, "error", "1");
    row("b", "0", 0.4, "ok", "NA");
    SummaryOptions opt;
    opt.metrics = {"time_at_true", "stickiness"};
    std::vector<std::string> warnings;
    auto s = summarize(t, opt, &warnings);
    // group b has no stickiness values
    CHECK(s.rows.size() == 3);
    CHECK(warnings.size() == 1);
    const auto mean = s.require_column("mean"), n = s.require_column("n"), missing = s.require_column("missing");
    CHECK(s.rows[0][s.require_column("population")] == "a");
    CHECK(s.rows[0][s.require_column("metric")] == "time_at_true");
    CHECK(std::stod(s.rows[0][mean]) == doctest::Approx(0.2));
    CHECK(s.rows[0][n] == "2");
    CHECK(s.rows[1][n] == "1");
    CHECK(s.rows[1][missing] == "1");
    CHECK(s.rows[2][s.require_column("population")] == "b");
}

TEST_CASE("factorial sweep resumes and is idempotent")
{
    TempDir dir;
    const auto out = dir.path / "r.csv";
    auto config = tiny_config(out);
    auto first = run_factorial(config);
    CHECK(first.computed == 4);
    CHECK(first.reused == 0);
    CHECK(first.failed == 0);
    const auto text = csv::read_file(out.string());
    CHECK_FALSE(fs::exists(out.string() + ".partial"));

    auto second = run_factorial(config);
    CHECK(second.computed == 0);
    CHECK(second.reused == 4);
    CHECK(csv::read_file(out.string()) == text);

    // an interrupted run leaves a journal; only the missing rows are recomputed
    auto table = csv::parse_table(text);
    csv::Table partial{table.header, {table.rows[0], table.rows[3]}};
    fs::remove(out);
    csv::write_file_atomic(out.string() + ".partial", csv::format_table(partial));
    auto third = run_factorial(config);
    CHECK(third.reused == 2);
    CHECK(third.computed == 2);
    CHECK(csv::read_file(out.string()) == text);

    // in memory, with more workers, gives the same rows
    config.workers = 3;
    auto mem = run_factorial_in_memory(config);
    CHECK(mem.rows == table.rows);

    // settings that change results invalidate old rows
    config.timesteps = 41;
    auto fourth = run_factorial(config);
    CHECK(fourth.computed == 4);
    CHECK(fourth.reused == 0);
}

TEST_CASE("sidecar metadata")
{
    TempDir dir;
    const auto out = (dir.path / "r.csv").string();
    auto config = tiny_config(out);
    write_metadata(out, "abm", config, 1.5, {{"rows", "4"}});
    auto j = nlohmann::json::parse(csv::read_file(out + ".json"));
    CHECK(j["command"] == "abm");
    CHECK(j["seed"] == 1);
    CHECK(j["version"] == version());
    CHECK(j["config"]["timesteps"] == "40");
    CHECK(j["timing"]["elapsed_seconds"] == 1.5);
    CHECK(j["rows"] == "4");
}

TEST_CASE("chain report")
{
    TempDir dir;
    auto config = parse_config("k = 2\nsigma = 0.5\nmodelCompare = SC\nwinSamples = 300\ntrueModel = x1 + x2\n"
                               "cacheDir = "
                               + (dir.path / "cache").string() + "\n");
    auto report = analyze_chain(config);
    CHECK(report.cells.rows.size() == 4); // four presets without the replicator
    CHECK(report.models.rows.size() == 4 * 3);
    CHECK(report.transitions.rows.size() == 4 * 9);
    CHECK(report.win_matrices_computed == 1);
    auto again = analyze_chain(config);
    CHECK(again.win_matrices_cached == 1);
    CHECK(again.cells.rows == report.cells.rows);

    auto paths = write_chain_report(report, (dir.path / "chain.csv").string());
    REQUIRE(paths.size() == 3);
    for (const auto& p : paths)
        CHECK(fs::exists(p));
    CHECK(paths[1].ends_with("chain_models.csv"));

    config.populations = {"rey-dominant"};
    config.explicit_keys.insert("population");
    CHECK_THROWS_AS(analyze_chain(config), ConfigError);
}
