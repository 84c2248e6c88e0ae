// Copyright 2026 The discovery authors
// SPDX-License-Identifier: Apache-2.0
//
// Exercises the shared library through its C header only.
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "discovery/discovery.h"

namespace fs = std::filesystem;

TEST_CASE("version and status names")
{
    CHECK(std::string(dsc_version()).size() > 0);
    CHECK(std::string(dsc_status_name(DSC_OK)) == "ok");
    CHECK(std::string(dsc_status_name(DSC_ERR_CONFIG)) == "configuration error");
    CHECK(std::string(dsc_status_name(12345)) == "unknown status");
}

TEST_CASE("model space handle")
{
    dsc_space* space = nullptr;
    REQUIRE(dsc_space_create(3, &space) == DSC_OK);
    CHECK(dsc_space_size(space) == 14);
    CHECK(dsc_space_factors(space) == 3);

    std::size_t needed = 0;
    CHECK(dsc_space_model_string(space, 1, nullptr, 0, &needed) == DSC_OK);
    CHECK(needed == std::string("x1 + x2").size() + 1);
    std::vector<char> buf(needed);
    CHECK(dsc_space_model_string(space, 1, buf.data(), buf.size(), &needed) == DSC_OK);
    CHECK(std::string(buf.data()) == "x1 + x2");
    char small[3];
    CHECK(dsc_space_model_string(space, 1, small, sizeof small, &needed) == DSC_ERR_BUFFER_TOO_SMALL);

    int params = 0, order = 0;
    CHECK(dsc_space_model_shape(space, 13, &params, &order) == DSC_OK);
    CHECK(params == 7);
    CHECK(order == 3);

    std::size_t index = 99;
    CHECK(dsc_space_parse_model(space, "x1 + x2", &index) == DSC_OK);
    CHECK(index == 1);
    CHECK(dsc_space_parse_model(space, "x1 + x1x2", &index) == DSC_ERR_CONFIG);
    CHECK(std::string(dsc_last_error()).size() > 0);
    CHECK(dsc_space_model_string(space, 14, buf.data(), buf.size(), &needed) == DSC_ERR_INVALID_ARGUMENT);
    CHECK(dsc_space_model_shape(nullptr, 0, &params, &order) == DSC_ERR_INVALID_ARGUMENT);
    dsc_space_destroy(space);

    CHECK(dsc_space_create(0, &space) == DSC_ERR_CONFIG);
    CHECK(space == nullptr);
    CHECK(dsc_space_create(3, nullptr) == DSC_ERR_INVALID_ARGUMENT);
    dsc_space_destroy(nullptr);
}

TEST_CASE("configuration handle")
{
    dsc_config* config = nullptr;
    REQUIRE(dsc_config_create(&config) == DSC_OK);
    CHECK(dsc_config_is_set(config, "sigma") == 0);
    CHECK(dsc_config_set(config, "sigma", "0.2,0.8") == DSC_OK);
    CHECK(dsc_config_is_set(config, "sigma") == 1);
    char buf[64];
    std::size_t needed = 0;
    CHECK(dsc_config_get(config, "sigma", buf, sizeof buf, &needed) == DSC_OK);
    CHECK(std::string(buf) == "0.2,0.8");
    CHECK(dsc_config_set(config, "nonsense", "1") == DSC_ERR_CONFIG);
    CHECK(dsc_config_set(config, "k", "lots") == DSC_ERR_CONFIG);
    CHECK(dsc_config_validate(config) == DSC_OK);
    CHECK(dsc_config_set(config, "sampleSize", "5") == DSC_OK);
    CHECK(dsc_config_validate(config) == DSC_ERR_CONFIG);
    CHECK(dsc_config_load_file(config, "/nonexistent/discovery.conf") == DSC_ERR_IO);
    dsc_config_destroy(config);
}

TEST_CASE("sweep, summary and chain through the C interface")
{
    const fs::path dir = fs::temp_directory_path() / ("discovery-capi-" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string conf = (dir / "run.conf").string();
    std::ofstream(conf) << "k = 2\nreplications = 2\ntimesteps = 30\nburnIn = 3\nsigma = 0.5\n"
                           "population = all-equal\nmodelCompare = SC\nwinSamples = 200\n";

    dsc_config* config = nullptr;
    REQUIRE(dsc_config_create(&config) == DSC_OK);
    REQUIRE(dsc_config_load_file(config, conf.c_str()) == DSC_OK);
    const std::string out = (dir / "results.csv").string();
    REQUIRE(dsc_config_set(config, "output", out.c_str()) == DSC_OK);

    std::size_t calls = 0;
    dsc_sweep_stats stats{};
    auto progress = [](size_t, size_t, void* user) { ++*static_cast<std::size_t*>(user); };
    REQUIRE(dsc_run_abm(config, progress, &calls, &stats) == DSC_OK);
    CHECK(stats.rows == 3 * 2); // every k = 2 model as truth, two replications
    CHECK(stats.computed == stats.rows);
    CHECK(calls == stats.rows);
    CHECK(fs::exists(out + ".json"));

    const std::string summary = (dir / "summary.csv").string();
    const std::string rho = (dir / "rho.csv").string();
    CHECK(dsc_summarize(out.c_str(), summary.c_str(), "true_model,population", nullptr, 0, rho.c_str()) == DSC_OK);
    CHECK(fs::exists(summary));
    CHECK(fs::exists(rho));
    CHECK(dsc_summarize(out.c_str(), summary.c_str(), "nope", nullptr, 0, nullptr) == DSC_ERR_CONFIG);
    CHECK(dsc_summarize((dir / "missing.csv").string().c_str(), summary.c_str(), "population", nullptr, 0, nullptr)
          == DSC_ERR_IO);

    const std::string chain = (dir / "chain.csv").string();
    REQUIRE(dsc_config_set(config, "output", chain.c_str()) == DSC_OK);
    REQUIRE(dsc_run_chain(config, &stats) == DSC_OK);
    CHECK(stats.rows == 3);
    CHECK(fs::exists(dir / "chain_models.csv"));
    CHECK(fs::exists(dir / "chain_transitions.csv"));

    dsc_config_destroy(config);
    fs::remove_all(dir);
}

TEST_CASE("numerics")
{
    const double x[] = {1, 2, 3, 4, 5}, y[] = {2, 1, 4, 3, 5}, flat[] = {1, 1, 1, 1, 1};
    double rho = 0;
    int defined = -1;
    CHECK(dsc_spearman(x, y, 5, &rho, &defined) == DSC_OK);
    CHECK(defined == 1);
    CHECK(rho == doctest::Approx(0.8));
    CHECK(dsc_spearman(x, flat, 5, &rho, &defined) == DSC_OK);
    CHECK(defined == 0);
    CHECK(dsc_spearman(x, y, 2, &rho, &defined) == DSC_ERR_CONFIG);

    const double p[] = {0.5, 0.5, 0.0, 0.25, 0.5, 0.25, 0.0, 0.5, 0.5};
    double pi[3], tau[3];
    CHECK(dsc_stationary(p, 3, pi) == DSC_OK);
    CHECK(pi[1] == doctest::Approx(0.5));
    CHECK(dsc_mfpt(p, 3, 0, tau) == DSC_OK);
    CHECK(tau[2] == doctest::Approx(8.0));
    CHECK(dsc_mfpt(p, 3, 3, tau) == DSC_ERR_INVALID_ARGUMENT);
    const double stuck[] = {1, 0, 0, 1};
    CHECK(dsc_stationary(stuck, 2, pi) == DSC_ERR_ANALYSIS);
}

TEST_CASE("verify a single criterion")
{
    dsc_verify_options opt;
    dsc_verify_options_init(&opt);
    const int only[] = {1};
    opt.only = only;
    opt.only_count = 1;
    std::vector<int> seen;
    int failed = -1;
    auto cb = [](const dsc_criterion* c, void* user) { static_cast<std::vector<int>*>(user)->push_back(c->id); };
    CHECK(dsc_verify(&opt, cb, &seen, &failed) == DSC_OK);
    CHECK(failed == 0);
    CHECK(seen == std::vector<int>{1});
    opt.sweep_replications = 0;
    CHECK(dsc_verify(&opt, nullptr, nullptr, &failed) == DSC_ERR_CONFIG);
}
