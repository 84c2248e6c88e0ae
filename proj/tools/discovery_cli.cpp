// Copyright 2026 The discovery authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. Talks to the simulator only through discovery.h.
#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "discovery/discovery.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

struct Failure
{
    int status;
    std::string message;
};

void check(int status)
{
    if (status != DSC_OK)
        throw Failure{status, dsc_last_error()};
}

int exit_code(int status)
{
    return status == DSC_ERR_INVALID_ARGUMENT || status == DSC_ERR_CONFIG ? kExitValidation : kExitRuntime;
}

using ConfigPtr = std::unique_ptr<dsc_config, decltype(&dsc_config_destroy)>;

ConfigPtr make_config(const std::string& file, const std::vector<std::string>& sets)
{
    dsc_config* raw = nullptr;
    check(dsc_config_create(&raw));
    ConfigPtr config(raw, &dsc_config_destroy);
    if (!file.empty())
        check(dsc_config_load_file(config.get(), file.c_str()));
    for (const auto& s : sets) {
        auto eq = s.find('=');
        if (eq == std::string::npos)
            throw Failure{DSC_ERR_CONFIG, "--set expects key=value, got '" + s + "'"};
        check(dsc_config_set(config.get(), s.substr(0, eq).c_str(), s.substr(eq + 1).c_str()));
    }
    return config;
}

std::string config_get(const dsc_config* config, const char* key)
{
    std::size_t needed = 0;
    check(dsc_config_get(config, key, nullptr, 0, &needed));
    std::string out(needed, '\0');
    check(dsc_config_get(config, key, out.data(), out.size(), &needed));
    out.resize(needed - 1);
    return out;
}

std::string model_string(const dsc_space* space, std::size_t i)
{
    std::size_t needed = 0;
    check(dsc_space_model_string(space, i, nullptr, 0, &needed));
    std::string out(needed, '\0');
    check(dsc_space_model_string(space, i, out.data(), out.size(), &needed));
    out.resize(needed - 1);
    return out;
}

std::string utc_now()
{
    std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

void write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out)
        throw Failure{DSC_ERR_IO, "cannot write " + path};
}

void progress_bar(size_t done, size_t total, void*)
{
    if (done == total || done % 25 == 0)
        std::fprintf(stderr, "\r%zu/%zu", done, total);
    if (done == total)
        std::fputc('\n', stderr);
}

void print_criterion(const dsc_criterion* c, void*)
{
    std::printf("%s  criterion %2d%s  %-48s %7.1fs  %s\n", c->passed ? "PASS" : "FAIL", c->id,
                c->gating ? " " : "*", c->title, c->seconds, c->detail);
    std::fflush(stdout);
}

int cmd_enumerate(int k, const std::string& output)
{
    const auto t0 = std::chrono::steady_clock::now();
    dsc_space* raw = nullptr;
    check(dsc_space_create(k, &raw));
    std::unique_ptr<dsc_space, decltype(&dsc_space_destroy)> space(raw, &dsc_space_destroy);

    std::ostringstream csv;
    csv << "index,model,parameters,highest_order\n";
    for (std::size_t i = 0; i < dsc_space_size(space.get()); ++i) {
        int params = 0, order = 0;
        check(dsc_space_model_shape(space.get(), i, &params, &order));
        csv << i << ",\"" << model_string(space.get(), i) << "\"," << params << ',' << order << '\n';
    }
    if (output.empty() || output == "-") {
        std::cout << csv.str();
        return kExitOk;
    }
    write_text(output, csv.str());
    nlohmann::ordered_json meta;
    meta["tool"] = "discovery";
    meta["version"] = dsc_version();
    meta["command"] = "enumerate";
    meta["seed"] = nullptr;
    meta["config"] = {{"k", k}};
    meta["timing"] = {{"finished_utc", utc_now()},
                      {"elapsed_seconds",
                       std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()}};
    write_text(output + ".json", meta.dump(2) + "\n");
    std::fprintf(stderr, "%zu models written to %s\n", dsc_space_size(space.get()), output.c_str());
    return kExitOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Simulated scientific discovery: model space, chain analysis and agent-based sweeps"};
    app.set_version_flag("--version", std::string(dsc_version()));
    app.require_subcommand(1);

    std::string config_file;
    std::vector<std::string> sets;
    auto add_config_opts = [&](CLI::App* sub) {
        sub->add_option("-c,--config", config_file, "key = value configuration file")->check(CLI::ExistingFile);
        sub->add_option("-s,--set", sets, "override one key, e.g. --set sigma=0.2,0.5");
    };

    int k = 3;
    std::string enum_output;
    auto* enumerate = app.add_subcommand("enumerate", "list every admissible model for k factors");
    enumerate->add_option("-k,--k", k, "number of factors")->check(CLI::Range(1, 5));
    enumerate->add_option("-o,--output", enum_output, "CSV path; stdout when omitted");

    std::string output;
    int workers = -1;
    std::string cache_dir;
    bool quiet = false;

    auto* chain = app.add_subcommand("chain", "Markov-chain analysis of the process without replication");
    add_config_opts(chain);
    chain->add_option("-o,--output", output, "per-cell CSV (default chain.csv)");
    chain->add_option("--cache-dir", cache_dir, "directory for cached win matrices");
    chain->add_option("-j,--workers", workers, "worker threads (0 = all cores)");

    auto* abm = app.add_subcommand("abm", "factorial agent-based sweep");
    add_config_opts(abm);
    abm->add_option("-o,--output", output, "results CSV");
    abm->add_option("-j,--workers", workers, "worker threads (0 = all cores)");
    abm->add_flag("-q,--quiet", quiet, "no progress output");

    std::string input, group_by = "population", metrics, spearman_output;
    bool cell_means = false;
    auto* summarize = app.add_subcommand("summarize", "summary statistics of a results CSV");
    summarize->add_option("input", input, "results CSV")->required()->check(CLI::ExistingFile);
    summarize->add_option("-o,--output", output, "summary CSV")->required();
    summarize->add_option("-g,--group-by", group_by, "comma-separated grouping columns");
    summarize->add_option("-m,--metrics", metrics, "comma-separated metrics (default: all six)");
    summarize->add_flag("--cell-means", cell_means, "average replications within each cell first");
    summarize->add_option("--spearman", spearman_output, "also write Spearman correlations here");

    dsc_verify_options vopt;
    dsc_verify_options_init(&vopt);
    std::vector<int> only;
    std::string verify_output;
    std::uint64_t vseed = vopt.seed;
    int vreps = vopt.sweep_replications;
    long vsteps = vopt.sweep_timesteps;
    auto* verify = app.add_subcommand("verify", "run the acceptance criteria");
    verify->add_option("--only", only, "criterion ids to run")->delimiter(',');
    verify->add_option("--seed", vseed, "root seed");
    verify->add_option("-j,--workers", workers, "worker threads (0 = all cores)");
    verify->add_option("--cache-dir", cache_dir, "directory for cached win matrices");
    verify->add_option("--replications", vreps, "replications per cell in the sweeps")->check(CLI::PositiveNumber);
    verify->add_option("--timesteps", vsteps, "timesteps per sweep run")->check(CLI::Range(12L, 10000000L));
    verify->add_option("-o,--output", verify_output, "results CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (*enumerate)
            return cmd_enumerate(k, enum_output);

        if (*chain || *abm) {
            auto config = make_config(config_file, sets);
            if (!output.empty())
                check(dsc_config_set(config.get(), "output", output.c_str()));
            else if (*chain && !dsc_config_is_set(config.get(), "output"))
                check(dsc_config_set(config.get(), "output", "chain.csv"));
            if (workers >= 0)
                check(dsc_config_set(config.get(), "workers", std::to_string(workers).c_str()));
            if (!cache_dir.empty())
                check(dsc_config_set(config.get(), "cacheDir", cache_dir.c_str()));
            check(dsc_config_validate(config.get()));

            dsc_sweep_stats stats{};
            const std::string out = config_get(config.get(), "output");
            if (*chain) {
                check(dsc_run_chain(config.get(), &stats));
                std::fprintf(stderr, "%zu cells written to %s (%zu win matrices computed, %zu cached, %.1fs)\n",
                             stats.rows, out.c_str(), stats.computed, stats.reused, stats.seconds);
                return kExitOk;
            }
            check(dsc_run_abm(config.get(), quiet ? nullptr : progress_bar, nullptr, &stats));
            std::fprintf(stderr, "%zu rows written to %s (%zu computed, %zu reused, %zu failed, %.1fs)\n", stats.rows,
                         out.c_str(), stats.computed, stats.reused, stats.failed, stats.seconds);
            return stats.failed ? kExitRuntime : kExitOk;
        }

        if (*summarize) {
            check(dsc_summarize(input.c_str(), output.c_str(), group_by.c_str(),
                                metrics.empty() ? nullptr : metrics.c_str(), cell_means ? 1 : 0,
                                spearman_output.empty() ? nullptr : spearman_output.c_str()));
            return kExitOk;
        }

        if (*verify) {
            vopt.seed = vseed;
            vopt.workers = workers < 0 ? 0 : workers;
            vopt.cache_dir = cache_dir.empty() ? nullptr : cache_dir.c_str();
            vopt.sweep_replications = vreps;
            vopt.sweep_timesteps = vsteps;
            vopt.only = only.empty() ? nullptr : only.data();
            vopt.only_count = only.size();
            vopt.output = verify_output.empty() ? nullptr : verify_output.c_str();
            int failed = 0;
            check(dsc_verify(&vopt, print_criterion, nullptr, &failed));
            std::printf("%d gating criteria failed\n", failed);
            return failed ? kExitRuntime : kExitOk;
        }
    } catch (const Failure& f) {
        std::fprintf(stderr, "error: %s: %s\n", dsc_status_name(f.status), f.message.c_str());
        return exit_code(f.status);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntime;
    }
    return kExitOk;
}
