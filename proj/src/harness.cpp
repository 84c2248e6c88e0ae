// Copyright 2026 The discovery authors
// SPDX-License-Identifier: Apache-2.0
#include "discovery/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "discovery/chain.hpp"
#include "discovery/error.hpp"
#include "discovery/parallel.hpp"
#include "discovery/rng.hpp"

namespace discovery {

namespace {

namespace fs = std::filesystem;

const std::vector<std::string> kChainPresets{"tess-dominant", "mave-dominant", "bo-dominant", "all-equal"};

std::string trim(std::string_view s)
{
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos)
        return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view text)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto pos = text.find(',', start);
        if (pos == std::string_view::npos)
            pos = text.size();
        std::string item = trim(text.substr(start, pos - start));
        if (!item.empty())
            out.push_back(item);
        start = pos + 1;
    }
    return out;
}

template <class T>
T parse_number(std::string_view key, std::string_view text)
{
    std::string s = trim(text);
    T value{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw ConfigError("bad value '" + s + "' for " + std::string(key));
    return value;
}

std::string join_list(const std::vector<std::string>& items)
{
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i)
        out += (i ? "," : "") + items[i];
    return out;
}

std::string to_hex(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string format_optional(const std::optional<double>& v) { return v ? csv::format_double(*v) : "NA"; }

std::optional<double> parse_cell(const std::string& text)
{
    if (text.empty() || text == "NA")
        return std::nullopt;
    double v{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        return std::nullopt;
    return v;
}

std::vector<std::string> resolve_true_models(const RunConfig& config, const ModelSpace& space, bool default_all)
{
    std::vector<std::string> out;
    // The built-in list names k = 3 models; other k fall back to the whole space.
    const bool unset = !config.explicit_keys.count("trueModel");
    const bool all = (unset && (default_all || space.k() != 3))
                     || (config.true_models.size() == 1 && config.true_models[0] == "all");
    if (all) {
        for (const auto& m : space.models())
            out.push_back(m.to_string());
        return out;
    }
    for (const auto& s : config.true_models)
        out.push_back(parse_model(s, space.k()).to_string());
    return out;
}

std::vector<std::string> population_labels(const RunConfig& config, bool chain)
{
    if (config.counts) {
        const auto& c = *config.counts;
        return {"counts:" + std::to_string(c[0]) + "/" + std::to_string(c[1]) + "/" + std::to_string(c[2]) + "/"
                + std::to_string(c[3])};
    }
    if (chain && !config.explicit_keys.count("population"))
        return kChainPresets;
    return config.populations;
}

// Fingerprint of the settings that change a row's contents.
std::string result_fingerprint(const RunConfig& config)
{
    std::ostringstream ss;
    ss << "timesteps=" << config.timesteps << ";k=" << config.k << ";n=" << config.sample_size
       << ";correlation=" << csv::format_double(config.correlation) << ";ndec=" << config.ndec
       << ";burnIn=" << config.burn_in << ";seed=" << config.seed
       << ";hardResidual=" << (config.residual == HardResidual::Self ? "self" : "renormalize")
       << ";beta=" << (config.beta_policy == BetaPolicy::FixedPerRun ? "fixed" : "fresh")
       << ";schema=" << kResultSchemaVersion;
    return to_hex(hash_text(ss.str()));
}

struct Job
{
    std::size_t cell = 0;
    int replication = 0;
};

std::string job_key(const Cell& cell, int replication) { return cell.key() + "#" + std::to_string(replication); }

csv::Row run_row(const Cell& cell, int replication, const RunConfig& config, const ModelSpace& space,
                 const std::string& fingerprint)
{
    const std::uint64_t stream = derive_stream_id({hash_text("abm"), hash_text(cell.key()),
                                                   static_cast<std::uint64_t>(replication)});
    csv::Row row{cell.true_model,
                 csv::format_double(cell.sigma),
                 cell.population,
                 to_string(cell.statistic),
                 to_string(cell.mode),
                 std::to_string(replication),
                 std::to_string(stream),
                 fingerprint};
    try {
        AbmRun r = run(space, cell_spec(cell, config, space), config.seed, stream);
        const auto& m = r.metrics;
        row.insert(row.end(), {"ok", "", space[r.initial_global].to_string(), csv::format_double(m.time_at_true),
                               std::to_string(m.first_passage), m.censored ? "1" : "0", format_optional(m.stickiness),
                               format_optional(m.repro_overall), format_optional(m.repro_at_true),
                               format_optional(m.repro_not_true), std::to_string(m.replications),
                               std::to_string(m.replications_at_true), std::to_string(m.replications_not_true),
                               std::to_string(m.fit_retries)});
    } catch (const std::exception& e) {
        row.insert(row.end(), {"error", e.what(), "NA", "NA", "NA", "NA", "NA", "NA", "NA", "NA", "NA", "NA", "NA", "NA"});
    }
    return row;
}

std::vector<csv::Row> load_rows(const std::string& path)
{
    std::error_code ec;
    if (!fs::exists(path, ec))
        return {};
    try {
        auto table = csv::parse_table(csv::read_file(path));
        if (table.header != result_columns())
            return {};
        std::vector<csv::Row> out;
        for (auto& r : table.rows)
            if (r.size() == table.header.size())
                out.push_back(std::move(r));
        return out;
    } catch (const Error&) {
        return {};
    }
}

struct SweepPlan
{
    ModelSpace space;
    std::vector<Cell> cells;
    std::vector<Job> jobs;
    std::string fingerprint;
};

SweepPlan plan_sweep(const RunConfig& config)
{
    validate(config);
    SweepPlan plan{enumerate_models(config.k), {}, {}, result_fingerprint(config)};
    plan.cells = factorial_cells(config, plan.space);
    for (std::size_t c = 0; c < plan.cells.size(); ++c) {
        cell_spec(plan.cells[c], config, plan.space); // validates before any work
        for (int r = 0; r < config.replications; ++r)
            plan.jobs.push_back({c, r});
    }
    return plan;
}

std::string utc_now()
{
    std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace

std::string version() { return DISCOVERY_VERSION; }

void apply_setting(RunConfig& c, std::string_view raw_key, std::string_view value)
{
    const std::string key = trim(raw_key);
    const std::string v = trim(value);
    auto count_index = [](const std::string& k) -> int {
        if (k == "nRey")
            return 0;
        if (k == "nTess")
            return 1;
        if (k == "nMave")
            return 2;
        if (k == "nBo")
            return 3;
        return -1;
    };

    if (key == "replications")
        c.replications = parse_number<int>(key, v);
    else if (key == "timesteps")
        c.timesteps = parse_number<long>(key, v);
    else if (key == "k")
        c.k = parse_number<int>(key, v);
    else if (key == "sigma") {
        c.sigma.clear();
        for (const auto& s : split_list(v))
            c.sigma.push_back(parse_number<double>(key, s));
    } else if (key == "sampleSize")
        c.sample_size = parse_number<int>(key, v);
    else if (key == "trueModel")
        c.true_models = split_list(v);
    else if (key == "correlation")
        c.correlation = parse_number<double>(key, v);
    else if (key == "population")
        c.populations = split_list(v);
    else if (int idx = count_index(key); idx >= 0) {
        if (!c.counts)
            c.counts = std::array<long, 4>{0, 0, 0, 0};
        (*c.counts)[static_cast<std::size_t>(idx)] = parse_number<long>(key, v);
    } else if (key == "modelCompare") {
        c.statistics.clear();
        for (const auto& s : split_list(v)) {
            Statistic st = parse_statistic(s);
            if (std::find(c.statistics.begin(), c.statistics.end(), st) == c.statistics.end())
                c.statistics.push_back(st);
        }
    } else if (key == "ndec")
        c.ndec = parse_number<int>(key, v);
    else if (key == "mode")
        c.mode = parse_mode(v);
    else if (key == "burnIn")
        c.burn_in = parse_number<long>(key, v);
    else if (key == "seed")
        c.seed = parse_number<std::uint64_t>(key, v);
    else if (key == "output")
        c.output = v;
    else if (key == "workers")
        c.workers = parse_number<int>(key, v);
    else if (key == "hardResidual")
        c.residual = parse_hard_residual(v);
    else if (key == "winSamples")
        c.win_samples = parse_number<int>(key, v);
    else if (key == "cacheDir")
        c.cache_dir = v;
    else if (key == "beta") {
        if (v == "fixed")
            c.beta_policy = BetaPolicy::FixedPerRun;
        else if (v == "fresh")
            c.beta_policy = BetaPolicy::FreshPerExperiment;
        else
            throw ConfigError("beta must be 'fixed' or 'fresh'");
    } else
        throw ConfigError("unknown configuration key '" + key + "'");
    c.explicit_keys.insert(key);
}

RunConfig parse_config(std::string_view text, RunConfig base)
{
    std::istringstream in{std::string(text)};
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.resize(hash);
        if (trim(line).empty())
            continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(number) + ": expected key = value");
        apply_setting(base, line.substr(0, eq), line.substr(eq + 1));
    }
    return base;
}

std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& c)
{
    std::vector<std::string> sig, stats;
    for (double s : c.sigma)
        sig.push_back(csv::format_double(s));
    for (Statistic s : c.statistics)
        stats.push_back(to_string(s));
    std::vector<std::pair<std::string, std::string>> out{
        {"replications", std::to_string(c.replications)},
        {"timesteps", std::to_string(c.timesteps)},
        {"k", std::to_string(c.k)},
        {"sigma", join_list(sig)},
        {"sampleSize", std::to_string(c.sample_size)},
        {"trueModel", join_list(c.true_models)},
        {"correlation", csv::format_double(c.correlation)},
        {"population", join_list(c.populations)},
    };
    if (c.counts) {
        const char* names[] = {"nRey", "nTess", "nMave", "nBo"};
        for (std::size_t i = 0; i < 4; ++i)
            out.emplace_back(names[i], std::to_string((*c.counts)[i]));
    }
    out.insert(out.end(), {
                              {"modelCompare", join_list(stats)},
                              {"ndec", std::to_string(c.ndec)},
                              {"mode", to_string(c.mode)},
                              {"burnIn", std::to_string(c.burn_in)},
                              {"seed", std::to_string(c.seed)},
                              {"output", c.output},
                              {"workers", std::to_string(c.workers)},
                              {"hardResidual", c.residual == HardResidual::Self ? "self" : "renormalize"},
                              {"winSamples", std::to_string(c.win_samples)},
                              {"cacheDir", c.cache_dir},
                              {"beta", c.beta_policy == BetaPolicy::FixedPerRun ? "fixed" : "fresh"},
                          });
    return out;
}

std::string config_value(const RunConfig& config, std::string_view key)
{
    for (const auto& [k, v] : config_entries(config))
        if (k == key)
            return v;
    if (key == "nRey" || key == "nTess" || key == "nMave" || key == "nBo")
        return "";
    throw ConfigError("unknown configuration key '" + std::string(key) + "'");
}

void validate(const RunConfig& c)
{
    if (c.replications < 1)
        throw ConfigError("replications must be positive");
    if (c.timesteps < 1)
        throw ConfigError("timesteps must be positive");
    if (c.burn_in < 0 || c.burn_in >= c.timesteps)
        throw ConfigError("burnIn must lie in [0, timesteps)");
    if (c.k < 1 || c.k > kMaxFactors)
        throw ConfigError("k must lie in [1, " + std::to_string(kMaxFactors) + "]");
    if (c.sigma.empty())
        throw ConfigError("sigma list is empty");
    for (double s : c.sigma)
        if (!(s > 0.0 && s < 1.0))
            throw ConfigError("sigma values must lie in (0, 1)");
    const int max_terms = (1 << c.k) - 1;
    if (c.sample_size < max_terms + 2)
        throw ConfigError("sampleSize must be at least " + std::to_string(max_terms + 2) + " for k = "
                          + std::to_string(c.k));
    if (!(c.correlation >= 0.0 && c.correlation < 0.9))
        throw ConfigError("correlation must lie in [0, 0.9)");
    if (c.true_models.empty())
        throw ConfigError("trueModel list is empty");
    if (!(c.true_models.size() == 1 && c.true_models[0] == "all") && (c.k == 3 || c.explicit_keys.count("trueModel")))
        for (const auto& m : c.true_models)
            parse_model(m, c.k);
    if (c.statistics.empty())
        throw ConfigError("modelCompare list is empty");
    if (c.ndec < -1 || c.ndec > 12)
        throw ConfigError("ndec must lie in [-1, 12] (-1 disables rounding)");
    if (c.workers < 0)
        throw ConfigError("workers must be nonnegative");
    if (c.win_samples < 1)
        throw ConfigError("winSamples must be positive");
    if (c.counts) {
        long total = 0;
        for (long n : *c.counts) {
            if (n < 0)
                throw ConfigError("population counts must be nonnegative");
            total += n;
        }
        if (total == 0)
            throw ConfigError("population counts are all zero");
    } else {
        if (c.populations.empty())
            throw ConfigError("population list is empty");
        for (const auto& p : c.populations)
            population_preset(p, true, c.mode);
    }
}

std::string Cell::key() const
{
    return true_model + "|" + csv::format_double(sigma) + "|" + population + "|" + to_string(statistic) + "|"
           + to_string(mode);
}

std::vector<Cell> factorial_cells(const RunConfig& config, const ModelSpace& space)
{
    std::vector<Cell> cells;
    for (const auto& tm : resolve_true_models(config, space, false))
        for (double s : config.sigma)
            for (const auto& pop : population_labels(config, false))
                for (Statistic st : config.statistics)
                    cells.push_back(Cell{tm, s, pop, st, config.mode});
    return cells;
}

Population cell_population(const Cell& cell, const RunConfig& config, bool with_replicator)
{
    if (cell.population.rfind("counts:", 0) == 0) {
        if (!config.counts)
            throw ConfigError("cell refers to counts but the config has none");
        const auto& c = *config.counts;
        return population_from_counts(c[0], c[1], c[2], c[3], cell.mode);
    }
    return population_preset(cell.population, with_replicator, cell.mode);
}

CellSpec cell_spec(const Cell& cell, const RunConfig& config, const ModelSpace& space)
{
    CellSpec spec;
    spec.true_model = parse_model(cell.true_model, space.k());
    spec.sigma_level = cell.sigma;
    spec.correlation = config.correlation;
    spec.n = config.sample_size;
    spec.population = cell_population(cell, config, true);
    spec.statistic = cell.statistic;
    spec.ndec = config.ndec;
    spec.residual = config.residual;
    spec.timesteps = config.timesteps;
    spec.burn_in = config.burn_in;
    spec.beta_policy = config.beta_policy;
    validate(spec, space);
    return spec;
}

const std::vector<std::string>& result_columns()
{
    static const std::vector<std::string> cols{
        "true_model",     "sigma",         "population",     "statistic",      "mode",
        "replication",    "seed",          "config_hash",    "status",         "error",
        "initial_model",  "time_at_true",  "first_passage",  "censored",       "stickiness",
        "repro_overall",  "repro_at_true", "repro_not_true", "n_replications", "n_replications_at_true",
        "n_replications_not_true", "fit_retries"};
    return cols;
}

csv::Table run_factorial_in_memory(const RunConfig& config)
{
    SweepPlan plan = plan_sweep(config);
    csv::Table table;
    table.header = result_columns();
    table.rows.resize(plan.jobs.size());
    parallel_for(plan.jobs.size(), config.workers, [&](std::size_t i) {
        const Job& j = plan.jobs[i];
        table.rows[i] = run_row(plan.cells[j.cell], j.replication, config, plan.space, plan.fingerprint);
    });
    return table;
}

FactorialSummary run_factorial(const RunConfig& config, const ProgressFn& progress)
{
    SweepPlan plan = plan_sweep(config);
    const std::string journal_path = config.output + ".partial";
    const auto key_col = [](const csv::Row& r) {
        return r[0] + "|" + r[1] + "|" + r[2] + "|" + r[3] + "|" + r[4] + "#" + r[5];
    };

    std::unordered_map<std::string, csv::Row> done;
    for (auto* path : {&config.output, &journal_path})
        for (auto& r : load_rows(*path))
            if (r[7] == plan.fingerprint && r[8] == "ok")
                done.emplace(key_col(r), std::move(r));

    FactorialSummary summary;
    std::vector<std::size_t> pending;
    std::vector<csv::Row> rows(plan.jobs.size());
    for (std::size_t i = 0; i < plan.jobs.size(); ++i) {
        const Job& j = plan.jobs[i];
        auto it = done.find(job_key(plan.cells[j.cell], j.replication));
        if (it != done.end()) {
            rows[i] = it->second;
            ++summary.reused;
        } else {
            pending.push_back(i);
        }
    }

    if (!pending.empty()) {
        if (auto parent = fs::path(config.output).parent_path(); !parent.empty())
            fs::create_directories(parent);
        bool fresh_journal = load_rows(journal_path).empty();
        std::ofstream journal;
        if (fresh_journal) {
            journal.open(journal_path, std::ios::trunc);
            journal << csv::join(result_columns()) << "\n";
        } else {
            std::string existing = csv::read_file(journal_path);
            journal.open(journal_path, std::ios::app);
            if (!existing.empty() && existing.back() != '\n')
                journal << "\n";
        }
        if (!journal)
            throw IoError("cannot open journal " + journal_path);

        std::mutex mu;
        std::size_t finished = 0;
        parallel_for(pending.size(), config.workers, [&](std::size_t p) {
            const std::size_t i = pending[p];
            const Job& j = plan.jobs[i];
            csv::Row row = run_row(plan.cells[j.cell], j.replication, config, plan.space, plan.fingerprint);
            std::lock_guard lock(mu);
            journal << csv::join(row) << "\n";
            journal.flush();
            rows[i] = std::move(row);
            ++finished;
            if (progress)
                progress(finished, pending.size());
        });
        summary.computed = pending.size();
    }

    summary.table.header = result_columns();
    summary.table.rows = std::move(rows);
    for (const auto& r : summary.table.rows)
        summary.failed += r[8] != "ok";
    csv::write_file_atomic(config.output, csv::format_table(summary.table));
    std::error_code ec;
    fs::remove(journal_path, ec);
    return summary;
}

double quantile(std::vector<double> values, double prob)
{
    if (values.empty())
        throw ConfigError("quantile of an empty sample");
    if (!(prob >= 0.0 && prob <= 1.0))
        throw ConfigError("quantile probability must lie in [0, 1]");
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * prob;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

csv::Table summarize(const csv::Table& results, const SummaryOptions& options, std::vector<std::string>* warnings)
{
    if (results.rows.empty())
        throw ConfigError("results table is empty");
    auto requested = [&](const std::string& name, const char* what) {
        auto c = results.column(name);
        if (!c)
            throw ConfigError(std::string("unknown ") + what + " column '" + name + "'");
        return *c;
    };
    std::vector<std::size_t> group_cols;
    for (const auto& g : options.group_by)
        group_cols.push_back(requested(g, "group-by"));
    std::vector<std::size_t> metric_cols;
    for (const auto& m : options.metrics)
        metric_cols.push_back(requested(m, "metric"));
    const auto status_col = results.column("status");
    const auto censored_col = results.column("censored");
    std::vector<std::size_t> cell_cols;
    if (options.cell_means)
        for (const char* c : {"true_model", "sigma", "population", "statistic", "mode"})
            cell_cols.push_back(results.require_column(c));

    struct Acc
    {
        std::vector<double> values;
        std::size_t missing = 0;
        std::size_t censored = 0;
    };
    // group -> metric -> values; with cell_means the values are per-cell means
    std::map<std::vector<std::string>, std::vector<Acc>> groups;
    std::map<std::vector<std::string>, std::map<std::vector<std::string>, std::vector<std::vector<double>>>> cells;

    for (const auto& row : results.rows) {
        if (status_col && row[*status_col] != "ok")
            continue;
        std::vector<std::string> g;
        for (auto c : group_cols)
            g.push_back(row[c]);
        auto& accs = groups[g];
        accs.resize(metric_cols.size());
        const bool censored = censored_col && row[*censored_col] == "1";
        std::vector<std::string> ck;
        for (auto c : cell_cols)
            ck.push_back(row[c]);
        auto& cell_vals = cells[g][ck];
        cell_vals.resize(metric_cols.size());
        for (std::size_t m = 0; m < metric_cols.size(); ++m) {
            auto v = parse_cell(row[metric_cols[m]]);
            if (censored && options.metrics[m] == "first_passage")
                ++accs[m].censored;
            if (!v) {
                ++accs[m].missing;
                continue;
            }
            if (options.cell_means)
                cell_vals[m].push_back(*v);
            else
                accs[m].values.push_back(*v);
        }
    }
    if (options.cell_means)
        for (auto& [g, per_cell] : cells)
            for (auto& [ck, vals] : per_cell)
                for (std::size_t m = 0; m < vals.size(); ++m)
                    if (!vals[m].empty())
                        groups[g][m].values.push_back(std::accumulate(vals[m].begin(), vals[m].end(), 0.0)
                                                      / static_cast<double>(vals[m].size()));

    csv::Table out;
    out.header = options.group_by;
    for (const char* h : {"metric", "n", "missing", "mean", "median", "q1", "q3", "iqr", "censored"})
        out.header.push_back(h);
    for (const auto& [g, accs] : groups) {
        for (std::size_t m = 0; m < accs.size(); ++m) {
            const auto& a = accs[m];
            if (a.values.empty()) {
                if (warnings) {
                    std::string label;
                    for (const auto& s : g)
                        label += (label.empty() ? "" : "/") + s;
                    warnings->push_back("group '" + label + "' has no values for " + options.metrics[m]);
                }
                continue;
            }
            const double mean = std::accumulate(a.values.begin(), a.values.end(), 0.0)
                                 / static_cast<double>(a.values.size());
            const double q1 = quantile(a.values, 0.25), q3 = quantile(a.values, 0.75);
            csv::Row row = g;
            row.insert(row.end(), {options.metrics[m], std::to_string(a.values.size()), std::to_string(a.missing),
                                   csv::format_double(mean), csv::format_double(quantile(a.values, 0.5)),
                                   csv::format_double(q1), csv::format_double(q3), csv::format_double(q3 - q1),
                                   std::to_string(a.censored)});
            out.rows.push_back(std::move(row));
        }
    }
    return out;
}

std::optional<double> spearman(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size())
        throw ConfigError("spearman needs equal-length samples");
    if (x.size() < 3)
        throw ConfigError("spearman needs at least 3 pairs");
    auto ranks = [](const std::vector<double>& v) {
        std::vector<std::size_t> order(v.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < order.size();) {
            std::size_t j = i;
            while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]])
                ++j;
            const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
            for (std::size_t t = i; t <= j; ++t)
                r[order[t]] = avg;
            i = j + 1;
        }
        return r;
    };
    const auto rx = ranks(x), ry = ranks(y);
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx <= 0.0 || syy <= 0.0)
        return std::nullopt;
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

csv::Table correlations(const csv::Table& results, const std::string& group_by, const std::string& target,
                        const std::vector<std::string>& others)
{
    const auto gcol = results.require_column(group_by);
    const auto tcol = results.require_column(target);
    const auto status_col = results.column("status");
    csv::Table out;
    out.header = {group_by, "target", "other", "n", "spearman"};
    std::map<std::string, std::vector<const csv::Row*>> groups;
    for (const auto& r : results.rows)
        if (!status_col || r[*status_col] == "ok")
            groups[r[gcol]].push_back(&r);
    for (const auto& [g, rows] : groups) {
        for (const auto& other : others) {
            const auto ocol = results.require_column(other);
            std::vector<double> x, y;
            for (const auto* r : rows) {
                auto a = parse_cell((*r)[tcol]), b = parse_cell((*r)[ocol]);
                if (a && b) {
                    x.push_back(*a);
                    y.push_back(*b);
                }
            }
            std::optional<double> rho;
            if (x.size() >= 3)
                rho = spearman(x, y);
            out.rows.push_back({g, target, other, std::to_string(x.size()), format_optional(rho)});
        }
    }
    return out;
}

WinMatrix cached_win_matrix(const TruthSpec& truth, const ModelSpace& space, const WinEstimateOptions& options,
                            const std::string& cache_dir, bool* from_cache)
{
    if (from_cache)
        *from_cache = false;
    if (cache_dir.empty())
        return estimate_win_matrix(truth, space, options);
    const std::string key = truth.descriptor() + "|statistic=" + to_string(options.statistic)
                            + "|V=" + std::to_string(options.replicates) + "|ndec=" + std::to_string(options.ndec)
                            + "|seed=" + std::to_string(options.root_seed) + "|estimator="
                            + (options.estimator == WinEstimator::Jeffreys ? "jeffreys" : "frequency")
                            + "|k=" + std::to_string(space.k());
    const fs::path path = fs::path(cache_dir) / ("win-" + to_hex(hash_text(key)) + ".csv");
    std::error_code ec;
    if (fs::exists(path, ec)) {
        try {
            WinMatrix w = win_matrix_from_csv(csv::read_file(path.string()), space, options.replicates);
            if (from_cache)
                *from_cache = true;
            return WinMatrix(w.matrix(), w.replicates(), truth.descriptor());
        } catch (const Error&) {
            // unreadable entry: recompute and overwrite
        }
    }
    WinMatrix w = estimate_win_matrix(truth, space, options);
    fs::create_directories(cache_dir);
    csv::write_file_atomic(path.string(), win_matrix_to_csv(w, space));
    return w;
}

ChainReport analyze_chain(const RunConfig& config)
{
    validate(config);
    const ModelSpace space = enumerate_models(config.k);
    const auto trues = resolve_true_models(config, space, true);
    const auto pops = population_labels(config, true);

    // no replicator, Soft mode: reject anything else before estimating
    std::vector<Population> populations;
    for (const auto& label : pops) {
        Cell probe{trues.front(), config.sigma.front(), label, config.statistics.front(), ProposalMode::Soft};
        Population p = cell_population(probe, config, false);
        require_chain_population(p);
        populations.push_back(p);
    }

    ChainReport report;
    report.cells.header = {"true_model", "sigma", "population", "statistic", "stationary_true", "stickiness_true",
                           "return_time", "unconditional_mfpt", "mean_mfpt_other_starts"};
    report.models.header = {"true_model", "sigma", "population", "statistic", "model", "stationary", "stickiness",
                            "mfpt_to_true"};
    report.transitions.header = {"true_model", "sigma", "population", "statistic", "from", "to", "probability"};

    for (const auto& tm : trues) {
        const std::size_t ti = *space.index_of(parse_model(tm, space.k()));
        for (double sigma : config.sigma) {
            std::vector<WinMatrix> wins;
            for (Statistic st : config.statistics) {
                TruthSpec truth{space[ti], sigma, config.correlation, config.sample_size, std::nullopt};
                WinEstimateOptions opt;
                opt.statistic = st;
                opt.replicates = config.win_samples;
                opt.ndec = config.ndec;
                opt.root_seed = config.seed;
                opt.workers = config.workers;
                bool cached = false;
                wins.push_back(cached_win_matrix(truth, space, opt, config.cache_dir, &cached));
                ++(cached ? report.win_matrices_cached : report.win_matrices_computed);
            }
            for (std::size_t p = 0; p < populations.size(); ++p) {
                for (std::size_t s = 0; s < config.statistics.size(); ++s) {
                    const ChainSummary cs = analyze(wins[s], populations[p], space, ti);
                    const csv::Row prefix{tm, csv::format_double(sigma), pops[p], to_string(config.statistics[s])};
                    csv::Row row = prefix;
                    row.insert(row.end(),
                               {csv::format_double(cs.stationary(static_cast<Eigen::Index>(ti))),
                                csv::format_double(cs.stickiness(static_cast<Eigen::Index>(ti))),
                                csv::format_double(cs.mfpt(static_cast<Eigen::Index>(ti))),
                                csv::format_double(cs.unconditional_mfpt()),
                                csv::format_double(cs.mean_mfpt_excluding_target())});
                    report.cells.rows.push_back(std::move(row));
                    for (std::size_t i = 0; i < space.size(); ++i) {
                        const auto ii = static_cast<Eigen::Index>(i);
                        csv::Row mrow = prefix;
                        mrow.insert(mrow.end(),
                                    {space[i].to_string(), csv::format_double(cs.stationary(ii)),
                                     csv::format_double(cs.stickiness(ii)),
                                     i == ti ? "0" : csv::format_double(cs.mfpt(ii))});
                        report.models.rows.push_back(std::move(mrow));
                        for (std::size_t l = 0; l < space.size(); ++l) {
                            csv::Row trow = prefix;
                            trow.insert(trow.end(), {space[i].to_string(), space[l].to_string(),
                                                     csv::format_double(cs.transition(ii, static_cast<Eigen::Index>(l)))});
                            report.transitions.rows.push_back(std::move(trow));
                        }
                    }
                }
            }
        }
    }
    return report;
}

std::vector<std::string> write_chain_report(const ChainReport& report, const std::string& output)
{
    fs::path base(output);
    const std::string stem = (base.parent_path() / base.stem()).string();
    const std::vector<std::string> paths{output, stem + "_models.csv", stem + "_transitions.csv"};
    if (auto parent = base.parent_path(); !parent.empty())
        fs::create_directories(parent);
    csv::write_file_atomic(paths[0], csv::format_table(report.cells));
    csv::write_file_atomic(paths[1], csv::format_table(report.models));
    csv::write_file_atomic(paths[2], csv::format_table(report.transitions));
    return paths;
}

std::vector<std::string> summarize_file(const std::string& input, const std::string& output,
                                        const SummaryOptions& options, const std::string& spearman_output)
{
    const auto t0 = std::chrono::steady_clock::now();
    const csv::Table results = csv::parse_table(csv::read_file(input));
    std::vector<std::string> warnings;
    csv::write_file_atomic(output, csv::format_table(summarize(results, options, &warnings)));
    if (!spearman_output.empty()) {
        std::vector<std::string> others{"time_at_true", "first_passage", "stickiness"};
        csv::write_file_atomic(spearman_output,
                               csv::format_table(correlations(results, "population", "repro_overall", others)));
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_sidecar(output, "summarize",
                  {{"input", input},
                   {"group_by", join_list(options.group_by)},
                   {"metrics", join_list(options.metrics)},
                   {"cell_means", options.cell_means ? "true" : "false"},
                   {"spearman_output", spearman_output}},
                  std::nullopt, elapsed, {{"warnings", std::to_string(warnings.size())}});
    return warnings;
}

void write_sidecar(const std::string& output, const std::string& command, const Settings& settings,
                   std::optional<std::uint64_t> seed, double elapsed_seconds, const Settings& extra)
{
    nlohmann::ordered_json meta;
    meta["tool"] = "discovery";
    meta["version"] = version();
    meta["schema_version"] = kResultSchemaVersion;
    meta["command"] = command;
    if (seed)
        meta["seed"] = *seed;
    nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
    for (const auto& [k, v] : settings)
        cfg[k] = v;
    meta["config"] = cfg;
    meta["quantile_rule"] = "type 7: linear interpolation between order statistics";
    meta["timing"] = {{"finished_utc", utc_now()}, {"elapsed_seconds", elapsed_seconds}};
    for (const auto& [k, v] : extra)
        meta[k] = v;
    csv::write_file_atomic(output + ".json", meta.dump(2) + "\n");
}

void write_metadata(const std::string& output, const std::string& command, const RunConfig& config,
                    double elapsed_seconds, const Settings& extra)
{
    write_sidecar(output, command, config_entries(config), config.seed, elapsed_seconds, extra);
}

} // namespace discovery
