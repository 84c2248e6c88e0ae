// Copyright 2026 The discovery authors
// SPDX-License-Identifier: Apache-2.0
//
// Configuration, factorial sweeps, chain reports and summary statistics.
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "discovery/abm.hpp"
#include "discovery/csv.hpp"
#include "discovery/selection.hpp"
#include "discovery/strategies.hpp"

namespace discovery {

inline constexpr int kResultSchemaVersion = 1;

struct RunConfig
{
    int replications = 100;
    long timesteps = 11000;
    int k = 3;
    std::vector<double> sigma{0.2, 0.5, 0.8};
    int sample_size = 100;
    /// Model strings, or the single entry "all" for the whole space.
    std::vector<std::string> true_models{"x1 + x2", "x1 + x2 + x3 + x1x2", "x1 + x2 + x3 + x1x2 + x1x3 + x2x3"};
    double correlation = 0.2;
    std::vector<std::string> populations{"rey-dominant", "tess-dominant", "mave-dominant", "bo-dominant", "all-equal"};
    /// nRey, nTess, nMave, nBo; replaces the preset list when any is set.
    std::optional<std::array<long, 4>> counts;
    std::vector<Statistic> statistics{Statistic::AIC, Statistic::SC};
    int ndec = 4;
    ProposalMode mode = ProposalMode::Hard;
    long burn_in = 1000;
    std::uint64_t seed = 1;
    std::string output = "results.csv";
    int workers = 0;
    HardResidual residual = HardResidual::Self;
    int win_samples = 10000;
    std::string cache_dir;
    BetaPolicy beta_policy = BetaPolicy::FixedPerRun;

    std::set<std::string> explicit_keys; ///< keys set by file or flag
};

/// Sets one key; accepts the factorial table's key names plus the artifact's
/// own (seed, output, workers, ...). Throws ConfigError on unknown keys or bad values.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);
/// Flat "key = value" lines; '#' starts a comment.
RunConfig parse_config(std::string_view text, RunConfig base = {});
/// Effective configuration as ordered key/value strings.
std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& config);
/// Current value of one key as text. Throws ConfigError for unknown keys.
std::string config_value(const RunConfig& config, std::string_view key);
void validate(const RunConfig& config);

/// One factorial cell.
struct Cell
{
    std::string true_model; ///< canonical string
    double sigma = 0.2;
    std::string population; ///< preset name or "counts:a/b/c/d"
    Statistic statistic = Statistic::SC;
    ProposalMode mode = ProposalMode::Hard;

    std::string key() const;
};

/// Cells in canonical order: true model, sigma, population, statistic.
std::vector<Cell> factorial_cells(const RunConfig& config, const ModelSpace& space);
Population cell_population(const Cell& cell, const RunConfig& config, bool with_replicator);
CellSpec cell_spec(const Cell& cell, const RunConfig& config, const ModelSpace& space);

const std::vector<std::string>& result_columns();

struct FactorialSummary
{
    csv::Table table;
    std::size_t computed = 0;
    std::size_t reused = 0;
    std::size_t failed = 0;
};

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

/// Runs every cell x replication and writes config.output (sorted, atomic).
/// Rows with status ok found in config.output or its ".partial" journal are
/// reused when their config hash matches; failed rows are retried.
/// A failing row is recorded with status "error" and never stops the sweep.
FactorialSummary run_factorial(const RunConfig& config, const ProgressFn& progress = {});

/// Same rows without touching the filesystem.
csv::Table run_factorial_in_memory(const RunConfig& config);

/// Type-7 quantile (linear interpolation between order statistics).
double quantile(std::vector<double> values, double prob);

struct SummaryOptions
{
    std::vector<std::string> group_by{"population"};
    std::vector<std::string> metrics{"time_at_true", "first_passage", "stickiness", "repro_overall",
                                     "repro_at_true", "repro_not_true"};
    /// Average each metric over the replications of a cell before summarizing.
    bool cell_means = false;
};

/// Long table: group columns, metric, n, missing, mean, median, q1, q3, iqr,
/// censored. Rows with status != ok are skipped. Groups with no values for a
/// metric are omitted and reported in `warnings`.
csv::Table summarize(const csv::Table& results, const SummaryOptions& options, std::vector<std::string>* warnings = nullptr);

/// Spearman rank correlation (average ranks for ties). Empty when either
/// ranking has zero variance. Throws ConfigError on length mismatch or n < 3.
std::optional<double> spearman(const std::vector<double>& x, const std::vector<double>& y);

/// Spearman correlation of `target` with each other metric, per group.
csv::Table correlations(const csv::Table& results, const std::string& group_by, const std::string& target,
                        const std::vector<std::string>& others);

struct ChainReport
{
    csv::Table cells;       ///< one row per (true model, sigma, population, statistic)
    csv::Table models;      ///< per starting model: stationary mass, stickiness, MFPT to truth
    csv::Table transitions; ///< long form of every transition matrix
    std::size_t win_matrices_computed = 0;
    std::size_t win_matrices_cached = 0;
};

/// Chain analysis over true models x sigma x population x statistic, Soft
/// mode, no replicator. Win matrices are cached in config.cache_dir when set.
ChainReport analyze_chain(const RunConfig& config);

/// Win matrix for one truth, loaded from or stored into the cache directory.
WinMatrix cached_win_matrix(const TruthSpec& truth, const ModelSpace& space, const WinEstimateOptions& options,
                            const std::string& cache_dir, bool* from_cache = nullptr);

/// Writes report.cells to `output` and the other tables to "<stem>_models.csv"
/// and "<stem>_transitions.csv". Returns the paths written.
std::vector<std::string> write_chain_report(const ChainReport& report, const std::string& output);

/// Reads a results CSV and writes the summary, plus Spearman correlations of
/// repro_overall with the other properties when spearman_output is nonempty.
/// Returns warnings about omitted groups.
std::vector<std::string> summarize_file(const std::string& input, const std::string& output,
                                        const SummaryOptions& options, const std::string& spearman_output);

using Settings = std::vector<std::pair<std::string, std::string>>;

/// Writes `<output>.json` with tool version, command, settings, seed and timing.
void write_sidecar(const std::string& output, const std::string& command, const Settings& settings,
                   std::optional<std::uint64_t> seed, double elapsed_seconds, const Settings& extra = {});
/// write_sidecar with the effective run configuration.
void write_metadata(const std::string& output, const std::string& command, const RunConfig& config,
                    double elapsed_seconds, const Settings& extra = {});

std::string version();

} // namespace discovery
