// Copyright 2026 The discovery authors
// SPDX-License-Identifier: Apache-2.0
//
// Forward simulation of the discovery process, replicator included.
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "discovery/data_gen.hpp"
#include "discovery/model_space.hpp"
#include "discovery/rng.hpp"
#include "discovery/selection.hpp"
#include "discovery/strategies.hpp"

namespace discovery {

enum class BetaPolicy
{
    FixedPerRun,        ///< one coefficient draw at the start of the run
    FreshPerExperiment, ///< a new draw for every dataset
};

/// Everything one simulation run needs.
struct CellSpec
{
    ModelSpec true_model;
    double sigma_level = 0.2;
    double correlation = 0.2;
    int n = 100;
    Population population;
    Statistic statistic = Statistic::SC;
    int ndec = 4;
    HardResidual residual = HardResidual::Self;
    long timesteps = 11000;
    long burn_in = 1000;
    BetaPolicy beta_policy = BetaPolicy::FixedPerRun;
};

/// Throws ConfigError when the cell cannot be simulated.
void validate(const CellSpec& cell, const ModelSpace& space);

struct ExperimentRecord
{
    long t = 0;
    Strategy strategy = Strategy::Mave;
    std::size_t proposed = 0;
    std::size_t incumbent = 0; ///< the model the comparison ran against
    std::size_t winner = 0;    ///< global model after this step
    bool was_replication = false;
    std::optional<bool> reproduced; ///< set only for replications
};

struct AbmState
{
    std::size_t global = 0;
    std::optional<ExperimentRecord> predecessor;
    long t = 0;
    long fit_retries = 0;
};

struct AbmMetrics
{
    double time_at_true = 0.0;
    long first_passage = 0;
    bool censored = false;
    std::optional<double> stickiness;
    std::optional<double> repro_overall;
    std::optional<double> repro_at_true;
    std::optional<double> repro_not_true;
    long replications = 0; ///< V
    long replications_at_true = 0; ///< V_T
    long replications_not_true = 0; ///< V_N
    long fit_retries = 0;
};

class AbmEngine
{
  public:
    AbmEngine(const ModelSpace& space, CellSpec cell);

    const CellSpec& cell() const { return cell_; }
    std::size_t true_index() const { return true_index_; }

    /// Draws the run's ground truth (coefficients) from rng.
    GroundTruth draw_truth(RngStream& rng) const;

    /// One idealized experiment: draw a scientist; a replicator reruns the
    /// predecessor's comparison on fresh data, anyone else proposes from their
    /// strategy and tests against the current global model.
    ExperimentRecord step(AbmState& state, GroundTruth& truth, RngStream& rng) const;

  private:
    std::size_t resolve(std::size_t proposed, std::size_t incumbent, GroundTruth& truth, AbmState& state,
                        RngStream& rng) const;

    const ModelSpace& space_;
    CellSpec cell_;
    ProposalTable proposals_;
    std::size_t true_index_;
};

struct AbmRun
{
    AbmMetrics metrics;
    std::size_t initial_global = 0;
    std::vector<ExperimentRecord> trajectory; ///< empty unless requested
};

/// Runs `timesteps` experiments from a uniformly drawn initial global model.
AbmRun run(const ModelSpace& space, const CellSpec& cell, std::uint64_t root_seed, std::uint64_t stream_id,
           bool keep_trajectory = false);

/// Discovery metrics from a record list. Occupancy, stickiness and the
/// reproducibility rates use steps t >= burn_in; first passage uses the whole
/// run, with the global model before step 0 taken from records[0].incumbent.
AbmMetrics compute_metrics(std::span<const ExperimentRecord> records, std::size_t true_index, long burn_in);

std::string trajectory_to_csv(std::span<const ExperimentRecord> records, const ModelSpace& space);

} // namespace discovery
