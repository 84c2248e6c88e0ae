// Copyright 2026 The discovery authors
// SPDX-License-Identifier: Apache-2.0
//
// Scientist types and the models they propose.
#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "discovery/model_space.hpp"
#include "discovery/rng.hpp"

namespace discovery {

enum class Strategy
{
    Rey,
    Tess,
    Mave,
    Bo
};

inline constexpr std::array<Strategy, 4> kStrategies{Strategy::Rey, Strategy::Tess, Strategy::Mave, Strategy::Bo};

std::string to_string(Strategy s);
Strategy parse_strategy(std::string_view text);

enum class ProposalMode
{
    Hard, ///< proposals confined to the strategy's neighborhood
    Soft  ///< every model keeps a small proposal probability
};

std::string to_string(ProposalMode m);
ProposalMode parse_mode(std::string_view text);

/// Where Hard-mode Tess/Bo put the mass the neighborhood leaves over.
enum class HardResidual
{
    Self,       ///< 1/(m+1) on the incumbent itself (a no-op experiment)
    Renormalize ///< 1/m on each neighbor
};

HardResidual parse_hard_residual(std::string_view text);

struct Population
{
    std::array<double, 4> weights{}; ///< indexed like kStrategies
    ProposalMode mode = ProposalMode::Hard;

    double weight(Strategy s) const { return weights[static_cast<std::size_t>(s)]; }
    bool has_replicator() const { return weight(Strategy::Rey) > 0.0; }
};

/// Named populations. Without a replicator the dominant type takes 0.99 and
/// the two others 0.005 each; with a replicator the dominant type takes 0.99
/// and the three others 1/300 each. all-equal splits evenly over the types in
/// play. Throws ConfigError for unknown names or rey-dominant without a
/// replicator.
Population population_preset(std::string_view name, bool with_replicator, ProposalMode mode);

/// Population from integer head counts, normalized.
Population population_from_counts(long n_rey, long n_tess, long n_mave, long n_bo, ProposalMode mode);

/// Throws ConfigError unless weights are nonnegative and sum to 1 within 1e-12.
void validate(const Population& population);

inline const std::array<std::string_view, 5> kPresetNames{"rey-dominant", "tess-dominant", "mave-dominant",
                                                          "bo-dominant", "all-equal"};

/// Proposal probabilities over the space for a non-replicating strategy given
/// the incumbent global model.
std::vector<double> proposal_distribution(Strategy strategy, std::size_t mg, const ModelSpace& space, ProposalMode mode,
                                          HardResidual residual = HardResidual::Self);

/// All proposal distributions for one space, built once.
class ProposalTable
{
  public:
    ProposalTable(const ModelSpace& space, ProposalMode mode, HardResidual residual = HardResidual::Self);

    const std::vector<double>& get(Strategy strategy, std::size_t mg) const;
    ProposalMode mode() const { return mode_; }

  private:
    ProposalMode mode_;
    std::size_t size_;
    std::vector<std::vector<double>> table_; // [strategy * L + mg], Rey slots empty
};

Strategy sample_strategy(const Population& population, RngStream& rng);
std::size_t sample_proposal(const std::vector<double>& distribution, RngStream& rng);

} // namespace discovery
