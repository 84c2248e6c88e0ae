// Copyright 2026 The discovery authors
// SPDX-License-Identifier: Apache-2.0
#include "discovery/strategies.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "discovery/error.hpp"

namespace discovery {

namespace {

std::string lower(std::string_view text)
{
    std::string out;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c)))
            out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

} // namespace

std::string to_string(Strategy s)
{
    switch (s) {
    case Strategy::Rey:
        return "Rey";
    case Strategy::Tess:
        return "Tess";
    case Strategy::Mave:
        return "Mave";
    case Strategy::Bo:
        return "Bo";
    }
    return "?";
}

Strategy parse_strategy(std::string_view text)
{
    std::string s = lower(text);
    for (Strategy k : kStrategies)
        if (lower(to_string(k)) == s)
            return k;
    throw ConfigError("unknown strategy '" + std::string(text) + "'");
}

std::string to_string(ProposalMode m) { return m == ProposalMode::Hard ? "hard" : "soft"; }

ProposalMode parse_mode(std::string_view text)
{
    std::string s = lower(text);
    if (s == "hard")
        return ProposalMode::Hard;
    if (s == "soft")
        return ProposalMode::Soft;
    throw ConfigError("unknown proposal mode '" + std::string(text) + "'");
}

HardResidual parse_hard_residual(std::string_view text)
{
    std::string s = lower(text);
    if (s == "self")
        return HardResidual::Self;
    if (s == "renormalize")
        return HardResidual::Renormalize;
    throw ConfigError("unknown hard residual rule '" + std::string(text) + "'");
}

Population population_preset(std::string_view name, bool with_replicator, ProposalMode mode)
{
    std::string s = lower(name);
    Population pop;
    pop.mode = mode;
    auto idx = [](Strategy st) { return static_cast<std::size_t>(st); };

    if (s == "all-equal") {
        for (Strategy st : kStrategies)
            if (with_replicator || st != Strategy::Rey)
                pop.weights[idx(st)] = with_replicator ? 0.25 : 1.0 / 3.0;
        return pop;
    }
    Strategy dominant;
    if (s == "rey-dominant")
        dominant = Strategy::Rey;
    else if (s == "tess-dominant")
        dominant = Strategy::Tess;
    else if (s == "mave-dominant")
        dominant = Strategy::Mave;
    else if (s == "bo-dominant")
        dominant = Strategy::Bo;
    else
        throw ConfigError("unknown population preset '" + std::string(name) + "'");
    if (dominant == Strategy::Rey && !with_replicator)
        throw ConfigError("rey-dominant has no counterpart without the replicator (chain analysis excludes Rey)");

    const double minor = with_replicator ? 0.01 / 3.0 : 0.005;
    for (Strategy st : kStrategies)
        if (with_replicator || st != Strategy::Rey)
            pop.weights[idx(st)] = st == dominant ? 0.99 : minor;
    return pop;
}

Population population_from_counts(long n_rey, long n_tess, long n_mave, long n_bo, ProposalMode mode)
{
    if (n_rey < 0 || n_tess < 0 || n_mave < 0 || n_bo < 0)
        throw ConfigError("population counts must be nonnegative");
    const double total = static_cast<double>(n_rey + n_tess + n_mave + n_bo);
    if (total <= 0.0)
        throw ConfigError("population has no scientists");
    Population pop;
    pop.mode = mode;
    pop.weights = {n_rey / total, n_tess / total, n_mave / total, n_bo / total};
    return pop;
}

void validate(const Population& population)
{
    double total = 0.0;
    for (double w : population.weights) {
        if (!(w >= 0.0))
            throw ConfigError("population weights must be nonnegative");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw ConfigError("population weights must sum to 1");
}

std::vector<double> proposal_distribution(Strategy strategy, std::size_t mg, const ModelSpace& space, ProposalMode mode,
                                          HardResidual residual)
{
    const std::size_t L = space.size();
    if (mg >= L)
        throw ConfigError("global model index out of range");
    std::vector<double> probs(L, 0.0);

    switch (strategy) {
    case Strategy::Rey:
        throw ConfigError("Rey repeats the previous experiment and has no proposal distribution");
    case Strategy::Mave:
        std::fill(probs.begin(), probs.end(), 1.0 / static_cast<double>(L));
        return probs;
    case Strategy::Tess:
    case Strategy::Bo:
        break;
    }

    const auto hood = strategy == Strategy::Tess ? tess_neighbors(mg, space) : bo_moves(mg, space);
    const double m = static_cast<double>(hood.size());
    if (mode == ProposalMode::Soft) {
        // m neighbors at 1/(m+1), the remaining L-m models share 1/(m+1)
        const double other = 1.0 / ((static_cast<double>(L) - m) * (m + 1.0));
        std::fill(probs.begin(), probs.end(), other);
        for (std::size_t j : hood)
            probs[j] = 1.0 / (m + 1.0);
        return probs;
    }
    if (hood.empty()) {
        probs[mg] = 1.0;
        return probs;
    }
    if (residual == HardResidual::Renormalize) {
        for (std::size_t j : hood)
            probs[j] = 1.0 / m;
    } else {
        for (std::size_t j : hood)
            probs[j] = 1.0 / (m + 1.0);
        probs[mg] = 1.0 / (m + 1.0);
    }
    return probs;
}

ProposalTable::ProposalTable(const ModelSpace& space, ProposalMode mode, HardResidual residual)
    : mode_(mode), size_(space.size()), table_(kStrategies.size() * space.size())
{
    for (Strategy st : kStrategies) {
        if (st == Strategy::Rey)
            continue;
        for (std::size_t g = 0; g < size_; ++g)
            table_[static_cast<std::size_t>(st) * size_ + g] = proposal_distribution(st, g, space, mode, residual);
    }
}

const std::vector<double>& ProposalTable::get(Strategy strategy, std::size_t mg) const
{
    if (strategy == Strategy::Rey)
        throw ConfigError("Rey has no proposal distribution");
    return table_.at(static_cast<std::size_t>(strategy) * size_ + mg);
}

Strategy sample_strategy(const Population& population, RngStream& rng)
{
    return kStrategies[sample_categorical(population.weights, rng)];
}

std::size_t sample_proposal(const std::vector<double>& distribution, RngStream& rng)
{
    return sample_categorical(distribution, rng);
}

} // namespace discovery
