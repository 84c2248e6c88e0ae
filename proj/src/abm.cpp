// Copyright 2026 The discovery authors
// SPDX-License-Identifier: Apache-2.0
#include "discovery/abm.hpp"

#include "discovery/csv.hpp"
#include "discovery/error.hpp"

namespace discovery {

namespace {

constexpr int kMaxFitRetries = 100;

} // namespace

void validate(const CellSpec& cell, const ModelSpace& space)
{
    validate(cell.population);
    if (cell.population.weight(Strategy::Rey) >= 1.0)
        throw ConfigError("a population made only of replicators never proposes a model");
    if (!space.index_of(cell.true_model))
        throw ConfigError("true model is not a member of the model space");
    if (cell.timesteps < 1)
        throw ConfigError("timesteps must be positive");
    if (cell.burn_in < 0 || cell.burn_in >= cell.timesteps)
        throw ConfigError("burn-in must lie in [0, timesteps)");
    GroundTruth probe{cell.true_model, std::vector<double>(cell.true_model.parameter_count(), 1.0), cell.sigma_level,
                      cell.correlation, cell.n};
    validate(probe);
}

AbmEngine::AbmEngine(const ModelSpace& space, CellSpec cell)
    : space_(space), cell_(std::move(cell)), proposals_(space, cell_.population.mode, cell_.residual),
      true_index_(0)
{
    validate(cell_, space_);
    true_index_ = *space_.index_of(cell_.true_model);
}

GroundTruth AbmEngine::draw_truth(RngStream& rng) const
{
    return GroundTruth{cell_.true_model, gen_coefficients(cell_.true_model, rng), cell_.sigma_level,
                       cell_.correlation, cell_.n};
}

std::size_t AbmEngine::resolve(std::size_t proposed, std::size_t incumbent, GroundTruth& truth, AbmState& state,
                               RngStream& rng) const
{
    if (proposed == incumbent)
        return incumbent;
    for (int attempt = 0;; ++attempt) {
        if (cell_.beta_policy == BetaPolicy::FreshPerExperiment)
            truth.beta = gen_coefficients(cell_.true_model, rng);
        try {
            Dataset d = gen_response(gen_predictors(cell_.n, space_.k(), cell_.correlation, rng), truth, rng);
            TermColumns cols(d.x_raw);
            OlsFit fp = cols.fit(d.y, space_[proposed]);
            OlsFit fg = cols.fit(d.y, space_[incumbent]);
            double sp = score(fp.rss, fp.p, cell_.n, cell_.statistic, cell_.ndec);
            double sg = score(fg.rss, fg.p, cell_.n, cell_.statistic, cell_.ndec);
            return sp < sg ? proposed : incumbent;
        } catch (const FitError&) {
        } catch (const GenerationError&) {
        }
        ++state.fit_retries;
        if (attempt >= kMaxFitRetries)
            throw EstimationError("dataset regeneration limit reached at step " + std::to_string(state.t));
    }
}

ExperimentRecord AbmEngine::step(AbmState& state, GroundTruth& truth, RngStream& rng) const
{
    ExperimentRecord rec;
    rec.t = state.t;
    rec.strategy = sample_strategy(cell_.population, rng);

    if (rec.strategy == Strategy::Rey && state.predecessor) {
        rec.was_replication = true;
        rec.proposed = state.predecessor->proposed;
        rec.incumbent = state.predecessor->incumbent;
        rec.winner = resolve(rec.proposed, rec.incumbent, truth, state, rng);
        rec.reproduced = rec.winner == state.global;
    } else {
        // a replicator with nothing to replicate proposes uniformly
        const auto& dist =
            proposals_.get(rec.strategy == Strategy::Rey ? Strategy::Mave : rec.strategy, state.global);
        rec.proposed = sample_proposal(dist, rng);
        rec.incumbent = state.global;
        rec.winner = resolve(rec.proposed, rec.incumbent, truth, state, rng);
    }
    state.global = rec.winner;
    state.predecessor = rec;
    ++state.t;
    return rec;
}

AbmRun run(const ModelSpace& space, const CellSpec& cell, std::uint64_t root_seed, std::uint64_t stream_id,
           bool keep_trajectory)
{
    AbmEngine engine(space, cell);
    RngStream rng(root_seed, stream_id);
    GroundTruth truth = engine.draw_truth(rng);

    AbmRun out;
    AbmState state;
    state.global = static_cast<std::size_t>(rng.uniform_index(space.size()));
    out.initial_global = state.global;

    std::vector<ExperimentRecord> records;
    records.reserve(static_cast<std::size_t>(cell.timesteps));
    for (long t = 0; t < cell.timesteps; ++t)
        records.push_back(engine.step(state, truth, rng));

    out.metrics = compute_metrics(records, engine.true_index(), cell.burn_in);
    out.metrics.fit_retries = state.fit_retries;
    if (keep_trajectory)
        out.trajectory = std::move(records);
    return out;
}

AbmMetrics compute_metrics(std::span<const ExperimentRecord> records, std::size_t true_index, long burn_in)
{
    if (records.empty())
        throw ConfigError("no experiment records");
    AbmMetrics m;
    const long total = static_cast<long>(records.size());

    // global model before step t is records[t-1].winner (records[0].incumbent for t = 0)
    auto global_before = [&](long t) { return t == 0 ? records[0].incumbent : records[t - 1].winner; };

    m.censored = true;
    m.first_passage = total;
    for (long t = 0; t <= total; ++t) {
        std::size_t g = t < total ? global_before(t) : records[total - 1].winner;
        if (g == true_index) {
            m.first_passage = t;
            m.censored = false;
            break;
        }
    }

    long counted = 0, at_true = 0, stays = 0;
    long reproduced = 0, reproduced_true = 0, reproduced_not = 0;
    for (long t = std::max(0L, burn_in); t < total; ++t) {
        const auto& rec = records[t];
        const std::size_t g = global_before(t);
        ++counted;
        if (g == true_index) {
            ++at_true;
            stays += rec.winner == true_index;
        }
        if (rec.was_replication) {
            const bool same = rec.winner == g;
            ++m.replications;
            reproduced += same;
            if (g == true_index) {
                ++m.replications_at_true;
                reproduced_true += same;
            } else {
                ++m.replications_not_true;
                reproduced_not += same;
            }
        }
    }
    auto ratio = [](long num, long den) -> std::optional<double> {
        if (den == 0)
            return std::nullopt;
        return static_cast<double>(num) / static_cast<double>(den);
    };
    m.time_at_true = counted ? static_cast<double>(at_true) / static_cast<double>(counted) : 0.0;
    m.stickiness = ratio(stays, at_true);
    m.repro_overall = ratio(reproduced, m.replications);
    m.repro_at_true = ratio(reproduced_true, m.replications_at_true);
    m.repro_not_true = ratio(reproduced_not, m.replications_not_true);
    return m;
}

std::string trajectory_to_csv(std::span<const ExperimentRecord> records, const ModelSpace& space)
{
    std::string out = "t,strategy,proposed,incumbent,winner,was_replication,reproduced\n";
    for (const auto& r : records) {
        csv::Row row{std::to_string(r.t),
                     to_string(r.strategy),
                     space[r.proposed].to_string(),
                     space[r.incumbent].to_string(),
                     space[r.winner].to_string(),
                     r.was_replication ? "1" : "0",
                     r.reproduced ? (*r.reproduced ? "1" : "0") : "NA"};
        out += csv::join(row) + "\n";
    }
    return out;
}

} // namespace discovery
