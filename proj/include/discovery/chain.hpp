// Copyright 2026 The discovery authors
// SPDX-License-Identifier: Apache-2.0
//
// Exact analysis of the process without replication: a first-order Markov
// chain on the global model.
#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "discovery/model_space.hpp"
#include "discovery/selection.hpp"
#include "discovery/strategies.hpp"

namespace discovery {

/// P(i, l): probability the global model moves from M_i to M_l in one step.
using TransitionMatrix = Eigen::MatrixXd;

/// Off-diagonal P(i, l) = sum_a w(l, i) P(M_l | R_a, M_i) P(R_a); the diagonal
/// is the complement of the row. Requires a Soft population without Rey.
/// The diagonal is cross-checked against stickiness() within 1e-9.
TransitionMatrix build_transition_matrix(const WinMatrix& win, const Population& population, const ModelSpace& space);

/// Probability of staying at model i for one step, summed over proposals: a
/// proposal l != i is rejected with probability 1 - w(l, i) (rounded-score
/// ties go to the incumbent) and a self-proposal always stays.
double stickiness(const WinMatrix& win, const Population& population, const ModelSpace& space, std::size_t model);

/// Solves pi P = pi, sum(pi) = 1 by a direct linear solve. Throws
/// AnalysisError if the system is singular or the residual exceeds tol.
Eigen::VectorXd stationary_distribution(const TransitionMatrix& p, double tol = 1e-10);

/// tau(i) = 1 + sum_{l != target} P(i, l) tau(l). Entry `target` holds the
/// mean return time. Throws AnalysisError on a singular system.
Eigen::VectorXd mean_first_passage(const TransitionMatrix& p, std::size_t target);

struct ChainSummary
{
    TransitionMatrix transition;
    Eigen::VectorXd stationary;
    Eigen::VectorXd mfpt;       ///< to the true model; entry `true_index` is the return time
    Eigen::VectorXd stickiness; ///< per model
    std::size_t true_index = 0;

    /// Mean of tau over starting models, counting a start at the true model
    /// as zero steps (uniform initial model).
    double unconditional_mfpt() const;
    /// Mean of tau over starting models other than the true model.
    double mean_mfpt_excluding_target() const;
};

ChainSummary analyze(const WinMatrix& win, const Population& population, const ModelSpace& space,
                     std::size_t true_index);

/// Throws ConfigError unless the population can drive a first-order chain.
void require_chain_population(const Population& population);

} // namespace discovery
