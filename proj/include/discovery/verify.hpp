// Copyright 2026 The discovery authors
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite shared by the CLI and the test binary.
#pragma once

#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <vector>

namespace discovery {

struct CriterionResult
{
    int id = 0;
    std::string title;
    bool passed = false;
    bool gating = true; ///< supplementary checks are reported but never gate
    std::string detail;
    double seconds = 0.0;
};

struct VerifyOptions
{
    std::uint64_t seed = 20260101;
    int workers = 0;
    std::string cache_dir;      ///< win-matrix cache; empty keeps them in memory only
    int sweep_replications = 25; ///< per cell, for the factorial sweeps
    long sweep_timesteps = 11000;
    std::set<int> only; ///< empty runs every criterion
};

using CriterionCallback = std::function<void(const CriterionResult&)>;

/// Runs the acceptance criteria in order; `on_result` fires after each one.
/// A criterion that throws is reported as failed with the exception text.
std::vector<CriterionResult> run_acceptance(const VerifyOptions& options, const CriterionCallback& on_result = {});

} // namespace discovery
