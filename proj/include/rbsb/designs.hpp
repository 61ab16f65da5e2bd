#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rbsb/engine.hpp"
#include "rbsb/metrics.hpp"

namespace rbsb {

enum class DesignKind { standalone, full_pooling, adjacent, rbsb };

std::string to_string(DesignKind d);
DesignKind design_from_string(const std::string& s);

/// How StageAnalysis fills its ESS fields. When n_own is not given it
/// defaults to the own-data information in unit observations, s0^2/se^2
/// (equal to the stage sample size whenever s0 equals the sampling sigma).
struct EssOptions {
    EssMethod method = EssMethod::elir;
    std::optional<double> unit_variance;  // default s0^2
    std::optional<double> n_own;
};

/// Uniform per-stage result across the four strategies.
struct StageAnalysis {
    MixtureDistribution posterior;
    double wstar = 0.0;
    bool decision = false;
    double ess = 0.0;
    double ess_pct = 0.0;
    double point_estimate = 0.0;  // posterior median
};

/// No borrowing: posterior = pool(unit_info, {obs}).
StageAnalysis analyze_standalone(const StudySummary& obs, const ProgrammeSpec& spec,
                                 const EssOptions& opts = {});

/// Fixed-effect pooled history as the informative component of a robust
/// two-component mixture prior, updated on obs.
StageAnalysis analyze_full_pooling(const std::vector<StudySummary>& history,
                                   const StudySummary& obs, double w_j, const ProgrammeSpec& spec,
                                   const EssOptions& opts = {});

/// Only the immediately preceding study feeds the informative component.
/// Stages >= 2 only; stage 1 is analyze_standalone for every design.
StageAnalysis analyze_adjacent(const StudySummary& prev, const StudySummary& obs, double w_j,
                               const ProgrammeSpec& spec, const EssOptions& opts = {});

/// RBSB stage result extracted from an engine state transition.
StageAnalysis analyze_rbsb(EngineState& state, const ProgrammeSpec& spec, const StudySummary& obs,
                           const EssOptions& opts = {});

}  // namespace rbsb
