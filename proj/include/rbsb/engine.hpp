#pragma once

#include <utility>
#include <vector>

#include "rbsb/gaussian.hpp"
#include "rbsb/mixture.hpp"

namespace rbsb {

/// Pre-specified programme: stage count, per-stage borrowing weights
/// (w_1 = 0 by convention), the unit-information prior, the decision
/// threshold p* and the benefit direction.
struct ProgrammeSpec {
    int num_stages = 1;
    std::vector<double> borrow_weights;  // w_1..w_K, w_1 == 0
    StudySummary unit_info{0.0, 2.0, "unit-info"};
    double threshold = 0.975;
    Direction direction = Direction::higher_is_better;

    void validate() const;
};

/// Immutable analysis state after `stage` studies. advance() returns a new
/// state; many programmes can run concurrently without shared state.
struct EngineState {
    int stage = 0;
    std::vector<StudySummary> observed;
    std::vector<double> wstar_history;  // w*_1..w*_stage, w*_1 == 0
    MixtureDistribution posterior;      // |P_{1:stage}| components
};

/// All admissible contiguous paths ending at stage j: {(i, j) : 1 <= i <= j},
/// ordered by descending length.
std::vector<std::pair<int, int>> enumerate_paths(int j);

/// Path weights from the multiplicative recursion
///   W_{S_{i:j}} = (1 - w*_i) * prod_{l=i+1..j} w*_l,
/// in enumerate_paths order. Sums to one for any w* sequence.
std::vector<double> path_weights(const std::vector<double>& wstar_history);

/// Robust mixture prior for stage j >= 2: informative paths over P_{1:j-1}
/// scaled by w_j plus the vague unit-information component (range (0,0))
/// with weight 1 - w_j.
MixtureDistribution build_prior(const EngineState& state, const ProgrammeSpec& spec, int j);

/// Posterior mixture weight  w* = w_j m_inf / (w_j m_inf + (1-w_j) m_vag),
/// marginal predictive likelihoods evaluated in log space. `prior_paths`
/// carry the path weights W_S (summing to one, unscaled by w_j).
double update_wstar(const std::vector<PathComponent>& prior_paths, const StudySummary& vague,
                    double w_j, const StudySummary& obs);

/// One step of the sequential analysis: build the stage-j prior, update w*,
/// and form the posterior over P_{1:j}. Stage 1 uses the unit-information
/// prior directly with w*_1 = 0.
EngineState advance(const EngineState& state, const ProgrammeSpec& spec, const StudySummary& obs);

/// Strict threshold rule: success iff success_probability(mix) > p*.
bool decide(const MixtureDistribution& mix, const ProgrammeSpec& spec);

namespace detail {
/// Informative path components for the stage-j prior (weights are the W_S
/// over P_{1:j-1}, unscaled by w_j). Each path pools the unit-information
/// pseudo-study with studies i..j-1.
std::vector<PathComponent> prior_paths(const EngineState& state, const ProgrammeSpec& spec, int j);
}  // namespace detail

}  // namespace rbsb
