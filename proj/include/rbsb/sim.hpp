#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rbsb/designs.hpp"
#include "rbsb/engine.hpp"
#include "rbsb/metrics.hpp"

namespace rbsb {

/// One row of the scenario table: true-effect trajectory, per-stage sample
/// sizes, and the analysis-scale unit SD sigma (se_i = sigma / sqrt(n_i)).
struct ScenarioSpec {
    std::vector<double> true_effects;
    std::vector<int> sample_sizes;
    double sigma = 2.0;
    double delta = 0.5;
    std::string label;

    void validate(const ProgrammeSpec& spec) const;
    double se(int stage_index) const;  // 0-based
};

/// Rate with Monte Carlo standard error. `n` is the denominator (the
/// conditioning-set size for conditional rates); NA marks an empty
/// conditioning set, `sparse` one below 50 replicates.
struct RateCell {
    double value = 0.0;
    double stderr_ = 0.0;
    long n = 0;
    bool is_na = false;
    bool sparse = false;
};

struct MeanCell {
    double value = 0.0;
    double stderr_ = 0.0;
};

struct DesignTable {
    DesignKind design = DesignKind::standalone;
    std::vector<RateCell> marginal;
    std::vector<RateCell> conditional;
    std::vector<RateCell> joint;
    std::vector<MeanCell> bias;
    std::vector<MeanCell> ess_pct;
};

struct SimReport {
    std::string scenario_label;
    int num_stages = 0;
    long replicates = 0;
    std::uint64_t seed = 0;
    EssMethod ess_method = EssMethod::elir;
    int conditional_start = 1;
    std::vector<DesignTable> tables;  // one per requested design

    const DesignTable& table(DesignKind d) const;
};

struct SimOptions {
    int workers = 1;  // 0 = hardware concurrency
    EssMethod ess_method = EssMethod::elir;
    int conditional_start = 1;  // first stage of the conditioning run
};

/// Per-replicate draws and per-design per-stage outcomes, exposed for tests
/// and for the assurance estimator. Draws regenerate bit-exactly from
/// (seed, replicate, stage).
struct ReplicateTrace {
    std::vector<StudySummary> draws;
    // outcome[design][stage]
    std::vector<std::vector<StageMetrics>> per_stage;
};

ReplicateTrace run_replicate(const ScenarioSpec& scenario, const std::vector<DesignKind>& designs,
                             const ProgrammeSpec& spec, std::uint64_t seed, std::uint64_t replicate,
                             EssMethod ess_method);

/// Per-stage rejection aggregation over a replicate-major decision matrix
/// rejects[rep][stage]. Conditional rates condition on success at stages
/// start_stage..k-1 (1-based; vacuous conditioning reproduces the marginal),
/// report the conditioning-set size, flag sets below 50 replicates and mark
/// empty sets NA. Joint rates count the running product of decisions.
std::vector<RateCell> marginal_rates(const std::vector<std::vector<bool>>& rejects);
std::vector<RateCell> conditional_rates(const std::vector<std::vector<bool>>& rejects,
                                        int start_stage = 1);
std::vector<RateCell> joint_rates(const std::vector<std::vector<bool>>& rejects,
                                  int start_stage = 1);

/// Monte Carlo evaluation over `reps` replicates. Every design sees the same
/// draws (common random numbers); the result is independent of `workers`.
SimReport run_scenario(const ScenarioSpec& scenario, const std::vector<DesignKind>& designs,
                       const ProgrammeSpec& spec, long reps, std::uint64_t seed,
                       const SimOptions& options = {});

enum class AssuranceMode { marginal, conditional, joint };
enum class AssuranceUpstream { prospective, fixed };

std::string to_string(AssuranceMode m);
AssuranceMode assurance_mode_from_string(const std::string& s);
std::string to_string(AssuranceUpstream u);
AssuranceUpstream assurance_upstream_from_string(const std::string& s);

struct AssuranceRequest {
    int stage = 1;  // 1-based analysis stage j
    AssuranceMode mode = AssuranceMode::marginal;
    AssuranceUpstream upstream = AssuranceUpstream::prospective;
    std::vector<StudySummary> fixed_upstream;  // theta_1..theta_{j-1} for fixed mode
    long reps = 10000;
    std::uint64_t seed = 0;
};

struct AssuranceResult {
    double estimate = 0.0;
    double stderr_ = 0.0;
    long n_conditioning = 0;
    bool is_na = false;
    long reps = 0;
};

/// Appendix-style probability of success: mu_j is drawn from the stage-j
/// design prior pi(mu_j | theta_{1:j-1}) rather than fixed. Upstream
/// summaries are either supplied (fixed) or simulated from the scenario
/// trajectory (prospective); conditional/joint modes fold in the upstream
/// decisions.
AssuranceResult assurance(const ScenarioSpec& scenario, const ProgrammeSpec& spec,
                          const AssuranceRequest& request);

}  // namespace rbsb
