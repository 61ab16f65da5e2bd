#include "rbsb/designs.hpp"

#include <cmath>
#include <stdexcept>

namespace rbsb {

namespace {

StageAnalysis finish(MixtureDistribution posterior, double wstar, const StudySummary& obs,
                     const ProgrammeSpec& spec, const EssOptions& opts) {
    StageAnalysis out;
    out.posterior = std::move(posterior);
    out.wstar = wstar;
    out.decision = decide(out.posterior, spec);
    const double s0 = spec.unit_info.se_hat;
    const double unit_var = opts.unit_variance.value_or(s0 * s0);
    const double n_own = opts.n_own.value_or(unit_var / (obs.se_hat * obs.se_hat));
    out.ess = ess(out.posterior, unit_var, opts.method);
    out.ess_pct = ess_pct(out.ess, n_own);
    out.point_estimate = out.posterior.median();
    return out;
}

/// Two-component robust posterior shared by the pooling and adjacent
/// baselines: the informative prior component absorbs obs (precision
/// arithmetic makes that pool(unit_info, sources + obs)), the vague
/// component becomes the standalone pool.
StageAnalysis robust_two_component(const std::vector<StudySummary>& informative_sources,
                                   int start_index, const StudySummary& obs, double w_j,
                                   const ProgrammeSpec& spec, const EssOptions& opts) {
    const int j = start_index + static_cast<int>(informative_sources.size());
    std::vector<PathComponent> prior_path{
        {start_index, j - 1, pool(spec.unit_info, informative_sources), 1.0}};
    const double wstar = update_wstar(prior_path, spec.unit_info, w_j, obs);

    std::vector<StudySummary> with_obs = informative_sources;
    with_obs.push_back(obs);
    std::vector<PathComponent> comps{
        {start_index, j, pool(spec.unit_info, with_obs), wstar},
        {j, j, pool(spec.unit_info, std::vector<StudySummary>{obs}), 1.0 - wstar}};
    return finish(MixtureDistribution(std::move(comps), MixtureKind::posterior), wstar, obs, spec,
                  opts);
}

}  // namespace

std::string to_string(DesignKind d) {
    switch (d) {
        case DesignKind::standalone: return "standalone";
        case DesignKind::full_pooling: return "full_pooling";
        case DesignKind::adjacent: return "adjacent";
        case DesignKind::rbsb: return "rbsb";
    }
    throw std::logic_error("unreachable");
}

DesignKind design_from_string(const std::string& s) {
    if (s == "standalone") return DesignKind::standalone;
    if (s == "full_pooling") return DesignKind::full_pooling;
    if (s == "adjacent") return DesignKind::adjacent;
    if (s == "rbsb") return DesignKind::rbsb;
    throw std::invalid_argument("unknown design: " + s);
}

StageAnalysis analyze_standalone(const StudySummary& obs, const ProgrammeSpec& spec,
                                 const EssOptions& opts) {
    std::vector<PathComponent> comps{
        {1, 1, pool(spec.unit_info, std::vector<StudySummary>{obs}), 1.0}};
    return finish(MixtureDistribution(std::move(comps), MixtureKind::posterior), 0.0, obs, spec,
                  opts);
}

StageAnalysis analyze_full_pooling(const std::vector<StudySummary>& history,
                                   const StudySummary& obs, double w_j, const ProgrammeSpec& spec,
                                   const EssOptions& opts) {
    if (history.empty()) {
        // Informative component degenerates to the unit-information prior;
        // the posterior collapses to the standalone single component.
        auto out = analyze_standalone(obs, spec, opts);
        out.wstar = w_j;
        return out;
    }
    return robust_two_component(history, 1, obs, w_j, spec, opts);
}

StageAnalysis analyze_adjacent(const StudySummary& prev, const StudySummary& obs, double w_j,
                               const ProgrammeSpec& spec, const EssOptions& opts) {
    return robust_two_component({prev}, 1, obs, w_j, spec, opts);
}

StageAnalysis analyze_rbsb(EngineState& state, const ProgrammeSpec& spec, const StudySummary& obs,
                           const EssOptions& opts) {
    state = advance(state, spec, obs);
    StageAnalysis out;
    out.posterior = state.posterior;
    out.wstar = state.wstar_history.back();
    out.decision = decide(out.posterior, spec);
    const double s0 = spec.unit_info.se_hat;
    const double unit_var = opts.unit_variance.value_or(s0 * s0);
    const double n_own = opts.n_own.value_or(unit_var / (obs.se_hat * obs.se_hat));
    out.ess = ess(out.posterior, unit_var, opts.method);
    out.ess_pct = ess_pct(out.ess, n_own);
    out.point_estimate = out.posterior.median();
    return out;
}

}  // namespace rbsb
