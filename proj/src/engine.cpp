#include "rbsb/engine.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>

namespace rbsb {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

void ProgrammeSpec::validate() const {
    if (num_stages < 1) {
        throw std::invalid_argument("ProgrammeSpec: num_stages must be >= 1");
    }
    if (static_cast<int>(borrow_weights.size()) != num_stages) {
        throw std::invalid_argument("ProgrammeSpec: borrow_weights length must equal num_stages");
    }
    if (borrow_weights.front() != 0.0) {
        throw std::invalid_argument("ProgrammeSpec: w_1 must be 0");
    }
    for (double w : borrow_weights) {
        if (!(w >= 0.0 && w <= 1.0)) {
            throw std::invalid_argument("ProgrammeSpec: borrow weights must lie in [0, 1]");
        }
    }
    if (!(threshold > 0.5 && threshold < 1.0)) {
        throw std::invalid_argument("ProgrammeSpec: threshold must lie in (0.5, 1)");
    }
}

std::vector<std::pair<int, int>> enumerate_paths(int j) {
    if (j < 1) {
        throw std::invalid_argument("enumerate_paths: j must be >= 1");
    }
    std::vector<std::pair<int, int>> paths;
    paths.reserve(static_cast<std::size_t>(j));
    for (int i = 1; i <= j; ++i) paths.emplace_back(i, j);
    return paths;
}

std::vector<double> path_weights(const std::vector<double>& wstar_history) {
    if (wstar_history.empty()) {
        throw std::invalid_argument("path_weights: empty w* history");
    }
    if (wstar_history.front() != 0.0) {
        throw std::invalid_argument("path_weights: w*_1 must be 0");
    }
    for (double w : wstar_history) {
        if (!(w >= 0.0 && w <= 1.0)) {
            throw std::invalid_argument("path_weights: entries must lie in [0, 1]");
        }
    }
    const int j = static_cast<int>(wstar_history.size());
    std::vector<double> weights(static_cast<std::size_t>(j));
    // Suffix products keep the computation O(j): W_(i,j) = (1-w*_i) * prod_{l>i} w*_l.
    double suffix = 1.0;
    for (int i = j; i >= 1; --i) {
        weights[static_cast<std::size_t>(i - 1)] = (1.0 - wstar_history[static_cast<std::size_t>(i - 1)]) * suffix;
        suffix *= wstar_history[static_cast<std::size_t>(i - 1)];
    }
    return weights;
}

namespace detail {

std::vector<PathComponent> prior_paths(const EngineState& state, const ProgrammeSpec& spec, int j) {
    if (j < 2 || j > spec.num_stages) {
        throw std::invalid_argument("prior_paths: stage out of range");
    }
    if (state.stage != j - 1 || static_cast<int>(state.observed.size()) != j - 1) {
        throw std::invalid_argument("prior_paths: state does not hold stages 1..j-1");
    }
    const auto ranges = enumerate_paths(j - 1);
    const auto weights = path_weights(state.wstar_history);
    std::vector<PathComponent> paths;
    paths.reserve(ranges.size());
    for (std::size_t k = 0; k < ranges.size(); ++k) {
        const auto [lo, hi] = ranges[k];
        std::span<const StudySummary> studies(state.observed.data() + (lo - 1),
                                              static_cast<std::size_t>(hi - lo + 1));
        paths.push_back({lo, hi, pool(spec.unit_info, studies), weights[k]});
    }
    return paths;
}

}  // namespace detail

MixtureDistribution build_prior(const EngineState& state, const ProgrammeSpec& spec, int j) {
    spec.validate();
    if (j < 2 || j > spec.num_stages) {
        throw std::invalid_argument("build_prior: stage must lie in [2, num_stages]");
    }
    const double w_j = spec.borrow_weights[static_cast<std::size_t>(j - 1)];
    auto paths = detail::prior_paths(state, spec, j);
    for (auto& p : paths) p.weight *= w_j;
    PathComponent vague;
    vague.start = 0;
    vague.end = 0;
    vague.pooled = pool(spec.unit_info, std::vector<StudySummary>{});
    vague.weight = 1.0 - w_j;
    paths.push_back(vague);
    return MixtureDistribution(std::move(paths), MixtureKind::prior);
}

double update_wstar(const std::vector<PathComponent>& prior_paths, const StudySummary& vague,
                    double w_j, const StudySummary& obs) {
    if (!(w_j >= 0.0 && w_j <= 1.0)) {
        throw std::invalid_argument("update_wstar: w_j must lie in [0, 1]");
    }
    if (!(obs.se_hat >= kMinSd)) {
        throw std::invalid_argument("update_wstar: obs.se_hat must be positive");
    }
    if (w_j == 0.0) return 0.0;
    if (w_j == 1.0) return 1.0;

    // log m_inf via logsumexp over the predictive densities of the paths.
    double max_term = kNegInf;
    std::vector<double> terms;
    terms.reserve(prior_paths.size());
    for (const auto& p : prior_paths) {
        if (p.weight <= 0.0) {
            terms.push_back(kNegInf);
            continue;
        }
        const double pred_sd =
            std::sqrt(p.pooled.sd * p.pooled.sd + obs.se_hat * obs.se_hat);
        const double t = std::log(p.weight) + normal_log_pdf(obs.mean_hat, p.pooled.mean, pred_sd);
        terms.push_back(t);
        max_term = std::max(max_term, t);
    }
    double log_m_inf = kNegInf;
    if (max_term > kNegInf) {
        double acc = 0.0;
        for (double t : terms) {
            if (t > kNegInf) acc += std::exp(t - max_term);
        }
        log_m_inf = max_term + std::log(acc);
    }
    const double vag_sd = std::sqrt(vague.se_hat * vague.se_hat + obs.se_hat * obs.se_hat);
    const double log_m_vag = normal_log_pdf(obs.mean_hat, vague.mean_hat, vag_sd);

    if (log_m_inf == kNegInf && log_m_vag == kNegInf) {
        std::cerr << "rbsb: update_wstar: both marginal likelihoods underflowed; "
                     "keeping prior weight w_j\n";
        return w_j;
    }
    if (log_m_inf == kNegInf) return 0.0;
    if (log_m_vag == kNegInf) return 1.0;
    // w* = 1 / (1 + ((1-w)/w) * m_vag/m_inf), evaluated in log space.
    const double ratio = std::exp(log_m_vag - log_m_inf) * (1.0 - w_j) / w_j;
    return 1.0 / (1.0 + ratio);
}

EngineState advance(const EngineState& state, const ProgrammeSpec& spec, const StudySummary& obs) {
    spec.validate();
    if (state.stage >= spec.num_stages) {
        throw std::logic_error("advance: programme already complete");
    }
    const int j = state.stage + 1;

    EngineState next;
    next.stage = j;
    next.observed = state.observed;
    next.observed.push_back(obs);
    next.wstar_history = state.wstar_history;

    double wstar_j = 0.0;
    if (j >= 2) {
        const auto paths = detail::prior_paths(state, spec, j);
        wstar_j = update_wstar(paths, spec.unit_info,
                               spec.borrow_weights[static_cast<std::size_t>(j - 1)], obs);
    }
    next.wstar_history.push_back(wstar_j);

    const auto ranges = enumerate_paths(j);
    const auto weights = path_weights(next.wstar_history);
    std::vector<PathComponent> comps;
    comps.reserve(ranges.size());
    for (std::size_t k = 0; k < ranges.size(); ++k) {
        const auto [lo, hi] = ranges[k];
        std::span<const StudySummary> studies(next.observed.data() + (lo - 1),
                                              static_cast<std::size_t>(hi - lo + 1));
        comps.push_back({lo, hi, pool(spec.unit_info, studies), weights[k]});
    }
    next.posterior = MixtureDistribution(std::move(comps), MixtureKind::posterior);
    return next;
}

bool decide(const MixtureDistribution& mix, const ProgrammeSpec& spec) {
    return success_probability(mix, spec.direction) > spec.threshold;
}

}  // namespace rbsb
