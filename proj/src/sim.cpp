#include "rbsb/sim.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "rbsb/errors.hpp"
#include "rbsb/rng.hpp"

namespace rbsb {

void ScenarioSpec::validate(const ProgrammeSpec& spec) const {
    if (true_effects.empty()) {
        throw ConfigError("scenario '" + label + "': true_effects is empty");
    }
    if (true_effects.size() != sample_sizes.size()) {
        throw ConfigError("scenario '" + label + "': true_effects and sample_sizes lengths differ");
    }
    if (static_cast<int>(true_effects.size()) != spec.num_stages) {
        throw ConfigError("scenario '" + label + "': stage count " +
                          std::to_string(true_effects.size()) + " does not match programme K=" +
                          std::to_string(spec.num_stages));
    }
    for (std::size_t i = 0; i < sample_sizes.size(); ++i) {
        if (sample_sizes[i] <= 0) {
            throw ConfigError("scenario '" + label + "': sample size at stage " +
                              std::to_string(i + 1) + " must be positive");
        }
    }
    if (!(sigma > 0.0)) {
        throw ConfigError("scenario '" + label + "': sigma must be positive");
    }
}

double ScenarioSpec::se(int stage_index) const {
    return sigma / std::sqrt(static_cast<double>(sample_sizes[static_cast<std::size_t>(stage_index)]));
}

const DesignTable& SimReport::table(DesignKind d) const {
    for (const auto& t : tables) {
        if (t.design == d) return t;
    }
    throw std::out_of_range("SimReport: design not present");
}

namespace {

struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;
    void add(double x) {
        const double y = x - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

double rate_stderr(double p, long n) {
    if (n <= 0) return 0.0;
    return std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(n));
}

int stage_count(const std::vector<std::vector<bool>>& rejects) {
    if (rejects.empty()) {
        throw ConfigError("rate aggregation: no replicates");
    }
    const std::size_t stages = rejects.front().size();
    for (const auto& row : rejects) {
        if (row.size() != stages) {
            throw ConfigError("rate aggregation: ragged decision matrix");
        }
    }
    return static_cast<int>(stages);
}

}  // namespace

std::vector<RateCell> marginal_rates(const std::vector<std::vector<bool>>& rejects) {
    const int K = stage_count(rejects);
    const long reps = static_cast<long>(rejects.size());
    std::vector<RateCell> out(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
        long hits = 0;
        for (const auto& row : rejects) {
            if (row[static_cast<std::size_t>(k)]) ++hits;
        }
        RateCell& cell = out[static_cast<std::size_t>(k)];
        cell.value = static_cast<double>(hits) / static_cast<double>(reps);
        cell.stderr_ = rate_stderr(cell.value, reps);
        cell.n = reps;
    }
    return out;
}

std::vector<RateCell> conditional_rates(const std::vector<std::vector<bool>>& rejects,
                                        int start_stage) {
    const int K = stage_count(rejects);
    const int start = std::max(1, start_stage);
    std::vector<RateCell> out(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
        long n_cond = 0;
        long hits = 0;
        for (const auto& row : rejects) {
            bool upstream = true;
            for (int l = start - 1; l < k; ++l) {
                if (!row[static_cast<std::size_t>(l)]) {
                    upstream = false;
                    break;
                }
            }
            if (!upstream) continue;
            ++n_cond;
            if (row[static_cast<std::size_t>(k)]) ++hits;
        }
        RateCell& cell = out[static_cast<std::size_t>(k)];
        cell.n = n_cond;
        if (n_cond == 0) {
            cell.is_na = true;
        } else {
            cell.value = static_cast<double>(hits) / static_cast<double>(n_cond);
            cell.stderr_ = rate_stderr(cell.value, n_cond);
            cell.sparse = n_cond < 50;
        }
    }
    return out;
}

std::vector<RateCell> joint_rates(const std::vector<std::vector<bool>>& rejects, int start_stage) {
    const int K = stage_count(rejects);
    const int start = std::max(1, start_stage);
    const long reps = static_cast<long>(rejects.size());
    std::vector<RateCell> out(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
        long hits = 0;
        for (const auto& row : rejects) {
            bool all = true;
            for (int l = std::min(start - 1, k); l <= k; ++l) {
                if (!row[static_cast<std::size_t>(l)]) {
                    all = false;
                    break;
                }
            }
            if (all) ++hits;
        }
        RateCell& cell = out[static_cast<std::size_t>(k)];
        cell.value = static_cast<double>(hits) / static_cast<double>(reps);
        cell.stderr_ = rate_stderr(cell.value, reps);
        cell.n = reps;
    }
    return out;
}

ReplicateTrace run_replicate(const ScenarioSpec& scenario, const std::vector<DesignKind>& designs,
                             const ProgrammeSpec& spec, std::uint64_t seed, std::uint64_t replicate,
                             EssMethod ess_method) {
    const int K = spec.num_stages;
    const CounterRng rng(seed);

    ReplicateTrace trace;
    trace.draws.reserve(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
        const double se = scenario.se(k);
        const double draw = scenario.true_effects[static_cast<std::size_t>(k)] +
                            se * rng.normal(replicate, CounterRng::observation,
                                            static_cast<std::uint32_t>(k));
        trace.draws.emplace_back(draw, se, "stage-" + std::to_string(k + 1));
    }

    trace.per_stage.resize(designs.size());
    for (std::size_t d = 0; d < designs.size(); ++d) {
        trace.per_stage[d].resize(static_cast<std::size_t>(K));
        EngineState state;  // used by the rbsb arm
        for (int k = 0; k < K; ++k) {
            EssOptions opts;
            opts.method = ess_method;
            opts.n_own = static_cast<double>(scenario.sample_sizes[static_cast<std::size_t>(k)]);
            const double w_k = spec.borrow_weights[static_cast<std::size_t>(k)];
            const StudySummary& obs = trace.draws[static_cast<std::size_t>(k)];

            StageAnalysis analysis;
            switch (designs[d]) {
                case DesignKind::standalone:
                    analysis = analyze_standalone(obs, spec, opts);
                    break;
                case DesignKind::full_pooling:
                    if (k == 0) {
                        analysis = analyze_standalone(obs, spec, opts);
                    } else {
                        std::vector<StudySummary> history(trace.draws.begin(),
                                                          trace.draws.begin() + k);
                        analysis = analyze_full_pooling(history, obs, w_k, spec, opts);
                    }
                    break;
                case DesignKind::adjacent:
                    if (k == 0) {
                        analysis = analyze_standalone(obs, spec, opts);
                    } else {
                        analysis = analyze_adjacent(trace.draws[static_cast<std::size_t>(k - 1)],
                                                    obs, w_k, spec, opts);
                    }
                    break;
                case DesignKind::rbsb:
                    analysis = analyze_rbsb(state, spec, obs, opts);
                    break;
            }
            StageMetrics& m = trace.per_stage[d][static_cast<std::size_t>(k)];
            m.stage = k + 1;
            m.rejected = analysis.decision;
            m.bias_sample =
                analysis.point_estimate - scenario.true_effects[static_cast<std::size_t>(k)];
            m.ess = analysis.ess;
            m.ess_pct = analysis.ess_pct;
        }
    }
    return trace;
}

SimReport run_scenario(const ScenarioSpec& scenario, const std::vector<DesignKind>& designs,
                       const ProgrammeSpec& spec, long reps, std::uint64_t seed,
                       const SimOptions& options) {
    spec.validate();
    scenario.validate(spec);
    if (reps < 1) {
        throw ConfigError("run_scenario: reps must be >= 1");
    }
    if (designs.empty()) {
        throw ConfigError("run_scenario: no designs requested");
    }
    const int K = spec.num_stages;
    const std::size_t D = designs.size();

    // Per-replicate outcomes land in a preallocated slot indexed by replicate,
    // then reduce sequentially in replicate order: the report is bit-identical
    // for any worker count.
    struct Slot {
        std::vector<unsigned char> reject;  // design-major [d * K + k]
        std::vector<double> bias;
        std::vector<double> esspct;
    };
    std::vector<Slot> slots(static_cast<std::size_t>(reps));

    auto work = [&](long lo, long hi) {
        for (long r = lo; r < hi; ++r) {
            const ReplicateTrace trace = run_replicate(scenario, designs, spec, seed,
                                                       static_cast<std::uint64_t>(r),
                                                       options.ess_method);
            Slot& slot = slots[static_cast<std::size_t>(r)];
            slot.reject.resize(D * static_cast<std::size_t>(K));
            slot.bias.resize(D * static_cast<std::size_t>(K));
            slot.esspct.resize(D * static_cast<std::size_t>(K));
            for (std::size_t d = 0; d < D; ++d) {
                for (int k = 0; k < K; ++k) {
                    const auto& m = trace.per_stage[d][static_cast<std::size_t>(k)];
                    const std::size_t idx = d * static_cast<std::size_t>(K) +
                                            static_cast<std::size_t>(k);
                    slot.reject[idx] = m.rejected ? 1 : 0;
                    slot.bias[idx] = m.bias_sample;
                    slot.esspct[idx] = m.ess_pct;
                }
            }
        }
    };

    int workers = options.workers;
    if (workers == 0) {
        workers = static_cast<int>(std::thread::hardware_concurrency());
        if (workers < 1) workers = 1;
    }
    workers = static_cast<int>(std::min<long>(workers, reps));
    if (workers <= 1) {
        work(0, reps);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        const long chunk = (reps + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            const long lo = static_cast<long>(w) * chunk;
            const long hi = std::min(reps, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(work, lo, hi);
        }
        for (auto& t : pool) t.join();
    }

    SimReport report;
    report.scenario_label = scenario.label;
    report.num_stages = K;
    report.replicates = reps;
    report.seed = seed;
    report.ess_method = options.ess_method;
    report.conditional_start = options.conditional_start;
    report.tables.resize(D);

    for (std::size_t d = 0; d < D; ++d) {
        DesignTable& table = report.tables[d];
        table.design = designs[d];

        std::vector<std::vector<bool>> rejects(static_cast<std::size_t>(reps),
                                               std::vector<bool>(static_cast<std::size_t>(K)));
        for (long r = 0; r < reps; ++r) {
            const Slot& slot = slots[static_cast<std::size_t>(r)];
            for (int k = 0; k < K; ++k) {
                rejects[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)] =
                    slot.reject[d * static_cast<std::size_t>(K) + static_cast<std::size_t>(k)] != 0;
            }
        }
        table.marginal = marginal_rates(rejects);
        table.conditional = conditional_rates(rejects, options.conditional_start);
        table.joint = joint_rates(rejects, options.conditional_start);

        table.bias.resize(static_cast<std::size_t>(K));
        table.ess_pct.resize(static_cast<std::size_t>(K));
        for (int k = 0; k < K; ++k) {
            const std::size_t idx = d * static_cast<std::size_t>(K) + static_cast<std::size_t>(k);
            KahanSum bias_sum, bias_sq, ess_sum, ess_sq;
            for (long r = 0; r < reps; ++r) {
                const Slot& slot = slots[static_cast<std::size_t>(r)];
                bias_sum.add(slot.bias[idx]);
                bias_sq.add(slot.bias[idx] * slot.bias[idx]);
                ess_sum.add(slot.esspct[idx]);
                ess_sq.add(slot.esspct[idx] * slot.esspct[idx]);
            }
            const double n = static_cast<double>(reps);
            MeanCell& bias = table.bias[static_cast<std::size_t>(k)];
            bias.value = bias_sum.sum / n;
            const double bias_var = std::max(0.0, bias_sq.sum / n - bias.value * bias.value);
            bias.stderr_ = std::sqrt(bias_var / n);

            MeanCell& esspct = table.ess_pct[static_cast<std::size_t>(k)];
            esspct.value = ess_sum.sum / n;
            const double ess_var = std::max(0.0, ess_sq.sum / n - esspct.value * esspct.value);
            esspct.stderr_ = std::sqrt(ess_var / n);
        }
    }
    return report;
}

std::string to_string(AssuranceMode m) {
    switch (m) {
        case AssuranceMode::marginal: return "marginal";
        case AssuranceMode::conditional: return "conditional";
        case AssuranceMode::joint: return "joint";
    }
    throw std::logic_error("unreachable");
}

AssuranceMode assurance_mode_from_string(const std::string& s) {
    if (s == "marginal") return AssuranceMode::marginal;
    if (s == "conditional") return AssuranceMode::conditional;
    if (s == "joint") return AssuranceMode::joint;
    throw ConfigError("unknown assurance mode: " + s);
}

std::string to_string(AssuranceUpstream u) {
    return u == AssuranceUpstream::prospective ? "prospective" : "fixed";
}

AssuranceUpstream assurance_upstream_from_string(const std::string& s) {
    if (s == "prospective") return AssuranceUpstream::prospective;
    if (s == "fixed") return AssuranceUpstream::fixed;
    throw ConfigError("unknown assurance upstream mode: " + s);
}

namespace {

/// Draw from a mixture: pick a component by weight, then its Normal.
double sample_mixture(const MixtureDistribution& mix, double u_component, double z) {
    double acc = 0.0;
    const auto& comps = mix.components();
    for (const auto& c : comps) {
        acc += c.weight;
        if (u_component <= acc) {
            return c.pooled.mean + c.pooled.sd * z;
        }
    }
    const auto& last = comps.back();
    return last.pooled.mean + last.pooled.sd * z;
}

}  // namespace

AssuranceResult assurance(const ScenarioSpec& scenario, const ProgrammeSpec& spec,
                          const AssuranceRequest& request) {
    spec.validate();
    scenario.validate(spec);
    const int j = request.stage;
    if (j < 1 || j > spec.num_stages) {
        throw ConfigError("assurance: stage out of range");
    }
    if (request.reps < 1) {
        throw ConfigError("assurance: reps must be >= 1");
    }
    if (request.upstream == AssuranceUpstream::fixed &&
        static_cast<int>(request.fixed_upstream.size()) != j - 1) {
        throw ConfigError("assurance: fixed upstream must supply exactly " + std::to_string(j - 1) +
                          " summaries");
    }

    const CounterRng rng(request.seed);
    const double se_j = scenario.se(j - 1);

    // Fixed upstream: one deterministic pass gives the prior and decisions.
    EngineState fixed_state;
    bool fixed_upstream_success = true;
    if (request.upstream == AssuranceUpstream::fixed) {
        for (int k = 0; k < j - 1; ++k) {
            fixed_state = advance(fixed_state, spec, request.fixed_upstream[static_cast<std::size_t>(k)]);
            if (!decide(fixed_state.posterior, spec)) fixed_upstream_success = false;
        }
    }

    long n_marginal = 0;   // D_j over all replicates
    long n_cond = 0;       // replicates with all upstream decisions = 1
    long n_cond_succ = 0;  // D_j within the conditioning set (= joint numerator)
    for (long r = 0; r < request.reps; ++r) {
        EngineState state;
        bool upstream_success = true;
        if (request.upstream == AssuranceUpstream::fixed) {
            state = fixed_state;
            upstream_success = fixed_upstream_success;
        } else {
            for (int k = 0; k < j - 1; ++k) {
                const double se = scenario.se(k);
                const double draw = scenario.true_effects[static_cast<std::size_t>(k)] +
                                    se * rng.normal(static_cast<std::uint64_t>(r),
                                                    CounterRng::observation,
                                                    static_cast<std::uint32_t>(k));
                state = advance(state, spec, StudySummary(draw, se));
                if (!decide(state.posterior, spec)) upstream_success = false;
            }
        }

        // Stage-j design prior, then mu_j ~ prior and the estimate given mu_j.
        MixtureDistribution prior;
        if (j == 1) {
            std::vector<PathComponent> comp{
                {0, 0, pool(spec.unit_info, std::vector<StudySummary>{}), 1.0}};
            prior = MixtureDistribution(std::move(comp), MixtureKind::prior);
        } else {
            prior = build_prior(state, spec, j);
        }
        const double u = rng.uniform(static_cast<std::uint64_t>(r), CounterRng::assurance_mu, 0);
        const double z = rng.normal(static_cast<std::uint64_t>(r), CounterRng::assurance_mu, 1);
        const double mu_j = sample_mixture(prior, u, z);
        const double obs = mu_j + se_j * rng.normal(static_cast<std::uint64_t>(r),
                                                    CounterRng::assurance_obs,
                                                    static_cast<std::uint32_t>(j - 1));
        const EngineState after = advance(state, spec, StudySummary(obs, se_j));
        const bool d_j = decide(after.posterior, spec);

        if (d_j) ++n_marginal;
        if (upstream_success) {
            ++n_cond;
            if (d_j) ++n_cond_succ;
        }
    }

    AssuranceResult out;
    out.reps = request.reps;
    switch (request.mode) {
        case AssuranceMode::marginal:
            out.estimate = static_cast<double>(n_marginal) / static_cast<double>(request.reps);
            out.stderr_ = rate_stderr(out.estimate, request.reps);
            out.n_conditioning = request.reps;
            break;
        case AssuranceMode::conditional:
            out.n_conditioning = n_cond;
            if (n_cond == 0) {
                out.is_na = true;
            } else {
                out.estimate = static_cast<double>(n_cond_succ) / static_cast<double>(n_cond);
                out.stderr_ = rate_stderr(out.estimate, n_cond);
            }
            break;
        case AssuranceMode::joint:
            out.estimate = static_cast<double>(n_cond_succ) / static_cast<double>(request.reps);
            out.stderr_ = rate_stderr(out.estimate, request.reps);
            out.n_conditioning = request.reps;
            break;
    }
    return out;
}

}  // namespace rbsb
