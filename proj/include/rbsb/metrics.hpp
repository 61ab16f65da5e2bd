#pragma once

#include <string>

#include "rbsb/mixture.hpp"

namespace rbsb {

/// Posterior effective-sample-size estimators. `moment` is the closed-form
/// variance-ratio ESS; `elir` is the predictively-consistent expected local
/// information ratio, integrated numerically. Reports record which one was
/// used.
enum class EssMethod { moment, elir };

std::string to_string(EssMethod m);
EssMethod ess_method_from_string(const std::string& s);

/// unit_variance / Var(mix) with the full mixture variance
/// Var = sum W (s^2 + mu^2) - (sum W mu)^2. For a single component this is
/// unit_variance * precision.
double ess_moment(const MixtureDistribution& mix, double unit_variance);

/// unit_variance * E_pi[ -d^2/dmu^2 log pi(mu) ], evaluated as
/// unit_variance * int pi'(x)^2 / pi(x) dx by adaptive Simpson quadrature
/// (the integrand spikes in the valleys between separated components).
/// Exact (= unit_variance * precision) for a single component.
double ess_elir(const MixtureDistribution& mix, double unit_variance, double rel_tol = 1e-8);

double ess(const MixtureDistribution& mix, double unit_variance, EssMethod method);

/// (ess - n_own) / ess; negative when the posterior carries less than
/// own-data information (reported as-is).
double ess_pct(double ess, double n_own);

/// Posterior median minus the true effect.
double bias_sample(const MixtureDistribution& mix, double true_mu);

/// Per-stage evaluation record used by the simulation harness.
struct StageMetrics {
    bool rejected = false;
    double bias_sample = 0.0;
    double ess = 0.0;
    double ess_pct = 0.0;
    int stage = 0;
};

}  // namespace rbsb
