#pragma once

#include <span>
#include <string>
#include <vector>

namespace rbsb {

/// Smallest standard deviation accepted anywhere in the library. Inputs below
/// this are treated as malformed rather than clamped.
inline constexpr double kMinSd = 1e-12;

/// Observed effect estimate and its standard error on the analysis scale
/// (mean difference, log-HR, ...). The unit-information prior is carried
/// around as a pseudo-study with label "unit-info".
struct StudySummary {
    double mean_hat = 0.0;
    double se_hat = 1.0;
    std::string label;

    StudySummary() = default;
    StudySummary(double mean, double se, std::string lbl = {});
};

/// Precision-weighted pool of a prior and zero or more studies. Precision is
/// the canonical representation; sd is kept in sync (precision == 1/sd^2).
struct PooledNormal {
    double mean = 0.0;
    double sd = 1.0;
    double precision = 1.0;

    static PooledNormal from_precision(double mean, double precision);
};

double normal_pdf(double x, double mean, double sd);
double normal_log_pdf(double x, double mean, double sd);

/// Pr(X > threshold) for X ~ N(mean, sd), via erfc so both tails keep full
/// relative accuracy (decision thresholds live far out in the tail).
double normal_upper_tail(double threshold, double mean, double sd);

/// Pr(X <= x) for X ~ N(mean, sd).
double normal_cdf(double x, double mean, double sd);

/// Inverse standard normal CDF (Wichura's AS 241, double precision).
double normal_quantile(double p);

/// Precision-weighted pooling of the prior with the given studies:
///   tau = tau0 + sum(tau_l),  mean = (tau0*mu0 + sum(tau_l*mu_l)) / tau.
/// The empty pool returns the prior itself.
PooledNormal pool(const StudySummary& prior, std::span<const StudySummary> studies);
PooledNormal pool(const StudySummary& prior, const std::vector<StudySummary>& studies);

}  // namespace rbsb
