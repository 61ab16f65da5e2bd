#include "rbsb/gaussian.hpp"

#include <cmath>
#include <stdexcept>

namespace rbsb {

namespace {

constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;
constexpr double kInvSqrt2 = 0.707106781186547524400844362105;
constexpr double kLogSqrt2Pi = 0.918938533204672741780329736406;

void check_sd(double sd, const char* who) {
    if (!(sd >= kMinSd) || !std::isfinite(sd)) {
        throw std::invalid_argument(std::string(who) + ": sd must be positive and finite");
    }
}

}  // namespace

StudySummary::StudySummary(double mean, double se, std::string lbl)
    : mean_hat(mean), se_hat(se), label(std::move(lbl)) {
    if (!std::isfinite(mean_hat)) {
        throw std::invalid_argument("StudySummary: mean_hat must be finite");
    }
    check_sd(se_hat, "StudySummary");
}

PooledNormal PooledNormal::from_precision(double mean, double precision) {
    if (!(precision > 0.0) || !std::isfinite(precision)) {
        throw std::invalid_argument("PooledNormal: precision must be positive and finite");
    }
    PooledNormal p;
    p.mean = mean;
    p.precision = precision;
    p.sd = 1.0 / std::sqrt(precision);
    return p;
}

double normal_pdf(double x, double mean, double sd) {
    check_sd(sd, "normal_pdf");
    const double z = (x - mean) / sd;
    return kInvSqrt2Pi / sd * std::exp(-0.5 * z * z);
}

double normal_log_pdf(double x, double mean, double sd) {
    check_sd(sd, "normal_log_pdf");
    const double z = (x - mean) / sd;
    return -0.5 * z * z - std::log(sd) - kLogSqrt2Pi;
}

double normal_upper_tail(double threshold, double mean, double sd) {
    check_sd(sd, "normal_upper_tail");
    const double z = (threshold - mean) / sd;
    return 0.5 * std::erfc(z * kInvSqrt2);
}

double normal_cdf(double x, double mean, double sd) {
    check_sd(sd, "normal_cdf");
    const double z = (x - mean) / sd;
    return 0.5 * std::erfc(-z * kInvSqrt2);
}

// Wichura (1988), algorithm AS 241, PPND16.
double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("normal_quantile: p must lie in (0, 1)");
    }
    const double q = p - 0.5;
    double r;
    if (std::fabs(q) <= 0.425) {
        r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                     6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                   1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
                 1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
               (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                     3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                   5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
                 4.2313330701600911252e1) * r + 1.0);
    }
    r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double x;
    if (r <= 5.0) {
        r -= 1.6;
        x = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
              4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
              2.05319162663775882187e0) * r + 1.0);
    } else {
        r -= 5.0;
        x = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
              5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
    }
    return q < 0.0 ? -x : x;
}

PooledNormal pool(const StudySummary& prior, std::span<const StudySummary> studies) {
    check_sd(prior.se_hat, "pool(prior)");
    double tau = 1.0 / (prior.se_hat * prior.se_hat);
    double weighted = prior.mean_hat * tau;
    for (const auto& s : studies) {
        check_sd(s.se_hat, "pool(study)");
        const double t = 1.0 / (s.se_hat * s.se_hat);
        tau += t;
        weighted += s.mean_hat * t;
    }
    return PooledNormal::from_precision(weighted / tau, tau);
}

PooledNormal pool(const StudySummary& prior, const std::vector<StudySummary>& studies) {
    return pool(prior, std::span<const StudySummary>(studies));
}

}  // namespace rbsb
