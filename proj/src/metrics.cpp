#include "rbsb/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rbsb {

std::string to_string(EssMethod m) {
    return m == EssMethod::moment ? "moment" : "elir";
}

EssMethod ess_method_from_string(const std::string& s) {
    if (s == "moment") return EssMethod::moment;
    if (s == "elir") return EssMethod::elir;
    throw std::invalid_argument("unknown ess method: " + s);
}

double ess_moment(const MixtureDistribution& mix, double unit_variance) {
    if (!(unit_variance > 0.0)) {
        throw std::invalid_argument("ess_moment: unit_variance must be positive");
    }
    const double var = mix.variance();
    if (!(var > 0.0)) {
        throw std::invalid_argument("ess_moment: zero-variance mixture");
    }
    return unit_variance / var;
}

namespace {

template <typename F>
double adaptive_simpson_step(const F& f, double a, double m, double b, double fa, double fm,
                             double fb, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol) {
        return left + right + (left + right - whole) / 15.0;
    }
    return adaptive_simpson_step(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_step(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <typename F>
double adaptive_simpson(const F& f, double a, double b, double tol) {
    const double m = 0.5 * (a + b);
    const double fa = f(a);
    const double fm = f(m);
    const double fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson_step(f, a, m, b, fa, fm, fb, whole, tol, 30);
}

}  // namespace

double ess_elir(const MixtureDistribution& mix, double unit_variance, double rel_tol) {
    if (!(unit_variance > 0.0)) {
        throw std::invalid_argument("ess_elir: unit_variance must be positive");
    }
    if (!(rel_tol > 0.0)) {
        throw std::invalid_argument("ess_elir: rel_tol must be positive");
    }
    const auto& comps = mix.components();
    if (comps.size() == 1) {
        return unit_variance * comps.front().pooled.precision;
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    double linear_info = 0.0;
    for (const auto& c : comps) {
        if (c.weight <= 0.0) continue;
        lo = std::min(lo, c.pooled.mean - 9.0 * c.pooled.sd);
        hi = std::max(hi, c.pooled.mean + 9.0 * c.pooled.sd);
        linear_info += c.weight * c.pooled.precision;
    }
    constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;
    auto integrand = [&comps](double x) {
        double pdf = 0.0;
        double dpdf = 0.0;
        for (const auto& c : comps) {
            if (c.weight <= 0.0) continue;
            const double z = (x - c.pooled.mean) / c.pooled.sd;
            const double f = c.weight * kInvSqrt2Pi / c.pooled.sd * std::exp(-0.5 * z * z);
            pdf += f;
            dpdf -= f * z / c.pooled.sd;
        }
        if (pdf <= 0.0) return 0.0;
        return dpdf * dpdf / pdf;
    };
    // Integrate between component means segment by segment: the integrand
    // spikes in low-density valleys, which uniform grids miss.
    std::vector<double> knots;
    knots.push_back(lo);
    for (const auto& c : comps) {
        if (c.weight > 0.0) knots.push_back(c.pooled.mean);
    }
    knots.push_back(hi);
    std::sort(knots.begin(), knots.end());
    const double tol = rel_tol * linear_info;
    double info = 0.0;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        if (knots[i + 1] - knots[i] < 1e-300) continue;
        info += adaptive_simpson(integrand, knots[i], knots[i + 1],
                                 tol / static_cast<double>(knots.size()));
    }
    return unit_variance * info;
}

double ess(const MixtureDistribution& mix, double unit_variance, EssMethod method) {
    return method == EssMethod::moment ? ess_moment(mix, unit_variance)
                                       : ess_elir(mix, unit_variance);
}

double ess_pct(double ess, double n_own) {
    if (!(ess > 0.0)) {
        throw std::invalid_argument("ess_pct: ess must be positive");
    }
    if (!(n_own >= 0.0)) {
        throw std::invalid_argument("ess_pct: n_own must be non-negative");
    }
    return (ess - n_own) / ess;
}

double bias_sample(const MixtureDistribution& mix, double true_mu) {
    return mix.median() - true_mu;
}

}  // namespace rbsb
