#pragma once

// Test-only reference implementations, kept independent of the library code
// paths they check: quadrature instead of erfc-based closed forms, direct
// formula evaluation instead of the engine's recursions.

#include <cmath>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace oracle {

inline double ref_normal_pdf(double x, double mean, double sd) {
    const long double z = (static_cast<long double>(x) - mean) / sd;
    const long double v =
        std::exp(-0.5L * z * z) / (sd * std::sqrt(2.0L * 3.14159265358979323846264338327950288L));
    return static_cast<double>(v);
}

/// Adaptive Simpson quadrature.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-12, int depth = 28) {
    struct Rec {
        static double simpson(const std::function<double(double)>& f, double a, double m, double b,
                              double fa, double fm, double fb) {
            return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        }
        static double go(const std::function<double(double)>& f, double a, double m, double b,
                         double fa, double fm, double fb, double whole, double tol, int depth) {
            const double lm = 0.5 * (a + m);
            const double rm = 0.5 * (m + b);
            const double flm = f(lm);
            const double frm = f(rm);
            const double left = simpson(f, a, lm, m, fa, flm, fm);
            const double right = simpson(f, m, rm, b, fm, frm, fb);
            if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol) {
                return left + right + (left + right - whole) / 15.0;
            }
            return go(f, a, lm, m, fa, flm, fm, left, tol * 0.5, depth - 1) +
                   go(f, m, rm, b, fm, frm, fb, right, tol * 0.5, depth - 1);
        }
    };
    const double m = 0.5 * (a + b);
    const double fa = f(a);
    const double fm = f(m);
    const double fb = f(b);
    const double whole = Rec::simpson(f, a, m, b, fa, fm, fb);
    return Rec::go(f, a, m, b, fa, fm, fb, whole, tol, depth);
}

struct MixComp {
    double weight;
    double mean;
    double sd;
};

inline double mix_pdf(const std::vector<MixComp>& comps, double x) {
    double v = 0.0;
    for (const auto& c : comps) v += c.weight * ref_normal_pdf(x, c.mean, c.sd);
    return v;
}

/// Mixture mass below `x` by adaptive quadrature from a far-left anchor.
inline double mix_cdf_quadrature(const std::vector<MixComp>& comps, double x) {
    double lo = comps.front().mean;
    for (const auto& c : comps) lo = std::min(lo, c.mean - 14.0 * c.sd);
    if (x <= lo) return 0.0;
    return adaptive_simpson([&](double t) { return mix_pdf(comps, t); }, lo, x, 1e-13);
}

/// P(mixture > 0) via quadrature on the appropriate side.
inline double mix_upper_mass_quadrature(const std::vector<MixComp>& comps) {
    double hi = comps.front().mean;
    for (const auto& c : comps) hi = std::max(hi, c.mean + 14.0 * c.sd);
    if (hi <= 0.0) return 0.0;
    const double from = std::max(0.0, hi - 1e9);
    return adaptive_simpson([&](double t) { return mix_pdf(comps, t); }, from, hi, 1e-13);
}

/// All contiguous integer ranges ending at j, by filtering every pair.
inline std::vector<std::pair<int, int>> brute_force_paths(int j) {
    std::vector<std::pair<int, int>> out;
    for (int a = 1; a <= j; ++a) {
        for (int b = a; b <= j; ++b) {
            if (b == j) out.emplace_back(a, b);
        }
    }
    return out;
}

/// Direct product formula for one path weight.
inline double brute_force_path_weight(const std::vector<double>& wstar, int i, int j) {
    double w = 1.0 - wstar[static_cast<std::size_t>(i - 1)];
    for (int l = i + 1; l <= j; ++l) w *= wstar[static_cast<std::size_t>(l - 1)];
    return w;
}

/// Plain splitmix64 for property-test inputs (independent of CounterRng).
struct SplitMix {
    std::uint64_t state;
    explicit SplitMix(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

}  // namespace oracle
