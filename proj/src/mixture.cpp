#include "rbsb/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace rbsb {

MixtureDistribution::MixtureDistribution(std::vector<PathComponent> components, MixtureKind kind)
    : components_(std::move(components)), kind_(kind) {
    if (components_.empty()) {
        throw std::invalid_argument("MixtureDistribution: no components");
    }
    double total = 0.0;
    std::set<std::pair<int, int>> seen;
    for (const auto& c : components_) {
        if (!(c.weight >= -1e-15) || c.weight > 1.0 + 1e-12) {
            throw std::invalid_argument("MixtureDistribution: component weight outside [0, 1]");
        }
        if (!seen.insert({c.start, c.end}).second) {
            throw std::invalid_argument("MixtureDistribution: duplicate path range");
        }
        total += c.weight;
    }
    if (std::fabs(total - 1.0) > 1e-10) {
        throw std::invalid_argument("MixtureDistribution: weights do not sum to 1");
    }
}

double MixtureDistribution::pdf(double x) const {
    double v = 0.0;
    for (const auto& c : components_) {
        if (c.weight > 0.0) v += c.weight * normal_pdf(x, c.pooled.mean, c.pooled.sd);
    }
    return v;
}

double MixtureDistribution::cdf(double x) const {
    double v = 0.0;
    for (const auto& c : components_) {
        if (c.weight > 0.0) v += c.weight * normal_cdf(x, c.pooled.mean, c.pooled.sd);
    }
    return v;
}

double MixtureDistribution::quantile(double p) const {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("MixtureDistribution::quantile: p must lie in (0, 1)");
    }
    if (components_.empty()) {
        throw std::logic_error("MixtureDistribution::quantile: empty mixture");
    }
    // The mixture quantile is bracketed by the extreme component quantiles.
    const double zp = normal_quantile(p);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& c : components_) {
        if (c.weight <= 0.0) continue;
        lo = std::min(lo, c.pooled.mean + zp * c.pooled.sd);
        hi = std::max(hi, c.pooled.mean + zp * c.pooled.sd);
    }
    if (!(lo < hi)) return lo;
    for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, std::fabs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (cdf(mid) < p) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double MixtureDistribution::mean() const {
    double m = 0.0;
    for (const auto& c : components_) m += c.weight * c.pooled.mean;
    return m;
}

double MixtureDistribution::variance() const {
    double second = 0.0;
    const double m = mean();
    for (const auto& c : components_) {
        second += c.weight * (c.pooled.sd * c.pooled.sd + c.pooled.mean * c.pooled.mean);
    }
    return second - m * m;
}

double success_probability(const MixtureDistribution& mix, Direction direction) {
    double p = 0.0;
    for (const auto& c : mix.components()) {
        if (c.weight <= 0.0) continue;
        const double tail = direction == Direction::higher_is_better
                                ? normal_upper_tail(0.0, c.pooled.mean, c.pooled.sd)
                                : normal_cdf(0.0, c.pooled.mean, c.pooled.sd);
        p += c.weight * tail;
    }
    return p;
}

}  // namespace rbsb
