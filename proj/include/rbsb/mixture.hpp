#pragma once

#include <vector>

#include "rbsb/gaussian.hpp"

namespace rbsb {

enum class Direction { higher_is_better, lower_is_better };
enum class MixtureKind { prior, posterior };

/// One contiguous evidence path S_{i:j} with its pooled parameters and
/// mixture weight. The vague component of a prior uses the reserved range
/// (0, 0) so priors and posteriors share this representation.
struct PathComponent {
    int start = 0;
    int end = 0;
    PooledNormal pooled;
    double weight = 0.0;
};

/// Finite Normal mixture over contiguous paths. Weights are validated to sum
/// to one (1e-10) with distinct (start, end) ranges.
class MixtureDistribution {
  public:
    MixtureDistribution() = default;
    MixtureDistribution(std::vector<PathComponent> components, MixtureKind kind);

    const std::vector<PathComponent>& components() const { return components_; }
    MixtureKind kind() const { return kind_; }
    bool empty() const { return components_.empty(); }
    std::size_t size() const { return components_.size(); }

    double pdf(double x) const;
    double cdf(double x) const;
    /// Equal-tailed quantile by bisection on the CDF (1e-12 bracket width).
    double quantile(double p) const;
    double median() const { return quantile(0.5); }

    double mean() const;
    double variance() const;

  private:
    std::vector<PathComponent> components_;
    MixtureKind kind_ = MixtureKind::posterior;
};

/// Mixture mass on the beneficial side of zero: Pr(mu > 0) for
/// higher_is_better, Pr(mu < 0) for lower_is_better.
double success_probability(const MixtureDistribution& mix, Direction direction);

}  // namespace rbsb
