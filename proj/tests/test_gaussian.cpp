#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "oracles.hpp"
#include "rbsb/gaussian.hpp"

using namespace rbsb;

TEST_CASE("normal_pdf pinned values") {
    CHECK(normal_pdf(0.0, 0.0, 1.0) == doctest::Approx(0.3989422804014327).epsilon(1e-12));
    CHECK(normal_pdf(1.0, 1.0, 2.0) == doctest::Approx(0.19947114020071634).epsilon(1e-12));
    // high-precision reference value for the stage-2 predictive integrand
    CHECK(normal_pdf(-0.58, -0.609, 0.3444) ==
          doctest::Approx(1.1542696214873561).epsilon(1e-12));
}

TEST_CASE("normal_pdf matches the reference over a wide grid") {
    oracle::SplitMix rng(11);
    for (int i = 0; i < 200; ++i) {
        const double mean = rng.uniform(-5.0, 5.0);
        const double sd = rng.uniform(0.01, 10.0);
        const double x = mean + rng.uniform(-8.0, 8.0) * sd;
        const double got = normal_pdf(x, mean, sd);
        const double want = oracle::ref_normal_pdf(x, mean, sd);
        CHECK(got == doctest::Approx(want).epsilon(1e-10));
    }
}

TEST_CASE("normal_pdf integrates to one") {
    const double total = oracle::adaptive_simpson(
        [](double x) { return normal_pdf(x, 0.7, 1.3); }, 0.7 - 14 * 1.3, 0.7 + 14 * 1.3);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("normal_upper_tail pinned values") {
    CHECK(normal_upper_tail(0.0, 0.0, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(normal_upper_tail(0.0, 1.959964, 1.0) ==
          doctest::Approx(0.9750000009035576).epsilon(1e-12));
    // adult-stage efficacy tail, frozen from the quadrature oracle
    const double got = normal_upper_tail(0.0, -0.616, 0.1566);
    CHECK(got == doctest::Approx(4.184345756008754e-05).epsilon(1e-10));
    const double quad = oracle::adaptive_simpson(
        [](double x) { return normal_pdf(x, -0.616, 0.1566); }, 0.0, -0.616 + 14 * 0.1566, 1e-16);
    CHECK(got == doctest::Approx(quad).epsilon(1e-8));
}

TEST_CASE("tail identity and monotonicity") {
    oracle::SplitMix rng(23);
    for (int i = 0; i < 200; ++i) {
        const double t = rng.uniform(-4.0, 4.0);
        const double m = rng.uniform(-4.0, 4.0);
        const double s = rng.uniform(0.05, 5.0);
        const double sum = normal_upper_tail(t, m, s) + normal_upper_tail(-t, -m, s);
        CHECK(std::fabs(sum - 1.0) < 1e-12);
    }
    CHECK(normal_upper_tail(0.0, 0.5, 1.0) > normal_upper_tail(0.0, 0.4, 1.0));
}

TEST_CASE("normal_quantile round trip and pinned value") {
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-14));
    CHECK(normal_quantile(0.5) == doctest::Approx(0.0));
    for (double p : {1e-12, 1e-6, 0.01, 0.3, 0.5, 0.7, 0.99, 1 - 1e-6, 1 - 1e-12}) {
        const double z = normal_quantile(p);
        CHECK(normal_cdf(z, 0.0, 1.0) == doctest::Approx(p).epsilon(1e-12));
    }
    CHECK_THROWS_AS(normal_quantile(0.0), std::invalid_argument);
    CHECK_THROWS_AS(normal_quantile(1.0), std::invalid_argument);
}

TEST_CASE("pool pinned examples") {
    const StudySummary prior(0.0, 2.0, "unit-info");

    SUBCASE("empty pool returns the prior") {
        const auto p = pool(prior, std::vector<StudySummary>{});
        CHECK(p.mean == doctest::Approx(0.0));
        CHECK(p.sd == doctest::Approx(2.0).epsilon(1e-15));
        CHECK(p.precision == doctest::Approx(0.25).epsilon(1e-15));
    }
    SUBCASE("single study, case-study path S1") {
        const auto p = pool(prior, {StudySummary(-0.62, 0.158)});
        CHECK(p.mean == doctest::Approx(-0.6161545792707711).epsilon(1e-12));
        CHECK(p.sd == doctest::Approx(0.1575092568550339).epsilon(1e-12));
    }
    SUBCASE("two studies, case-study path S_{1:2}") {
        const auto p = pool(prior, {StudySummary(-0.62, 0.158), StudySummary(-0.58, 0.316)});
        CHECK(p.mean == doctest::Approx(-0.6089595865761426).epsilon(1e-12));
    }
}

TEST_CASE("pool properties") {
    oracle::SplitMix rng(37);
    for (int trial = 0; trial < 50; ++trial) {
        const StudySummary prior(rng.uniform(-1.0, 1.0), rng.uniform(0.5, 3.0));
        std::vector<StudySummary> studies;
        const int n = 2 + static_cast<int>(rng.next() % 5);
        for (int i = 0; i < n; ++i) {
            studies.emplace_back(rng.uniform(-2.0, 2.0), rng.uniform(0.05, 2.0));
        }
        const auto full = pool(prior, studies);

        // permutation invariance
        std::vector<StudySummary> reversed(studies.rbegin(), studies.rend());
        const auto rev = pool(prior, reversed);
        CHECK(rev.mean == doctest::Approx(full.mean).epsilon(1e-12));
        CHECK(rev.precision == doctest::Approx(full.precision).epsilon(1e-12));

        // incremental: pool the prior once, then fold in remaining studies by
        // precision arithmetic
        auto partial = pool(prior, std::vector<StudySummary>(studies.begin(), studies.begin() + 1));
        double tau = partial.precision;
        double weighted = partial.mean * tau;
        for (std::size_t i = 1; i < studies.size(); ++i) {
            const double t = 1.0 / (studies[i].se_hat * studies[i].se_hat);
            tau += t;
            weighted += studies[i].mean_hat * t;
        }
        CHECK(weighted / tau == doctest::Approx(full.mean).epsilon(1e-12));
        CHECK(tau == doctest::Approx(full.precision).epsilon(1e-12));

        // pooled precision strictly exceeds every input precision
        CHECK(full.precision > 1.0 / (prior.se_hat * prior.se_hat));
        for (const auto& s : studies) {
            CHECK(full.precision > 1.0 / (s.se_hat * s.se_hat));
        }
        // invariant: precision == 1/sd^2
        CHECK(full.precision == doctest::Approx(1.0 / (full.sd * full.sd)).epsilon(1e-12));
    }
}

TEST_CASE("degenerate inputs are rejected") {
    CHECK_THROWS_AS(normal_pdf(0.0, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(normal_pdf(0.0, 0.0, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(normal_pdf(0.0, 0.0, 1e-13), std::invalid_argument);
    CHECK_THROWS_AS(normal_upper_tail(0.0, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(StudySummary(0.0, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(StudySummary(std::nan(""), 1.0), std::invalid_argument);
    const StudySummary prior(0.0, 2.0);
    CHECK_THROWS_AS(pool(prior, {StudySummary(0.0, 1.0), StudySummary(1.0, 1e-14)}),
                    std::invalid_argument);
}
