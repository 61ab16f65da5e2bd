#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rbsb/designs.hpp"

using namespace rbsb;

namespace {

ProgrammeSpec unit_one_programme() {
    ProgrammeSpec spec;
    spec.num_stages = 5;
    spec.borrow_weights = {0.0, 0.5, 0.5, 0.5, 0.5};
    spec.unit_info = StudySummary(0.0, 1.0, "unit-info");
    spec.threshold = 0.975;
    spec.direction = Direction::higher_is_better;
    return spec;
}

ProgrammeSpec default_like_programme() {
    ProgrammeSpec spec;
    spec.num_stages = 5;
    spec.borrow_weights = {0.0, 0.5, 0.5, 0.5, 0.5};
    spec.unit_info = StudySummary(0.0, 2.0, "unit-info");
    spec.threshold = 0.975;
    spec.direction = Direction::higher_is_better;
    return spec;
}

void check_same_mixture(const MixtureDistribution& a, const MixtureDistribution& b, double tol) {
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.components()[i].weight ==
              doctest::Approx(b.components()[i].weight).epsilon(tol));
        CHECK(a.components()[i].pooled.mean ==
              doctest::Approx(b.components()[i].pooled.mean).epsilon(tol));
        CHECK(a.components()[i].pooled.sd ==
              doctest::Approx(b.components()[i].pooled.sd).epsilon(tol));
    }
}

}  // namespace

TEST_CASE("standalone analysis") {
    const auto spec = unit_one_programme();
    SUBCASE("clear effect rejects") {
        const auto a = analyze_standalone(StudySummary(0.5, 0.129), spec);
        CHECK(a.decision);
        CHECK(a.wstar == 0.0);
        REQUIRE(a.posterior.size() == 1);
    }
    SUBCASE("null effect does not reject") {
        const auto a = analyze_standalone(StudySummary(0.0, 0.129), spec);
        CHECK_FALSE(a.decision);
    }
    SUBCASE("repeated calls are identical") {
        const auto a = analyze_standalone(StudySummary(0.31, 0.2), spec);
        const auto b = analyze_standalone(StudySummary(0.31, 0.2), spec);
        CHECK(a.decision == b.decision);
        CHECK(a.point_estimate == b.point_estimate);
        CHECK(a.ess == b.ess);
    }
}

TEST_CASE("full pooling analysis") {
    const auto spec = unit_one_programme();
    SUBCASE("empty history equals standalone") {
        const StudySummary obs(0.4, 0.2);
        const auto pooled = analyze_full_pooling({}, obs, 0.5, spec);
        const auto alone = analyze_standalone(obs, spec);
        check_same_mixture(pooled.posterior, alone.posterior, 1e-15);
    }
    SUBCASE("concordant evidence raises the posterior weight") {
        const std::vector<StudySummary> history{{0.5, 0.079}, {0.5, 0.129}};
        const auto a = analyze_full_pooling(history, StudySummary(0.5, 0.129), 0.5, spec);
        CHECK(a.wstar > 0.5);
    }
    SUBCASE("conflict lowers the weight") {
        const std::vector<StudySummary> history{{0.5, 0.079}, {0.5, 0.129}};
        const auto conc = analyze_full_pooling(history, StudySummary(0.5, 0.129), 0.5, spec);
        const auto conf = analyze_full_pooling(history, StudySummary(5.5, 0.129), 0.5, spec);
        CHECK(conf.wstar < conc.wstar);
    }
}

TEST_CASE("adjacent analysis") {
    auto spec = default_like_programme();
    spec.direction = Direction::lower_is_better;
    spec.num_stages = 3;
    spec.borrow_weights = {0.0, 0.5, 0.5};
    const StudySummary prev(-0.62, 0.158);
    const StudySummary obs(-0.58, 0.316);

    SUBCASE("stage 2 equals the RBSB posterior") {
        const auto adj = analyze_adjacent(prev, obs, 0.5, spec);
        EngineState state = advance(EngineState{}, spec, prev);
        state = advance(state, spec, obs);
        check_same_mixture(adj.posterior, state.posterior, 1e-12);
        CHECK(adj.wstar == doctest::Approx(state.wstar_history.back()).epsilon(1e-12));
    }
    SUBCASE("w = 0 reproduces the standalone posterior") {
        const auto adj = analyze_adjacent(prev, obs, 0.0, spec);
        const auto alone = analyze_standalone(obs, spec);
        CHECK(adj.wstar == 0.0);
        // informative component carries zero weight; singleton matches standalone
        CHECK(adj.posterior.components()[0].weight == doctest::Approx(0.0));
        CHECK(adj.posterior.components()[1].weight == doctest::Approx(1.0));
        CHECK(adj.posterior.components()[1].pooled.mean ==
              doctest::Approx(alone.posterior.components()[0].pooled.mean).epsilon(1e-12));
        CHECK(adj.posterior.components()[1].pooled.sd ==
              doctest::Approx(alone.posterior.components()[0].pooled.sd).epsilon(1e-12));
    }
}

TEST_CASE("the three borrowing designs coincide at stage 2") {
    const auto spec = default_like_programme();
    oracle::SplitMix rng(4242);
    for (int trial = 0; trial < 25; ++trial) {
        const StudySummary first(rng.uniform(-1.0, 1.0), rng.uniform(0.05, 0.5));
        const StudySummary second(rng.uniform(-1.0, 1.0), rng.uniform(0.05, 0.5));
        const double w = rng.uniform(0.05, 0.95);

        auto spec_w = spec;
        spec_w.borrow_weights[1] = w;
        EngineState state = advance(EngineState{}, spec_w, first);
        state = advance(state, spec_w, second);

        const auto adj = analyze_adjacent(first, second, w, spec);
        const auto full = analyze_full_pooling({first}, second, w, spec);
        check_same_mixture(adj.posterior, state.posterior, 1e-12);
        check_same_mixture(full.posterior, state.posterior, 1e-12);
    }
}

TEST_CASE("stage 3 adjacent differs from RBSB once paths multiply") {
    auto spec = default_like_programme();
    spec.direction = Direction::lower_is_better;
    spec.num_stages = 3;
    spec.borrow_weights = {0.0, 0.5, 0.5};
    const StudySummary s1(-0.62, 0.158);
    const StudySummary s2(-0.58, 0.316);
    const StudySummary s3(-0.51, 0.207);

    EngineState state = advance(EngineState{}, spec, s1);
    state = advance(state, spec, s2);
    CHECK(state.wstar_history.back() < 1.0);
    state = advance(state, spec, s3);

    const auto adj = analyze_adjacent(s2, s3, 0.5, spec);
    CHECK(adj.posterior.size() == 2);
    CHECK(state.posterior.size() == 3);
    CHECK(adj.posterior.median() != doctest::Approx(state.posterior.median()).epsilon(1e-10));
}

TEST_CASE("full pooling accumulates at least the adjacent precision") {
    const auto spec = default_like_programme();
    oracle::SplitMix rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<StudySummary> history;
        for (int k = 0; k < 3; ++k) {
            history.emplace_back(rng.uniform(-1.0, 1.0), rng.uniform(0.1, 0.6));
        }
        const StudySummary obs(rng.uniform(-1.0, 1.0), rng.uniform(0.1, 0.6));
        const auto full = analyze_full_pooling(history, obs, 0.5, spec);
        const auto adj = analyze_adjacent(history.back(), obs, 0.5, spec);
        CHECK(full.posterior.components()[0].pooled.precision >=
              adj.posterior.components()[0].pooled.precision);
    }
}

TEST_CASE("design name round trip") {
    for (auto d : {DesignKind::standalone, DesignKind::full_pooling, DesignKind::adjacent,
                   DesignKind::rbsb}) {
        CHECK(design_from_string(to_string(d)) == d);
    }
    CHECK_THROWS_AS(design_from_string("bogus"), std::invalid_argument);
}
