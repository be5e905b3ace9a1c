#include <doctest.h>

#include <atomic>
#include <cmath>
#include <stdexcept>

#include "shiftwave/threshold.hpp"
#include "shiftwave/waves.hpp"

using namespace shiftwave;

namespace {

ReactionModel allee4() { return ReactionModel{MonostableParams{1.0, 4.0}, 6.0, 1.0, 2.0}; }
ReactionModel kpp() { return ReactionModel{MonostableParams{1.0, 0.0}, 1.0, 1.0, 2.0}; }

const Grid1D grid = Grid1D::with_spacing(-100.0, 200.0, 0.1);
const double c_star4 = 3.0 / std::sqrt(2.0);

}  // namespace

TEST_CASE("sigma threshold flags at the extremes") {
    const BumpFamily family;
    const auto spread_all = threshold_sigma(kpp(), 1.5, family, grid, 1e-2);
    CHECK(spread_all.flag == ThresholdFlag::Zero);
    CHECK(spread_all.value == 0.0);

    const auto none = threshold_sigma(allee4(), 2.2, family, grid, 1e-2);
    CHECK(none.flag == ThresholdFlag::Infinite);
    CHECK(std::isinf(none.value));
    CHECK(to_json(none)["value"] == "inf");

    // KPP has no intermediate range: above 2 nothing up to the cap spreads.
    const auto kpp_fast = threshold_sigma(kpp(), 2.2, family, grid, 1e-2);
    CHECK(kpp_fast.flag == ThresholdFlag::Infinite);
}

TEST_CASE("sigma cap respects the step constraint") {
    const BumpFamily family;
    const double dt = 0.02;
    const double cap = admissible_sigma_cap(allee4(), family, dt, grid);
    const GridReaction reaction(grid, allee4());
    CHECK(dt * reaction.decay_lipschitz(cap * family.height) <= 1.0);
    CHECK(dt * reaction.decay_lipschitz(cap * family.height * 1.001) > 1.0);

    const BumpDatum at = family.at(2.0);
    CHECK(at.amplitude == 2.0);
    CHECK(at.center == family.center);
    CHECK(at.half_width == doctest::Approx(family.half_width + 0.02));
}

TEST_CASE("predicted zones") {
    const double r = 1.0;
    // Below the linear speed everything spreads.
    CHECK(predicted_zone(1.5, 1.9, r, c_star4) == Zone::ForcedSpread);
    // Slow decay: c_alpha is the sharp threshold.
    CHECK(predicted_zone(0.5, 2.45, r, c_star4) == Zone::ForcedSpread);
    CHECK(predicted_zone(0.5, 2.55, r, c_star4) == Zone::ForcedVanish);
    // Between alpha* and sqrt(r): forced spread below c_alpha, open up to c*.
    const double ca = c_alpha(0.72, r);
    CHECK(ca == doctest::Approx(2.1089).epsilon(1e-4));
    CHECK(predicted_zone(0.72, 2.05, r, c_star4) == Zone::ForcedSpread);
    CHECK(predicted_zone(0.72, 0.5 * (ca + c_star4), r, c_star4) == Zone::DataDependent);
    CHECK(predicted_zone(0.72, 2.2, r, c_star4) == Zone::ForcedVanish);
    // Fast decay behaves like compact support.
    CHECK(predicted_zone(1.5, 2.05, r, c_star4) == Zone::DataDependent);
    CHECK(predicted_zone(1.5, 2.2, r, c_star4) == Zone::ForcedVanish);
    CHECK(to_string(Zone::DataDependent) == "data-dependent");
}

TEST_CASE("regime map is independent of the worker count") {
    const Grid1D small = Grid1D::with_spacing(-100.0, 200.0, 0.2);
    SearchOptions search;
    const std::vector<double> alphas{0.5, 1.5};
    const std::vector<double> cs{1.9, 2.6};
    const auto serial = regime_map(allee4(), alphas, cs, 1.0, 1.0, small, search, 1);
    const auto parallel = regime_map(allee4(), alphas, cs, 1.0, 1.0, small, search, 3);
    CHECK(regime_csv(serial) == regime_csv(parallel));
    REQUIRE(serial.size() == 4);
    CHECK(serial[0].alpha == 0.5);
    CHECK(serial[1].c == 2.6);
    CHECK(serial[1].outcome.verdict == Verdict::Vanishing);
    CHECK(serial[2].outcome.verdict == Verdict::Spreading);
    CHECK(regime_csv(serial).rfind("alpha,c,verdict,predicted_zone\n", 0) == 0);
    CHECK_THROWS_AS(regime_map(allee4(), {0.0}, cs, 1.0, 1.0, small, search), std::invalid_argument);
}

TEST_CASE("parallel_for") {
    std::vector<int> hits(100, 0);
    parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) {
        CHECK(h == 1);
    }
    std::atomic<int> done{0};
    CHECK_THROWS_AS(parallel_for(20, 3,
                                 [&](std::size_t i) {
                                     if (i == 7) {
                                         throw std::runtime_error("boom");
                                     }
                                     ++done;
                                 }),
                    std::runtime_error);
    CHECK(done.load() == 19);
    parallel_for(0, 4, [](std::size_t) { FAIL("no work expected"); });
}

TEST_CASE("argument checks") {
    const Field u0 = make_initial_datum(BumpDatum{1.0, 0.0, 1.0}, grid);
    CHECK_THROWS_AS(threshold_speed(kpp(), u0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(threshold_sigma(allee4(), 2.06, BumpFamily{}, grid, 0.0),
                    std::invalid_argument);
}
