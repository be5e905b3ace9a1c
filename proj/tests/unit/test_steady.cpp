#include <doctest.h>

#include <cmath>
#include <limits>

#include "shiftwave/pde.hpp"
#include "shiftwave/steady.hpp"
#include "shiftwave/waves.hpp"

using namespace shiftwave;

namespace {

ReactionModel allee4() { return ReactionModel{MonostableParams{1.0, 4.0}, 6.0, 1.0, 2.0}; }

}  // namespace

TEST_CASE("residual of trivial states") {
    const Grid1D g = Grid1D::with_spacing(-20.0, 20.0, 0.1);
    CHECK(steady_residual(allee4(), 1.0, Field(g)) == 0.0);

    // Deep in the favourable zone f = g+ to rounding, and g+(1) = 0.
    const ReactionModel kpp{MonostableParams{1.0, 0.0}, 1.0, 1.0, 2.0};
    const Grid1D right = Grid1D::with_spacing(60.0, 100.0, 0.1);
    CHECK(steady_residual(kpp, 1.3, Field(right, 1.0)) <= 1e-12);
}

TEST_CASE("maximal steady state below the linear speed") {
    const Grid1D g = Grid1D::with_spacing(-100.0, 200.0, 0.1);
    const double tol = 1e-8;
    const auto p2 = maximal_steady_state(allee4(), 1.0, 2.0, tol, g);
    REQUIRE(p2.converged);
    CHECK(p2.in_box);
    CHECK(p2.increasing);
    CHECK(p2.note.empty());
    CHECK(p2.residual <= tol);
    // Certified independently of the march.
    CHECK(steady_residual(allee4(), 1.0, p2.field) <= tol);
    CHECK(p2.field[1] <= 1e-3);
    CHECK(p2.end_right >= 1.0 - 1e-3);
    for (std::size_t i = 1; i < g.n; ++i) {
        CHECK(p2.field[i] >= p2.field[i - 1]);
    }

    // Successive march rates never increase by more than rounding.
    for (std::size_t k = 1; k < p2.rate_history.size(); ++k) {
        CHECK(p2.rate_history[k].second <= p2.rate_history[k - 1].second * (1.0 + 1e-9) + 1e-14);
    }

    SUBCASE("independent of the starting constant") {
        ReactionModel wide = allee4();
        wide.s_max = 5.0;
        const auto a = maximal_steady_state(wide, 1.0, 2.0, tol, g);
        const auto b = maximal_steady_state(wide, 1.0, 5.0, tol, g);
        CHECK(sup_distance(a.field, b.field, g.x_min, g.x_max) < 1e-6);
    }

    SUBCASE("reached from below by the compact subsolution") {
        const MonostableParams plus{1.0, 4.0};
        const double delta = 0.05;
        const double c_delta = minimal_wave_speed(cutdown(plus, delta), 1e-6).c_star;
        const auto bump =
            bump_subsolution(plus, delta, 1.0, 5.0, 0.9 * (1.0 - delta), 0.5 * (1.0 + c_delta));
        SolveConfig cfg;
        cfg.c = 1.0;
        cfg.t_end = 400.0;
        cfg.snapshot_every = 100.0;
        const auto traj = evolve(allee4(), cfg, bump.sample(g, 40.0));
        CHECK(sup_distance(traj.final_field, p2.field, g.x_min, g.x_max) < 1e-4);
    }
}

TEST_CASE("argument checks") {
    const Grid1D g = Grid1D::with_spacing(-20.0, 20.0, 0.1);
    CHECK_THROWS_AS(maximal_steady_state(allee4(), 1.0, 1.0, 1e-8, g), std::invalid_argument);
    CHECK_THROWS_AS(maximal_steady_state(allee4(), 1.0, 2.0, 0.0, g), std::invalid_argument);
}

TEST_CASE("KPP above the linear speed keeps an interior layer") {
    const ReactionModel kpp{MonostableParams{1.0, 0.0}, 1.0, 1.0, 2.0};
    const auto base = maximal_steady_state(kpp, 2.5, 2.0, 1e-8,
                                           Grid1D::with_spacing(-100.0, 200.0, 0.1));
    const auto doubled = maximal_steady_state(kpp, 2.5, 2.0, 1e-8,
                                              Grid1D::with_spacing(-100.0, 400.0, 0.1));
    REQUIRE(base.converged);
    REQUIRE(doubled.converged);
    REQUIRE(base.layer_x);
    REQUIRE(doubled.layer_x);
    // The layer sits where the habitat turns favourable, not at the box edge.
    CHECK(std::abs(*base.layer_x) < 5.0);
    CHECK(std::abs(*base.layer_x - *doubled.layer_x) < 1e-6);
    CHECK(base.in_box);
}

TEST_CASE("report") {
    const Grid1D g = Grid1D::with_spacing(-60.0, 60.0, 0.1);
    const auto st = maximal_steady_state(allee4(), 1.0, 2.0, 1e-8, g);
    const auto j = to_json(st);
    CHECK(j["end_values"].size() == 2);
    CHECK(j.contains("residual"));
    CHECK(j.contains("M_used"));
    CHECK(j.contains("t_reached"));
}
