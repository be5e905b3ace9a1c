#include <doctest.h>

#include <cmath>

#include "shiftwave/waves.hpp"

using namespace shiftwave;

namespace {

// Closed-form minimal speed of r s (1 - s)(1 + a s).
double hadeler_rothe(double r, double a) {
    if (a <= 2.0) {
        return 2.0 * std::sqrt(r);
    }
    return std::sqrt(r) * (std::sqrt(2.0 / a) + std::sqrt(a / 2.0));
}

const double pi = std::acos(-1.0);

}  // namespace

TEST_CASE("linear speed") {
    CHECK(linear_speed(1.0) == 2.0);
    CHECK(linear_speed(0.25) == doctest::Approx(1.0));
    CHECK(linear_speed(2.0) == doctest::Approx(2.828427).epsilon(1e-6));
    CHECK_THROWS_AS(linear_speed(0.0), std::invalid_argument);
    CHECK_THROWS_AS(linear_speed(-1.0), std::invalid_argument);
}

TEST_CASE("minimal speed against the closed form") {
    for (double a : {0.0, 1.0, 2.0, 3.0, 4.0, 8.0}) {
        const auto res = minimal_wave_speed(MonostableParams{1.0, a}, 1e-5);
        CAPTURE(a);
        CHECK(std::abs(res.c_star - hadeler_rothe(1.0, a)) <= 1e-3);
        CHECK(res.c_hi - res.c_lo <= 1e-5);
        CHECK(res.c_star >= linear_speed(1.0) - 1e-5);
        CHECK(shoot(PlanarNonlinearity::from(MonostableParams{1.0, a}), res.c_hi) ==
              ShotVerdict::Connects);
        CHECK(shoot(PlanarNonlinearity::from(MonostableParams{1.0, a}), res.c_lo) ==
              ShotVerdict::Crosses);
    }
}

TEST_CASE("minimal speed scales with sqrt(r)") {
    for (double a : {0.0, 4.0}) {
        const double base = minimal_wave_speed(MonostableParams{1.0, a}, 1e-5).c_star;
        for (double r : {0.25, 4.0}) {
            const double c = minimal_wave_speed(MonostableParams{r, a}, 1e-5).c_star;
            CHECK(std::abs(c - std::sqrt(r) * base) <= 1e-3);
        }
    }
}

TEST_CASE("front profiles") {
    const auto kpp = wave_profile(MonostableParams{1.0, 0.0}, 2.0, 60.0);
    CHECK(std::abs(kpp.V.front() - 1.0) < 1e-3);
    CHECK(std::abs(kpp.V.back()) < 1e-3);
    for (double d : kpp.dV) {
        CHECK(d < 0.0);
    }

    const MonostableParams allee{1.0, 4.0};
    const double c = 2.2;
    const auto prof = wave_profile(allee, c, 120.0, 0.01);
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < prof.V.size(); ++i) {
        const double h = prof.xi[i + 1] - prof.xi[i];
        const double v2 = (prof.V[i + 1] - 2.0 * prof.V[i] + prof.V[i - 1]) / (h * h);
        const double v1 = (prof.V[i + 1] - prof.V[i - 1]) / (2.0 * h);
        worst = std::max(worst, std::abs(v2 + c * v1 + allee.g(prof.V[i])));
    }
    // Finite differences of the samples carry an O(h^2) error of their own.
    CHECK(worst < 1e-4);
    // Far-field slope of ln V is the slow root of l^2 - c l + 1.
    std::size_t k = 0;
    while (prof.V[k] > 1e-6) {
        ++k;
    }
    CHECK(std::abs(-prof.dV[k] / prof.V[k] - (c - std::sqrt(c * c - 4.0)) / 2.0) < 0.05);
    CHECK(std::isfinite(prof.V.front()));

    CHECK_THROWS_AS(wave_profile(allee, 2.05, 40.0), std::invalid_argument);
}

TEST_CASE("decay exponents") {
    CHECK(decay_rate_lambda(2.0, 1.0, 0.0) == doctest::Approx(1.0));
    CHECK(decay_rate_lambda(3.0, 1.0, 0.0) == doctest::Approx((3.0 + std::sqrt(5.0)) / 2.0));
    CHECK(decay_rate_lambda(2.5, 1.0, 0.5625) == doctest::Approx(1.25));
    CHECK_THROWS_AS(decay_rate_lambda(1.9, 1.0, 0.0), std::invalid_argument);
    for (double c : {2.0, 2.3, 3.0, 5.0}) {
        const double hi = decay_rate_lambda(c, 1.0, 0.0);
        const double lo = c - hi;
        CHECK(std::abs(hi * lo - 1.0) < 1e-12);
        CHECK(std::abs(hi + lo - c) < 1e-12);
    }
}

TEST_CASE("critical exponent and c_alpha") {
    CHECK(alpha_star(2.0, 1.0) == doctest::Approx(1.0));
    CHECK(alpha_star(3.0 / std::sqrt(2.0), 1.0) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(alpha_star(3.0 / std::sqrt(2.0), 1.0) == doctest::Approx(std::sqrt(2.0 / 4.0)));
    CHECK(c_alpha(0.5, 1.0) == 2.5);
    CHECK_THROWS_AS(alpha_star(1.5, 1.0), std::invalid_argument);
    for (double a = 0.05; a <= 1.0; a += 0.05) {
        CHECK(c_alpha(a, 1.0) >= 2.0 - 1e-15);
        CHECK(std::abs(alpha_star(c_alpha(a, 1.0), 1.0) - a) < 1e-10);
    }
}

TEST_CASE("principal eigenvalue") {
    const auto flat = principal_eigenvalue(0.0, 1.0, pi / 2.0, 2000);
    CHECK(std::abs(flat.lambda_R_c) < 1e-12);
    CHECK(std::abs(flat.lambda_discrete) < 1e-5);

    const auto e = principal_eigenvalue(1.0, 1.0, 10.0, 2000);
    CHECK(e.lambda_R_c == doctest::Approx(0.75 - pi * pi / 400.0));
    CHECK(std::abs(e.lambda_R_c - e.lambda_discrete) < 1e-3);
    CHECK(e.phi.front() == 0.0);
    CHECK(e.phi.back() == 0.0);
    double sup = 0.0;
    for (std::size_t i = 1; i + 1 < e.phi.size(); ++i) {
        CHECK(e.phi[i] > 0.0);
        sup = std::max(sup, e.phi[i]);
    }
    CHECK(sup == doctest::Approx(1.0));

    for (double R : {3.0, 12.0}) {
        const auto c2 = principal_eigenvalue(2.0, 1.0, R, 400);
        CHECK(c2.lambda_R_c == doctest::Approx(-pi * pi / (4.0 * R * R)));
        CHECK(c2.lambda_R_c < 0.0);
    }

    // Second-order convergence: the constant K in |error| = K (R/n)^2 is stable.
    const double e1 = std::abs(e.lambda_R_c - e.lambda_discrete);
    const auto fine = principal_eigenvalue(1.0, 1.0, 10.0, 4000);
    const double e2 = std::abs(fine.lambda_R_c - fine.lambda_discrete);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("compact bump subsolution") {
    const MonostableParams allee{1.0, 4.0};
    const double delta = 0.05;
    const double c_delta = minimal_wave_speed(cutdown(allee, delta), 1e-6).c_star;
    CHECK(c_delta < hadeler_rothe(1.0, 4.0));
    CHECK(c_delta > 2.05);
    const double c1 = 0.5 * (2.05 + c_delta);
    const double eta = 0.9 * (1.0 - delta);
    const auto bump = bump_subsolution(allee, delta, 2.05, 5.0, eta, c1);
    CHECK(bump.b > 0.0);
    CHECK(bump.q.front() == doctest::Approx(eta));
    CHECK(std::abs(bump.q.back()) < 1e-8);
    for (std::size_t i = 1; i + 1 < bump.q.size(); ++i) {
        CHECK(bump.q[i] > 0.0);
        CHECK(bump.dq[i] < 0.0);
    }
    CHECK(bump(0.0) == doctest::Approx(eta));
    CHECK(bump(bump.rho + bump.b + 1.0) == 0.0);

    const Grid1D grid = Grid1D::with_spacing(-40.0, 40.0, 0.05);
    const Field f = bump.sample(grid, 0.0);
    CHECK(f.sup() == doctest::Approx(eta));
    CHECK(f[0] == 0.0);

    const MonostableParams kpp{1.0, 0.0};
    CHECK_THROWS_AS(bump_subsolution(kpp, 0.1, 2.0, 5.0, 0.8, 2.01), std::invalid_argument);
}

TEST_CASE("supersolution profiles") {
    const MonostableParams kpp{1.0, 0.0};
    const Grid1D grid = Grid1D::with_spacing(-20.0, 40.0, 0.1);
    const Field sup = supersolution_profile(kpp, 3.0, SupercriticalProfile{0.1, 0.0, 1.0}, grid);
    for (std::size_t i = grid.index_of(1.0); i + 1 < grid.n; i += 10) {
        const double slope = (std::log(sup[i + 1]) - std::log(sup[i])) / grid.dx();
        CHECK(slope == doctest::Approx(-1.6).epsilon(1e-9));
    }

    const Field crit = supersolution_profile(kpp, 2.0, CriticalProfile{0.5, 0.0, 1.0}, grid);
    CHECK(crit[grid.index_of(0.0)] == doctest::Approx(1.0));

    const Field cap =
        supersolution_profile(kpp, 2.0, ExpCapProfile{1.5, 0.5, 0.9, 0.0}, grid);
    CHECK(cap.sup() <= 1.5);
    for (const Field* f : {&sup, &crit, &cap}) {
        for (std::size_t i = 1; i < grid.n; ++i) {
            CHECK((*f)[i] <= (*f)[i - 1]);
        }
    }
}
