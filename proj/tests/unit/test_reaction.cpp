#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "shiftwave/reaction.hpp"

using namespace shiftwave;

namespace {

ReactionModel allee4() { return ReactionModel{MonostableParams{1.0, 4.0}, 6.0, 1.0, 2.0}; }

// Five-point Gauss-Legendre on [lo, hi]; exact for polynomials up to degree 9.
template <class F>
double gauss5(F&& f, double lo, double hi) {
    static const double nodes[] = {0.0, 0.5384693101056831, -0.5384693101056831,
                                   0.9061798459386640, -0.9061798459386640};
    static const double weights[] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
                                     0.2369268850561891, 0.2369268850561891};
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    double sum = 0.0;
    for (int k = 0; k < 5; ++k) {
        sum += weights[k] * f(mid + half * nodes[k]);
    }
    return half * sum;
}

}  // namespace

TEST_CASE("logistic midpoint far right") {
    const ReactionModel m{MonostableParams{1.0, 0.0}, 0.0, 1.0, 2.0};
    CHECK(eval_f(m, 60.0, 0.5) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("f vanishes at zero density") {
    const auto m = allee4();
    for (double x : {-50.0, -1.0, 0.0, 3.0, 80.0}) {
        CHECK(eval_f(m, x, 0.0) == 0.0);
        CHECK(eval_F(m, x, 0.0) == 0.0);
    }
}

TEST_CASE("blend at the transition point") {
    CHECK(eval_f(allee4(), 0.0, 0.5) == doctest::Approx(-0.25).epsilon(1e-14));
}

TEST_CASE("derivative limits") {
    const auto m = allee4();
    CHECK(eval_dfds(m, 60.0, 0.0) == doctest::Approx(1.0));
    CHECK(eval_dfds(m, -60.0, 0.0) == doctest::Approx(-1.0));
    CHECK(eval_dfds(m, 60.0, 1.0) == doctest::Approx(-5.0));
    // At s = 0 the slope is w r - (1 - w).
    const double w = m.weight(0.7);
    CHECK(eval_dfds(m, 0.7, 0.0) == doctest::Approx(w - (1.0 - w)).epsilon(1e-14));
}

TEST_CASE("antiderivative limits") {
    const ReactionModel kpp{MonostableParams{1.0, 0.0}, 0.0, 1.0, 2.0};
    CHECK(eval_F(kpp, 60.0, 1.0) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
    CHECK(eval_F(kpp, -60.0, 1.0) == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("F differences match Gauss quadrature of f") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> xs(-8.0, 8.0);
    std::uniform_real_distribution<double> ss(0.0, 2.0);
    for (const auto& m : {allee4(), ReactionModel{MonostableParams{2.0, 1.5}, 3.0, 0.5, 2.0}}) {
        for (int k = 0; k < 200; ++k) {
            const double x = xs(rng);
            const double s0 = ss(rng);
            const double s1 = ss(rng);
            const double quad = gauss5([&](double s) { return eval_f(m, x, s); }, s0, s1);
            CHECK(eval_F(m, x, s1) - eval_F(m, x, s0) == doctest::Approx(quad).epsilon(1e-10));
        }
    }
}

TEST_CASE("dfds matches centred differences") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> xs(-8.0, 8.0);
    std::uniform_real_distribution<double> ss(0.05, 2.0);
    const auto m = allee4();
    const double h = 1e-5;
    for (int k = 0; k < 200; ++k) {
        const double x = xs(rng);
        const double s = ss(rng);
        const double fd = (eval_f(m, x, s + h) - eval_f(m, x, s - h)) / (2.0 * h);
        const double exact = eval_dfds(m, x, s);
        CHECK(std::abs(fd - exact) <= 1e-6 * std::max(1.0, std::abs(exact)));
    }
}

TEST_CASE("f is nondecreasing in x on [0, s_max]") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> xs(-15.0, 15.0);
    std::uniform_real_distribution<double> ss(0.0, 2.0);
    const auto m = allee4();
    for (int k = 0; k < 1000; ++k) {
        double x1 = xs(rng);
        double x2 = xs(rng);
        if (x1 > x2) {
            std::swap(x1, x2);
        }
        const double s = ss(rng);
        CHECK(eval_f(m, x1, s) <= eval_f(m, x2, s) + 1e-15);
    }
}

TEST_CASE("blend approaches the limits monotonically in |x|") {
    const auto m = allee4();
    for (double s : {0.2, 0.8, 1.5, 2.0}) {
        double prev_plus = std::numeric_limits<double>::infinity();
        double prev_minus = std::numeric_limits<double>::infinity();
        for (double x = 0.0; x <= 30.0; x += 0.5) {
            const double dp = std::abs(eval_f(m, x, s) - m.plus.g(s));
            const double dm = std::abs(eval_f(m, -x, s) - m.g_minus(s));
            CHECK(dp <= prev_plus);
            CHECK(dm <= prev_minus);
            prev_plus = dp;
            prev_minus = dm;
        }
        CHECK(std::abs(eval_f(m, 30.0, s) - m.plus.g(s)) < 1e-12);
    }
}

TEST_CASE("default kappa rule") {
    CHECK(default_kappa(4.0) == doctest::Approx(5.2));
    CHECK(default_kappa(0.0) == doctest::Approx(0.2));
    for (double a : {0.0, 0.5, 1.0, 2.0, 4.0, 7.0}) {
        const double k = default_kappa(a);
        // g+ - g- = s (2 + (a-1) s + (k-a) s^2) >= 0 needs (a-1)^2 <= 8 (k-a).
        CHECK((a - 1.0) * (a - 1.0) <= 8.0 * (k - a) + 1e-12);
    }
}

TEST_CASE("hypothesis checks") {
    CHECK(check_hypotheses(allee4()).passed());

    const ReactionModel undamped{MonostableParams{1.0, 4.0}, 0.0, 1.0, 2.0};
    const auto bad = check_hypotheses(undamped);
    CHECK_FALSE(bad.passed());
    CHECK_FALSE(bad.monotone_in_x.passed);
    CHECK(bad.monostable.passed);

    const ReactionModel kpp{MonostableParams{1.0, 0.0}, 0.0, 1.0, 1.0};
    CHECK(check_hypotheses(kpp).passed());

    std::vector<double> xs{0.0};
    std::vector<double> outside{0.0, 2.5};
    CHECK_THROWS_AS(check_hypotheses(allee4(), xs, outside), std::invalid_argument);
    CHECK_THROWS_AS(check_hypotheses(allee4(), {}, xs), std::invalid_argument);
}

TEST_CASE("model validation") {
    ReactionModel m = allee4();
    m.s_max = 0.5;
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
    m = allee4();
    m.ell = 0.0;
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
    m = allee4();
    m.plus.r = -1.0;
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
}

TEST_CASE("json round trip and rejection") {
    const auto m = allee4();
    const nlohmann::json j = m;
    const auto back = j.get<ReactionModel>();
    CHECK(back.plus.a == m.plus.a);
    CHECK(back.kappa == m.kappa);

    const auto dflt = nlohmann::json{{"a", 4.0}}.get<ReactionModel>();
    CHECK(dflt.kappa == doctest::Approx(default_kappa(4.0)));
    CHECK(dflt.plus.r == 1.0);

    const auto flat = nlohmann::json{{"ell", "inf"}}.get<ReactionModel>();
    CHECK(std::isinf(flat.ell));
    CHECK(nlohmann::json(flat)["ell"] == "inf");

    CHECK_THROWS(nlohmann::json{{"a", -1.0}}.get<ReactionModel>());
    CHECK_THROWS(nlohmann::json{{"b", 1.0}}.get<ReactionModel>());
    CHECK_THROWS(nlohmann::json{{"r", "one"}}.get<ReactionModel>());
}
