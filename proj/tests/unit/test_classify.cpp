#include <doctest.h>

#include <cmath>
#include <map>

#include "shiftwave/classify.hpp"
#include "shiftwave/steady.hpp"

using namespace shiftwave;

namespace {

ReactionModel allee4() { return ReactionModel{MonostableParams{1.0, 4.0}, 6.0, 1.0, 2.0}; }
ReactionModel kpp() { return ReactionModel{MonostableParams{1.0, 0.0}, 1.0, 1.0, 2.0}; }

const Grid1D grid = Grid1D::with_spacing(-100.0, 200.0, 0.1);

SolveConfig at_speed(double c) {
    SolveConfig cfg;
    cfg.c = c;
    cfg.right = DirichletRight{};
    return cfg;
}

Outcome run(const ReactionModel& m, double c, const BumpDatum& b) {
    return classify(m, at_speed(c), make_initial_datum(b, grid));
}

void check_consistent(const Outcome& o, const Policy& p = {}) {
    if (o.verdict == Verdict::Spreading) {
        REQUIRE(o.evidence.dist_to_pcplus_on_core);
        CHECK(*o.evidence.dist_to_pcplus_on_core <= p.eps_spread);
    }
    if (o.verdict == Verdict::Vanishing) {
        CHECK(o.evidence.sup_final <= p.eps_vanish);
    }
    if (o.verdict == Verdict::Grounding) {
        CHECK(o.evidence.probe_min >= p.eps_ground);
        CHECK(o.evidence.sup_final > p.eps_vanish);
    }
}

}  // namespace

TEST_CASE("three regimes") {
    const auto kpp_run = run(kpp(), 1.0, {1.0, 0.0, 1.0});
    CHECK(kpp_run.verdict == Verdict::Spreading);
    check_consistent(kpp_run);

    const auto fast = run(allee4(), 2.2, {1.0, -15.0, 30.0});
    CHECK(fast.verdict == Verdict::Vanishing);
    check_consistent(fast);

    const auto small = run(allee4(), 2.05, {0.05, -1.0, 2.0});
    const auto large = run(allee4(), 2.05, {1.0, -15.0, 30.0});
    CHECK(small.verdict == Verdict::Vanishing);
    CHECK(large.verdict == Verdict::Spreading);
    check_consistent(small);
    check_consistent(large);
}

TEST_CASE("hair trigger") {
    const auto below = hair_trigger_probe(kpp(), at_speed(1.5), grid, {1e-4});
    CHECK(below.front().verdict == Verdict::Spreading);

    const auto gap = hair_trigger_probe(allee4(), at_speed(2.05), grid, {0.0, 1e-4});
    CHECK(gap[0].verdict == Verdict::Vanishing);
    CHECK(gap[0].evidence.sup_final == 0.0);
    CHECK(gap[1].verdict == Verdict::Vanishing);

    CHECK_THROWS_AS(hair_trigger_probe(kpp(), at_speed(1.5), grid, {-1.0}), std::invalid_argument);
}

TEST_CASE("spreading runs sit below the maximal steady state") {
    const double c = 1.9;
    const auto res = classify_run(allee4(), at_speed(c), make_initial_datum(BumpDatum{1.0, -15.0, 30.0}, grid));
    REQUIRE(res.outcome.verdict == Verdict::Spreading);
    const auto p = maximal_steady_state(allee4(), c, 2.0, 1e-8, grid);
    double worst = -1.0;
    for (std::size_t i = 0; i < grid.n; ++i) {
        worst = std::max(worst, res.trajectory.final_field[i] - p.field[i]);
    }
    CHECK(worst <= Policy{}.eps_spread);
}

TEST_CASE("verdicts are monotone in the datum") {
    // Nested bumps: larger amplitude and wider support.
    const std::vector<BumpDatum> family{
        {0.02, -1.0, 2.0}, {0.05, -1.0, 2.0}, {0.2, -2.0, 5.0}, {0.5, -8.0, 15.0}, {1.0, -15.0, 30.0}};
    for (std::size_t k = 1; k < family.size(); ++k) {
        const Field lo = make_initial_datum(family[k - 1], grid);
        const Field hi = make_initial_datum(family[k], grid);
        for (std::size_t i = 0; i < grid.n; ++i) {
            REQUIRE(lo[i] <= hi[i]);
        }
    }
    for (double c : {2.05, 2.1}) {
        bool seen_spread = false;
        bool all_vanished = true;
        for (const auto& b : family) {
            const auto o = run(allee4(), c, b);
            check_consistent(o);
            if (seen_spread) {
                CHECK(o.verdict == Verdict::Spreading);
            }
            if (o.verdict == Verdict::Vanishing) {
                CHECK(all_vanished);
            }
            seen_spread = seen_spread || o.verdict == Verdict::Spreading;
            all_vanished = all_vanished && o.verdict == Verdict::Vanishing;
            if (o.verdict != Verdict::Vanishing && o.verdict != Verdict::Spreading) {
                MESSAGE("c=" << c << " amplitude " << b.amplitude << ": " << to_string(o.verdict));
            }
        }
    }
}

TEST_CASE("verdicts are monotone in the speed") {
    const BumpDatum datum{0.3, -5.0, 8.0};
    bool seen_vanish = false;
    for (double c : {1.8, 1.95, 2.02, 2.08, 2.15, 2.3}) {
        const auto o = run(allee4(), c, datum);
        check_consistent(o);
        if (seen_vanish) {
            CHECK(o.verdict == Verdict::Vanishing);
        }
        seen_vanish = seen_vanish || o.verdict == Verdict::Vanishing;
    }
    CHECK(seen_vanish);
}

TEST_CASE("policy and names") {
    Policy p;
    CHECK_NOTHROW(p.validate());
    p.eps_spread = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);

    const Policy q{};
    const nlohmann::json j = q;
    CHECK(j.get<Policy>().eps_ground == q.eps_ground);
    CHECK_THROWS(nlohmann::json{{"eps_vanish", -1.0}}.get<Policy>());

    for (auto v : {Verdict::Spreading, Verdict::Vanishing, Verdict::Grounding, Verdict::Undetermined}) {
        CHECK(verdict_from_string(to_string(v)) == v);
    }
    CHECK_THROWS(verdict_from_string("Maybe"));

    Outcome o;
    o.verdict = Verdict::Vanishing;
    const auto oj = to_json(o);
    CHECK(oj["verdict"] == "Vanishing");
    CHECK(oj["evidence"].contains("probe_min"));
    CHECK(oj["evidence"]["front_drift"].is_null());
}
