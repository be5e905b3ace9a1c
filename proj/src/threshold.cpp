#include "shiftwave/threshold.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "shiftwave/steady.hpp"
#include "shiftwave/waves.hpp"

namespace shiftwave {

namespace {

Probe run_probe(const ReactionModel& model, SolveConfig cfg, const Field& u0,
                const Policy& policy, double parameter, const std::optional<Field>& pcplus) {
    Probe p;
    p.parameter = parameter;
    p.outcome = classify(model, cfg, u0, policy, pcplus);
    if (p.outcome.verdict == Verdict::Undetermined) {
        cfg.t_end *= 2.0;
        p.outcome = classify(model, cfg, u0, policy, pcplus);
        p.refined = true;
    }
    switch (p.outcome.verdict) {
        case Verdict::Spreading: p.spreading_side = true; break;
        case Verdict::Vanishing:
        case Verdict::Grounding: p.spreading_side = false; break;
        case Verdict::Undetermined:
            p.spreading_side = p.outcome.lean == Lean::TowardSpreading;
            p.by_lean = true;
            break;
    }
    return p;
}

// Spreading probes must all sit on one side of the non-spreading ones.
bool monotone(const std::vector<Probe>& probes, bool spreading_below) {
    double spread_max = -std::numeric_limits<double>::infinity();
    double spread_min = std::numeric_limits<double>::infinity();
    double other_max = -std::numeric_limits<double>::infinity();
    double other_min = std::numeric_limits<double>::infinity();
    for (const auto& p : probes) {
        if (p.spreading_side) {
            spread_max = std::max(spread_max, p.parameter);
            spread_min = std::min(spread_min, p.parameter);
        } else {
            other_max = std::max(other_max, p.parameter);
            other_min = std::min(other_min, p.parameter);
        }
    }
    return spreading_below ? spread_max < other_min : other_max < spread_min;
}

int count_lean(const std::vector<Probe>& probes) {
    return static_cast<int>(
        std::count_if(probes.begin(), probes.end(), [](const Probe& p) { return p.by_lean; }));
}

}  // namespace

std::string to_string(ThresholdFlag f) {
    switch (f) {
        case ThresholdFlag::Finite: return "finite";
        case ThresholdFlag::Zero: return "zero";
        case ThresholdFlag::Infinite: return "infinite";
        case ThresholdFlag::NotBracketed: return "not_bracketed";
    }
    return "finite";
}

std::string to_string(Zone z) {
    switch (z) {
        case Zone::ForcedSpread: return "forced-spread";
        case Zone::ForcedVanish: return "forced-vanish";
        case Zone::DataDependent: return "data-dependent";
    }
    return "data-dependent";
}

ThresholdResult threshold_speed(const ReactionModel& model, const Field& u0, double tol,
                                const SearchOptions& search, double pad) {
    if (!(tol > 0.0)) {
        throw std::invalid_argument("threshold_speed: tol must be positive");
    }
    if (!(pad >= 0.0 && pad < 1.0)) {
        throw std::invalid_argument("threshold_speed: pad must lie in [0, 1)");
    }
    if (!(u0.sup() > 0.0)) {
        throw std::invalid_argument("threshold_speed: datum must be nontrivial");
    }
    const double r = model.plus.r;
    const double c_star = minimal_wave_speed(model.plus, 1e-6).c_star;

    ThresholdResult out;
    out.lo = linear_speed(r) * (1.0 - pad);
    out.hi = c_star * (1.0 + pad);
    auto probe = [&](double c) {
        SolveConfig cfg = search.solve;
        cfg.c = c;
        out.probes.push_back(run_probe(model, cfg, u0, search.policy, c, std::nullopt));
        return out.probes.back().spreading_side;
    };
    const bool lo_spreads = probe(out.lo);
    const bool hi_spreads = probe(out.hi);
    if (!lo_spreads && hi_spreads) {
        throw NumericalInconsistency("threshold_speed: spreading at c = " +
                                     format_number(out.hi) + " but not at c = " +
                                     format_number(out.lo));
    }
    if (lo_spreads == hi_spreads) {
        out.flag = ThresholdFlag::NotBracketed;
        out.valid = false;
        out.value = lo_spreads ? out.hi : out.lo;
        out.lean_assignments = count_lean(out.probes);
        return out;
    }
    while (out.hi - out.lo > tol) {
        const double mid = 0.5 * (out.lo + out.hi);
        (probe(mid) ? out.lo : out.hi) = mid;
    }
    out.value = 0.5 * (out.lo + out.hi);
    out.valid = monotone(out.probes, true);
    out.lean_assignments = count_lean(out.probes);
    return out;
}

BumpDatum BumpFamily::at(double sigma) const {
    return BumpDatum{sigma * height, center, half_width + support_growth * sigma};
}

double admissible_sigma_cap(const ReactionModel& model, const BumpFamily& family, double dt,
                            const Grid1D& grid) {
    if (!(family.height > 0.0)) {
        throw std::invalid_argument("bump family: height must be positive");
    }
    const GridReaction reaction(grid, model);
    auto ok = [&](double sigma) {
        return dt * reaction.decay_lipschitz(std::max(1.0, sigma * family.height)) <= 1.0;
    };
    double lo = 1.0 / family.height;
    if (!ok(lo)) {
        throw std::invalid_argument("bump family: dt too large even for unit amplitude");
    }
    double hi = 2.0 * lo;
    while (ok(hi)) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e12) {
            return lo;
        }
    }
    for (int k = 0; k < 60; ++k) {
        const double mid = 0.5 * (lo + hi);
        (ok(mid) ? lo : hi) = mid;
    }
    return lo;
}

ThresholdResult threshold_sigma(const ReactionModel& model, double c, const BumpFamily& family,
                                const Grid1D& grid, double rel_tol, const SearchOptions& search,
                                double sigma_min, double sigma_max) {
    if (!(rel_tol > 0.0) || !(sigma_min > 0.0)) {
        throw std::invalid_argument("threshold_sigma: rel_tol and sigma_min must be positive");
    }
    SolveConfig cfg = search.solve;
    cfg.c = c;
    if (!(sigma_max > 0.0)) {
        sigma_max = admissible_sigma_cap(model, family, cfg.dt, grid);
    }
    if (!(sigma_max > sigma_min)) {
        throw std::invalid_argument("threshold_sigma: sigma_max must exceed sigma_min");
    }

    SteadyOptions sopts;
    sopts.dt = cfg.dt;
    std::optional<Field> pcplus;
    const SteadyState st = maximal_steady_state(model, c, 2.0, search.policy.steady_tol, grid, sopts);
    if (st.converged) {
        pcplus = st.field;
    }

    ThresholdResult out;
    auto probe = [&](double sigma) {
        const Field u0 = make_initial_datum(family.at(sigma), grid);
        out.probes.push_back(run_probe(model, cfg, u0, search.policy, sigma, pcplus));
        return out.probes.back().spreading_side;
    };
    out.lo = sigma_min;
    out.hi = sigma_max;
    if (probe(sigma_min)) {
        out.flag = ThresholdFlag::Zero;
        out.value = 0.0;
        out.lo = 0.0;
        out.hi = sigma_min;
        out.lean_assignments = count_lean(out.probes);
        return out;
    }
    if (!probe(sigma_max)) {
        out.flag = ThresholdFlag::Infinite;
        out.value = std::numeric_limits<double>::infinity();
        out.lo = sigma_max;
        out.hi = std::numeric_limits<double>::infinity();
        out.lean_assignments = count_lean(out.probes);
        return out;
    }
    while (out.hi - out.lo > rel_tol * out.lo) {
        const double mid =
            out.hi > 4.0 * out.lo ? std::sqrt(out.lo * out.hi) : 0.5 * (out.lo + out.hi);
        (probe(mid) ? out.hi : out.lo) = mid;
    }
    out.value = 0.5 * (out.lo + out.hi);
    out.valid = monotone(out.probes, false);
    out.lean_assignments = count_lean(out.probes);
    return out;
}

Zone predicted_zone(double alpha, double c, double r, double c_star) {
    const double sr = std::sqrt(r);
    if (c < 2.0 * sr) {
        return Zone::ForcedSpread;
    }
    if (alpha < sr && c < c_alpha(alpha, r)) {
        return Zone::ForcedSpread;
    }
    // Slowly decaying data: the datum tail, not c*, sets the vanishing threshold.
    const double vanish_above = alpha <= alpha_star(c_star, r) ? c_alpha(alpha, r) : c_star;
    if (c > vanish_above) {
        return Zone::ForcedVanish;
    }
    return Zone::DataDependent;
}

std::vector<RegimeEntry> regime_map(const ReactionModel& model, const std::vector<double>& alphas,
                                    const std::vector<double>& cs, double A, double cap,
                                    const Grid1D& grid, const SearchOptions& search,
                                    unsigned workers) {
    for (double a : alphas) {
        if (!(a > 0.0)) {
            throw std::invalid_argument("regime_map: alphas must be positive");
        }
    }
    for (double c : cs) {
        if (!(c > 0.0)) {
            throw std::invalid_argument("regime_map: speeds must be positive");
        }
    }
    if (!(A > 0.0) || !(cap > 0.0)) {
        throw std::invalid_argument("regime_map: amplitude and cap must be positive");
    }
    const double r = model.plus.r;
    const double c_star = minimal_wave_speed(model.plus, 1e-6).c_star;
    std::vector<RegimeEntry> entries(alphas.size() * cs.size());
    parallel_for(entries.size(), workers, [&](std::size_t k) {
        RegimeEntry& e = entries[k];
        e.alpha = alphas[k / cs.size()];
        e.c = cs[k % cs.size()];
        e.zone = predicted_zone(e.alpha, e.c, r, c_star);
        const ExpTailDatum datum{A, e.alpha, cap};
        SolveConfig cfg = search.solve;
        cfg.c = e.c;
        cfg.right = right_boundary_for(datum);
        e.outcome = classify(model, cfg, make_initial_datum(datum, grid), search.policy);
    });
    return entries;
}

std::string regime_csv(const std::vector<RegimeEntry>& entries) {
    std::ostringstream os;
    os << "alpha,c,verdict,predicted_zone\n";
    for (const auto& e : entries) {
        os << format_number(e.alpha) << ',' << format_number(e.c) << ','
           << to_string(e.outcome.verdict) << ',' << to_string(e.zone) << '\n';
    }
    return os.str();
}

nlohmann::json to_json(const ThresholdResult& result) {
    auto num = [](double v) {
        return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(v > 0 ? "inf" : "-inf");
    };
    nlohmann::json probes = nlohmann::json::array();
    for (const auto& p : result.probes) {
        probes.push_back({{"parameter", p.parameter},
                          {"outcome", to_json(p.outcome)},
                          {"spreading_side", p.spreading_side},
                          {"refined", p.refined},
                          {"by_lean", p.by_lean}});
    }
    return {{"value", num(result.value)},
            {"bracket", {num(result.lo), num(result.hi)}},
            {"flag", to_string(result.flag)},
            {"valid", result.valid},
            {"lean_assignments", result.lean_assignments},
            {"probes", probes}};
}

nlohmann::json to_json(const RegimeEntry& e) {
    return {{"alpha", e.alpha},
            {"c", e.c},
            {"verdict", to_string(e.outcome.verdict)},
            {"predicted_zone", to_string(e.zone)},
            {"outcome", to_json(e.outcome)}};
}

void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& body) {
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            body(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) {
                        error = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

}  // namespace shiftwave
