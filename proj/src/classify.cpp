#include "shiftwave/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "shiftwave/steady.hpp"
#include "shiftwave/waves.hpp"

namespace shiftwave {

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Spreading: return "Spreading";
        case Verdict::Vanishing: return "Vanishing";
        case Verdict::Grounding: return "Grounding";
        case Verdict::Undetermined: return "Undetermined";
    }
    return "Undetermined";
}

Verdict verdict_from_string(const std::string& s) {
    for (Verdict v : {Verdict::Spreading, Verdict::Vanishing, Verdict::Grounding,
                      Verdict::Undetermined}) {
        if (to_string(v) == s) {
            return v;
        }
    }
    throw std::invalid_argument("unknown verdict '" + s + "'");
}

std::string to_string(Lean l) {
    switch (l) {
        case Lean::TowardSpreading: return "spreading";
        case Lean::TowardVanishing: return "vanishing";
        case Lean::None: return "none";
    }
    return "none";
}

void Policy::validate() const {
    if (!(eps_vanish > 0.0) || !(eps_spread > 0.0) || !(eps_ground > 0.0) ||
        !(drift_max > 0.0) || !(steady_tol > 0.0)) {
        throw std::invalid_argument("policy: thresholds must be positive");
    }
    if (!(tail_slack >= 0.0 && tail_slack < 1.0)) {
        throw std::invalid_argument("policy: tail_slack must lie in [0, 1)");
    }
    if (!(core_margin >= 0.0) || !(probe_hi > probe_lo)) {
        throw std::invalid_argument("policy: bad core or probe window");
    }
}

Classified classify_run(const ReactionModel& model, const SolveConfig& cfg, const Field& u0,
                        const Policy& policy, const std::optional<Field>& pcplus) {
    policy.validate();
    model.validate();
    DiagnosticsOptions opts;
    opts.probe_lo = policy.probe_lo;
    opts.probe_hi = policy.probe_hi;
    opts.energy = policy.record_energy;

    Classified out;
    out.trajectory = evolve(model, cfg, u0, opts);
    const auto& series = out.trajectory.series;
    const Field& last = out.trajectory.final_field;
    Outcome& o = out.outcome;
    Evidence& ev = o.evidence;
    o.t_used = cfg.t_end;

    // Last-quarter window.
    const double t_q = 0.75 * cfg.t_end;
    std::size_t q0 = series.size() - 1;
    while (q0 > 0 && series[q0 - 1].t >= t_q - 1e-9) {
        --q0;
    }
    const Diagnostics& first_q = series[q0];
    const Diagnostics& final = series.back();

    ev.sup_final = final.sup;
    ev.sup_trend = final.sup - first_q.sup;
    ev.probe_min = std::numeric_limits<double>::infinity();
    bool sup_nonincreasing = true;
    for (std::size_t k = q0; k < series.size(); ++k) {
        ev.probe_min = std::min(ev.probe_min, series[k].probe_min);
        if (k > q0 && series[k].sup > series[k - 1].sup * (1.0 + 1e-12)) {
            sup_nonincreasing = false;
        }
    }
    if (first_q.front_x && final.front_x) {
        ev.front_drift = *final.front_x - *first_q.front_x;
    } else if (!first_q.front_x && !final.front_x) {
        ev.front_drift = final.peak_x - first_q.peak_x;
    }
    if (final.decay) {
        ev.right_tail_rate = final.decay->rate;
    }
    const double r = model.plus.r;
    if (cfg.c >= linear_speed(r)) {
        ev.lambda_min = (1.0 - policy.tail_slack) * decay_rate_lambda(cfg.c, r, 0.0);
    }

    if (ev.sup_final < policy.eps_vanish && sup_nonincreasing) {
        o.verdict = Verdict::Vanishing;
        return out;
    }

    const Grid1D& grid = u0.grid;
    Field reference;
    if (pcplus) {
        if (!(pcplus->grid == grid)) {
            throw std::invalid_argument("classify: reference steady state on a different grid");
        }
        reference = *pcplus;
    } else {
        SteadyOptions sopts;
        sopts.dt = cfg.dt;
        const SteadyState st = maximal_steady_state(model, cfg.c, 2.0, policy.steady_tol, grid, sopts);
        if (st.converged) {
            reference = st.field;
        }
    }
    if (reference.size() == grid.n) {
        const double lo = grid.x_min + policy.core_margin;
        const double hi = std::min(grid.x_max - policy.core_margin, policy.core_right);
        if (hi > lo) {
            ev.dist_to_pcplus_on_core = sup_distance(last, reference, lo, hi);
        }
    }
    if (ev.dist_to_pcplus_on_core && *ev.dist_to_pcplus_on_core < policy.eps_spread) {
        o.verdict = Verdict::Spreading;
        return out;
    }

    const bool tail_ok = ev.lambda_min == 0.0 ||
                         (ev.right_tail_rate && *ev.right_tail_rate >= ev.lambda_min);
    if (ev.probe_min >= policy.eps_ground && ev.front_drift &&
        std::abs(*ev.front_drift) < policy.drift_max && tail_ok &&
        ev.sup_final > policy.eps_vanish) {
        o.verdict = Verdict::Grounding;
        return out;
    }

    o.verdict = Verdict::Undetermined;
    if (first_q.front_x && final.front_x && *ev.front_drift != 0.0) {
        o.lean = *ev.front_drift > 0.0 ? Lean::TowardSpreading : Lean::TowardVanishing;
    } else if (ev.sup_trend != 0.0) {
        o.lean = ev.sup_trend > 0.0 ? Lean::TowardSpreading : Lean::TowardVanishing;
    }
    return out;
}

Outcome classify(const ReactionModel& model, const SolveConfig& cfg, const Field& u0,
                 const Policy& policy, const std::optional<Field>& pcplus) {
    return classify_run(model, cfg, u0, policy, pcplus).outcome;
}

std::vector<Outcome> hair_trigger_probe(const ReactionModel& model, const SolveConfig& cfg,
                                        const Grid1D& grid, const std::vector<double>& amplitudes,
                                        double center, double half_width, const Policy& policy) {
    std::vector<Outcome> out;
    out.reserve(amplitudes.size());
    for (double sigma : amplitudes) {
        if (!(sigma >= 0.0)) {
            throw std::invalid_argument("hair_trigger_probe: amplitudes must be >= 0");
        }
        const Field u0 = make_initial_datum(BumpDatum{sigma, center, half_width}, grid);
        out.push_back(classify(model, cfg, u0, policy));
    }
    return out;
}

namespace {

nlohmann::json optional_number(const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

nlohmann::json to_json(const Outcome& outcome) {
    const Evidence& ev = outcome.evidence;
    return {{"verdict", to_string(outcome.verdict)},
            {"t_used", outcome.t_used},
            {"lean", to_string(outcome.lean)},
            {"evidence",
             {{"sup_final", ev.sup_final},
              {"dist_to_pcplus_on_core", optional_number(ev.dist_to_pcplus_on_core)},
              {"front_drift", optional_number(ev.front_drift)},
              {"right_tail_rate", optional_number(ev.right_tail_rate)},
              {"probe_min", ev.probe_min},
              {"sup_trend", ev.sup_trend},
              {"lambda_min", ev.lambda_min}}}};
}

void to_json(nlohmann::json& j, const Policy& p) {
    j = {{"eps_vanish", p.eps_vanish},   {"eps_spread", p.eps_spread},
         {"eps_ground", p.eps_ground},   {"drift_max", p.drift_max},
         {"tail_slack", p.tail_slack},   {"core_margin", p.core_margin},
         {"core_right", p.core_right},   {"probe_lo", p.probe_lo},
         {"probe_hi", p.probe_hi},       {"steady_tol", p.steady_tol},
         {"record_energy", p.record_energy}};
}

void from_json(const nlohmann::json& j, Policy& p) {
    Policy out;
    out.eps_vanish = j.value("eps_vanish", out.eps_vanish);
    out.eps_spread = j.value("eps_spread", out.eps_spread);
    out.eps_ground = j.value("eps_ground", out.eps_ground);
    out.drift_max = j.value("drift_max", out.drift_max);
    out.tail_slack = j.value("tail_slack", out.tail_slack);
    out.core_margin = j.value("core_margin", out.core_margin);
    out.core_right = j.value("core_right", out.core_right);
    out.probe_lo = j.value("probe_lo", out.probe_lo);
    out.probe_hi = j.value("probe_hi", out.probe_hi);
    out.steady_tol = j.value("steady_tol", out.steady_tol);
    out.record_energy = j.value("record_energy", out.record_energy);
    out.validate();
    p = out;
}

}  // namespace shiftwave
