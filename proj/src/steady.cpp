#include "shiftwave/steady.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace shiftwave {

double steady_residual(const GridReaction& reaction, double c, const Field& u) {
    const Grid1D& grid = u.grid;
    if (!(reaction.grid() == grid)) {
        throw std::invalid_argument("steady_residual: reaction and field grids differ");
    }
    grid.validate();
    const std::size_t n = grid.n;
    const double dx = grid.dx();
    const bool centered = advection_is_centered(c, dx);
    double worst = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        const double right = (i + 1 < n) ? u[i + 1] : u[n - 2];
        const double d2 = (right - 2.0 * u[i] + u[i - 1]) / (dx * dx);
        const double d1 = centered ? (right - u[i - 1]) / (2.0 * dx) : (right - u[i]) / dx;
        worst = std::max(worst, std::abs(d2 + c * d1 + reaction.f(i, u[i])));
    }
    return worst;
}

double steady_residual(const ReactionModel& model, double c, const Field& u) {
    return steady_residual(GridReaction(u.grid, model), c, u);
}

SteadyState maximal_steady_state(const ReactionModel& model, double c, double M, double tol,
                                 const Grid1D& grid, const SteadyOptions& opts) {
    if (!(M > 1.0) || !std::isfinite(M)) {
        throw std::invalid_argument("steady: start constant M must exceed 1");
    }
    if (!(tol > 0.0)) {
        throw std::invalid_argument("steady: tol must be positive");
    }
    if (!(opts.dt > 0.0) || !(opts.t_budget > 0.0)) {
        throw std::invalid_argument("steady: dt and t_budget must be positive");
    }
    grid.validate();
    const GridReaction reaction(grid, model);

    SolveConfig cfg;
    cfg.c = c;
    cfg.t_end = 0.0;
    // Steppers keyed by the number of halvings of opts.dt.
    std::map<int, Stepper> steppers;
    auto stepper_for = [&](double sup) -> const Stepper& {
        const double lip = reaction.decay_lipschitz(std::max(sup, 1.0));
        int k = 0;
        while (opts.dt * std::ldexp(1.0, -k) * lip > 1.0) {
            ++k;
        }
        auto it = steppers.find(k);
        if (it == steppers.end()) {
            SolveConfig local = cfg;
            local.dt = opts.dt * std::ldexp(1.0, -k);
            local.snapshot_every = local.dt;
            it = steppers.emplace(k, Stepper(reaction, local, std::max(sup, 1.0))).first;
        }
        return it->second;
    };

    SteadyState out;
    out.M_used = M;
    Field u(grid, M);
    u[0] = 0.0;
    std::vector<double> prev(grid.n);
    double t = 0.0;
    double next_record = 0.0;
    double rate = std::numeric_limits<double>::infinity();
    while (t < opts.t_budget) {
        const Stepper& stepper = stepper_for(u.sup());
        const double dt = stepper.dt();
        std::copy(u.values.begin(), u.values.end(), prev.begin());
        stepper.advance(u.values);
        t += dt;
        double change = 0.0;
        for (std::size_t i = 0; i < grid.n; ++i) {
            const double d = u[i] - prev[i];
            if (!(d <= 1e-12) || !(u[i] >= -1e-12)) {
                throw NumericalInconsistency("steady: march is not monotone in time at x = " +
                                             format_number(grid.x(i)) +
                                             ", t = " + format_number(t));
            }
            change = std::max(change, -d);
        }
        rate = change / dt;
        if (t >= next_record) {
            out.rate_history.emplace_back(t, rate);
            next_record += 1.0;
        }
        if (rate < 0.5 * tol && steady_residual(reaction, c, u) <= tol) {
            out.converged = true;
            break;
        }
    }
    out.t_reached = t;
    out.residual = steady_residual(reaction, c, u);
    out.end_left = u[0];
    out.end_right = u[grid.n - 1];
    // The Dirichlet node is pinned; judge the left limit one node in.
    const double left_inner = u[1];
    out.increasing = true;
    for (std::size_t i = 1; i < grid.n; ++i) {
        if (u[i] < u[i - 1]) {
            out.increasing = false;
            break;
        }
    }
    for (std::size_t i = 1; i < grid.n; ++i) {
        if (u[i] >= 0.5) {
            const double frac = (0.5 - u[i - 1]) / (u[i] - u[i - 1]);
            out.layer_x = grid.x(i - 1) + frac * grid.dx();
            break;
        }
    }
    const bool ends_ok = left_inner <= 1e-3 && out.end_right >= 1.0 - 1e-3;
    const bool layer_inside = out.layer_x && *out.layer_x >= grid.x_min + opts.edge_margin &&
                              *out.layer_x <= grid.x_max - opts.edge_margin;
    out.in_box = ends_ok && layer_inside && out.increasing;
    if (!out.converged) {
        out.note = "march stalled above tolerance within the time budget";
    } else if (!out.layer_x || !layer_inside) {
        out.note = "no nontrivial steady state in box: transition layer pinned to a box edge";
    } else if (!out.in_box) {
        out.note = "steady state does not reach the limits 0 and 1 inside the box";
    }
    out.field = std::move(u);
    return out;
}

nlohmann::json to_json(const SteadyState& state) {
    nlohmann::json j = {{"residual", state.residual},
                        {"M_used", state.M_used},
                        {"t_reached", state.t_reached},
                        {"converged", state.converged},
                        {"end_values", {state.end_left, state.end_right}},
                        {"increasing", state.increasing},
                        {"in_box", state.in_box}};
    j["layer_x"] = state.layer_x ? nlohmann::json(*state.layer_x) : nlohmann::json(nullptr);
    if (!state.note.empty()) {
        j["note"] = state.note;
    }
    return j;
}

}  // namespace shiftwave
