#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "shiftwave/grid.hpp"
#include "shiftwave/pde.hpp"
#include "shiftwave/reaction.hpp"

namespace shiftwave {

struct SteadyOptions {
    /// Largest step; the march halves it while dt * L_f(sup u) > 1.
    double dt = 0.02;
    /// March time budget.
    double t_budget = 3000.0;
    /// Transition layers closer than this to a box edge are reported as box artefacts.
    double edge_margin = 20.0;
};

struct SteadyState {
    Field field;
    /// Sup norm of the discrete elliptic operator applied to `field`.
    double residual = 0.0;
    double M_used = 0.0;
    double t_reached = 0.0;
    bool converged = false;
    double end_left = 0.0;
    double end_right = 0.0;
    /// First crossing of level 1/2 from the left, if any.
    std::optional<double> layer_x;
    /// Increasing, with limits 0 / 1 at the box ends and the layer away from the edges.
    bool in_box = false;
    bool increasing = false;
    /// Human-readable caveat; empty when in_box and converged.
    std::string note;
    /// (t, sup |u^{n+1} - u^n| / dt) at unit time intervals.
    std::vector<std::pair<double, double>> rate_history;
};

/// Marches u from the constant M down to the maximal steady state.
///
/// Every step is checked to be pointwise nonincreasing in time (a breach
/// throws NumericalInconsistency). Stops once sup |du/dt| < tol / 2 and the
/// residual is <= tol; otherwise returns converged = false at the budget.
/// Throws std::invalid_argument unless M > 1 and tol > 0.
SteadyState maximal_steady_state(const ReactionModel& model, double c, double M, double tol,
                                 const Grid1D& grid, const SteadyOptions& opts = {});

/// Sup over nodes 1..n-1 of D2 u + c D1 u + f(x, u), with the stencils of
/// the time stepper and a mirror ghost at x_max. u(x_min) enters as given.
double steady_residual(const ReactionModel& model, double c, const Field& u);
double steady_residual(const GridReaction& reaction, double c, const Field& u);

nlohmann::json to_json(const SteadyState& state);

}  // namespace shiftwave
