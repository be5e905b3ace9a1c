#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "shiftwave/grid.hpp"
#include "shiftwave/reaction.hpp"
#include "shiftwave/tridiag.hpp"

namespace shiftwave {

/// A solver invariant was breached (order, cap, finiteness). Not tunable.
class NumericalInconsistency : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Initial data

/// sigma * max(0, 1 - ((x - center) / half_width)^2).
struct BumpDatum {
    double amplitude = 1.0;
    double center = 0.0;
    double half_width = 1.0;
};

/// height * (tanh((x - left)/smoothing) - tanh((x - right)/smoothing)) / 2.
struct PlateauDatum {
    double height = 1.0;
    double left = -1.0;
    double right = 1.0;
    double smoothing = 1.0;
};

/// min(cap, amplitude e^{-rate x}).
struct ExpTailDatum {
    double amplitude = 1.0;
    double rate = 1.0;
    double cap = 1.0;
};

using DatumSpec = std::variant<BumpDatum, PlateauDatum, ExpTailDatum>;

/// Throws std::invalid_argument for negative amplitude or nonpositive widths/rates.
Field make_initial_datum(const DatumSpec& spec, const Grid1D& grid);

// ---------------------------------------------------------------------------
// Solver configuration

/// Homogeneous Neumann at x_max.
struct NeumannRight {};

/// Absorbing u(x_max) = 0. Meant for compactly supported data: the mirror of a
/// Neumann wall carries a constant mode growing like e^{r t}, which a tail of
/// size e^{-c x_max} seeds into a spurious invasion near t ~ c x_max.
struct DirichletRight {};

/// Dirichlet at x_max carrying the exact discrete linear evolution of a tail
/// u ~ A e^{-rate x}. Used for exponentially decaying data, where a Neumann
/// wall would feed a spurious constant mode growing like e^{r t}.
struct ExponentialTailRight {
    double rate = 1.0;
};

using RightBoundary = std::variant<NeumannRight, DirichletRight, ExponentialTailRight>;

struct SolveConfig {
    /// Forced speed; the equation is u_t = u_xx + c u_x + f(x, u).
    double c = 0.0;
    double dt = 0.02;
    double t_end = 300.0;
    double snapshot_every = 1.0;
    RightBoundary right = NeumannRight{};
    /// Keep full fields at snapshot times (otherwise only diagnostics).
    bool keep_fields = false;

    void validate() const;
};

/// Right boundary matching a datum: exponential tail for ExpTailDatum,
/// absorbing for the compactly supported kinds.
RightBoundary right_boundary_for(const DatumSpec& spec);

// ---------------------------------------------------------------------------
// Reaction sampled on a grid

/// f(x_i, s) with the x-dependence precomputed per node. An inert reaction
/// (f = 0) is available for pure transport checks.
class GridReaction {
public:
    GridReaction(const Grid1D& grid, const ReactionModel& model);
    static GridReaction inert(const Grid1D& grid);

    const Grid1D& grid() const { return grid_; }
    bool is_inert() const { return !model_.has_value(); }
    const std::optional<ReactionModel>& model() const { return model_; }

    double f(std::size_t i, double s) const;
    double dfds(std::size_t i, double s) const;
    double F(std::size_t i, double s) const;

    /// sup over nodes and s in [0, cap] of max(0, -df/ds).
    double decay_lipschitz(double cap) const;

private:
    explicit GridReaction(const Grid1D& grid) : grid_(grid) {}

    Grid1D grid_;
    std::optional<ReactionModel> model_;
    std::vector<double> weight_;
};

// ---------------------------------------------------------------------------
// Time stepping

/// True when the centred advection stencil keeps the implicit matrix an M-matrix.
bool advection_is_centered(double c, double dx);

/// One-step map u -> (I - dt L)^{-1} (u + dt f(x, u)), with L = D2 + c D1.
///
/// The matrix is an M-matrix with unit row sums away from x_min, so the map is
/// order preserving whenever 1 + dt df/ds >= 0 on the visited range.
class Stepper {
public:
    /// `cap` bounds the values the stepper will see; construction throws
    /// std::invalid_argument if dt * decay_lipschitz(cap) > 1.
    Stepper(GridReaction reaction, const SolveConfig& cfg, double cap);

    /// Advances `u` (size n) by dt in place. `boundary_value` is the right
    /// Dirichlet value at the new time level when the tail boundary is active.
    void advance(std::span<double> u, double boundary_value = 0.0) const;

    /// Per-step growth factor of the tail boundary value.
    double tail_growth() const { return tail_growth_; }
    double dt() const { return dt_; }
    const GridReaction& reaction() const { return reaction_; }

private:
    GridReaction reaction_;
    double dt_;
    bool dirichlet_right_;
    double tail_growth_ = 1.0;
    Tridiagonal matrix_;
};

/// One step of the scheme. Throws std::invalid_argument on non-finite input.
Field step(const Field& u, const ReactionModel& model, const SolveConfig& cfg);

// ---------------------------------------------------------------------------
// Diagnostics

struct EnergyReport {
    double value = 0.0;
    /// Largest x kept in the quadrature.
    double cut_x = 0.0;
    /// The weighted integrand left the representable range before the cut.
    bool overflow = false;
};

/// Weighted energy of u: integral of e^{cx} (|u'|^2 / 2 - F(x, u)), restricted
/// to x below the last node where e^{cx} u^2 > 1e-280. Gradients are cell
/// differences weighted at cell midpoints.
EnergyReport energy(const GridReaction& reaction, double c, const Field& u);
EnergyReport energy(const ReactionModel& model, double c, const Field& u);

/// Largest x with u >= level, linearly interpolated; none if sup u < level.
std::optional<double> front_position(const Field& u, double level);

struct DecayFit {
    double rate = 0.0;
    double intercept = 0.0;
    /// RMS residual of ln u about the fitted line.
    double residual = 0.0;
    bool poor_fit = false;
    double x_lo = 0.0;
    double x_hi = 0.0;
};

/// Least-squares slope of -ln u over nodes in [x_lo, x_hi].
/// Throws std::invalid_argument for windows narrower than 10 dx or with u <= 0.
DecayFit fit_decay_rate(const Field& u, double x_lo, double x_hi);

struct DiagnosticsOptions {
    double front_level = 0.5;
    double probe_lo = -10.0;
    double probe_hi = 10.0;
    /// Tail window: starts right of the front where u <= tail_start * sup ...
    double tail_start = 1e-3;
    /// ... spans at most tail_width ...
    double tail_width = 20.0;
    /// ... and stops before u drops below tail_floor.
    double tail_floor = 1e-250;
    bool energy = true;
};

/// Tail fit right of the front (or of the maximum when there is no front).
std::optional<DecayFit> fit_right_tail(const Field& u, const DiagnosticsOptions& opts);

struct Diagnostics {
    double t = 0.0;
    double sup = 0.0;
    double mass = 0.0;
    std::optional<double> front_x;
    /// Leftmost node where u attains its maximum.
    double peak_x = 0.0;
    EnergyReport energy;
    std::optional<DecayFit> decay;
    /// min of u over the probe window.
    double probe_min = 0.0;
};

struct Snapshot {
    double t = 0.0;
    Field field;
};

struct Trajectory {
    std::vector<Diagnostics> series;
    std::vector<Snapshot> snapshots;
    Field final_field;
    /// max(||u0||_inf, 1), the bound the scheme preserves.
    double cap = 1.0;
    /// Time at which an exponential-tail boundary grew past the linear regime
    /// and was replaced by a Neumann wall.
    std::optional<double> tail_released_at;
};

Diagnostics diagnose(const GridReaction& reaction, double c, double t, const Field& u,
                     const DiagnosticsOptions& opts);

/// Runs the scheme from u0 to cfg.t_end, recording diagnostics every
/// cfg.snapshot_every. A tail boundary whose value exceeds 1e-6 is released
/// to Neumann (see Trajectory::tail_released_at). Throws NumericalInconsistency
/// if a value leaves [-1e-12, cap + 1e-9] or becomes non-finite.
Trajectory evolve(const GridReaction& reaction, const SolveConfig& cfg, const Field& u0,
                  const DiagnosticsOptions& opts = {});
Trajectory evolve(const ReactionModel& model, const SolveConfig& cfg, const Field& u0,
                  const DiagnosticsOptions& opts = {});

// ---------------------------------------------------------------------------
// Serialization

void to_json(nlohmann::json& j, const DatumSpec& spec);
void from_json(const nlohmann::json& j, DatumSpec& spec);
void to_json(nlohmann::json& j, const SolveConfig& cfg);
void from_json(const nlohmann::json& j, SolveConfig& cfg);
void to_json(nlohmann::json& j, const Grid1D& grid);
void from_json(const nlohmann::json& j, Grid1D& grid);

/// Fixed-format number with 17 significant digits.
std::string format_number(double v);
/// "x,u" rows.
std::string snapshot_csv(const Field& u);
/// "t,sup,mass,front_x,energy,decay_rate" rows; missing values are empty.
std::string series_csv(const std::vector<Diagnostics>& series);

}  // namespace shiftwave
