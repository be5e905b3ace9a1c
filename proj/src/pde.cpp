#include "shiftwave/pde.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace shiftwave {

namespace {

constexpr double kEnergyFloorLog = -644.72382603833279;  // ln(1e-280)
constexpr double kExpOverflow = 709.0;
constexpr double kTailLinearLimit = 1e-6;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

// ---------------------------------------------------------------------------
// Initial data

Field make_initial_datum(const DatumSpec& spec, const Grid1D& grid) {
    grid.validate();
    Field out(grid);
    std::visit(overloaded{
                   [&](const BumpDatum& b) {
                       if (!(b.amplitude >= 0.0) || !(b.half_width > 0.0)) {
                           throw std::invalid_argument(
                               "bump: amplitude must be >= 0 and half_width > 0");
                       }
                       for (std::size_t i = 0; i < grid.n; ++i) {
                           const double z = (grid.x(i) - b.center) / b.half_width;
                           out[i] = b.amplitude * std::max(0.0, 1.0 - z * z);
                       }
                   },
                   [&](const PlateauDatum& p) {
                       if (!(p.height > 0.0) || !(p.right > p.left) || !(p.smoothing > 0.0)) {
                           throw std::invalid_argument(
                               "plateau: need height > 0, right > left, smoothing > 0");
                       }
                       for (std::size_t i = 0; i < grid.n; ++i) {
                           const double x = grid.x(i);
                           out[i] = 0.5 * p.height *
                                    (std::tanh((x - p.left) / p.smoothing) -
                                     std::tanh((x - p.right) / p.smoothing));
                       }
                   },
                   [&](const ExpTailDatum& e) {
                       if (!(e.amplitude > 0.0) || !(e.rate > 0.0) || !(e.cap > 0.0)) {
                           throw std::invalid_argument(
                               "exp_tail: amplitude, rate and cap must be positive");
                       }
                       const double log_a = std::log(e.amplitude);
                       for (std::size_t i = 0; i < grid.n; ++i) {
                           out[i] = std::min(e.cap, std::exp(log_a - e.rate * grid.x(i)));
                       }
                   },
               },
               spec);
    return out;
}

// ---------------------------------------------------------------------------
// Configuration

void SolveConfig::validate() const {
    if (!(c >= 0.0) || !std::isfinite(c)) {
        throw std::invalid_argument("solve: c must be finite and >= 0");
    }
    if (!(dt > 0.0) || !(t_end >= 0.0) || !(snapshot_every > 0.0)) {
        throw std::invalid_argument("solve: need dt > 0, t_end >= 0, snapshot_every > 0");
    }
    const double stride = snapshot_every / dt;
    if (std::abs(stride - std::round(stride)) > 1e-6 * stride || std::round(stride) < 1.0) {
        throw std::invalid_argument("solve: snapshot_every must be a multiple of dt");
    }
    const double steps = t_end / dt;
    if (std::abs(steps - std::round(steps)) > 1e-6 * std::max(1.0, steps)) {
        throw std::invalid_argument("solve: t_end must be a multiple of dt");
    }
    if (const auto* tail = std::get_if<ExponentialTailRight>(&right)) {
        if (!(tail->rate > 0.0)) {
            throw std::invalid_argument("solve: tail boundary rate must be positive");
        }
    }
}

RightBoundary right_boundary_for(const DatumSpec& spec) {
    if (const auto* e = std::get_if<ExpTailDatum>(&spec)) {
        return ExponentialTailRight{e->rate};
    }
    return DirichletRight{};
}

// ---------------------------------------------------------------------------
// GridReaction

GridReaction::GridReaction(const Grid1D& grid, const ReactionModel& model)
    : grid_(grid), model_(model), weight_(grid.n) {
    model.validate();
    for (std::size_t i = 0; i < grid.n; ++i) {
        weight_[i] = model.weight(grid.x(i));
    }
}

GridReaction GridReaction::inert(const Grid1D& grid) { return GridReaction(grid); }

double GridReaction::f(std::size_t i, double s) const {
    if (!model_ || s == 0.0) {
        return 0.0;
    }
    const double w = weight_[i];
    return w * model_->plus.g(s) + (1.0 - w) * model_->g_minus(s);
}

double GridReaction::dfds(std::size_t i, double s) const {
    if (!model_) {
        return 0.0;
    }
    const double w = weight_[i];
    return w * model_->plus.dg(s) + (1.0 - w) * model_->dg_minus(s);
}

double GridReaction::F(std::size_t i, double s) const {
    if (!model_) {
        return 0.0;
    }
    const double w = weight_[i];
    return w * model_->plus.G(s) + (1.0 - w) * model_->G_minus(s);
}

double GridReaction::decay_lipschitz(double cap) const {
    if (!model_) {
        return 0.0;
    }
    // df/ds is affine in w, so the extreme weights on the grid bound it.
    const auto [w_lo, w_hi] = std::minmax_element(weight_.begin(), weight_.end());
    constexpr int samples = 2001;
    double worst = 0.0;
    for (int k = 0; k < samples; ++k) {
        const double s = cap * k / (samples - 1);
        for (double w : {*w_lo, *w_hi}) {
            const double d = w * model_->plus.dg(s) + (1.0 - w) * model_->dg_minus(s);
            worst = std::max(worst, -d);
        }
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Stepper

bool advection_is_centered(double c, double dx) { return std::abs(c) * dx <= 2.0; }

Stepper::Stepper(GridReaction reaction, const SolveConfig& cfg, double cap)
    : reaction_(std::move(reaction)),
      dt_(cfg.dt),
      dirichlet_right_(!std::holds_alternative<NeumannRight>(cfg.right)),
      matrix_(reaction_.grid().n) {
    cfg.validate();
    const Grid1D& grid = reaction_.grid();
    grid.validate();
    const double lip = reaction_.decay_lipschitz(cap);
    if (dt_ * lip > 1.0) {
        throw std::invalid_argument("solve: dt * L_f = " + std::to_string(dt_ * lip) +
                                    " > 1 breaks monotonicity of the reaction update (cap " +
                                    std::to_string(cap) + ")");
    }

    const double dx = grid.dx();
    const double c = cfg.c;
    const double diff = dt_ / (dx * dx);
    const bool centered = advection_is_centered(c, dx);
    // Coefficients of (I - dt L) on u[i-1], u[i], u[i+1].
    double lower = -diff;
    double diag = 1.0 + 2.0 * diff;
    double upper = -diff;
    if (centered) {
        lower += c * dt_ / (2.0 * dx);
        upper -= c * dt_ / (2.0 * dx);
    } else {
        upper -= c * dt_ / dx;
        diag += c * dt_ / dx;
    }
    const std::size_t n = grid.n;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        matrix_.lower[i] = lower;
        matrix_.diag[i] = diag;
        matrix_.upper[i] = upper;
    }
    // x_min: homogeneous Dirichlet.
    matrix_.diag[0] = 1.0;
    matrix_.upper[0] = 0.0;
    if (dirichlet_right_) {
        matrix_.lower[n - 1] = 0.0;
        matrix_.diag[n - 1] = 1.0;
    }
    if (std::holds_alternative<ExponentialTailRight>(cfg.right)) {
        const double rate = std::get<ExponentialTailRight>(cfg.right).rate;
        // Symbol of the interior stencil on e^{-rate x}.
        double symbol = (2.0 * std::cosh(rate * dx) - 2.0) / (dx * dx);
        symbol += centered ? -c * std::sinh(rate * dx) / dx : c * (std::exp(-rate * dx) - 1.0) / dx;
        const double growth0 = reaction_.dfds(n - 1, 0.0);
        tail_growth_ = (1.0 + dt_ * growth0) / (1.0 - dt_ * symbol);
    } else if (!dirichlet_right_) {
        // Mirror ghost u[n] = u[n-2]: the row keeps unit sum.
        matrix_.lower[n - 1] = lower + upper;
        matrix_.diag[n - 1] = diag;
    }
    matrix_.factorize();
}

void Stepper::advance(std::span<double> u, double boundary_value) const {
    const std::size_t n = u.size();
    for (std::size_t i = 1; i < n; ++i) {
        u[i] += dt_ * reaction_.f(i, u[i]);
    }
    u[0] = 0.0;
    if (dirichlet_right_) {
        u[n - 1] = boundary_value;
    }
    matrix_.solve_in_place(u);
}

Field step(const Field& u, const ReactionModel& model, const SolveConfig& cfg) {
    if (!u.all_finite()) {
        throw std::invalid_argument("step: non-finite input");
    }
    const double cap = std::max(1.0, u.sup());
    Stepper stepper(GridReaction(u.grid, model), cfg, cap);
    Field out = u;
    const double boundary = std::holds_alternative<DirichletRight>(cfg.right)
                                ? 0.0
                                : u.values.back() * stepper.tail_growth();
    stepper.advance(out.values, boundary);
    return out;
}

// ---------------------------------------------------------------------------
// Diagnostics

EnergyReport energy(const GridReaction& reaction, double c, const Field& u) {
    const Grid1D& grid = u.grid;
    if (!(reaction.grid() == grid)) {
        throw std::invalid_argument("energy: reaction and field grids differ");
    }
    EnergyReport out;
    std::size_t cut = grid.n;  // none yet
    for (std::size_t i = grid.n; i-- > 0;) {
        if (u[i] > 0.0 && c * grid.x(i) + 2.0 * std::log(u[i]) > kEnergyFloorLog) {
            cut = i;
            break;
        }
    }
    if (cut == grid.n) {
        out.cut_x = grid.x_min;
        return out;
    }
    out.cut_x = grid.x(cut);
    const double dx = grid.dx();
    double acc = 0.0;
    for (std::size_t i = 0; i <= cut; ++i) {
        const double cx = c * grid.x(i);
        if (cx > kExpOverflow) {
            out.overflow = true;
            out.value = std::numeric_limits<double>::quiet_NaN();
            return out;
        }
        const double wt = (i == 0 || i == cut) ? 0.5 : 1.0;
        acc -= wt * std::exp(cx) * reaction.F(i, u[i]);
        // The cell just right of the cut still carries the last drop to zero.
        if (i + 1 < grid.n) {
            const double grad = (u[i + 1] - u[i]) / dx;
            acc += std::exp(c * (grid.x(i) + 0.5 * dx)) * 0.5 * grad * grad;
        }
    }
    out.value = acc * dx;
    return out;
}

EnergyReport energy(const ReactionModel& model, double c, const Field& u) {
    return energy(GridReaction(u.grid, model), c, u);
}

std::optional<double> front_position(const Field& u, double level) {
    if (!(level > 0.0 && level < 1.0)) {
        throw std::invalid_argument("front_position: level must lie in (0, 1)");
    }
    for (std::size_t i = u.size(); i-- > 0;) {
        if (u[i] >= level) {
            if (i + 1 == u.size()) {
                return u.grid.x(i);
            }
            const double t = (u[i] - level) / (u[i] - u[i + 1]);
            return u.grid.x(i) + t * u.grid.dx();
        }
    }
    return std::nullopt;
}

DecayFit fit_decay_rate(const Field& u, double x_lo, double x_hi) {
    const Grid1D& grid = u.grid;
    const double dx = grid.dx();
    if (!(x_hi - x_lo >= 10.0 * dx * (1.0 - 1e-9))) {
        throw std::invalid_argument("fit_decay_rate: window narrower than 10 dx");
    }
    const double eps = 1e-9 * dx;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t count = 0;
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < grid.n; ++i) {
        const double x = grid.x(i);
        if (x < x_lo - eps || x > x_hi + eps) {
            continue;
        }
        if (!(u[i] > 0.0)) {
            throw std::invalid_argument("fit_decay_rate: window contains nonpositive values");
        }
        const double y = std::log(u[i]);
        pts.emplace_back(x, y);
        sx += x;
        sy += y;
        ++count;
    }
    if (count < 2) {
        throw std::invalid_argument("fit_decay_rate: window outside the grid");
    }
    const double mx = sx / static_cast<double>(count);
    const double my = sy / static_cast<double>(count);
    for (const auto& [x, y] : pts) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    DecayFit out;
    const double slope = sxy / sxx;
    out.rate = -slope;
    out.intercept = my - slope * mx;
    double ss = 0.0;
    for (const auto& [x, y] : pts) {
        const double r = y - (out.intercept + slope * x);
        ss += r * r;
    }
    out.residual = std::sqrt(ss / static_cast<double>(count));
    out.poor_fit = out.residual > 0.05;
    out.x_lo = pts.front().first;
    out.x_hi = pts.back().first;
    return out;
}

std::optional<DecayFit> fit_right_tail(const Field& u, const DiagnosticsOptions& opts) {
    const double sup = u.sup();
    if (!(sup > 0.0)) {
        return std::nullopt;
    }
    const Grid1D& grid = u.grid;
    std::size_t start;
    if (const auto front = front_position(u, opts.front_level)) {
        start = std::min(grid.n - 1, grid.index_of(*front) + 1);
    } else {
        start = static_cast<std::size_t>(
            std::distance(u.values.begin(), std::max_element(u.values.begin(), u.values.end())));
    }
    std::size_t i0 = start;
    while (i0 < grid.n && u[i0] > opts.tail_start * sup) {
        ++i0;
    }
    if (i0 >= grid.n || !(u[i0] > opts.tail_floor)) {
        return std::nullopt;
    }
    const double x_stop = grid.x(i0) + opts.tail_width;
    std::size_t i1 = i0;
    while (i1 + 1 < grid.n && grid.x(i1 + 1) <= x_stop + 1e-9 && u[i1 + 1] > opts.tail_floor) {
        ++i1;
    }
    if (i1 < i0 + 10) {
        return std::nullopt;
    }
    return fit_decay_rate(u, grid.x(i0), grid.x(i1));
}

Diagnostics diagnose(const GridReaction& reaction, double c, double t, const Field& u,
                     const DiagnosticsOptions& opts) {
    Diagnostics d;
    d.t = t;
    d.sup = u.sup();
    d.mass = u.mass();
    d.front_x = front_position(u, opts.front_level);
    d.peak_x = u.grid.x(static_cast<std::size_t>(
        std::distance(u.values.begin(), std::max_element(u.values.begin(), u.values.end()))));
    if (opts.energy) {
        d.energy = energy(reaction, c, u);
    }
    d.decay = fit_right_tail(u, opts);
    double pmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double x = u.grid.x(i);
        if (x >= opts.probe_lo && x <= opts.probe_hi) {
            pmin = std::min(pmin, u[i]);
        }
    }
    d.probe_min = std::isfinite(pmin) ? pmin : 0.0;
    return d;
}

Trajectory evolve(const GridReaction& reaction, const SolveConfig& cfg, const Field& u0,
                  const DiagnosticsOptions& opts) {
    cfg.validate();
    if (!(reaction.grid() == u0.grid)) {
        throw std::invalid_argument("evolve: reaction and datum grids differ");
    }
    if (!u0.all_finite()) {
        throw std::invalid_argument("evolve: non-finite initial datum");
    }
    if (u0.min() < 0.0) {
        throw std::invalid_argument("evolve: initial datum must be nonnegative");
    }
    Trajectory traj;
    traj.cap = std::max(1.0, u0.sup());
    Stepper stepper(reaction, cfg, traj.cap);

    const auto total = static_cast<long long>(std::llround(cfg.t_end / cfg.dt));
    const auto stride = static_cast<long long>(std::llround(cfg.snapshot_every / cfg.dt));

    Field u = u0;
    // Dirichlet nodes are pinned by the scheme; start consistent with them.
    u[0] = 0.0;
    if (std::holds_alternative<DirichletRight>(cfg.right)) {
        u[u.size() - 1] = 0.0;
    }
    const bool tail = std::holds_alternative<ExponentialTailRight>(cfg.right);
    double boundary = u.values.back();
    const double upper = traj.cap + 1e-9;

    auto record = [&](long long k) {
        const double t = static_cast<double>(k) * cfg.dt;
        traj.series.push_back(diagnose(stepper.reaction(), cfg.c, t, u, opts));
        if (cfg.keep_fields) {
            traj.snapshots.push_back({t, u});
        }
    };
    record(0);
    std::optional<Stepper> released;
    for (long long k = 1; k <= total; ++k) {
        boundary *= stepper.tail_growth();
        if (tail && !released && boundary > kTailLinearLimit) {
            // The tail has grown out of the linear regime, which only happens
            // when the state invades the box; a reflecting wall is then adequate.
            SolveConfig wall = cfg;
            wall.right = NeumannRight{};
            released.emplace(stepper.reaction(), wall, traj.cap);
            traj.tail_released_at = static_cast<double>(k) * cfg.dt;
        }
        if (released) {
            released->advance(u.values);
        } else {
            stepper.advance(u.values, boundary);
        }
        for (double v : u.values) {
            if (!(v >= -1e-12 && v <= upper)) {
                throw NumericalInconsistency("evolve: value " + format_number(v) +
                                             " outside [0, cap] at t = " +
                                             format_number(static_cast<double>(k) * cfg.dt));
            }
        }
        if (k % stride == 0 || k == total) {
            record(k);
        }
    }
    traj.final_field = u;
    return traj;
}

Trajectory evolve(const ReactionModel& model, const SolveConfig& cfg, const Field& u0,
                  const DiagnosticsOptions& opts) {
    return evolve(GridReaction(u0.grid, model), cfg, u0, opts);
}

// ---------------------------------------------------------------------------
// Serialization

void to_json(nlohmann::json& j, const DatumSpec& spec) {
    std::visit(overloaded{
                   [&](const BumpDatum& b) {
                       j = {{"kind", "bump"},
                            {"amplitude", b.amplitude},
                            {"center", b.center},
                            {"half_width", b.half_width}};
                   },
                   [&](const PlateauDatum& p) {
                       j = {{"kind", "plateau"},
                            {"height", p.height},
                            {"left", p.left},
                            {"right", p.right},
                            {"smoothing", p.smoothing}};
                   },
                   [&](const ExpTailDatum& e) {
                       j = {{"kind", "exp_tail"},
                            {"amplitude", e.amplitude},
                            {"rate", e.rate},
                            {"cap", e.cap}};
                   },
               },
               spec);
}

void from_json(const nlohmann::json& j, DatumSpec& spec) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "bump") {
        spec = BumpDatum{j.value("amplitude", 1.0), j.value("center", 0.0),
                         j.value("half_width", 1.0)};
    } else if (kind == "plateau") {
        spec = PlateauDatum{j.value("height", 1.0), j.value("left", -1.0), j.value("right", 1.0),
                            j.value("smoothing", 1.0)};
    } else if (kind == "exp_tail") {
        spec = ExpTailDatum{j.value("amplitude", 1.0), j.value("rate", 1.0), j.value("cap", 1.0)};
    } else {
        throw std::invalid_argument("datum: unknown kind '" + kind + "'");
    }
}

void to_json(nlohmann::json& j, const SolveConfig& cfg) {
    j = {{"c", cfg.c},
         {"dt", cfg.dt},
         {"t_end", cfg.t_end},
         {"snapshot_every", cfg.snapshot_every}};
    if (const auto* tail = std::get_if<ExponentialTailRight>(&cfg.right)) {
        j["right_boundary"] = {{"kind", "exp_tail"}, {"rate", tail->rate}};
    } else if (std::holds_alternative<DirichletRight>(cfg.right)) {
        j["right_boundary"] = {{"kind", "absorbing"}};
    } else {
        j["right_boundary"] = {{"kind", "neumann"}};
    }
}

void from_json(const nlohmann::json& j, SolveConfig& cfg) {
    SolveConfig out;
    out.c = j.value("c", 0.0);
    out.dt = j.value("dt", 0.02);
    out.t_end = j.value("t_end", 300.0);
    out.snapshot_every = j.value("snapshot_every", 1.0);
    if (j.contains("right_boundary")) {
        const auto& rb = j.at("right_boundary");
        const auto kind = rb.at("kind").get<std::string>();
        if (kind == "exp_tail") {
            out.right = ExponentialTailRight{rb.at("rate").get<double>()};
        } else if (kind == "absorbing") {
            out.right = DirichletRight{};
        } else if (kind != "neumann") {
            throw std::invalid_argument("solve: unknown right_boundary kind '" + kind + "'");
        }
    }
    out.validate();
    cfg = out;
}

void to_json(nlohmann::json& j, const Grid1D& grid) {
    j = {{"x_min", grid.x_min}, {"x_max", grid.x_max}, {"dx", grid.dx()}, {"n", grid.n}};
}

void from_json(const nlohmann::json& j, Grid1D& grid) {
    const double x_min = j.value("x_min", -100.0);
    const double x_max = j.value("x_max", 200.0);
    if (j.contains("n") && !j.contains("dx")) {
        Grid1D g{x_min, x_max, j.at("n").get<std::size_t>()};
        g.validate();
        grid = g;
        return;
    }
    grid = Grid1D::with_spacing(x_min, x_max, j.value("dx", 0.1));
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string snapshot_csv(const Field& u) {
    std::ostringstream os;
    os << "x,u\n";
    for (std::size_t i = 0; i < u.size(); ++i) {
        os << format_number(u.grid.x(i)) << ',' << format_number(u[i]) << '\n';
    }
    return os.str();
}

std::string series_csv(const std::vector<Diagnostics>& series) {
    std::ostringstream os;
    os << "t,sup,mass,front_x,energy,decay_rate\n";
    for (const auto& d : series) {
        os << format_number(d.t) << ',' << format_number(d.sup) << ',' << format_number(d.mass)
           << ',';
        if (d.front_x) {
            os << format_number(*d.front_x);
        }
        os << ',';
        if (!d.energy.overflow) {
            os << format_number(d.energy.value);
        }
        os << ',';
        if (d.decay) {
            os << format_number(d.decay->rate);
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace shiftwave
