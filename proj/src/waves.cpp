#include "shiftwave/waves.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "shiftwave/tridiag.hpp"

namespace shiftwave {

namespace odeint = boost::numeric::odeint;

namespace {

using State = std::array<double, 2>;

struct FrontSystem {
    const PlanarNonlinearity* g;
    double c;
    void operator()(const State& y, State& dy, double /*xi*/) const {
        dy[0] = y[1];
        dy[1] = -c * y[1] - g->g(y[0]);
    }
};

using DenseStepper =
    decltype(odeint::make_dense_output(1e-12, 1e-12, odeint::runge_kutta_dopri5<State>()));

DenseStepper make_stepper(const ShootingOptions& opts) {
    return odeint::make_dense_output(opts.abs_tol, opts.rel_tol,
                                     odeint::runge_kutta_dopri5<State>());
}

/// Locates V = level inside [lo, hi] on the dense output; V(lo) and V(hi)
/// must bracket the level.
double locate_level(DenseStepper& stepper, double lo, double hi, double level) {
    State y{};
    stepper.calc_state(lo, y);
    const bool lo_above = y[0] > level;
    for (int it = 0; it < 200 && hi - lo > 1e-13 * (1.0 + std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        stepper.calc_state(mid, y);
        if ((y[0] > level) == lo_above) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

State launch_point(const PlanarNonlinearity& g, double c, double offset) {
    const double slope = g.dg(g.top);
    if (!(slope < 0.0)) {
        throw std::invalid_argument("shooting: g'(top) must be negative (saddle at top)");
    }
    const double unstable = 0.5 * (-c + std::sqrt(c * c - 4.0 * slope));
    return {g.top - offset, -offset * unstable};
}

/// Sign of the slow-mode coefficient of (V, P) in the linearization at 0;
/// positive means the orbit stays in V > 0.
bool settles_positive(const PlanarNonlinearity& g, double c, const State& y) {
    const double disc = c * c - 4.0 * g.dg(0.0);
    if (disc < 0.0) {
        return false;  // focus: the orbit winds around and crosses V = 0
    }
    const double fast = 0.5 * (-c - std::sqrt(disc));
    return y[1] - fast * y[0] > 0.0;
}

}  // namespace

PlanarNonlinearity PlanarNonlinearity::from(const MonostableParams& params) {
    return {[params](double s) { return params.g(s); },
            [params](double s) { return params.dg(s); }, 1.0};
}

PlanarNonlinearity cutdown(const MonostableParams& params, double delta) {
    if (!(delta > 0.0 && delta < 1.0)) {
        throw std::invalid_argument("cutdown: delta must lie in (0, 1)");
    }
    constexpr int power = 8;
    const double top = 1.0 - delta;
    auto mult = [top](double s) { return 1.0 - std::pow(s / top, power); };
    auto dmult = [top](double s) { return -power * std::pow(s / top, power - 1) / top; };
    return {[params, mult](double s) { return params.g(s) * mult(s); },
            [params, mult, dmult](double s) {
                return params.dg(s) * mult(s) + params.g(s) * dmult(s);
            },
            top};
}

ShotVerdict shoot(const PlanarNonlinearity& g, double c, const ShootingOptions& opts) {
    FrontSystem sys{&g, c};
    auto stepper = make_stepper(opts);
    stepper.initialize(launch_point(g, c, opts.launch_offset), 0.0, 1e-3);
    const double r2 = opts.capture_radius * opts.capture_radius;
    while (stepper.current_time() < opts.max_length) {
        stepper.do_step(sys);
        const State& y = stepper.current_state();
        if (y[0] <= 0.0) {
            return ShotVerdict::Crosses;
        }
        if (y[0] * y[0] + y[1] * y[1] < r2) {
            return settles_positive(g, c, y) ? ShotVerdict::Connects : ShotVerdict::Crosses;
        }
    }
    throw std::runtime_error("shooting: orbit neither crossed nor settled at c = " +
                             std::to_string(c));
}

double linear_speed(double r) {
    if (!(r > 0.0)) {
        throw std::invalid_argument("linear_speed: r must be positive");
    }
    return 2.0 * std::sqrt(r);
}

WaveSpeedResult minimal_wave_speed(const PlanarNonlinearity& g, double tol,
                                   const ShootingOptions& opts) {
    if (!(tol > 0.0)) {
        throw std::invalid_argument("minimal_wave_speed: tol must be positive");
    }
    constexpr double margin = 0.05;
    const double c_lin = linear_speed(g.linear_rate());
    WaveSpeedResult out;
    double lo = c_lin * (1.0 - margin);
    ++out.evaluations;
    if (shoot(g, lo, opts) != ShotVerdict::Crosses) {
        throw std::runtime_error(
            "minimal_wave_speed: no crossing below the linear speed; shooting is inconsistent");
    }
    double hi = c_lin;
    for (;;) {
        ++out.evaluations;
        if (shoot(g, hi, opts) == ShotVerdict::Connects) {
            break;
        }
        lo = hi;
        hi *= 1.5;
        if (hi > 1e3 * c_lin) {
            throw std::runtime_error("minimal_wave_speed: no connecting speed found");
        }
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        ++out.evaluations;
        if (shoot(g, mid, opts) == ShotVerdict::Connects) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    out.c_lo = lo;
    out.c_hi = hi;
    out.c_star = 0.5 * (lo + hi);
    return out;
}

WaveSpeedResult minimal_wave_speed(const MonostableParams& params, double tol,
                                   const ShootingOptions& opts) {
    return minimal_wave_speed(PlanarNonlinearity::from(params), tol, opts);
}

WaveProfile wave_profile(const MonostableParams& params, double c, double span, double step) {
    if (!(span > 0.0) || !(step > 0.0)) {
        throw std::invalid_argument("wave_profile: span and step must be positive");
    }
    const auto g = PlanarNonlinearity::from(params);
    ShootingOptions opts;
    if (shoot(g, c, opts) != ShotVerdict::Connects) {
        throw std::invalid_argument("wave_profile: no monotone front at c = " +
                                    std::to_string(c) + " (below c*)");
    }

    FrontSystem sys{&g, c};
    auto stepper = make_stepper(opts);
    stepper.initialize(launch_point(g, c, opts.launch_offset), 0.0, 1e-3);
    double xi_half = -1.0;
    while (xi_half < 0.0) {
        const auto [t0, t1] = stepper.do_step(sys);
        if (stepper.current_state()[0] <= 0.5) {
            xi_half = locate_level(stepper, t0, t1, 0.5);
        }
        if (t1 > opts.max_length) {
            throw std::runtime_error("wave_profile: orbit never reached V = 1/2");
        }
    }

    // Restart from the launch point so the dense output covers the window.
    auto sampler = make_stepper(opts);
    sampler.initialize(launch_point(g, c, opts.launch_offset), 0.0, 1e-3);
    WaveProfile out;
    out.c = c;
    const double first = std::max(0.0, xi_half - 0.5 * span);
    const auto count = static_cast<std::size_t>(std::floor(span / step)) + 1;
    State y{};
    for (std::size_t k = 0; k < count; ++k) {
        const double xi = first + static_cast<double>(k) * step;
        while (sampler.current_time() < xi) {
            sampler.do_step(sys);
        }
        // No step has been taken yet at xi = 0; dense output is undefined there.
        if (xi <= 0.0) {
            y = sampler.current_state();
        } else {
            sampler.calc_state(xi, y);
        }
        if (y[0] <= 0.0) {
            break;
        }
        out.xi.push_back(xi - xi_half);
        out.V.push_back(y[0]);
        out.dV.push_back(y[1]);
    }
    return out;
}

double decay_rate_lambda(double c, double r, double gamma) {
    if (!(gamma >= 0.0)) {
        throw std::invalid_argument("decay_rate_lambda: gamma must be nonnegative");
    }
    const double disc = c * c - 4.0 * (r + gamma);
    if (disc < -1e-14 * c * c) {
        throw std::invalid_argument("decay_rate_lambda: c^2 < 4 (r + gamma)");
    }
    return 0.5 * (c + std::sqrt(std::max(0.0, disc)));
}

double alpha_star(double c_star, double r) {
    if (!(r > 0.0)) {
        throw std::invalid_argument("alpha_star: r must be positive");
    }
    const double disc = c_star * c_star - 4.0 * r;
    if (disc < -1e-14 * (c_star * c_star)) {
        throw std::invalid_argument("alpha_star: c* below the linear speed");
    }
    return 0.5 * (c_star - std::sqrt(std::max(0.0, disc)));
}

double c_alpha(double alpha, double r) {
    if (!(alpha > 0.0)) {
        throw std::invalid_argument("c_alpha: alpha must be positive");
    }
    return (alpha * alpha + r) / alpha;
}

EigenResult principal_eigenvalue(double c, double r, double R, std::size_t n_grid) {
    if (!(R > 0.0)) {
        throw std::invalid_argument("principal_eigenvalue: R must be positive");
    }
    if (n_grid < 16) {
        throw std::invalid_argument("principal_eigenvalue: n_grid must be >= 16");
    }
    EigenResult out;
    out.R = R;
    out.lambda_R_c = r - c * c / 4.0 - std::numbers::pi * std::numbers::pi / (4.0 * R * R);

    const double h = 2.0 * R / static_cast<double>(n_grid);
    const std::size_t m = n_grid - 1;  // interior unknowns
    // Shift by r: (r I - A) = -(D2 + c D1), an M-matrix when |c| h <= 2.
    Tridiagonal op(m);
    const bool centered = std::abs(c) * h <= 2.0;
    for (std::size_t i = 0; i < m; ++i) {
        double lower = 1.0 / (h * h);
        double upper = 1.0 / (h * h);
        double diag = -2.0 / (h * h);
        if (centered) {
            lower -= c / (2.0 * h);
            upper += c / (2.0 * h);
        } else if (c > 0.0) {
            upper += c / h;
            diag -= c / h;
        } else {
            lower -= c / h;
            diag += c / h;
        }
        op.lower[i] = -lower;
        op.diag[i] = -diag;
        op.upper[i] = -upper;
    }
    op.factorize();

    std::vector<double> v(m, 1.0);
    std::vector<double> y(m);
    double mu = 0.0;
    int it = 0;
    for (; it < 100000; ++it) {
        y = v;
        op.solve_in_place(y);
        const double norm = *std::max_element(y.begin(), y.end());
        const double mu_next = norm;  // ||v||_inf = 1
        for (std::size_t i = 0; i < m; ++i) {
            v[i] = y[i] / norm;
        }
        if (it > 2 && std::abs(mu_next - mu) <= 1e-15 * mu_next) {
            mu = mu_next;
            break;
        }
        mu = mu_next;
    }
    out.iterations = it + 1;
    out.lambda_discrete = r - 1.0 / mu;
    out.x.resize(n_grid + 1);
    out.phi.assign(n_grid + 1, 0.0);
    for (std::size_t i = 0; i <= n_grid; ++i) {
        out.x[i] = -R + static_cast<double>(i) * h;
    }
    for (std::size_t i = 0; i < m; ++i) {
        out.phi[i + 1] = v[i];
    }
    return out;
}

double CompactBumpProfile::operator()(double x) const {
    const double d = std::abs(x);
    if (d < rho) {
        return eta;
    }
    const double y = d - rho;
    if (y >= b) {
        return 0.0;
    }
    const auto it = std::upper_bound(xi_q.begin(), xi_q.end(), y);
    const auto k = static_cast<std::size_t>(std::distance(xi_q.begin(), it));
    if (k == 0) {
        return q.front();
    }
    if (k >= xi_q.size()) {
        return 0.0;
    }
    const double t = (y - xi_q[k - 1]) / (xi_q[k] - xi_q[k - 1]);
    return std::max(0.0, q[k - 1] + t * (q[k] - q[k - 1]));
}

Field CompactBumpProfile::sample(const Grid1D& grid, double center) const {
    Field out(grid);
    for (std::size_t i = 0; i < grid.n; ++i) {
        out[i] = (*this)(grid.x(i) - center);
    }
    return out;
}

CompactBumpProfile bump_subsolution(const MonostableParams& params, double delta, double c,
                                    double rho, double eta, double c1) {
    if (!(rho > 0.0)) {
        throw std::invalid_argument("bump_subsolution: rho must be positive");
    }
    const auto g = cutdown(params, delta);
    if (!(eta > 0.0 && eta < g.top)) {
        throw std::invalid_argument("bump_subsolution: need 0 < eta < 1 - delta");
    }
    const double c_star_delta = minimal_wave_speed(g, 1e-6).c_star;
    if (!(c < c1 && c1 < c_star_delta)) {
        throw std::invalid_argument("bump_subsolution: need c < c1 < c*_delta (c*_delta = " +
                                    std::to_string(c_star_delta) + ")");
    }

    ShootingOptions opts;
    FrontSystem sys{&g, c1};
    auto stepper = make_stepper(opts);
    stepper.initialize(State{eta, 0.0}, 0.0, 1e-4);
    double b = -1.0;
    while (b < 0.0) {
        const auto [t0, t1] = stepper.do_step(sys);
        const State& y = stepper.current_state();
        if (y[0] <= 0.0) {
            b = locate_level(stepper, t0, t1, 0.0);
            break;
        }
        if (y[1] >= 0.0) {
            throw std::runtime_error(
                "bump_subsolution: no zero found (q turns around; move eta toward 1 - delta)");
        }
        if (t1 > opts.max_length) {
            throw std::runtime_error("bump_subsolution: no zero found within the length budget");
        }
    }

    CompactBumpProfile out;
    out.eta = eta;
    out.rho = rho;
    out.b = b;
    out.c1 = c1;
    out.delta = delta;
    out.c_star_delta = c_star_delta;
    auto sampler = make_stepper(opts);
    sampler.initialize(State{eta, 0.0}, 0.0, 1e-4);
    const std::size_t count = std::max<std::size_t>(64, static_cast<std::size_t>(b / 0.005));
    State y{};
    for (std::size_t k = 0; k <= count; ++k) {
        const double xi = b * static_cast<double>(k) / static_cast<double>(count);
        while (sampler.current_time() < xi) {
            sampler.do_step(sys);
        }
        // No step has been taken yet at xi = 0; dense output is undefined there.
        if (xi <= 0.0) {
            y = sampler.current_state();
        } else {
            sampler.calc_state(xi, y);
        }
        out.xi_q.push_back(xi);
        out.q.push_back(k == count ? 0.0 : y[0]);
        out.dq.push_back(y[1]);
    }
    return out;
}

namespace {

double sup_dg_on(const MonostableParams& params, double hi) {
    constexpr int samples = 2001;
    double best = params.dg(0.0);
    for (int k = 1; k < samples; ++k) {
        best = std::max(best, params.dg(hi * k / (samples - 1)));
    }
    return best;
}

}  // namespace

Field supersolution_profile(const MonostableParams& params, double c,
                            const SupersolutionSpec& spec, const Grid1D& grid) {
    grid.validate();
    Field out(grid);
    if (const auto* sup = std::get_if<SupercriticalProfile>(&spec)) {
        if (!(c > linear_speed(params.r))) {
            throw std::invalid_argument("supersolution: supercritical profile needs c > 2 sqrt(r)");
        }
        if (!(sup->delta > 0.0) || !(sup->amplitude > 0.0)) {
            throw std::invalid_argument("supersolution: delta and amplitude must be positive");
        }
        const double margin = c * c / 4.0 - sup->delta * sup->delta;
        if (!(margin > sup_dg_on(params, sup->amplitude))) {
            throw std::invalid_argument(
                "supersolution: c^2/4 - delta^2 does not dominate g+' on the profile range");
        }
        const double rate = c / 2.0 + sup->delta;
        for (std::size_t i = 0; i < grid.n; ++i) {
            const double y = grid.x(i) - sup->junction;
            out[i] = sup->amplitude * (y <= 0.0 ? 1.0 : std::exp(-rate * y));
        }
    } else if (const auto* crit = std::get_if<CriticalProfile>(&spec)) {
        const double c_lin = linear_speed(params.r);
        if (std::abs(c - c_lin) > 1e-12 * c_lin) {
            throw std::invalid_argument("supersolution: critical profile needs c = 2 sqrt(r)");
        }
        if (!(crit->beta > 0.0 && crit->beta < 1.0) || !(crit->amplitude > 0.0)) {
            throw std::invalid_argument("supersolution: need 0 < beta < 1 and amplitude > 0");
        }
        const double beta = crit->beta;
        const double half = c / 2.0;
        auto v = [&](double y) { return (1.0 + std::pow(y, beta)) * std::exp(-half * y); };
        // First y0 > 0 with v'(y0) = 0: beta y^(beta-1) = half (1 + y^beta).
        auto slope_sign = [&](double y) {
            return beta * std::pow(y, beta - 1.0) - half * (1.0 + std::pow(y, beta));
        };
        double lo = 1e-12;
        double hi = 1.0;
        while (slope_sign(hi) > 0.0) {
            hi *= 2.0;
        }
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (slope_sign(mid) > 0.0 ? lo : hi) = mid;
        }
        const double y0 = hi;
        const double peak = v(y0);
        for (std::size_t i = 0; i < grid.n; ++i) {
            const double y = grid.x(i) - crit->junction;
            out[i] = crit->amplitude * (y <= 0.0 ? 1.0 : std::min(1.0, v(y + y0) / peak));
        }
    } else {
        const auto& cap = std::get<ExpCapProfile>(spec);
        if (!(cap.cap >= 1.0)) {
            throw std::invalid_argument("supersolution: exp_cap needs M >= 1");
        }
        if (!(cap.amplitude > 0.0) || !(cap.rate > 0.0)) {
            throw std::invalid_argument("supersolution: exp_cap amplitude and rate must be positive");
        }
        for (std::size_t i = 0; i < grid.n; ++i) {
            out[i] = std::min(cap.cap, cap.amplitude * std::exp(-cap.rate * (grid.x(i) + cap.shift)));
        }
    }
    return out;
}

nlohmann::json to_json(const WaveSpeedResult& result) {
    return {{"c_star", result.c_star},
            {"bracket", {result.c_lo, result.c_hi}},
            {"evaluations", result.evaluations}};
}

}  // namespace shiftwave
