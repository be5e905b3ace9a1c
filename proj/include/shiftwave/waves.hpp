#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include <json.hpp>

#include "shiftwave/grid.hpp"
#include "shiftwave/reaction.hpp"

namespace shiftwave {

/// Planar front equation V'' + c V' + g(V) = 0 for a monostable g with
/// zeros at 0 and `top`.
struct PlanarNonlinearity {
    std::function<double(double)> g;
    std::function<double(double)> dg;
    double top = 1.0;

    static PlanarNonlinearity from(const MonostableParams& params);
    double linear_rate() const { return dg(0.0); }
};

/// Monostable minorant of g+ with zeros 0 and 1 - delta:
/// g_delta(s) = g+(s) (1 - (s / (1 - delta))^8). Same slope at 0 as g+.
PlanarNonlinearity cutdown(const MonostableParams& params, double delta);

enum class ShotVerdict { Connects, Crosses };

struct ShootingOptions {
    /// Distance from the saddle (top, 0) along its unstable eigenvector.
    double launch_offset = 1e-8;
    /// Radius of the ball around the origin where the linearization decides.
    double capture_radius = 1e-6;
    double abs_tol = 1e-14;
    double rel_tol = 1e-11;
    /// Integration length after which a shot is declared inconclusive.
    double max_length = 1e4;
};

/// Follows the unstable manifold of (top, 0) into the strip 0 < V < top.
///
/// Crosses if V reaches 0; Connects if the orbit enters the capture ball on
/// the side of the slow stable direction, so it reaches the origin with V > 0.
/// Throws std::runtime_error if neither happens within max_length.
ShotVerdict shoot(const PlanarNonlinearity& g, double c, const ShootingOptions& opts = {});

struct WaveProfile {
    double c = 0.0;
    std::vector<double> xi;
    std::vector<double> V;
    std::vector<double> dV;
};

struct WaveSpeedResult {
    double c_star = 0.0;
    double c_lo = 0.0;
    double c_hi = 0.0;
    int evaluations = 0;
    std::optional<WaveProfile> profile;
};

/// 2 sqrt(r). Throws std::invalid_argument for r <= 0.
double linear_speed(double r);

/// Minimal front speed by bisection of the shooting verdict.
///
/// Throws std::runtime_error if the lower start speed, just under the linear
/// speed, does not cross zero (the integrator is misconfigured).
WaveSpeedResult minimal_wave_speed(const PlanarNonlinearity& g, double tol,
                                   const ShootingOptions& opts = {});
WaveSpeedResult minimal_wave_speed(const MonostableParams& params, double tol,
                                   const ShootingOptions& opts = {});

/// Monotone front V(xi) for speed c >= c*, sampled every `step` on a window of
/// length `span` centred where V = 1/2. Throws std::invalid_argument if the
/// orbit at speed c does not connect (c below c*).
WaveProfile wave_profile(const MonostableParams& params, double c, double span,
                         double step = 0.01);

/// Larger root (c + sqrt(c^2 - 4 (r + gamma))) / 2 of l^2 - c l + r + gamma = 0.
double decay_rate_lambda(double c, double r, double gamma);
/// Critical decay exponent (c* - sqrt(c*^2 - 4 r)) / 2.
double alpha_star(double c_star, double r);
/// Threshold speed (alpha^2 + r) / alpha of data decaying like e^{-alpha x}.
double c_alpha(double alpha, double r);

/// Principal Dirichlet eigenpair of phi'' + c phi' + r phi = lambda phi on (-R, R).
struct EigenResult {
    /// Closed form r - c^2/4 - pi^2/(4 R^2).
    double lambda_R_c = 0.0;
    /// Inverse iteration on the three-point operator.
    double lambda_discrete = 0.0;
    double R = 0.0;
    std::vector<double> x;
    /// Discrete eigenfunction, sup = 1, zero at both ends.
    std::vector<double> phi;
    int iterations = 0;
};

EigenResult principal_eigenvalue(double c, double r, double R, std::size_t n_grid);

/// Compactly supported plateau-and-skirt profile: eta on |x| < rho, then
/// q(|x| - rho) for q'' + c1 q' + g_delta(q) = 0, q(0) = eta, q'(0) = 0.
struct CompactBumpProfile {
    double eta = 0.0;
    double rho = 0.0;
    /// First zero of q.
    double b = 0.0;
    double c1 = 0.0;
    double delta = 0.0;
    /// Minimal speed of the cut-down nonlinearity.
    double c_star_delta = 0.0;
    /// Samples of q on [0, b]; s_q[k] = q(xi_q[k]).
    std::vector<double> xi_q;
    std::vector<double> q;
    std::vector<double> dq;

    double operator()(double x) const;
    /// Profile centred at `center`, sampled on `grid`.
    Field sample(const Grid1D& grid, double center) const;
};

/// Throws std::invalid_argument when c < c1 < c*_delta or 0 < eta < 1 - delta
/// fails, and std::runtime_error ("no zero found") when q turns around before
/// reaching 0.
CompactBumpProfile bump_subsolution(const MonostableParams& params, double delta, double c,
                                    double rho, double eta, double c1);

/// e^{-(c/2 + delta)(x - junction)}, flat below the junction.
struct SupercriticalProfile {
    double delta = 0.1;
    double junction = 0.0;
    double amplitude = 1.0;
};

/// (1 + y^beta) e^{-c y / 2} from its first maximum on, normalised to 1 there
/// and flat below the junction.
struct CriticalProfile {
    double beta = 0.5;
    double junction = 0.0;
    double amplitude = 1.0;
};

/// min(M, amplitude e^{-rate (x + shift)}).
struct ExpCapProfile {
    double cap = 1.0;
    double amplitude = 1.0;
    double rate = 1.0;
    double shift = 0.0;
};

using SupersolutionSpec = std::variant<SupercriticalProfile, CriticalProfile, ExpCapProfile>;

/// Nonincreasing supersolution profile sampled on `grid`.
///
/// Throws std::invalid_argument if the smallness conditions that make the
/// profile a supersolution fail (checked on samples of g+').
Field supersolution_profile(const MonostableParams& params, double c,
                            const SupersolutionSpec& spec, const Grid1D& grid);

nlohmann::json to_json(const WaveSpeedResult& result);

}  // namespace shiftwave
