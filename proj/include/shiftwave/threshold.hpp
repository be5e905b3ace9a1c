#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "shiftwave/classify.hpp"
#include "shiftwave/grid.hpp"
#include "shiftwave/pde.hpp"
#include "shiftwave/reaction.hpp"

namespace shiftwave {

struct Probe {
    double parameter = 0.0;
    Outcome outcome;
    /// Side the bisection assigned: true for the spreading side.
    bool spreading_side = false;
    /// Horizon was doubled because the first run was Undetermined.
    bool refined = false;
    /// Still Undetermined after refinement; side taken from the lean.
    bool by_lean = false;
};

enum class ThresholdFlag {
    Finite,
    /// Every probed value spreads (sigma: even the smallest datum spreads).
    Zero,
    /// Nothing up to the cap spreads.
    Infinite,
    /// The outer bracket did not straddle a transition.
    NotBracketed,
};

std::string to_string(ThresholdFlag f);

struct ThresholdResult {
    double value = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    std::vector<Probe> probes;
    /// Probes are consistent with a single monotone transition.
    bool valid = true;
    ThresholdFlag flag = ThresholdFlag::Finite;
    /// Number of probes decided by the lean.
    int lean_assignments = 0;

    double width() const { return hi - lo; }
};

/// Shared knobs for threshold searches. The default solve config uses the
/// absorbing right boundary suited to compactly supported data.
struct SearchOptions {
    SolveConfig solve = absorbing_solve_config();
    Policy policy;

    static SolveConfig absorbing_solve_config() {
        SolveConfig cfg;
        cfg.right = DirichletRight{};
        return cfg;
    }
};

/// Bisection in the forced speed c for a fixed datum.
///
/// Starts from [2 sqrt(r) (1 - pad), c* (1 + pad)] and stops when the bracket
/// is no wider than `tol`. Spreading at the upper end together with vanishing
/// at the lower end throws NumericalInconsistency.
ThresholdResult threshold_speed(const ReactionModel& model, const Field& u0, double tol,
                                const SearchOptions& search = {}, double pad = 0.05);

/// sigma -> bump(sigma * height, center, half_width + support_growth * sigma).
struct BumpFamily {
    double height = 1.0;
    double center = -15.0;
    double half_width = 30.0;
    double support_growth = 0.01;

    BumpDatum at(double sigma) const;
};

/// Bisection in sigma at fixed c; stops when hi - lo <= rel_tol * lo.
///
/// Returns flag Zero if sigma_min already spreads and Infinite if sigma_max
/// does not. sigma_max defaults to the largest value with dt * L_f(cap) <= 1.
ThresholdResult threshold_sigma(const ReactionModel& model, double c, const BumpFamily& family,
                                const Grid1D& grid, double rel_tol,
                                const SearchOptions& search = {}, double sigma_min = 1e-6,
                                double sigma_max = 0.0);

/// Largest sigma whose family member keeps dt * L_f(max(sigma height, 1)) <= 1.
double admissible_sigma_cap(const ReactionModel& model, const BumpFamily& family, double dt,
                            const Grid1D& grid);

enum class Zone { ForcedSpread, ForcedVanish, DataDependent };

std::string to_string(Zone z);

/// Zone predicted for data decaying like e^{-alpha x} at speed c.
Zone predicted_zone(double alpha, double c, double r, double c_star);

struct RegimeEntry {
    double alpha = 0.0;
    double c = 0.0;
    Outcome outcome;
    Zone zone = Zone::DataDependent;
};

/// Classifies min(cap, A e^{-alpha x}) for every (alpha, c), rows in parallel.
/// Entries are ordered alpha-major and do not depend on `workers`.
std::vector<RegimeEntry> regime_map(const ReactionModel& model, const std::vector<double>& alphas,
                                    const std::vector<double>& cs, double A, double cap,
                                    const Grid1D& grid, const SearchOptions& search = {},
                                    unsigned workers = 1);

/// "alpha,c,verdict,predicted_zone" rows.
std::string regime_csv(const std::vector<RegimeEntry>& entries);

nlohmann::json to_json(const ThresholdResult& result);
nlohmann::json to_json(const RegimeEntry& entry);

/// Runs body(i) for i in [0, n) on up to `workers` threads. The first
/// exception is rethrown after all threads join.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& body);

}  // namespace shiftwave
