#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "shiftwave/grid.hpp"
#include "shiftwave/pde.hpp"
#include "shiftwave/reaction.hpp"

namespace shiftwave {

enum class Verdict { Spreading, Vanishing, Grounding, Undetermined };

std::string to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

/// Direction an undecided trajectory is heading.
enum class Lean { None, TowardSpreading, TowardVanishing };

std::string to_string(Lean l);

/// Finite-horizon evidence thresholds.
struct Policy {
    double eps_vanish = 1e-3;
    double eps_spread = 5e-2;
    double eps_ground = 1e-2;
    /// Largest front (or peak) displacement over the last quarter for Grounding.
    double drift_max = 0.5;
    /// Grounding tail rate must reach (1 - tail_slack) * lambda_0(c) when c >= 2 sqrt(r).
    double tail_slack = 0.1;
    /// Core window [x_min + core_margin, min(x_max - core_margin, core_right)].
    double core_margin = 20.0;
    double core_right = 10.0;
    double probe_lo = -10.0;
    double probe_hi = 10.0;
    /// Residual tolerance for the maximal steady state used as reference.
    double steady_tol = 1e-8;
    bool record_energy = true;

    /// Throws std::invalid_argument for nonpositive thresholds.
    void validate() const;
};

struct Evidence {
    double sup_final = 0.0;
    std::optional<double> dist_to_pcplus_on_core;
    std::optional<double> front_drift;
    std::optional<double> right_tail_rate;
    /// Minimum over the last quarter of min_{probe window} u.
    double probe_min = 0.0;
    /// sup(t_end) - sup(3 t_end / 4).
    double sup_trend = 0.0;
    /// Tail rate required for Grounding (0 when c < 2 sqrt(r)).
    double lambda_min = 0.0;
};

struct Outcome {
    Verdict verdict = Verdict::Undetermined;
    Evidence evidence;
    double t_used = 0.0;
    Lean lean = Lean::None;
};

struct Classified {
    Outcome outcome;
    Trajectory trajectory;
};

/// Evolves u0 to cfg.t_end and maps the trajectory to a verdict:
/// Vanishing, then Spreading, then Grounding are tried in that order; anything
/// else is Undetermined with a lean. `pcplus` is computed when needed and not given.
Classified classify_run(const ReactionModel& model, const SolveConfig& cfg, const Field& u0,
                        const Policy& policy = {},
                        const std::optional<Field>& pcplus = std::nullopt);

Outcome classify(const ReactionModel& model, const SolveConfig& cfg, const Field& u0,
                 const Policy& policy = {}, const std::optional<Field>& pcplus = std::nullopt);

/// Bump(sigma, center, half_width) classified for each amplitude.
/// Throws std::invalid_argument for negative amplitudes.
std::vector<Outcome> hair_trigger_probe(const ReactionModel& model, const SolveConfig& cfg,
                                        const Grid1D& grid, const std::vector<double>& amplitudes,
                                        double center = -1.0, double half_width = 2.0,
                                        const Policy& policy = {});

nlohmann::json to_json(const Outcome& outcome);
void to_json(nlohmann::json& j, const Policy& policy);
void from_json(const nlohmann::json& j, Policy& policy);

}  // namespace shiftwave
