#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace shiftwave {

/// Monostable growth law g+(s) = r s (1 - s)(1 + a s).
///
/// `a > 0` is a weak Allee effect: the per-capita rate is not maximal at zero
/// density, and for a > 2 the minimal front speed exceeds 2 sqrt(r).
struct MonostableParams {
    double r = 1.0;
    double a = 0.0;

    double g(double s) const { return r * s * (1.0 - s) * (1.0 + a * s); }
    double dg(double s) const { return r * (1.0 + 2.0 * (a - 1.0) * s - 3.0 * a * s * s); }
    /// Antiderivative of g vanishing at 0.
    double G(double s) const {
        const double s2 = s * s;
        return r * (s2 / 2.0 + (a - 1.0) * s2 * s / 3.0 - a * s2 * s2 / 4.0);
    }
};

/// Smallest damping of the unfavourable limit (rounded up to one decimal)
/// for which g+ - g- >= 0 on all s >= 0.
double default_kappa(double a);

/// Heterogeneous reaction f(x,s) = w(x) g+(s) + (1 - w(x)) g-(s), with
/// w(x) = (1 + tanh(x / ell)) / 2 and g-(s) = -s - kappa s^3.
///
/// `ell = +inf` gives the spatially homogeneous blend (g+ + g-) / 2.
struct ReactionModel {
    MonostableParams plus;
    double kappa = 0.0;
    double ell = 1.0;
    double s_max = 2.0;

    /// Model with kappa chosen by default_kappa(a).
    static ReactionModel with_default_kappa(MonostableParams plus, double ell = 1.0,
                                            double s_max = 2.0);

    double weight(double x) const;
    double g_minus(double s) const { return -s - kappa * s * s * s; }
    double dg_minus(double s) const { return -1.0 - 3.0 * kappa * s * s; }
    double G_minus(double s) const { return -s * s / 2.0 - kappa * s * s * s * s / 4.0; }

    /// Throws std::invalid_argument when a field is out of range.
    void validate() const;
};

double eval_f(const ReactionModel& model, double x, double s);
double eval_dfds(const ReactionModel& model, double x, double s);
/// s-antiderivative of eval_f with F(x, 0) = 0.
double eval_F(const ReactionModel& model, double x, double s);

struct HypothesisCheck {
    std::string name;
    bool passed = true;
    /// Worst violation found (0 when passed).
    double worst = 0.0;
    double at_x = 0.0;
    double at_s = 0.0;
};

struct HypothesisReport {
    HypothesisCheck monotone_in_x{"monotone_in_x"};
    HypothesisCheck monostable{"monostable"};
    HypothesisCheck unfavourable_bound{"unfavourable_bound"};
    HypothesisCheck zero_state{"zero_state"};

    bool passed() const {
        return monotone_in_x.passed && monostable.passed && unfavourable_bound.passed &&
               zero_state.passed;
    }
};

/// Sampled check of the structural hypotheses on the reaction.
///
/// Throws std::invalid_argument for empty grids, s_max < 1, or s samples
/// outside [0, s_max].
HypothesisReport check_hypotheses(const ReactionModel& model, std::span<const double> x_grid,
                                  std::span<const double> s_grid);

/// Convenience: uniform x samples on [-10 ell, 10 ell] and s samples on [0, s_max].
HypothesisReport check_hypotheses(const ReactionModel& model);

void to_json(nlohmann::json& j, const ReactionModel& model);
/// Missing "kappa" selects default_kappa(a). Validates the result.
void from_json(const nlohmann::json& j, ReactionModel& model);
nlohmann::json to_json(const HypothesisReport& report);

}  // namespace shiftwave
