#include "shiftwave/reaction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace shiftwave {

double default_kappa(double a) {
    const double k = a + (a - 1.0) * (a - 1.0) / 8.0;
    // Round up to one decimal; the epsilon keeps exact decimals (e.g. 5.2) in place.
    return std::ceil(k * 10.0 - 1e-9) / 10.0;
}

ReactionModel ReactionModel::with_default_kappa(MonostableParams plus, double ell, double s_max) {
    ReactionModel m;
    m.plus = plus;
    m.kappa = default_kappa(plus.a);
    m.ell = ell;
    m.s_max = s_max;
    m.validate();
    return m;
}

double ReactionModel::weight(double x) const {
    // tanh saturates to +-1 for |x| large and handles x = +-inf.
    return 0.5 * (1.0 + std::tanh(x / ell));
}

void ReactionModel::validate() const {
    if (!(plus.r > 0.0) || !std::isfinite(plus.r)) {
        throw std::invalid_argument("reaction: r must be positive and finite");
    }
    if (!(plus.a >= 0.0) || !std::isfinite(plus.a)) {
        throw std::invalid_argument("reaction: a must be nonnegative and finite");
    }
    if (!(kappa >= 0.0) || !std::isfinite(kappa)) {
        throw std::invalid_argument("reaction: kappa must be nonnegative and finite");
    }
    if (!(ell > 0.0)) {
        throw std::invalid_argument("reaction: ell must be positive");
    }
    if (!(s_max >= 1.0) || !std::isfinite(s_max)) {
        throw std::invalid_argument("reaction: s_max must be >= 1");
    }
}

double eval_f(const ReactionModel& model, double x, double s) {
    if (s == 0.0) {
        return 0.0;
    }
    const double w = model.weight(x);
    return w * model.plus.g(s) + (1.0 - w) * model.g_minus(s);
}

double eval_dfds(const ReactionModel& model, double x, double s) {
    const double w = model.weight(x);
    return w * model.plus.dg(s) + (1.0 - w) * model.dg_minus(s);
}

double eval_F(const ReactionModel& model, double x, double s) {
    const double w = model.weight(x);
    return w * model.plus.G(s) + (1.0 - w) * model.G_minus(s);
}

namespace {

void record(HypothesisCheck& check, double violation, double x, double s) {
    if (violation > check.worst) {
        check.passed = false;
        check.worst = violation;
        check.at_x = x;
        check.at_s = s;
    }
}

}  // namespace

HypothesisReport check_hypotheses(const ReactionModel& model, std::span<const double> x_grid,
                                  std::span<const double> s_grid) {
    if (x_grid.empty() || s_grid.empty()) {
        throw std::invalid_argument("check_hypotheses: grids must be nonempty");
    }
    if (model.s_max < 1.0) {
        throw std::invalid_argument("check_hypotheses: s_max < 1 leaves monostability untestable");
    }
    for (double s : s_grid) {
        if (s < 0.0 || s > model.s_max) {
            throw std::invalid_argument("check_hypotheses: s sample outside [0, s_max]");
        }
    }

    std::vector<double> xs(x_grid.begin(), x_grid.end());
    std::sort(xs.begin(), xs.end());

    HypothesisReport report;
    const auto& g = model.plus;

    for (double s : s_grid) {
        for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
            const double lo = eval_f(model, xs[k], s);
            const double hi = eval_f(model, xs[k + 1], s);
            const double slack = 1e-12 * (1.0 + std::abs(lo));
            if (hi < lo - slack) {
                record(report.monotone_in_x, lo - hi, xs[k], s);
            }
        }

        // g+ > 0 on (0,1), < 0 on (1, s_max]; mirrored samples cover s < 0.
        if (s > 0.0 && s < 1.0 && !(g.g(s) > 0.0)) {
            record(report.monostable, std::abs(g.g(s)) + 1e-300, 0.0, s);
        }
        if (s > 1.0 && !(g.g(s) < 0.0)) {
            record(report.monostable, std::abs(g.g(s)) + 1e-300, 0.0, s);
        }

        const double excess = model.g_minus(s) + s;
        if (excess > 0.0) {
            record(report.unfavourable_bound, excess, -std::numeric_limits<double>::infinity(), s);
        }
    }
    if (!(g.dg(0.0) > 0.0)) {
        record(report.monostable, std::abs(g.dg(0.0)) + 1e-300, 0.0, 0.0);
    }
    if (!(g.dg(1.0) < 0.0)) {
        record(report.monostable, std::abs(g.dg(1.0)) + 1e-300, 0.0, 1.0);
    }
    if (model.g_minus(0.0) != 0.0) {
        record(report.unfavourable_bound, std::abs(model.g_minus(0.0)), 0.0, 0.0);
    }

    for (double x : xs) {
        const double f0 = eval_f(model, x, 0.0);
        if (f0 != 0.0) {
            record(report.zero_state, std::abs(f0), x, 0.0);
        }
    }
    return report;
}

HypothesisReport check_hypotheses(const ReactionModel& model) {
    model.validate();
    const double span = std::isfinite(model.ell) ? 10.0 * model.ell : 10.0;
    std::vector<double> xs;
    std::vector<double> ss;
    constexpr int nx = 401;
    constexpr int ns = 401;
    for (int i = 0; i < nx; ++i) {
        xs.push_back(-span + 2.0 * span * i / (nx - 1));
    }
    for (int i = 0; i < ns; ++i) {
        ss.push_back(model.s_max * i / (ns - 1));
    }
    return check_hypotheses(model, xs, ss);
}

void to_json(nlohmann::json& j, const ReactionModel& model) {
    j = nlohmann::json{{"r", model.plus.r},
                       {"a", model.plus.a},
                       {"kappa", model.kappa},
                       {"ell", std::isinf(model.ell) ? nlohmann::json("inf") : nlohmann::json(model.ell)},
                       {"s_max", model.s_max}};
}

void from_json(const nlohmann::json& j, ReactionModel& model) {
    if (!j.is_object()) {
        throw std::invalid_argument("model: expected a JSON object");
    }
    for (const auto& [key, value] : j.items()) {
        if (key != "r" && key != "a" && key != "kappa" && key != "ell" && key != "s_max") {
            throw std::invalid_argument("model: unknown field '" + key + "'");
        }
        const bool inf_ell = key == "ell" && value.is_string() && value.get<std::string>() == "inf";
        if (!value.is_number() && !inf_ell) {
            throw std::invalid_argument("model: field '" + key + "' must be a number");
        }
    }
    ReactionModel m;
    m.plus.r = j.value("r", 1.0);
    m.plus.a = j.value("a", 0.0);
    m.kappa = j.contains("kappa") ? j.at("kappa").get<double>() : default_kappa(m.plus.a);
    if (j.contains("ell")) {
        const auto& e = j.at("ell");
        m.ell = e.is_string() ? std::numeric_limits<double>::infinity() : e.get<double>();
    }
    m.s_max = j.value("s_max", 2.0);
    m.validate();
    model = m;
}

nlohmann::json to_json(const HypothesisReport& report) {
    nlohmann::json out = nlohmann::json::object();
    for (const auto* check : {&report.monotone_in_x, &report.monostable,
                              &report.unfavourable_bound, &report.zero_state}) {
        out[check->name] = {{"passed", check->passed},
                            {"worst", check->worst},
                            {"at_x", check->at_x},
                            {"at_s", check->at_s}};
    }
    out["passed"] = report.passed();
    return out;
}

}  // namespace shiftwave
