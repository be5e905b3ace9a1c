#include "shiftwave/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <utility>

#include "shiftwave/steady.hpp"
#include "shiftwave/threshold.hpp"
#include "shiftwave/waves.hpp"

#ifndef SHIFTWAVE_VERSION
#define SHIFTWAVE_VERSION "0.0.0"
#endif

namespace shiftwave {

namespace {

using json = nlohmann::json;

void check_keys(const json& j, const std::string& section, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) {
        throw ValidationError(section + ": expected a JSON object");
    }
    for (const auto& [key, value] : j.items()) {
        const bool known = std::any_of(allowed.begin(), allowed.end(),
                                       [&](const char* a) { return key == a; });
        if (!known) {
            throw ValidationError(section + ": unknown field '" + key + "'");
        }
    }
}

// Runs a module parser and reports its complaint as a validation failure.
template <class F>
auto section(const std::string& name, F&& parse) {
    try {
        return parse();
    } catch (const ValidationError&) {
        throw;
    } catch (const std::exception& e) {
        throw ValidationError(name + ": " + e.what());
    }
}

double number(const json& p, const char* key, double fallback) {
    if (!p.contains(key)) {
        return fallback;
    }
    const auto& v = p.at(key);
    if (!v.is_number()) {
        throw ValidationError(std::string("params: '") + key + "' must be a number");
    }
    return v.get<double>();
}

void require(bool ok, const std::string& what) {
    if (!ok) {
        throw ValidationError("params: " + what);
    }
}

std::vector<double> number_list(const json& p, const char* key) {
    if (!p.contains(key) || !p.at(key).is_array() || p.at(key).empty()) {
        throw ValidationError(std::string("params: '") + key + "' must be a non-empty array");
    }
    std::vector<double> out;
    for (const auto& v : p.at(key)) {
        if (!v.is_number()) {
            throw ValidationError(std::string("params: '") + key + "' must hold numbers");
        }
        out.push_back(v.get<double>());
    }
    return out;
}

void check_datum_keys(const json& d) {
    if (!d.is_object() || !d.contains("kind") || !d.at("kind").is_string()) {
        throw ValidationError("datum: expected an object with a string 'kind'");
    }
    const auto kind = d.at("kind").get<std::string>();
    if (kind == "bump") {
        check_keys(d, "datum", {"kind", "amplitude", "center", "half_width"});
    } else if (kind == "plateau") {
        check_keys(d, "datum", {"kind", "height", "left", "right", "smoothing"});
    } else if (kind == "exp_tail") {
        check_keys(d, "datum", {"kind", "amplitude", "rate", "cap"});
    } else {
        throw ValidationError("datum: unknown kind '" + kind + "'");
    }
}

// The scheme is only order preserving while dt L_f(cap) <= 1.
void check_step_size(const ReactionModel& model, const Grid1D& grid, double dt, double cap,
                     const std::string& what) {
    if (cap > model.s_max) {
        throw ValidationError(what + ": values up to " + format_number(cap) +
                              " exceed the model's s_max");
    }
    const double lf = GridReaction(grid, model).decay_lipschitz(std::max(cap, 1.0));
    if (dt * lf > 1.0) {
        throw ValidationError(what + ": dt * L_f = " + format_number(dt * lf) +
                              " > 1; reduce dt or the datum");
    }
}

json parse_params(const ExperimentConfig& cfg, const json& p) {
    const std::string& e = cfg.experiment;
    json out = json::object();
    if (e == "solve" || e == "classify") {
        check_keys(p, "params", {});
    } else if (e == "steady") {
        check_keys(p, "params", {"c", "M", "tol", "dt", "t_budget", "edge_margin"});
        out = {{"c", number(p, "c", cfg.solve.c)},
               {"M", number(p, "M", 2.0)},
               {"tol", number(p, "tol", 1e-8)},
               {"dt", number(p, "dt", cfg.solve.dt)},
               {"t_budget", number(p, "t_budget", 3000.0)},
               {"edge_margin", number(p, "edge_margin", 20.0)}};
        require(out["c"].get<double>() >= 0.0, "c must be >= 0");
        require(out["M"].get<double>() > 1.0, "M must exceed 1");
        require(out["M"].get<double>() <= cfg.model.s_max, "M must not exceed s_max");
        require(out["tol"].get<double>() > 0.0, "tol must be positive");
        require(out["dt"].get<double>() > 0.0, "dt must be positive");
        require(out["t_budget"].get<double>() > 0.0, "t_budget must be positive");
        require(out["edge_margin"].get<double>() >= 0.0, "edge_margin must be >= 0");
    } else if (e == "wavespeed") {
        check_keys(p, "params", {"tol", "profile_c", "profile_span", "profile_step"});
        out = {{"tol", number(p, "tol", 1e-6)},
               {"profile_span", number(p, "profile_span", 40.0)},
               {"profile_step", number(p, "profile_step", 0.01)}};
        out["profile_c"] = p.contains("profile_c") && !p.at("profile_c").is_null()
                               ? json(number(p, "profile_c", 0.0))
                               : json(nullptr);
        require(out["tol"].get<double>() > 0.0 && out["tol"].get<double>() < 0.1,
                "tol must lie in (0, 0.1)");
        require(out["profile_span"].get<double>() > 0.0, "profile_span must be positive");
        require(out["profile_step"].get<double>() > 0.0, "profile_step must be positive");
    } else if (e == "threshold-speed") {
        check_keys(p, "params", {"tol", "pad"});
        out = {{"tol", number(p, "tol", 0.01)}, {"pad", number(p, "pad", 0.05)}};
        require(out["tol"].get<double>() > 0.0, "tol must be positive");
        require(out["pad"].get<double>() > 0.0 && out["pad"].get<double>() < 0.5,
                "pad must lie in (0, 0.5)");
    } else if (e == "threshold-sigma") {
        check_keys(p, "params", {"c", "rel_tol", "sigma_min", "sigma_max", "family"});
        const BumpFamily defaults;
        const json fam = p.value("family", json::object());
        check_keys(fam, "params.family", {"height", "center", "half_width", "support_growth"});
        out = {{"c", number(p, "c", cfg.solve.c)},
               {"rel_tol", number(p, "rel_tol", 1e-2)},
               {"sigma_min", number(p, "sigma_min", 1e-6)},
               {"sigma_max", number(p, "sigma_max", 0.0)},
               {"family",
                {{"height", number(fam, "height", defaults.height)},
                 {"center", number(fam, "center", defaults.center)},
                 {"half_width", number(fam, "half_width", defaults.half_width)},
                 {"support_growth", number(fam, "support_growth", defaults.support_growth)}}}};
        require(out["c"].get<double>() >= 0.0, "c must be >= 0");
        require(out["rel_tol"].get<double>() > 0.0, "rel_tol must be positive");
        require(out["sigma_min"].get<double>() > 0.0, "sigma_min must be positive");
        const double smax = out["sigma_max"].get<double>();
        require(smax == 0.0 || smax > out["sigma_min"].get<double>(),
                "sigma_max must be 0 (automatic) or exceed sigma_min");
        require(out["family"]["height"].get<double>() > 0.0, "family.height must be positive");
        require(out["family"]["half_width"].get<double>() > 0.0,
                "family.half_width must be positive");
        require(out["family"]["support_growth"].get<double>() >= 0.0,
                "family.support_growth must be >= 0");
    } else if (e == "regime-map") {
        check_keys(p, "params", {"alphas", "cs", "A", "cap"});
        const auto alphas = number_list(p, "alphas");
        const auto cs = number_list(p, "cs");
        out = {{"alphas", alphas}, {"cs", cs}, {"A", number(p, "A", 1.0)},
               {"cap", number(p, "cap", 1.0)}};
        for (double a : alphas) {
            require(a > 0.0, "alphas must be positive");
        }
        for (double c : cs) {
            require(c >= 0.0, "cs must be >= 0");
        }
        require(out["A"].get<double>() > 0.0, "A must be positive");
        require(out["cap"].get<double>() > 0.0, "cap must be positive");
    } else if (e == "acceptance") {
        check_keys(p, "params", {"criteria"});
        json ids = json::array();
        if (p.contains("criteria")) {
            require(p.at("criteria").is_array(), "criteria must be an array");
            for (const auto& v : p.at("criteria")) {
                require(v.is_number_integer() && v.get<int>() >= 1 && v.get<int>() <= 10,
                        "criteria must be integers in 1..10");
                ids.push_back(v.get<int>());
            }
        }
        out["criteria"] = ids;
    }
    return out;
}

void validate_compute(const ExperimentConfig& cfg) {
    const std::string& e = cfg.experiment;
    const bool needs_datum = e == "solve" || e == "classify" || e == "threshold-speed";
    if (needs_datum && !cfg.datum) {
        throw ValidationError(e + ": a 'datum' is required");
    }
    if (needs_datum) {
        const Field u0 = section("datum", [&] { return make_initial_datum(*cfg.datum, cfg.grid); });
        check_step_size(cfg.model, cfg.grid, cfg.solve.dt, u0.sup(), "datum");
    }
    if (e == "steady") {
        check_step_size(cfg.model, cfg.grid, 0.0, cfg.params["M"].get<double>(), "steady");
    }
    if (e == "threshold-sigma") {
        const auto& f = cfg.params["family"];
        const double smax = cfg.params["sigma_max"].get<double>();
        if (smax > 0.0) {
            check_step_size(cfg.model, cfg.grid, cfg.solve.dt,
                            smax * f["height"].get<double>(), "sigma_max");
        }
    }
    if (e == "regime-map") {
        check_step_size(cfg.model, cfg.grid, cfg.solve.dt, cfg.params["cap"].get<double>(),
                        "regime-map cap");
    }
}

std::string time_label(double t) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "t=%.10g.csv", t);
    return buf;
}

using Artifacts = std::vector<std::pair<std::string, std::string>>;

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json execute(const ExperimentConfig& cfg, const RunOptions& opts, Artifacts& files) {
    const std::string& e = cfg.experiment;
    const json& p = cfg.params;
    if (e == "solve") {
        SolveConfig solve = cfg.solve;
        solve.keep_fields = opts.dump;
        const Field u0 = make_initial_datum(*cfg.datum, cfg.grid);
        const Trajectory traj = evolve(cfg.model, solve, u0);
        files.emplace_back("series.csv", series_csv(traj.series));
        for (const auto& snap : traj.snapshots) {
            files.emplace_back(time_label(snap.t), snapshot_csv(snap.field));
        }
        return {{"t_end", solve.t_end}, {"sup_final", traj.final_field.sup()}};
    }
    if (e == "steady") {
        SteadyOptions so;
        so.dt = p["dt"].get<double>();
        so.t_budget = p["t_budget"].get<double>();
        so.edge_margin = p["edge_margin"].get<double>();
        const SteadyState st = maximal_steady_state(cfg.model, p["c"].get<double>(),
                                                    p["M"].get<double>(), p["tol"].get<double>(),
                                                    cfg.grid, so);
        files.emplace_back("pcplus.csv", snapshot_csv(st.field));
        const json report = to_json(st);
        files.emplace_back("steady.json", dump(report));
        return {{"residual", st.residual}, {"converged", st.converged}};
    }
    if (e == "classify") {
        const Field u0 = make_initial_datum(*cfg.datum, cfg.grid);
        const Classified result = classify_run(cfg.model, cfg.solve, u0, cfg.policy);
        const json outcome = to_json(result.outcome);
        files.emplace_back("outcome.json", dump(outcome));
        if (opts.dump) {
            files.emplace_back("series.csv", series_csv(result.trajectory.series));
        }
        return outcome;
    }
    if (e == "wavespeed") {
        const WaveSpeedResult ws = minimal_wave_speed(cfg.model.plus, p["tol"].get<double>());
        const json result = to_json(ws);
        files.emplace_back("wavespeed.json", dump(result));
        if (!p["profile_c"].is_null()) {
            const WaveProfile prof = wave_profile(cfg.model.plus, p["profile_c"].get<double>(),
                                                  p["profile_span"].get<double>(),
                                                  p["profile_step"].get<double>());
            std::string csv = "xi,V\n";
            for (std::size_t i = 0; i < prof.xi.size(); ++i) {
                csv += format_number(prof.xi[i]) + "," + format_number(prof.V[i]) + "\n";
            }
            files.emplace_back("profile.csv", csv);
        }
        return result;
    }
    SearchOptions search;
    search.solve = cfg.solve;
    search.policy = cfg.policy;
    if (e == "threshold-speed") {
        const Field u0 = make_initial_datum(*cfg.datum, cfg.grid);
        const ThresholdResult r = threshold_speed(cfg.model, u0, p["tol"].get<double>(), search,
                                                  p["pad"].get<double>());
        const json result = to_json(r);
        files.emplace_back("threshold.json", dump(result));
        return {{"value", result["value"]}, {"bracket", result["bracket"]}, {"flag", result["flag"]}};
    }
    if (e == "threshold-sigma") {
        const auto& f = p["family"];
        const BumpFamily family{f["height"].get<double>(), f["center"].get<double>(),
                                f["half_width"].get<double>(), f["support_growth"].get<double>()};
        search.solve.c = p["c"].get<double>();
        const ThresholdResult r = threshold_sigma(
            cfg.model, search.solve.c, family, cfg.grid, p["rel_tol"].get<double>(), search,
            p["sigma_min"].get<double>(), p["sigma_max"].get<double>());
        const json result = to_json(r);
        files.emplace_back("threshold.json", dump(result));
        return {{"value", result["value"]}, {"bracket", result["bracket"]}, {"flag", result["flag"]}};
    }
    if (e == "regime-map") {
        const auto entries = regime_map(cfg.model, p["alphas"].get<std::vector<double>>(),
                                        p["cs"].get<std::vector<double>>(), p["A"].get<double>(),
                                        p["cap"].get<double>(), cfg.grid, search, opts.workers);
        json arr = json::array();
        for (const auto& entry : entries) {
            arr.push_back(to_json(entry));
        }
        files.emplace_back("regime.json", dump(arr));
        files.emplace_back("regime.csv", regime_csv(entries));
        return {{"entries", entries.size()}};
    }
    if (e == "acceptance") {
        if (!opts.acceptance) {
            throw ValidationError("acceptance: no suite linked into this front-end");
        }
        const AcceptanceReport rep = opts.acceptance(p["criteria"].get<std::vector<int>>());
        files.emplace_back("acceptance.csv", rep.csv);
        return {{"passed", rep.passed}};
    }
    throw ValidationError("unknown experiment '" + e + "'");
}

}  // namespace

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names{"solve",           "steady",
                                                "classify",        "wavespeed",
                                                "threshold-speed", "threshold-sigma",
                                                "regime-map",      "acceptance"};
    return names;
}

ExperimentConfig parse_config(const json& j) {
    check_keys(j, "config",
               {"experiment", "model", "grid", "solve", "policy", "datum", "params", "output_dir"});
    ExperimentConfig cfg;
    if (!j.contains("experiment") || !j.at("experiment").is_string()) {
        throw ValidationError("config: 'experiment' must be a string");
    }
    cfg.experiment = j.at("experiment").get<std::string>();
    const auto& names = experiment_names();
    if (std::find(names.begin(), names.end(), cfg.experiment) == names.end()) {
        throw ValidationError("config: unknown experiment '" + cfg.experiment + "'");
    }
    cfg.model = section("model", [&] { return j.value("model", json::object()).get<ReactionModel>(); });
    const HypothesisReport hyp = check_hypotheses(cfg.model);
    if (!hyp.passed()) {
        throw ValidationError("model: structural hypotheses fail: " + to_json(hyp).dump());
    }

    const json grid = j.value("grid", json::object());
    check_keys(grid, "grid", {"x_min", "x_max", "dx", "n"});
    cfg.grid = section("grid", [&] { return grid.get<Grid1D>(); });

    const json solve = j.value("solve", json::object());
    check_keys(solve, "solve", {"c", "dt", "t_end", "snapshot_every", "right_boundary"});
    cfg.solve = section("solve", [&] { return solve.get<SolveConfig>(); });
    if (cfg.solve.c < 0.0) {
        throw ValidationError("solve: c must be >= 0");
    }

    const json policy = j.value("policy", json::object());
    check_keys(policy, "policy",
               {"eps_vanish", "eps_spread", "eps_ground", "drift_max", "tail_slack", "core_margin",
                "core_right", "probe_lo", "probe_hi", "steady_tol", "record_energy"});
    cfg.policy = section("policy", [&] { return policy.get<Policy>(); });

    if (j.contains("datum")) {
        check_datum_keys(j.at("datum"));
        cfg.datum = section("datum", [&] { return j.at("datum").get<DatumSpec>(); });
    }
    // Without an explicit boundary, pick the one suited to the data.
    if (!solve.contains("right_boundary")) {
        if (cfg.datum) {
            cfg.solve.right = right_boundary_for(*cfg.datum);
        } else if (cfg.experiment == "threshold-sigma") {
            cfg.solve.right = DirichletRight{};
        }
    }

    if (j.contains("output_dir")) {
        if (!j.at("output_dir").is_string() || j.at("output_dir").get<std::string>().empty()) {
            throw ValidationError("config: 'output_dir' must be a non-empty string");
        }
        cfg.output_dir = j.at("output_dir").get<std::string>();
    }
    cfg.params = parse_params(cfg, j.value("params", json::object()));
    validate_compute(cfg);
    return cfg;
}

json to_json(const ExperimentConfig& cfg) {
    json j = {{"experiment", cfg.experiment},
              {"model", cfg.model},
              {"grid", cfg.grid},
              {"solve", cfg.solve},
              {"policy", cfg.policy},
              {"params", cfg.params},
              {"output_dir", cfg.output_dir}};
    j["datum"] = cfg.datum ? json(*cfg.datum) : json(nullptr);
    return j;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        os << content;
        os.flush();
        if (!os) {
            throw std::runtime_error("cannot write " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

RunReport run(const ExperimentConfig& cfg, const RunOptions& opts) {
    const auto start = std::chrono::steady_clock::now();
    const std::filesystem::path dir = opts.out_dir.empty() ? std::filesystem::path(cfg.output_dir)
                                                           : opts.out_dir;
    RunReport report;
    Artifacts files;
    std::string status = "ok";
    try {
        report.summary = execute(cfg, opts, files);
        if (cfg.experiment == "acceptance" && !report.summary["passed"].get<bool>()) {
            status = "criteria_failed";
            report.exit_code = 1;
        }
    } catch (const std::invalid_argument& e) {
        // Preconditions only a computation can reveal (e.g. a profile speed below c*).
        report.exit_code = exit_invalid;
        report.message = e.what();
        return report;
    } catch (const NumericalInconsistency& e) {
        report.exit_code = exit_numerical;
        report.message = e.what();
        status = "numerical_inconsistency";
    } catch (const std::exception& e) {
        report.exit_code = exit_numerical;
        report.message = e.what();
        status = "runtime_error";
    }
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    for (const auto& [name, content] : files) {
        write_atomic(dir / name, content);
        report.artifacts.push_back(name);
    }
    json manifest = {{"experiment", cfg.experiment},
                     {"inputs", to_json(cfg)},
                     {"output_path", dir.generic_string()},
                     {"workers", opts.workers},
                     {"version", SHIFTWAVE_VERSION},
                     {"compiler", __VERSION__},
                     {"wall_seconds", report.wall_seconds},
                     {"status", status},
                     {"message", report.message},
                     {"artifacts", report.artifacts}};
    write_atomic(dir / "manifest.json", dump(manifest));
    report.artifacts.push_back("manifest.json");
    return report;
}

RunReport run_json(const json& j, const RunOptions& opts) {
    RunReport report;
    if (!j.is_object() || !j.contains("configs")) {
        try {
            const ExperimentConfig cfg = parse_config(j);
            return run(cfg, opts);
        } catch (const ValidationError& e) {
            report.exit_code = exit_invalid;
            report.message = e.what();
            return report;
        }
    }

    // Sweep: validate every child before anything runs.
    std::vector<ExperimentConfig> children;
    std::filesystem::path root;
    try {
        if (!j.at("configs").is_array() || j.at("configs").empty()) {
            throw ValidationError("sweep: 'configs' must be a non-empty array");
        }
        json base = j;
        base.erase("configs");
        root = opts.out_dir;
        if (root.empty()) {
            root = base.contains("output_dir") && base.at("output_dir").is_string()
                       ? base.at("output_dir").get<std::string>()
                       : std::string("out");
        }
        base.erase("output_dir");
        std::set<std::string> dirs;
        std::size_t index = 0;
        for (const auto& child : j.at("configs")) {
            if (!child.is_object()) {
                throw ValidationError("sweep: every entry of 'configs' must be an object");
            }
            json merged = base;
            merged.merge_patch(child);
            if (!merged.contains("output_dir")) {
                char buf[32];
                std::snprintf(buf, sizeof buf, "run-%03zu", index);
                merged["output_dir"] = buf;
            }
            try {
                children.push_back(parse_config(merged));
            } catch (const ValidationError& e) {
                throw ValidationError("configs[" + std::to_string(index) + "]: " + e.what());
            }
            if (!dirs.insert(children.back().output_dir).second) {
                throw ValidationError("sweep: duplicate output_dir '" + children.back().output_dir +
                                      "'");
            }
            ++index;
        }
    } catch (const ValidationError& e) {
        report.exit_code = exit_invalid;
        report.message = e.what();
        return report;
    } catch (const std::exception& e) {
        report.exit_code = exit_invalid;
        report.message = std::string("sweep: ") + e.what();
        return report;
    }

    const auto start = std::chrono::steady_clock::now();
    std::vector<RunReport> results(children.size());
    parallel_for(children.size(), opts.workers, [&](std::size_t i) {
        RunOptions child_opts = opts;
        child_opts.out_dir = root / children[i].output_dir;
        child_opts.workers = 1;
        try {
            results[i] = run(children[i], child_opts);
        } catch (const std::exception& e) {
            results[i].exit_code = exit_numerical;
            results[i].message = e.what();
        }
    });

    json runs = json::array();
    int failed = 0;
    for (std::size_t i = 0; i < children.size(); ++i) {
        const auto& r = results[i];
        failed += r.exit_code == exit_ok ? 0 : 1;
        report.exit_code = std::max(report.exit_code, r.exit_code);
        runs.push_back({{"index", i},
                        {"experiment", children[i].experiment},
                        {"output_dir", children[i].output_dir},
                        {"exit_code", r.exit_code},
                        {"message", r.message},
                        {"artifacts", r.artifacts},
                        {"summary", r.summary}});
    }
    write_atomic(root / "sweep.json", dump({{"runs", runs}, {"failed", failed}}));
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report.summary = {{"runs", children.size()}, {"failed", failed}};
    report.artifacts.push_back("sweep.json");
    if (failed > 0) {
        report.message = std::to_string(failed) + " of " + std::to_string(children.size()) +
                         " runs failed";
    }
    return report;
}

}  // namespace shiftwave
