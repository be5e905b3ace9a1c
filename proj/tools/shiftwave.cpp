// shiftwave: batch front-end.
//
//   shiftwave <experiment> --config run.json [--out dir] [--workers n] [--dump]
//
// Exit status: 0 ok, 1 acceptance criteria failed, 2 invalid config,
// 3 numerical inconsistency or other runtime failure.
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "shiftwave/experiment.hpp"
#include "suite.hpp"

namespace {

shiftwave::AcceptanceReport run_acceptance(const std::vector<int>& ids) {
    const auto results = shiftwave::acceptance::run_suite(ids, [](const auto& r) {
        std::fprintf(stderr, "%s\n", shiftwave::acceptance::format_line(r).c_str());
    });
    bool passed = true;
    for (const auto& r : results) {
        passed = passed && r.passed;
    }
    return {shiftwave::acceptance::results_csv(results), passed};
}

std::optional<double> parse_profile(const std::string& arg) {
    if (arg.empty()) {
        return std::nullopt;
    }
    if (arg.rfind("c=", 0) != 0) {
        throw shiftwave::ValidationError("--profile expects c=<speed>");
    }
    try {
        std::size_t used = 0;
        const double c = std::stod(arg.substr(2), &used);
        if (used != arg.size() - 2) {
            throw std::invalid_argument("trailing characters");
        }
        return c;
    } catch (const std::exception&) {
        throw shiftwave::ValidationError("--profile expects c=<speed>, got '" + arg + "'");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"shiftwave: reaction-advection-diffusion experiments in a shifting habitat"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    unsigned workers = 1;
    bool dump = false;
    std::string profile;
    std::vector<int> criteria;

    for (const auto& name : shiftwave::experiment_names()) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "experiment JSON")
            ->check(CLI::ExistingFile)
            ->required(name != "acceptance");
        sub->add_option("--out", out_dir, "output directory (SHIFTWAVE_OUT overrides)");
        sub->add_option("--workers", workers, "concurrent tasks")->check(CLI::PositiveNumber);
        sub->add_flag("--dump", dump, "also write time series / snapshots");
        if (name == "wavespeed") {
            sub->add_option("--profile", profile, "c=<v>: write the front profile at speed v");
        }
        if (name == "acceptance") {
            sub->add_option("criteria", criteria, "criterion ids (default: all)");
        }
    }
    CLI11_PARSE(app, argc, argv);
    const std::string experiment = app.get_subcommands().front()->get_name();

    nlohmann::json config = nlohmann::json::object();
    if (!config_path.empty()) {
        std::ifstream is(config_path);
        try {
            config = nlohmann::json::parse(is);
        } catch (const nlohmann::json::parse_error& e) {
            std::fprintf(stderr, "error: %s: %s\n", config_path.c_str(), e.what());
            return shiftwave::exit_invalid;
        }
    }
    if (!config.is_object()) {
        std::fprintf(stderr, "error: config must be a JSON object\n");
        return shiftwave::exit_invalid;
    }
    if (!config.contains("experiment")) {
        config["experiment"] = experiment;
    } else if (config["experiment"] != experiment) {
        std::fprintf(stderr, "error: config is for '%s', not '%s'\n",
                     config["experiment"].dump().c_str(), experiment.c_str());
        return shiftwave::exit_invalid;
    }
    if (experiment == "acceptance" && !criteria.empty()) {
        config["params"]["criteria"] = criteria;
    }

    shiftwave::RunOptions opts;
    opts.workers = workers;
    opts.dump = dump;
    opts.acceptance = run_acceptance;
    if (const char* env = std::getenv("SHIFTWAVE_OUT"); env != nullptr && *env != '\0') {
        opts.out_dir = env;
    } else if (!out_dir.empty()) {
        opts.out_dir = out_dir;
    }
    try {
        if (const auto c = parse_profile(profile)) {
            config["params"]["profile_c"] = *c;
        }
    } catch (const shiftwave::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return shiftwave::exit_invalid;
    }

    const shiftwave::RunReport report = shiftwave::run_json(config, opts);
    if (!report.summary.is_null()) {
        std::cout << report.summary.dump() << "\n";
    }
    if (!report.message.empty()) {
        std::fprintf(stderr, "%s: %s\n", report.exit_code == 0 ? "note" : "error",
                     report.message.c_str());
    }
    return report.exit_code;
}
