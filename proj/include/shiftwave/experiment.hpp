#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "shiftwave/classify.hpp"
#include "shiftwave/grid.hpp"
#include "shiftwave/pde.hpp"
#include "shiftwave/reaction.hpp"

namespace shiftwave {

/// Config rejected before any compute.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline constexpr int exit_ok = 0;
inline constexpr int exit_invalid = 2;
inline constexpr int exit_numerical = 3;

const std::vector<std::string>& experiment_names();

struct ExperimentConfig {
    std::string experiment;
    ReactionModel model;
    Grid1D grid;
    SolveConfig solve;
    Policy policy;
    std::optional<DatumSpec> datum;
    /// Experiment-specific parameters with every default filled in.
    nlohmann::json params = nlohmann::json::object();
    std::string output_dir = "out";
};

/// Parses and range-checks a single experiment. Throws ValidationError.
ExperimentConfig parse_config(const nlohmann::json& j);

/// The config as run, defaults included.
nlohmann::json to_json(const ExperimentConfig& cfg);

/// Outcome of the acceptance hook: CSV table and overall pass flag.
struct AcceptanceReport {
    std::string csv;
    bool passed = false;
};

struct RunOptions {
    /// Overrides the config's output_dir when non-empty.
    std::filesystem::path out_dir;
    unsigned workers = 1;
    bool dump = false;
    std::function<AcceptanceReport(const std::vector<int>&)> acceptance;
};

struct RunReport {
    int exit_code = exit_ok;
    std::string message;
    std::vector<std::string> artifacts;
    double wall_seconds = 0.0;
    /// Short result for the terminal (the wavespeed triple, a verdict, ...).
    nlohmann::json summary;
};

/// Runs one validated experiment, writing the module artifacts and manifest.json.
RunReport run(const ExperimentConfig& cfg, const RunOptions& opts);

/// Entry point for a raw config: a single experiment, or a sweep when the
/// config holds a "configs" array. Children inherit the top-level fields
/// (JSON merge patch) and write to out_dir / <child output_dir>. Nothing is
/// written when validation fails.
RunReport run_json(const nlohmann::json& j, const RunOptions& opts);

/// Writes via a sibling temp file and rename.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace shiftwave
