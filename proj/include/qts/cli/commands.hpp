#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qts/cli/config.hpp"

namespace qts::cli {

inline constexpr const char* kToolVersion = "qts 0.1.0";

struct GenerateArgs {
    std::string source = "lorenz";  // lorenz | surrogate
    std::size_t points = 1000;
    double dt = 0.01;
    int channels = 3;
    std::uint64_t seed = 7;
    std::string out;
};

/// Writes the requested series as CSV (plus a manifest sidecar).
void cmd_generate_data(const GenerateArgs& args);

struct TrainArgs {
    std::string config_path;
    std::string output_dir;      // overrides the config when non-empty
    std::vector<int> seeds;      // overrides the config when non-empty
};

/// Runs every seed of the experiment: writes per-seed run records and
/// checkpoints, the aggregate summary, a plot-data CSV of validation RMSE
/// per epoch per seed, and the manifest.
void cmd_train(const TrainArgs& args);

struct ReportArgs {
    std::vector<std::string> run_dirs;
    std::string out_csv;  // optional
};

/// Merged comparison table across run directories, grouped by regime.
/// Returns the text table (also printed by the binary).
std::string cmd_report(const ReportArgs& args);

struct ForecastArgs {
    std::string checkpoint_path;
    std::string config_path;        // dataset section is used
    std::vector<int> horizons;      // defaults to {1} or {1, S/2, S}
    std::string out;
};

/// Rolling evaluation over the validation split; writes denormalized truth
/// and predictions per channel per requested horizon.
void cmd_forecast(const ForecastArgs& args);

/// Maps an exception to the documented exit code (2 config, 3 data, 4 run).
int run_command(const std::function<void()>& body);

}  // namespace qts::cli
