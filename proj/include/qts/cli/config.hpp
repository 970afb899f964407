#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qts/data/dataset.hpp"
#include "qts/models/config.hpp"
#include "qts/train/loop.hpp"

namespace qts::cli {

/// Configuration problems exit with code 2, unreadable or unusable data with
/// code 3, and run failures with code 4.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct RunError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DatasetConfig {
    std::string source;  // lorenz | csv | surrogate
    std::string path;    // csv source only
    std::size_t points = 1000;
    double dt = 0.01;
    std::uint64_t surrogate_seed = 7;
    int lookback = 5;
    int horizon = 1;
    double split = 0.75;
    std::string normalization = "minmax";  // minmax | standardize
    std::string target;                    // channel name; empty = all channels
    std::vector<std::string> schema;       // csv column schema; empty = from header
};

struct TrainingConfig {
    int epochs = 50;
    int batch_size = 128;
    double lr = 5e-4;
    std::vector<int> seeds{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
};

struct ExperimentConfig {
    std::string name;
    DatasetConfig dataset;
    models::ModelConfig model;  // lookback/horizon/channels/target filled from dataset
    TrainingConfig training;
    std::string output_dir;

    bool short_term() const { return dataset.horizon == 1; }
};

/// Parses and validates an experiment config (strict: unknown keys are
/// rejected, missing sections are named). Accepts a manifest written by a
/// previous run as well, re-running its embedded config.
ExperimentConfig load_experiment_config(const std::string& path);
ExperimentConfig experiment_config_from_json_text(const std::string& text);

std::string experiment_config_to_json(const ExperimentConfig& cfg);

/// Builds the series named by the config (generating or ingesting) and the
/// windowed dataset, resolving the target channel by name. Fills the model's
/// shape fields (lookback, horizon, channels, target).
data::Dataset build_dataset_from_config(ExperimentConfig& cfg);

}  // namespace qts::cli
