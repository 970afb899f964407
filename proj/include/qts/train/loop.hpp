#pragma once

#include <memory>
#include <string>
#include <vector>

#include "qts/data/dataset.hpp"
#include "qts/diff/adam.hpp"
#include "qts/models/forecaster.hpp"
#include "qts/train/metrics.hpp"
#include "qts/util/parallel.hpp"

namespace qts::train {

struct TrainConfig {
    int epochs = 50;
    int batch_size = 128;
    double lr = 5e-4;
};

/// Per-seed run log. Aggregates are the means of the final (up to) 10
/// validation epochs. epoch_ms is wall-clock telemetry and is excluded from
/// the deterministic serialization.
struct RunRecord {
    int seed = 0;
    bool failed = false;
    std::string fail_reason;
    long param_count = 0;
    std::vector<double> train_loss;
    std::vector<double> val_loss;
    std::vector<double> val_mape;
    std::vector<double> val_mae;
    std::vector<double> val_rmse;
    std::vector<double> epoch_ms;
    double agg_mape = 0.0;
    double agg_mae = 0.0;
    double agg_rmse = 0.0;
};

struct RunResult {
    RunRecord record;
    std::unique_ptr<models::Forecaster> model;
};

/// One seeded training run: deterministic initialization, per-epoch shuffled
/// mini-batches over the training split, Adam updates, and a forward-only
/// validation pass per epoch. Batch samples evaluate in parallel; gradients
/// reduce in fixed index order, so results are bit-identical for any thread
/// count. A non-finite loss aborts and marks the record failed.
RunResult train_run(const models::ModelConfig& model_cfg, const data::Dataset& ds,
                    const TrainConfig& cfg, int seed, util::ThreadPool& pool);

struct Summary {
    struct Stat {
        double mean = 0.0;
        double sd = 0.0;
        std::vector<double> per_seed;
    };
    std::size_t seeds = 0;
    std::size_t failed_seeds = 0;
    long param_count = 0;
    Stat mape, mae, rmse;
};

/// Mean over the final 10 validation epochs per seed, then mean and
/// population standard deviation over seeds. Failed runs are excluded and
/// counted. Requires >= 10 recorded epochs per surviving run.
Summary aggregate(const std::vector<RunRecord>& records);

std::string run_record_to_json(const RunRecord& r, bool include_timing);
std::string summary_to_json(const Summary& s);

/// splitmix64 of seed ^ salt; stable stream derivation for init vs shuffle.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace qts::train
