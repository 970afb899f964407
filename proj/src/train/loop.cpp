#include "qts/train/loop.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <stdexcept>

#include "json.hpp"
#include "qts/diff/ops.hpp"

namespace qts::train {

namespace {

// Sub-range size for parallel evaluation; bounds transient gradient storage
// without affecting the (index-ordered) reduction result.
constexpr std::size_t kEvalChunk = 256;

double mean_tail(const std::vector<double>& xs, std::size_t n) {
    if (xs.empty()) return 0.0;
    const std::size_t take = std::min(n, xs.size());
    double s = 0.0;
    for (std::size_t i = xs.size() - take; i < xs.size(); ++i) s += xs[i];
    return s / static_cast<double>(take);
}

// Explicit Fisher-Yates so shuffles do not depend on library internals.
void shuffle_indices(std::vector<std::size_t>& idx, std::mt19937_64& rng) {
    for (std::size_t i = idx.size(); i > 1; --i) {
        const std::size_t j = rng() % i;
        std::swap(idx[i - 1], idx[j]);
    }
}

struct ValResult {
    double loss = 0.0;
    Metrics m;
};

ValResult validate(const models::Forecaster& model, const std::vector<diff::Tensor>& xs,
                   const std::vector<diff::Tensor>& ys, std::size_t begin, std::size_t end,
                   util::ThreadPool& pool) {
    const std::size_t n = end - begin;
    std::vector<MetricAccumulator> accs(std::min(kEvalChunk, n));
    MetricAccumulator total;
    for (std::size_t chunk = begin; chunk < end; chunk += kEvalChunk) {
        const std::size_t cend = std::min(chunk + kEvalChunk, end);
        pool.parallel_for(0, cend - chunk, [&](std::size_t k) {
            accs[k] = MetricAccumulator();
            accs[k].add(model.predict(xs[chunk + k]), ys[chunk + k]);
        });
        for (std::size_t k = 0; k < cend - chunk; ++k) total.merge(accs[k]);
    }
    ValResult r;
    r.loss = total.mse();
    r.m = total.finalize();
    return r;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = (seed ^ salt) + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

RunResult train_run(const models::ModelConfig& model_cfg, const data::Dataset& ds,
                    const TrainConfig& cfg, int seed, util::ThreadPool& pool) {
    model_cfg.validate();
    if (cfg.epochs < 0) throw std::invalid_argument("train: epochs must be >= 0");
    if (cfg.batch_size < 1) throw std::invalid_argument("train: batch size must be >= 1");
    if (static_cast<int>(ds.channels()) != model_cfg.channels ||
        ds.lookback != model_cfg.lookback || ds.horizon != model_cfg.horizon ||
        ds.target_channel != model_cfg.target_channel)
        throw std::invalid_argument("train: dataset and model configuration disagree");

    RunResult result;
    result.model = models::make_forecaster(model_cfg);
    result.model->init_params(derive_seed(static_cast<std::uint64_t>(seed), 0xA111CE));
    RunRecord& rec = result.record;
    rec.seed = seed;
    rec.param_count = result.model->param_count();

    std::vector<diff::Tensor> xs(ds.size()), ys(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        xs[i] = ds.input(i);
        ys[i] = ds.target(i);
    }
    const std::size_t n_train = ds.train_count;

    auto run_validation = [&] {
        const ValResult v = validate(*result.model, xs, ys, n_train, ds.size(), pool);
        rec.val_loss.push_back(v.loss);
        rec.val_mape.push_back(v.m.mape);
        rec.val_mae.push_back(v.m.mae);
        rec.val_rmse.push_back(v.m.rmse);
    };

    if (cfg.epochs == 0) {
        run_validation();
        rec.agg_mape = rec.val_mape.back();
        rec.agg_mae = rec.val_mae.back();
        rec.agg_rmse = rec.val_rmse.back();
        return result;
    }

    diff::AdamConfig adam_cfg;
    adam_cfg.lr = cfg.lr;
    diff::AdamState adam_state;
    std::vector<diff::Tensor*> param_ptrs;
    for (models::Param& p : result.model->parameters()) param_ptrs.push_back(&p.value);
    const std::size_t n_params = param_ptrs.size();

    std::mt19937_64 shuffle_rng(derive_seed(static_cast<std::uint64_t>(seed), 0x5AFF1E));
    std::vector<std::size_t> order(n_train);
    for (std::size_t i = 0; i < n_train; ++i) order[i] = i;

    const std::size_t batch = static_cast<std::size_t>(cfg.batch_size);
    std::vector<double> sample_loss(std::min<std::size_t>(kEvalChunk, batch));
    std::vector<std::vector<diff::Tensor>> sample_grads(sample_loss.size());

    for (int epoch = 0; epoch < cfg.epochs && !rec.failed; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        shuffle_indices(order, shuffle_rng);
        double epoch_loss_sum = 0.0;

        for (std::size_t bstart = 0; bstart < n_train && !rec.failed; bstart += batch) {
            const std::size_t bend = std::min(bstart + batch, n_train);
            const std::size_t bn = bend - bstart;

            std::vector<diff::Tensor> grad_sum;
            grad_sum.reserve(n_params);
            for (const diff::Tensor* p : param_ptrs) grad_sum.emplace_back(p->rows, p->cols);
            double batch_loss_sum = 0.0;

            for (std::size_t chunk = 0; chunk < bn; chunk += kEvalChunk) {
                const std::size_t cn = std::min(kEvalChunk, bn - chunk);
                pool.parallel_for(0, cn, [&](std::size_t k) {
                    const std::size_t w = order[bstart + chunk + k];
                    diff::Tape tape;
                    const models::BuiltGraph g = result.model->build(tape, xs[w], true);
                    const diff::VarId target = tape.leaf(ys[w]);
                    const diff::VarId loss = diff::mean(
                        tape, diff::square(tape, diff::sub(tape, g.prediction, target)));
                    tape.backward(loss);
                    sample_loss[k] = tape.value(loss).data[0];
                    sample_grads[k].clear();
                    for (std::size_t p = 0; p < n_params; ++p)
                        sample_grads[k].push_back(tape.grad(g.params[p]));
                });
                for (std::size_t k = 0; k < cn; ++k) {
                    batch_loss_sum += sample_loss[k];
                    for (std::size_t p = 0; p < n_params; ++p) {
                        const diff::Tensor& g = sample_grads[k][p];
                        for (std::size_t e = 0; e < g.size(); ++e)
                            grad_sum[p].data[e] += g.data[e];
                    }
                }
            }

            const double batch_loss = batch_loss_sum / static_cast<double>(bn);
            if (!std::isfinite(batch_loss)) {
                rec.failed = true;
                rec.fail_reason = "non-finite training loss at epoch " + std::to_string(epoch);
                break;
            }
            epoch_loss_sum += batch_loss_sum;
            const double inv_bn = 1.0 / static_cast<double>(bn);
            for (std::size_t p = 0; p < n_params; ++p)
                for (double& v : grad_sum[p].data) v *= inv_bn;
            diff::adam_step(param_ptrs, grad_sum, adam_state, adam_cfg);
        }

        if (rec.failed) break;
        rec.train_loss.push_back(epoch_loss_sum / static_cast<double>(n_train));
        run_validation();
        rec.epoch_ms.push_back(
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count());
    }

    rec.agg_mape = mean_tail(rec.val_mape, 10);
    rec.agg_mae = mean_tail(rec.val_mae, 10);
    rec.agg_rmse = mean_tail(rec.val_rmse, 10);
    return result;
}

Summary aggregate(const std::vector<RunRecord>& records) {
    if (records.empty()) throw std::invalid_argument("aggregate: no records");
    Summary s;
    s.seeds = records.size();
    auto tail10 = [](const std::vector<double>& xs) {
        if (xs.size() < 10)
            throw std::invalid_argument("aggregate: need >= 10 recorded epochs per run");
        return mean_tail(xs, 10);
    };
    for (const RunRecord& r : records) {
        if (r.failed) {
            s.failed_seeds += 1;
            continue;
        }
        s.param_count = r.param_count;
        s.mape.per_seed.push_back(tail10(r.val_mape));
        s.mae.per_seed.push_back(tail10(r.val_mae));
        s.rmse.per_seed.push_back(tail10(r.val_rmse));
    }
    if (s.mape.per_seed.empty()) throw std::runtime_error("aggregate: every run failed");
    auto finish = [](Summary::Stat& st) {
        double sum = 0.0;
        for (double v : st.per_seed) sum += v;
        st.mean = sum / static_cast<double>(st.per_seed.size());
        double var = 0.0;
        for (double v : st.per_seed) var += (v - st.mean) * (v - st.mean);
        st.sd = std::sqrt(var / static_cast<double>(st.per_seed.size()));
    };
    finish(s.mape);
    finish(s.mae);
    finish(s.rmse);
    return s;
}

std::string run_record_to_json(const RunRecord& r, bool include_timing) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["seed"] = r.seed;
    j["failed"] = r.failed;
    j["fail_reason"] = r.fail_reason;
    j["param_count"] = r.param_count;
    j["train_loss"] = r.train_loss;
    j["val_loss"] = r.val_loss;
    j["val_mape"] = r.val_mape;
    j["val_mae"] = r.val_mae;
    j["val_rmse"] = r.val_rmse;
    j["aggregates"] = {{"mape", r.agg_mape}, {"mae", r.agg_mae}, {"rmse", r.agg_rmse}};
    if (include_timing) j["timing_ms"] = r.epoch_ms;
    return j.dump();
}

std::string summary_to_json(const Summary& s) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["seeds"] = s.seeds;
    j["failed_seeds"] = s.failed_seeds;
    j["param_count"] = s.param_count;
    auto stat = [](const Summary::Stat& st) {
        return nlohmann::json{{"mean", st.mean}, {"sd", st.sd}, {"per_seed", st.per_seed}};
    };
    j["metrics"] = {{"mape", stat(s.mape)}, {"mae", stat(s.mae)}, {"rmse", stat(s.rmse)}};
    return j.dump();
}

}  // namespace qts::train
