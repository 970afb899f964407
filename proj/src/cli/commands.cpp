#include "qts/cli/commands.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "json.hpp"
#include "qts/data/csv.hpp"
#include "qts/data/lorenz.hpp"
#include "qts/data/surrogate.hpp"
#include "qts/models/checkpoint.hpp"
#include "qts/train/loop.hpp"
#include "qts/util/parallel.hpp"

namespace qts::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json build_info() {
    json j;
    j["tool"] = kToolVersion;
    j["compiler"] = __VERSION__;
    j["cxx_standard"] = static_cast<long>(__cplusplus);
    return j;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw RunError("cannot write " + path);
    out << text;
    if (!out) throw RunError("write failed for " + path);
}

void write_manifest(const std::string& path, const json& config, const json& extra) {
    json j;
    j["manifest_schema_version"] = 1;
    j["tool"] = build_info();
    j["config"] = config;
    for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
    write_text(path, j.dump(2));
}

}  // namespace

void cmd_generate_data(const GenerateArgs& args) {
    if (args.out.empty()) throw ConfigError("generate-data: --out is required");
    data::RawSeries series;
    if (args.source == "lorenz") {
        if (args.points < 2) throw ConfigError("generate-data: --points must be >= 2");
        series = data::lorenz_generate(args.points, args.dt);
    } else if (args.source == "surrogate") {
        if (args.channels != 7)
            throw ConfigError("generate-data: the surrogate schema has exactly 7 channels");
        series = data::surrogate_series(args.points, args.seed);
    } else {
        throw ConfigError("generate-data: --source must be lorenz or surrogate");
    }
    try {
        data::write_csv(args.out, series);
    } catch (const std::exception& e) {
        throw DataError(e.what());
    }
    json cfg;
    cfg["source"] = args.source;
    cfg["points"] = args.points;
    cfg["dt"] = args.dt;
    cfg["channels"] = args.channels;
    cfg["seed"] = args.seed;
    cfg["out"] = args.out;
    write_manifest(args.out + ".manifest.json", cfg, json::object());
    std::cout << "wrote " << series.rows() << " rows x " << series.channels() << " channels to "
              << args.out << "\n";
}

void cmd_train(const TrainArgs& args) {
    ExperimentConfig cfg = load_experiment_config(args.config_path);
    if (!args.output_dir.empty()) cfg.output_dir = args.output_dir;
    if (!args.seeds.empty()) cfg.training.seeds = args.seeds;
    if (cfg.output_dir.empty()) throw ConfigError("config: output_dir is required");

    data::Dataset ds = build_dataset_from_config(cfg);
    std::error_code ec;
    fs::create_directories(cfg.output_dir, ec);
    if (ec) throw RunError("cannot create output directory " + cfg.output_dir);

    util::ThreadPool& pool = util::ThreadPool::global();
    train::TrainConfig tc;
    tc.epochs = cfg.training.epochs;
    tc.batch_size = cfg.training.batch_size;
    tc.lr = cfg.training.lr;

    std::vector<train::RunRecord> records;
    std::ostringstream plot;
    plot << "epoch,seed,val_rmse\n";
    for (const int seed : cfg.training.seeds) {
        train::RunResult res;
        try {
            res = train::train_run(cfg.model, ds, tc, seed, pool);
        } catch (const std::exception& e) {
            throw RunError("seed " + std::to_string(seed) + ": " + e.what());
        }
        const std::string tag = "seed" + std::to_string(seed);
        write_text(cfg.output_dir + "/run_" + tag + ".json",
                   train::run_record_to_json(res.record, true));
        models::save_checkpoint(*res.model, cfg.output_dir + "/checkpoint_" + tag + ".json");
        for (std::size_t e = 0; e < res.record.val_rmse.size(); ++e)
            plot << e << ',' << seed << ',' << std::setprecision(17)
                 << res.record.val_rmse[e] << "\n";
        std::cout << "seed " << seed
                  << (res.record.failed ? " FAILED: " + res.record.fail_reason
                                        : " rmse " + std::to_string(res.record.agg_rmse))
                  << "\n";
        records.push_back(std::move(res.record));
    }
    write_text(cfg.output_dir + "/plotdata.csv", plot.str());

    json summary;
    try {
        summary = json::parse(train::summary_to_json(train::aggregate(records)));
    } catch (const std::exception& e) {
        throw RunError(std::string("aggregate: ") + e.what());
    }
    summary["name"] = cfg.name;
    summary["model"] = models::to_string(cfg.model.kind);
    summary["gradient"] = models::grad_method_name(cfg.model.grad_method);
    summary["regime"] = cfg.short_term() ? "ST" : "LT";
    summary["horizon"] = cfg.dataset.horizon;
    summary["lookback"] = cfg.dataset.lookback;
    summary["dataset"] = cfg.dataset.source;
    summary["clamped_values"] = ds.clamped_values;
    summary["seed_list"] = cfg.training.seeds;
    write_text(cfg.output_dir + "/summary.json", summary.dump(2));

    json extra;
    extra["seeds"] = cfg.training.seeds;
    extra["adam"] = {{"beta1", 0.9}, {"beta2", 0.999}, {"eps", 1e-8}};
    extra["model_resolved"] = json::parse(models::model_config_to_json(cfg.model));
    write_manifest(cfg.output_dir + "/manifest.json",
                   json::parse(experiment_config_to_json(cfg)), extra);
    std::cout << "summary written to " << cfg.output_dir << "/summary.json\n";
}

std::string cmd_report(const ReportArgs& args) {
    if (args.run_dirs.empty()) throw ConfigError("report: no run directories given");
    struct Row {
        std::string regime, name, model;
        long params;
        double mape, mape_sd, mae, mae_sd, rmse, rmse_sd;
        std::size_t seeds, failed;
    };
    std::vector<Row> rows;
    for (const std::string& dir : args.run_dirs) {
        std::ifstream in(dir + "/summary.json");
        if (!in) throw DataError("report: cannot open " + dir + "/summary.json");
        json j;
        try {
            in >> j;
            Row r;
            r.regime = j.at("regime").get<std::string>();
            r.name = j.at("name").get<std::string>();
            r.model = j.at("model").get<std::string>();
            r.params = j.at("param_count").get<long>();
            r.mape = j.at("metrics").at("mape").at("mean").get<double>();
            r.mape_sd = j.at("metrics").at("mape").at("sd").get<double>();
            r.mae = j.at("metrics").at("mae").at("mean").get<double>();
            r.mae_sd = j.at("metrics").at("mae").at("sd").get<double>();
            r.rmse = j.at("metrics").at("rmse").at("mean").get<double>();
            r.rmse_sd = j.at("metrics").at("rmse").at("sd").get<double>();
            r.seeds = j.at("seeds").get<std::size_t>();
            r.failed = j.at("failed_seeds").get<std::size_t>();
            rows.push_back(std::move(r));
        } catch (const json::exception& e) {
            throw DataError("report: malformed summary in " + dir + ": " + e.what());
        }
    }

    std::ostringstream text, csv;
    csv << "regime,name,model,params,mape,mape_sd,mae,mae_sd,rmse,rmse_sd,seeds,failed\n";
    for (const char* regime : {"ST", "LT"}) {
        bool any = false;
        for (const Row& r : rows)
            if (r.regime == regime) any = true;
        if (!any) continue;
        text << (regime == std::string("ST") ? "Short-Term Forecasting\n"
                                             : "Long-Term Forecasting\n");
        text << std::left << std::setw(28) << "  model" << std::setw(10) << "params"
             << std::setw(22) << "MAPE" << std::setw(22) << "MAE" << std::setw(22) << "RMSE"
             << "\n";
        for (const Row& r : rows) {
            if (r.regime != regime) continue;
            auto cell = [](double m, double sd) {
                std::ostringstream s;
                s << std::setprecision(4) << m << " +/- " << std::setprecision(2) << sd;
                return s.str();
            };
            text << std::left << "  " << std::setw(26) << r.model << std::setw(10) << r.params
                 << std::setw(22) << cell(r.mape, r.mape_sd) << std::setw(22)
                 << cell(r.mae, r.mae_sd) << std::setw(22) << cell(r.rmse, r.rmse_sd) << "\n";
            csv << r.regime << ',' << r.name << ',' << r.model << ',' << r.params << ','
                << std::setprecision(17) << r.mape << ',' << r.mape_sd << ',' << r.mae << ','
                << r.mae_sd << ',' << r.rmse << ',' << r.rmse_sd << ',' << r.seeds << ','
                << r.failed << "\n";
        }
    }
    if (!args.out_csv.empty()) write_text(args.out_csv, csv.str());
    return text.str();
}

void cmd_forecast(const ForecastArgs& args) {
    if (args.out.empty()) throw ConfigError("forecast: --out is required");
    std::unique_ptr<models::Forecaster> model;
    try {
        model = models::load_checkpoint(args.checkpoint_path);
    } catch (const std::exception& e) {
        throw DataError(e.what());
    }
    ExperimentConfig cfg = load_experiment_config(args.config_path);
    const data::Dataset ds = build_dataset_from_config(cfg);

    const models::ModelConfig& mc = model->config();
    if (mc.lookback != ds.lookback || mc.horizon != ds.horizon ||
        mc.channels != static_cast<int>(ds.channels()) ||
        mc.target_channel != ds.target_channel)
        throw ConfigError("forecast: checkpoint and dataset shapes do not match");

    std::vector<int> horizons = args.horizons;
    if (horizons.empty()) horizons = {1};
    for (int h : horizons)
        if (h < 1 || h > mc.horizon)
            throw ConfigError("forecast: horizon out of range [1, " +
                              std::to_string(mc.horizon) + "]");

    std::vector<std::string> out_names;
    std::vector<std::size_t> out_channels;
    if (ds.target_channel >= 0) {
        out_names.push_back(ds.channel_names[static_cast<std::size_t>(ds.target_channel)]);
        out_channels.push_back(static_cast<std::size_t>(ds.target_channel));
    } else {
        for (std::size_t c = 0; c < ds.channels(); ++c) {
            out_names.push_back(ds.channel_names[c]);
            out_channels.push_back(c);
        }
    }

    std::ostringstream csv;
    csv << "window";
    const bool single = horizons.size() == 1;
    for (int h : horizons)
        for (const std::string& n : out_names)
            csv << ",truth_" << n << (single ? "" : "_h" + std::to_string(h));
    for (int h : horizons)
        for (const std::string& n : out_names)
            csv << ",pred_" << n << (single ? "" : "_h" + std::to_string(h));
    csv << "\n";
    csv << std::setprecision(17);

    for (std::size_t w = ds.train_count; w < ds.size(); ++w) {
        const diff::Tensor pred = model->predict(ds.input(w));
        const diff::Tensor truth = ds.target(w);
        csv << (w - ds.train_count);
        for (int h : horizons)
            for (std::size_t c = 0; c < out_channels.size(); ++c)
                csv << ','
                    << ds.norm.denormalize(truth.at(static_cast<std::size_t>(h - 1), c),
                                           out_channels[c]);
        for (int h : horizons)
            for (std::size_t c = 0; c < out_channels.size(); ++c)
                csv << ','
                    << ds.norm.denormalize(pred.at(static_cast<std::size_t>(h - 1), c),
                                           out_channels[c]);
        csv << "\n";
    }
    write_text(args.out, csv.str());

    json cfgj;
    cfgj["checkpoint"] = args.checkpoint_path;
    cfgj["config"] = json::parse(experiment_config_to_json(cfg));
    cfgj["horizons"] = horizons;
    cfgj["out"] = args.out;
    write_manifest(args.out + ".manifest.json", cfgj, json::object());
    std::cout << "wrote predictions for " << ds.validation_count() << " windows to " << args.out
              << "\n";
}

int run_command(const std::function<void()>& body) {
    try {
        body();
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
}

}  // namespace qts::cli
