#include "qts/cli/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "json.hpp"
#include "qts/data/csv.hpp"
#include "qts/data/lorenz.hpp"
#include "qts/data/surrogate.hpp"

namespace qts::cli {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& known,
                    const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!known.count(it.key()))
            throw ConfigError("config: unknown key '" + it.key() + "' in " + where);
    }
}

template <typename T>
T require(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key))
        throw ConfigError("config: missing '" + key + "' in " + where);
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config: bad value for '" + key + "' in " + where);
    }
}

template <typename T>
T optional_of(const json& obj, const std::string& key, T fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config: bad value for '" + key + "' in " + where);
    }
}

DatasetConfig parse_dataset(const json& j) {
    reject_unknown(j,
                   {"source", "path", "points", "dt", "surrogate_seed", "lookback", "horizon",
                    "split", "normalization", "target", "schema"},
                   "dataset");
    DatasetConfig d;
    d.source = require<std::string>(j, "source", "dataset");
    if (d.source != "lorenz" && d.source != "csv" && d.source != "surrogate")
        throw ConfigError("config: dataset.source must be lorenz, csv or surrogate");
    d.path = optional_of<std::string>(j, "path", "", "dataset");
    if (d.source == "csv" && d.path.empty())
        throw ConfigError("config: dataset.path is required for the csv source");
    d.points = optional_of<std::size_t>(j, "points", d.points, "dataset");
    d.dt = optional_of<double>(j, "dt", d.dt, "dataset");
    d.surrogate_seed = optional_of<std::uint64_t>(j, "surrogate_seed", d.surrogate_seed,
                                                  "dataset");
    d.lookback = require<int>(j, "lookback", "dataset");
    d.horizon = require<int>(j, "horizon", "dataset");
    d.split = optional_of<double>(j, "split", d.split, "dataset");
    d.normalization = optional_of<std::string>(j, "normalization", d.normalization, "dataset");
    if (d.normalization != "minmax" && d.normalization != "standardize")
        throw ConfigError("config: dataset.normalization must be minmax or standardize");
    d.target = optional_of<std::string>(j, "target", "", "dataset");
    d.schema = optional_of<std::vector<std::string>>(j, "schema", {}, "dataset");
    return d;
}

models::ModelConfig parse_model(const json& j) {
    reject_unknown(j,
                   {"kind", "depth", "n_qubits", "blocks", "embed_dim", "ffn_dim", "p_enc",
                    "p_vqc", "gradient"},
                   "model");
    models::ModelConfig m;
    try {
        m.kind = models::model_kind_from_string(require<std::string>(j, "kind", "model"));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    m.depth = optional_of<int>(j, "depth", m.depth, "model");
    m.n_qubits = optional_of<int>(j, "n_qubits", m.n_qubits, "model");
    m.blocks = optional_of<int>(j, "blocks", m.blocks, "model");
    m.embed_dim = optional_of<int>(j, "embed_dim", m.embed_dim, "model");
    m.ffn_dim = optional_of<int>(j, "ffn_dim", m.ffn_dim, "model");
    m.p_enc = optional_of<int>(j, "p_enc", m.p_enc, "model");
    m.p_vqc = optional_of<int>(j, "p_vqc", m.p_vqc, "model");
    try {
        m.grad_method = models::grad_method_from_string(
            optional_of<std::string>(j, "gradient", "parameter_shift", "model"));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return m;
}

TrainingConfig parse_training(const json& j) {
    reject_unknown(j, {"epochs", "batch_size", "lr", "seeds"}, "training");
    TrainingConfig t;
    t.epochs = require<int>(j, "epochs", "training");
    t.batch_size = require<int>(j, "batch_size", "training");
    t.lr = require<double>(j, "lr", "training");
    t.seeds = optional_of<std::vector<int>>(j, "seeds", t.seeds, "training");
    if (t.epochs < 0) throw ConfigError("config: training.epochs must be >= 0");
    if (t.batch_size < 1) throw ConfigError("config: training.batch_size must be >= 1");
    if (t.lr <= 0.0) throw ConfigError("config: training.lr must be > 0");
    if (t.seeds.empty()) throw ConfigError("config: training.seeds must not be empty");
    return t;
}

}  // namespace

ExperimentConfig experiment_config_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    // A manifest wraps the config it ran with.
    if (j.contains("tool") && j.contains("config")) j = j.at("config");

    reject_unknown(j, {"name", "dataset", "model", "training", "output_dir"}, "experiment");
    ExperimentConfig cfg;
    cfg.name = require<std::string>(j, "name", "experiment");
    if (!j.contains("dataset")) throw ConfigError("config: missing 'dataset' section");
    if (!j.contains("model")) throw ConfigError("config: missing 'model' section");
    if (!j.contains("training")) throw ConfigError("config: missing 'training' section");
    cfg.dataset = parse_dataset(j.at("dataset"));
    cfg.model = parse_model(j.at("model"));
    cfg.training = parse_training(j.at("training"));
    cfg.output_dir = require<std::string>(j, "output_dir", "experiment");
    return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return experiment_config_from_json_text(text);
}

std::string experiment_config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["name"] = cfg.name;
    json d;
    d["source"] = cfg.dataset.source;
    if (!cfg.dataset.path.empty()) d["path"] = cfg.dataset.path;
    d["points"] = cfg.dataset.points;
    d["dt"] = cfg.dataset.dt;
    d["surrogate_seed"] = cfg.dataset.surrogate_seed;
    d["lookback"] = cfg.dataset.lookback;
    d["horizon"] = cfg.dataset.horizon;
    d["split"] = cfg.dataset.split;
    d["normalization"] = cfg.dataset.normalization;
    if (!cfg.dataset.target.empty()) d["target"] = cfg.dataset.target;
    if (!cfg.dataset.schema.empty()) d["schema"] = cfg.dataset.schema;
    j["dataset"] = std::move(d);
    json m;
    m["kind"] = models::to_string(cfg.model.kind);
    m["depth"] = cfg.model.depth;
    m["n_qubits"] = cfg.model.n_qubits;
    m["blocks"] = cfg.model.blocks;
    m["embed_dim"] = cfg.model.embed_dim;
    m["ffn_dim"] = cfg.model.ffn_dim;
    m["p_enc"] = cfg.model.p_enc;
    m["p_vqc"] = cfg.model.p_vqc;
    m["gradient"] = models::grad_method_name(cfg.model.grad_method);
    j["model"] = std::move(m);
    json t;
    t["epochs"] = cfg.training.epochs;
    t["batch_size"] = cfg.training.batch_size;
    t["lr"] = cfg.training.lr;
    t["seeds"] = cfg.training.seeds;
    j["training"] = std::move(t);
    j["output_dir"] = cfg.output_dir;
    return j.dump(2);
}

data::Dataset build_dataset_from_config(ExperimentConfig& cfg) {
    data::RawSeries series;
    try {
        if (cfg.dataset.source == "lorenz") {
            series = data::lorenz_generate(cfg.dataset.points, cfg.dataset.dt);
        } else if (cfg.dataset.source == "surrogate") {
            series = data::surrogate_series(cfg.dataset.points, cfg.dataset.surrogate_seed);
        } else {
            std::vector<std::string> schema = cfg.dataset.schema;
            if (schema.empty()) {
                // Discover the schema from the header, minus filter columns.
                const data::RawSeries raw = data::read_csv(cfg.dataset.path);
                for (const std::string& name : raw.channel_names)
                    if (name != data::IngestRules{}.operating_state_column)
                        schema.push_back(name);
            }
            series = data::ingest_csv(cfg.dataset.path, schema);
        }
    } catch (const std::exception& e) {
        throw DataError(std::string("data: ") + e.what());
    }

    int target_index = -1;
    if (!cfg.dataset.target.empty()) {
        const auto it = std::find(series.channel_names.begin(), series.channel_names.end(),
                                  cfg.dataset.target);
        if (it == series.channel_names.end())
            throw ConfigError("config: target channel '" + cfg.dataset.target +
                              "' not in the series");
        target_index = static_cast<int>(it - series.channel_names.begin());
    }

    data::DatasetSpec spec;
    spec.lookback = cfg.dataset.lookback;
    spec.horizon = cfg.dataset.horizon;
    spec.split_frac = cfg.dataset.split;
    spec.mode = cfg.dataset.normalization == "minmax" ? data::NormMode::MinMax01
                                                      : data::NormMode::Standardize;
    spec.target_channel = target_index;

    data::Dataset ds;
    try {
        ds = data::build_dataset(series, spec);
    } catch (const std::exception& e) {
        throw DataError(std::string("data: ") + e.what());
    }

    cfg.model.lookback = cfg.dataset.lookback;
    cfg.model.horizon = cfg.dataset.horizon;
    cfg.model.channels = static_cast<int>(ds.channels());
    cfg.model.target_channel = target_index;
    try {
        cfg.model.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return ds;
}

}  // namespace qts::cli
