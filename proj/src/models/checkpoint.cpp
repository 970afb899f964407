#include "qts/models/checkpoint.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace qts::models {

namespace {

nlohmann::json config_json(const ModelConfig& cfg) {
    nlohmann::json j;
    j["kind"] = to_string(cfg.kind);
    j["lookback"] = cfg.lookback;
    j["horizon"] = cfg.horizon;
    j["channels"] = cfg.channels;
    j["target_channel"] = cfg.target_channel;
    j["depth"] = cfg.depth;
    j["n_qubits"] = cfg.n_qubits;
    j["blocks"] = cfg.blocks;
    j["embed_dim"] = cfg.embed_dim;
    j["ffn_dim"] = cfg.ffn_dim;
    j["p_enc"] = cfg.p_enc;
    j["p_vqc"] = cfg.p_vqc;
    j["gradient"] = grad_method_name(cfg.grad_method);
    j["layer_norm_eps"] = cfg.layer_norm_eps;
    return j;
}

ModelConfig config_from(const nlohmann::json& j) {
    ModelConfig cfg;
    cfg.kind = model_kind_from_string(j.at("kind").get<std::string>());
    cfg.lookback = j.at("lookback").get<int>();
    cfg.horizon = j.at("horizon").get<int>();
    cfg.channels = j.at("channels").get<int>();
    cfg.target_channel = j.value("target_channel", -1);
    cfg.depth = j.value("depth", cfg.depth);
    cfg.n_qubits = j.value("n_qubits", cfg.n_qubits);
    cfg.blocks = j.value("blocks", cfg.blocks);
    cfg.embed_dim = j.value("embed_dim", cfg.embed_dim);
    cfg.ffn_dim = j.value("ffn_dim", cfg.ffn_dim);
    cfg.p_enc = j.value("p_enc", cfg.p_enc);
    cfg.p_vqc = j.value("p_vqc", cfg.p_vqc);
    cfg.grad_method = grad_method_from_string(j.value("gradient", "parameter_shift"));
    cfg.layer_norm_eps = j.value("layer_norm_eps", 1e-5);
    cfg.validate();
    return cfg;
}

}  // namespace

std::string model_config_to_json(const ModelConfig& cfg) { return config_json(cfg).dump(); }

ModelConfig model_config_from_json(const std::string& text) {
    return config_from(nlohmann::json::parse(text));
}

void save_checkpoint(const Forecaster& model, const std::string& path) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["model"] = config_json(model.config());
    nlohmann::json params = nlohmann::json::object();
    for (const Param& p : model.parameters()) {
        nlohmann::json e;
        e["shape"] = {p.value.rows, p.value.cols};
        e["data"] = p.value.data;
        params[p.name] = std::move(e);
    }
    j["params"] = std::move(params);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("checkpoint: cannot write " + path);
    out << j.dump();
    if (!out) throw std::runtime_error("checkpoint: write failed for " + path);
}

std::unique_ptr<Forecaster> load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
    nlohmann::json j;
    in >> j;
    if (j.value("schema_version", 0) != 1)
        throw std::runtime_error("checkpoint: unsupported schema version");
    auto model = make_forecaster(config_from(j.at("model")));
    const auto& params = j.at("params");
    for (Param& p : model->parameters()) {
        if (!params.contains(p.name))
            throw std::runtime_error("checkpoint: missing parameter '" + p.name + "'");
        const auto& e = params.at(p.name);
        const auto shape = e.at("shape").get<std::vector<std::size_t>>();
        if (shape.size() != 2 || shape[0] != p.value.rows || shape[1] != p.value.cols)
            throw std::runtime_error("checkpoint: shape mismatch for '" + p.name + "'");
        p.value.data = e.at("data").get<std::vector<double>>();
        if (p.value.data.size() != p.value.rows * p.value.cols)
            throw std::runtime_error("checkpoint: data size mismatch for '" + p.name + "'");
    }
    return model;
}

}  // namespace qts::models
