#include "qts/models/config.hpp"

#include <stdexcept>

namespace qts::models {

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::IndepVqc: return "indep_vqc";
        case ModelKind::VqcMlp: return "vqc_mlp";
        case ModelKind::DenseEmbedObs: return "dense_embed_obs";
        case ModelKind::DenseEmbedQubits: return "dense_embed_qubits";
        case ModelKind::EncVqcDec: return "enc_vqc_dec";
        case ModelKind::Reupload: return "reupload";
        case ModelKind::ITransformer: return "itransformer";
        case ModelKind::IQTransformer: return "iqtransformer";
        case ModelKind::Linear: return "linear";
    }
    return "?";
}

ModelKind model_kind_from_string(const std::string& name) {
    for (ModelKind k :
         {ModelKind::IndepVqc, ModelKind::VqcMlp, ModelKind::DenseEmbedObs,
          ModelKind::DenseEmbedQubits, ModelKind::EncVqcDec, ModelKind::Reupload,
          ModelKind::ITransformer, ModelKind::IQTransformer, ModelKind::Linear}) {
        if (to_string(k) == name) return k;
    }
    throw std::invalid_argument("unknown model kind '" + name + "'");
}

std::string grad_method_name(diff::GradMethod m) {
    return m == diff::GradMethod::Adjoint ? "adjoint" : "parameter_shift";
}

diff::GradMethod grad_method_from_string(const std::string& name) {
    if (name == "adjoint") return diff::GradMethod::Adjoint;
    if (name == "parameter_shift") return diff::GradMethod::ParamShift;
    throw std::invalid_argument("unknown gradient method '" + name + "'");
}

void ModelConfig::validate() const {
    if (lookback < 1) throw std::invalid_argument("model: lookback must be >= 1");
    if (horizon < 1) throw std::invalid_argument("model: horizon must be >= 1");
    if (channels < 1) throw std::invalid_argument("model: channels must be >= 1");
    if (target_channel < -1 || target_channel >= channels)
        throw std::invalid_argument("model: target channel out of range");
    if (layer_norm_eps <= 0.0) throw std::invalid_argument("model: layer_norm_eps must be > 0");

    const bool single_step = kind == ModelKind::IndepVqc || kind == ModelKind::DenseEmbedObs ||
                             kind == ModelKind::DenseEmbedQubits || kind == ModelKind::Reupload;
    if (single_step && horizon != 1)
        throw std::invalid_argument("model: " + to_string(kind) + " supports horizon 1 only");

    switch (kind) {
        case ModelKind::IndepVqc:
        case ModelKind::VqcMlp:
            if (lookback < 2)
                throw std::invalid_argument("model: per-channel circuits need lookback >= 2");
            if (depth < 1) throw std::invalid_argument("model: depth must be >= 1");
            break;
        case ModelKind::DenseEmbedObs:
        case ModelKind::DenseEmbedQubits:
            if (channels != 3)
                throw std::invalid_argument("model: dense embedding is defined for 3 channels");
            if (lookback < 2)
                throw std::invalid_argument("model: dense embedding needs lookback >= 2");
            if (kind == ModelKind::DenseEmbedQubits && lookback < 3)
                throw std::invalid_argument(
                    "model: per-qubit readout needs lookback >= 3 qubits");
            if (depth < 1) throw std::invalid_argument("model: depth must be >= 1");
            break;
        case ModelKind::EncVqcDec:
            if (n_qubits < 2) throw std::invalid_argument("model: n_qubits must be >= 2");
            if (depth < 1) throw std::invalid_argument("model: depth must be >= 1");
            break;
        case ModelKind::Reupload:
            if (channels < 2)
                throw std::invalid_argument("model: re-uploading needs >= 2 channels");
            break;
        case ModelKind::ITransformer:
        case ModelKind::IQTransformer:
            if (blocks < 0) throw std::invalid_argument("model: blocks must be >= 0");
            if (embed_dim < 1 || ffn_dim < 1)
                throw std::invalid_argument("model: embedding dimensions must be >= 1");
            if (kind == ModelKind::IQTransformer) {
                if (n_qubits < 2) throw std::invalid_argument("model: n_qubits must be >= 2");
                if (p_enc < 1 || p_vqc < 1)
                    throw std::invalid_argument("model: circuit depths must be >= 1");
                if (embed_dim != n_qubits * (p_enc + 2))
                    throw std::invalid_argument(
                        "model: embed_dim must equal n_qubits * (p_enc + 2)");
            }
            break;
        case ModelKind::Linear: break;
    }
}

}  // namespace qts::models
