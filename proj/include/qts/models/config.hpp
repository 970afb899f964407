#pragma once

#include <string>

#include "qts/diff/quantum_node.hpp"

namespace qts::models {

enum class ModelKind {
    IndepVqc,
    VqcMlp,
    DenseEmbedObs,
    DenseEmbedQubits,
    EncVqcDec,
    Reupload,
    ITransformer,
    IQTransformer,
    Linear,  // affine baseline used by optimizer sanity checks
};

struct ModelConfig {
    ModelKind kind = ModelKind::Linear;
    int lookback = 5;        // T
    int horizon = 1;         // S
    int channels = 3;        // C
    int target_channel = -1; // -1 forecasts every channel

    // Ring-ansatz family.
    int depth = 24;   // variational layers p
    int n_qubits = 8; // encoder-decoder circuit width (also QSAL width)

    // Transformer family.
    int blocks = 2;    // L
    int embed_dim = 9; // D
    int ffn_dim = 12;  // D_ff
    int p_enc = 1;
    int p_vqc = 3;

    diff::GradMethod grad_method = diff::GradMethod::ParamShift;
    double layer_norm_eps = 1e-5;

    /// Throws std::invalid_argument on any violated constraint, including the
    /// embed_dim == n_qubits * (p_enc + 2) consistency rule.
    void validate() const;

    int output_channels() const { return target_channel >= 0 ? 1 : channels; }
};

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

std::string grad_method_name(diff::GradMethod m);
diff::GradMethod grad_method_from_string(const std::string& name);

}  // namespace qts::models
