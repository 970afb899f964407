#include <cmath>

#include "internal.hpp"
#include "qts/diff/ops.hpp"
#include "qts/models/observables.hpp"
#include "qts/qsim/ansatz.hpp"

namespace qts::models {

namespace {

using diff::QuantumNode;
using diff::Tape;
using diff::Tensor;
using diff::VarId;
using qsim::ParamCircuit;
using qsim::PauliString;
using qsim::SlotKind;

// Inverted-tokenization pipeline shared by the classical and quantum
// variants: per-variate normalization over the lookback axis, a linear
// tokenizer T -> D, L pre-norm blocks, a linear projector D -> S, and the
// inverse normalization restoring each variate's location and scale.
class InvertedTransformerBase : public Forecaster {
  public:
    explicit InvertedTransformerBase(ModelConfig cfg) : Forecaster(std::move(cfg)) {
        const auto C = static_cast<std::size_t>(cfg_.channels);
        const auto T = static_cast<std::size_t>(cfg_.lookback);
        const auto D = static_cast<std::size_t>(cfg_.embed_dim);
        add_param("revin.gain", 1, C, Param::Init::Ones);
        add_param("revin.offset", 1, C, Param::Init::Zeros);
        add_param("tokenizer.W", D, T, Param::Init::UniformFanIn, T);
        add_param("tokenizer.b", 1, D, Param::Init::UniformFanIn, T);
    }

    BuiltGraph build(Tape& t, const Tensor& window, bool train) const override {
        check_window(window);
        BuiltGraph g;
        g.params = leaf_params(t, train);

        const auto stats = diff::window_stats(window, cfg_.layer_norm_eps);
        Tensor normed(window.rows, window.cols);
        for (std::size_t c = 0; c < window.cols; ++c)
            for (std::size_t r = 0; r < window.rows; ++r)
                normed.at(r, c) = (window.at(r, c) - stats.mu[c]) / stats.sigma[c];

        const VarId xn = diff::rows_scale_shift(t, t.leaf(normed), g.params[0], g.params[1]);
        VarId h = diff::affine(t, diff::transpose(t, xn), g.params[2], g.params[3]);  // C x D

        for (int l = 0; l < cfg_.blocks; ++l) h = block(t, h, g.params, l);

        const std::size_t pbase = 4 + static_cast<std::size_t>(cfg_.blocks) * block_params();
        const VarId proj = diff::affine(t, h, g.params[pbase], g.params[pbase + 1]);  // C x S

        VarId yn;  // S x C or S x 1
        std::vector<std::size_t> channel_map;
        if (cfg_.target_channel >= 0) {
            yn = diff::transpose(t,
                                 diff::row(t, proj, static_cast<std::size_t>(cfg_.target_channel)));
            channel_map = {static_cast<std::size_t>(cfg_.target_channel)};
        } else {
            yn = diff::transpose(t, proj);
            for (std::size_t c = 0; c < window.cols; ++c) channel_map.push_back(c);
        }
        g.prediction = diff::window_denorm(t, yn, g.params[0], g.params[1], stats, channel_map);
        if (!train) g.params.clear();
        return g;
    }

  protected:
    void add_projector() {
        const auto D = static_cast<std::size_t>(cfg_.embed_dim);
        const auto S = static_cast<std::size_t>(cfg_.horizon);
        add_param("projector.W", S, D, Param::Init::UniformFanIn, D);
        add_param("projector.b", 1, S, Param::Init::UniformFanIn, D);
    }

    void add_block_norms_and_ffn(int l) {
        const auto D = static_cast<std::size_t>(cfg_.embed_dim);
        const auto F = static_cast<std::size_t>(cfg_.ffn_dim);
        const std::string b = "block" + std::to_string(l);
        add_param(b + ".ln2.gain", 1, D, Param::Init::Ones);
        add_param(b + ".ln2.offset", 1, D, Param::Init::Zeros);
        add_param(b + ".ffn.W1", F, D, Param::Init::UniformFanIn, D);
        add_param(b + ".ffn.b1", 1, F, Param::Init::UniformFanIn, D);
        add_param(b + ".ffn.W2", D, F, Param::Init::UniformFanIn, F);
        add_param(b + ".ffn.b2", 1, D, Param::Init::UniformFanIn, F);
    }

    /// H~ = H + Attn(LN'(H)); H <- H~ + FFN(LN'(H~)). `attn` consumes the
    /// normalized tokens; `abase` points at the block's first parameter.
    template <typename AttnFn>
    VarId block_common(Tape& t, VarId h, const std::vector<VarId>& p, std::size_t abase,
                       std::size_t ffn_base, const AttnFn& attn) const {
        const VarId ln1 = diff::rows_scale_shift(t, diff::layer_norm(t, h, cfg_.layer_norm_eps),
                                                 p[abase], p[abase + 1]);
        const VarId h1 = diff::add(t, h, attn(ln1));
        const VarId ln2 = diff::rows_scale_shift(t, diff::layer_norm(t, h1, cfg_.layer_norm_eps),
                                                 p[ffn_base], p[ffn_base + 1]);
        const VarId ff = diff::affine(
            t, diff::relu(t, diff::affine(t, ln2, p[ffn_base + 2], p[ffn_base + 3])),
            p[ffn_base + 4], p[ffn_base + 5]);
        return diff::add(t, h1, ff);
    }

    virtual VarId block(Tape& t, VarId h, const std::vector<VarId>& params, int l) const = 0;
    virtual std::size_t block_params() const = 0;
};

// Single-head scaled dot-product attention across variate tokens with an
// output projection, matching the inverted-transformer reference block.
class ITransformerModel final : public InvertedTransformerBase {
  public:
    explicit ITransformerModel(ModelConfig cfg) : InvertedTransformerBase(std::move(cfg)) {
        const auto D = static_cast<std::size_t>(cfg_.embed_dim);
        for (int l = 0; l < cfg_.blocks; ++l) {
            const std::string b = "block" + std::to_string(l);
            add_param(b + ".ln1.gain", 1, D, Param::Init::Ones);
            add_param(b + ".ln1.offset", 1, D, Param::Init::Zeros);
            for (const char* w : {"Wq", "bq", "Wk", "bk", "Wv", "bv", "Wo", "bo"}) {
                const bool is_bias = w[0] == 'b';
                add_param(b + ".attn." + w, is_bias ? 1 : D, D, Param::Init::UniformFanIn, D);
            }
            add_block_norms_and_ffn(l);
        }
        add_projector();
    }

  private:
    std::size_t block_params() const override { return 16; }

    VarId block(Tape& t, VarId h, const std::vector<VarId>& p, int l) const override {
        const std::size_t base = 4 + static_cast<std::size_t>(l) * block_params();
        return block_common(t, h, p, base, base + 10, [&](VarId ln) {
            const VarId q = diff::affine(t, ln, p[base + 2], p[base + 3]);
            const VarId k = diff::affine(t, ln, p[base + 4], p[base + 5]);
            const VarId v = diff::affine(t, ln, p[base + 6], p[base + 7]);
            const VarId scores = diff::scale_shift(
                t, diff::matmul(t, q, diff::transpose(t, k)),
                1.0 / std::sqrt(static_cast<double>(cfg_.embed_dim)));
            const VarId attn = diff::matmul(t, diff::softmax(t, scores), v);
            return diff::affine(t, attn, p[base + 8], p[base + 9]);
        });
    }
};

// Attention replaced by the quantum self-attention layer: tokens encode into
// n-qubit states, queries/keys read <Z_0> under their circuits, values read
// a D-dimensional Pauli set, and Gaussian-projected coefficients mix values.
class IQTransformerModel final : public InvertedTransformerBase {
  public:
    explicit IQTransformerModel(ModelConfig cfg) : InvertedTransformerBase(std::move(cfg)) {
        const int n = cfg_.n_qubits;
        const auto theta_len = static_cast<std::size_t>(n * (cfg_.p_vqc + 2));
        for (int l = 0; l < cfg_.blocks; ++l) {
            const std::string b = "block" + std::to_string(l);
            add_param(b + ".ln1.gain", 1, static_cast<std::size_t>(cfg_.embed_dim),
                      Param::Init::Ones);
            add_param(b + ".ln1.offset", 1, static_cast<std::size_t>(cfg_.embed_dim),
                      Param::Init::Zeros);
            add_param(b + ".qsal.theta_q", 1, theta_len, Param::Init::Angles);
            add_param(b + ".qsal.theta_k", 1, theta_len, Param::Init::Angles);
            add_param(b + ".qsal.theta_v", 1, theta_len, Param::Init::Angles);
            add_block_norms_and_ffn(l);
        }
        add_projector();

        // Shared circuit shape: Hadamards, the encoding ladder bound to the
        // token, then the variational ladder.
        ParamCircuit c;
        c.n_qubits = n;
        for (int q = 0; q < n; ++q) c.add_h(q);
        qsim::append_qsann_layers(c, cfg_.p_enc, SlotKind::Encoding);
        qsim::append_qsann_layers(c, cfg_.p_vqc, SlotKind::Trainable);

        auto scalar_node = QuantumNode::sequential(c, {PauliString::z(0)});
        scalar_node.grad_method = cfg_.grad_method;
        qk_node_ = std::make_shared<const QuantumNode>(std::move(scalar_node));

        auto value_node =
            QuantumNode::sequential(c, value_observable_set(n, cfg_.embed_dim));
        value_node.grad_method = cfg_.grad_method;
        v_node_ = std::make_shared<const QuantumNode>(std::move(value_node));
    }

  private:
    std::size_t block_params() const override { return 11; }

    VarId block(Tape& t, VarId h, const std::vector<VarId>& p, int l) const override {
        const std::size_t base = 4 + static_cast<std::size_t>(l) * block_params();
        return block_common(t, h, p, base, base + 5, [&](VarId ln) {
            std::vector<VarId> qs, ks, vs;
            for (int c = 0; c < cfg_.channels; ++c) {
                const VarId token = diff::row(t, ln, static_cast<std::size_t>(c));
                qs.push_back(diff::quantum(t, qk_node_, token, p[base + 2]));
                ks.push_back(diff::quantum(t, qk_node_, token, p[base + 3]));
                vs.push_back(diff::quantum(t, v_node_, token, p[base + 4]));
            }
            const VarId q = diff::transpose(t, diff::hstack(t, qs));  // C x 1
            const VarId k = diff::transpose(t, diff::hstack(t, ks));
            const VarId v = diff::vstack(t, vs);  // C x D
            return diff::gaussian_attention(t, q, k, v);
        });
    }

    std::shared_ptr<const QuantumNode> qk_node_;
    std::shared_ptr<const QuantumNode> v_node_;
};

}  // namespace

namespace detail {

std::unique_ptr<Forecaster> make_itransformer(ModelConfig cfg) {
    return std::make_unique<ITransformerModel>(std::move(cfg));
}
std::unique_ptr<Forecaster> make_iqtransformer(ModelConfig cfg) {
    return std::make_unique<IQTransformerModel>(std::move(cfg));
}

}  // namespace detail

}  // namespace qts::models
