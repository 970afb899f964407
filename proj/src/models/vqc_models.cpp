#include <numbers>

#include "internal.hpp"
#include "qts/diff/ops.hpp"
#include "qts/models/observables.hpp"

namespace qts::models {

namespace {

constexpr double kPi = std::numbers::pi;

using diff::QuantumNode;
using diff::Tape;
using diff::Tensor;
using diff::VarId;
using qsim::GateKind;
using qsim::ParamCircuit;
using qsim::PauliString;
using qsim::SlotKind;

VarId select_output(Tape& t, VarId full, const ModelConfig& cfg) {
    if (cfg.target_channel < 0) return full;
    return diff::col(t, full, static_cast<std::size_t>(cfg.target_channel));
}

std::vector<PauliString> z_on_all(int n) {
    std::vector<PauliString> obs;
    for (int q = 0; q < n; ++q) obs.push_back(PauliString::z(q));
    return obs;
}

class LinearModel final : public Forecaster {
  public:
    explicit LinearModel(ModelConfig cfg) : Forecaster(std::move(cfg)) {
        const auto in = static_cast<std::size_t>(cfg_.lookback * cfg_.channels);
        const auto out = static_cast<std::size_t>(cfg_.horizon * cfg_.output_channels());
        add_param("linear.W", out, in, Param::Init::UniformFanIn, in);
        add_param("linear.b", 1, out, Param::Init::UniformFanIn, in);
    }

    BuiltGraph build(Tape& t, const Tensor& window, bool train) const override {
        check_window(window);
        BuiltGraph g;
        g.params = leaf_params(t, train);
        const VarId x = diff::reshape(t, t.leaf(window), 1, window.size());
        const VarId y = diff::affine(t, x, g.params[0], g.params[1]);
        g.prediction = diff::reshape(t, y, static_cast<std::size_t>(cfg_.horizon),
                                     static_cast<std::size_t>(cfg_.output_channels()));
        if (!train) g.params.clear();
        return g;
    }
};

// One circuit per channel: R_y(pi x_t) encodings on T qubits, then the ring
// ansatz; readout is <Z> on qubit 0 rescaled to [0, 1].
class IndepVqcModel final : public Forecaster {
  public:
    explicit IndepVqcModel(ModelConfig cfg) : Forecaster(std::move(cfg)) {
        ParamCircuit c;
        c.n_qubits = cfg_.lookback;
        for (int q = 0; q < c.n_qubits; ++q)
            c.add_rotation(GateKind::RY, q, SlotKind::Encoding);
        qsim::append_ring_layers(c, cfg_.depth, SlotKind::Trainable);
        auto node = QuantumNode::sequential(c, {PauliString::z(0)});
        node.grad_method = cfg_.grad_method;
        node_ = std::make_shared<const QuantumNode>(std::move(node));
        for (int ch = 0; ch < cfg_.channels; ++ch)
            add_param("channel" + std::to_string(ch) + ".theta", 1,
                      static_cast<std::size_t>(node_->n_params()), Param::Init::Angles);
    }

    BuiltGraph build(Tape& t, const Tensor& window, bool train) const override {
        check_window(window);
        BuiltGraph g;
        g.params = leaf_params(t, train);
        const VarId w = t.leaf(window);
        std::vector<VarId> outs;
        for (int ch = 0; ch < cfg_.channels; ++ch) {
            const VarId x =
                diff::transpose(t, diff::col(t, w, static_cast<std::size_t>(ch)));
            const VarId angles = diff::scale_shift(t, x, kPi);
            const VarId z =
                diff::quantum(t, node_, angles, g.params[static_cast<std::size_t>(ch)]);
            outs.push_back(diff::scale_shift(t, z, 0.5, 0.5));
        }
        const VarId full = diff::hstack(t, outs);  // 1 x C == S x C for S = 1
        g.prediction = select_output(t, full, cfg_);
        if (!train) g.params.clear();
        return g;
    }

  private:
    std::shared_ptr<const QuantumNode> node_;
};

// Independent circuits feeding a two-layer perceptron across channels.
class VqcMlpModel final : public Forecaster {
  public:
    explicit VqcMlpModel(ModelConfig cfg) : Forecaster(std::move(cfg)) {
        ParamCircuit c;
        c.n_qubits = cfg_.lookback;
        for (int q = 0; q < c.n_qubits; ++q)
            c.add_rotation(GateKind::RY, q, SlotKind::Encoding);
        qsim::append_ring_layers(c, cfg_.depth, SlotKind::Trainable);
        auto node = QuantumNode::sequential(c, {PauliString::z(0)});
        node.grad_method = cfg_.grad_method;
        node_ = std::make_shared<const QuantumNode>(std::move(node));

        const auto C = static_cast<std::size_t>(cfg_.channels);
        const auto S = static_cast<std::size_t>(cfg_.horizon);
        const std::size_t hidden = 2 * C * S;
        for (int ch = 0; ch < cfg_.channels; ++ch)
            add_param("channel" + std::to_string(ch) + ".theta", 1,
                      static_cast<std::size_t>(node_->n_params()), Param::Init::Angles);
        add_param("mlp.W1", hidden, C, Param::Init::UniformFanIn, C);
        add_param("mlp.b1", 1, hidden, Param::Init::UniformFanIn, C);
        add_param("mlp.W2", C * S, hidden, Param::Init::UniformFanIn, hidden);
        add_param("mlp.b2", 1, C * S, Param::Init::UniformFanIn, hidden);
    }

    BuiltGraph build(Tape& t, const Tensor& window, bool train) const override {
        check_window(window);
        BuiltGraph g;
        g.params = leaf_params(t, train);
        const VarId w = t.leaf(window);
        std::vector<VarId> zs;
        for (int ch = 0; ch < cfg_.channels; ++ch) {
            const VarId x =
                diff::transpose(t, diff::col(t, w, static_cast<std::size_t>(ch)));
            const VarId angles = diff::scale_shift(t, x, kPi);
            zs.push_back(
                diff::quantum(t, node_, angles, g.params[static_cast<std::size_t>(ch)]));
        }
        const VarId z = diff::hstack(t, zs);
        const std::size_t C = static_cast<std::size_t>(cfg_.channels);
        const VarId h = diff::relu(t, diff::affine(t, z, g.params[C], g.params[C + 1]));
        const VarId o = diff::affine(t, h, g.params[C + 2], g.params[C + 3]);
        const VarId full = diff::reshape(t, o, static_cast<std::size_t>(cfg_.horizon), C);
        g.prediction = select_output(t, full, cfg_);
        if (!train) g.params.clear();
        return g;
    }

  private:
    std::shared_ptr<const QuantumNode> node_;
};

// Three channels per qubit via R_z, R_y, R_z on |+>; readout either the
// {X, Y, Z} expectations of qubit 0 or <Z> on the first three qubits.
class DenseEmbedModel final : public Forecaster {
  public:
    explicit DenseEmbedModel(ModelConfig cfg) : Forecaster(std::move(cfg)) {
        ParamCircuit c;
        c.n_qubits = cfg_.lookback;
        for (int q = 0; q < c.n_qubits; ++q) {
            c.add_rotation(GateKind::RZ, q, SlotKind::Encoding);
            c.add_rotation(GateKind::RY, q, SlotKind::Encoding);
            c.add_rotation(GateKind::RZ, q, SlotKind::Encoding);
        }
        qsim::append_ring_layers(c, cfg_.depth, SlotKind::Trainable);
        std::vector<PauliString> obs;
        if (cfg_.kind == ModelKind::DenseEmbedObs) {
            obs = {PauliString::x(0), PauliString::y(0), PauliString::z(0)};
        } else {
            obs = {PauliString::z(0), PauliString::z(1), PauliString::z(2)};
        }
        auto node = QuantumNode::sequential(c, obs, qsim::Basis::AllPlus);
        node.grad_method = cfg_.grad_method;
        node_ = std::make_shared<const QuantumNode>(std::move(node));
        add_param("theta", 1, static_cast<std::size_t>(node_->n_params()), Param::Init::Angles);
    }

    BuiltGraph build(Tape& t, const Tensor& window, bool train) const override {
        check_window(window);
        BuiltGraph g;
        g.params = leaf_params(t, train);
        const VarId x = diff::reshape(t, t.leaf(window), 1, window.size());
        const VarId angles = diff::scale_shift(t, x, kPi);
        const VarId z = diff::quantum(t, node_, angles, g.params[0]);
        const VarId full = diff::scale_shift(t, z, 0.5, 0.5);
        g.prediction = select_output(t, full, cfg_);
        if (!train) g.params.clear();
        return g;
    }

  private:
    std::shared_ptr<const QuantumNode> node_;
};

// Classical encoder -> n-qubit circuit -> classical decoder. Encoder outputs
// feed R_y angles directly; rotations are periodic, so the encoder owns the
// scale.
class EncVqcDecModel final : public Forecaster {
  public:
    explicit EncVqcDecModel(ModelConfig cfg) : Forecaster(std::move(cfg)) {
        const auto n = static_cast<std::size_t>(cfg_.n_qubits);
        const auto in = static_cast<std::size_t>(cfg_.lookback * cfg_.channels);
        const auto C = static_cast<std::size_t>(cfg_.channels);
        const auto S = static_cast<std::size_t>(cfg_.horizon);
        const std::size_t hidden = 2 * C * S;

        ParamCircuit c;
        c.n_qubits = cfg_.n_qubits;
        for (int q = 0; q < c.n_qubits; ++q)
            c.add_rotation(GateKind::RY, q, SlotKind::Encoding);
        qsim::append_ring_layers(c, cfg_.depth, SlotKind::Trainable);
        auto node = QuantumNode::sequential(c, z_on_all(cfg_.n_qubits));
        node.grad_method = cfg_.grad_method;
        node_ = std::make_shared<const QuantumNode>(std::move(node));

        add_param("encoder.W1", 2 * n, in, Param::Init::UniformFanIn, in);
        add_param("encoder.b1", 1, 2 * n, Param::Init::UniformFanIn, in);
        add_param("encoder.W2", n, 2 * n, Param::Init::UniformFanIn, 2 * n);
        add_param("encoder.b2", 1, n, Param::Init::UniformFanIn, 2 * n);
        add_param("theta", 1, static_cast<std::size_t>(node_->n_params()), Param::Init::Angles);
        add_param("decoder.W1", hidden, n, Param::Init::UniformFanIn, n);
        add_param("decoder.b1", 1, hidden, Param::Init::UniformFanIn, n);
        add_param("decoder.W2", C * S, hidden, Param::Init::UniformFanIn, hidden);
        add_param("decoder.b2", 1, C * S, Param::Init::UniformFanIn, hidden);
    }

    BuiltGraph build(Tape& t, const Tensor& window, bool train) const override {
        check_window(window);
        BuiltGraph g;
        g.params = leaf_params(t, train);
        const VarId x = diff::reshape(t, t.leaf(window), 1, window.size());
        const VarId h = diff::relu(t, diff::affine(t, x, g.params[0], g.params[1]));
        const VarId e = diff::affine(t, h, g.params[2], g.params[3]);
        const VarId z = diff::quantum(t, node_, e, g.params[4]);
        const VarId d = diff::relu(t, diff::affine(t, z, g.params[5], g.params[6]));
        const VarId o = diff::affine(t, d, g.params[7], g.params[8]);
        const VarId full = diff::reshape(t, o, static_cast<std::size_t>(cfg_.horizon),
                                         static_cast<std::size_t>(cfg_.channels));
        g.prediction = select_output(t, full, cfg_);
        if (!train) g.params.clear();
        return g;
    }

  private:
    std::shared_ptr<const QuantumNode> node_;
};

// Alternating encoding and one-layer variational blocks, one pair per time
// step, on C qubits.
class ReuploadModel final : public Forecaster {
  public:
    explicit ReuploadModel(ModelConfig cfg) : Forecaster(std::move(cfg)) {
        ParamCircuit c;
        c.n_qubits = cfg_.channels;
        for (int step = 0; step < cfg_.lookback; ++step) {
            for (int q = 0; q < c.n_qubits; ++q)
                c.add_rotation(GateKind::RY, q, SlotKind::Encoding);
            qsim::append_ring_layers(c, cfg_.depth, SlotKind::Trainable);
        }
        auto node = QuantumNode::sequential(c, z_on_all(cfg_.channels));
        node.grad_method = cfg_.grad_method;
        node_ = std::make_shared<const QuantumNode>(std::move(node));
        add_param("theta", 1, static_cast<std::size_t>(node_->n_params()), Param::Init::Angles);
    }

    BuiltGraph build(Tape& t, const Tensor& window, bool train) const override {
        check_window(window);
        BuiltGraph g;
        g.params = leaf_params(t, train);
        const VarId x = diff::reshape(t, t.leaf(window), 1, window.size());
        const VarId angles = diff::scale_shift(t, x, kPi);
        const VarId z = diff::quantum(t, node_, angles, g.params[0]);
        const VarId full = diff::scale_shift(t, z, 0.5, 0.5);
        g.prediction = select_output(t, full, cfg_);
        if (!train) g.params.clear();
        return g;
    }

  private:
    std::shared_ptr<const QuantumNode> node_;
};

}  // namespace

namespace detail {

std::unique_ptr<Forecaster> make_linear(ModelConfig cfg) {
    return std::make_unique<LinearModel>(std::move(cfg));
}
std::unique_ptr<Forecaster> make_indep_vqc(ModelConfig cfg) {
    return std::make_unique<IndepVqcModel>(std::move(cfg));
}
std::unique_ptr<Forecaster> make_vqc_mlp(ModelConfig cfg) {
    return std::make_unique<VqcMlpModel>(std::move(cfg));
}
std::unique_ptr<Forecaster> make_dense_embed(ModelConfig cfg) {
    return std::make_unique<DenseEmbedModel>(std::move(cfg));
}
std::unique_ptr<Forecaster> make_enc_vqc_dec(ModelConfig cfg) {
    return std::make_unique<EncVqcDecModel>(std::move(cfg));
}
std::unique_ptr<Forecaster> make_reupload(ModelConfig cfg) {
    return std::make_unique<ReuploadModel>(std::move(cfg));
}

}  // namespace detail

std::unique_ptr<Forecaster> make_forecaster(const ModelConfig& cfg) {
    cfg.validate();
    switch (cfg.kind) {
        case ModelKind::Linear: return detail::make_linear(cfg);
        case ModelKind::IndepVqc: return detail::make_indep_vqc(cfg);
        case ModelKind::VqcMlp: return detail::make_vqc_mlp(cfg);
        case ModelKind::DenseEmbedObs:
        case ModelKind::DenseEmbedQubits: return detail::make_dense_embed(cfg);
        case ModelKind::EncVqcDec: return detail::make_enc_vqc_dec(cfg);
        case ModelKind::Reupload: return detail::make_reupload(cfg);
        case ModelKind::ITransformer: return detail::make_itransformer(cfg);
        case ModelKind::IQTransformer: return detail::make_iqtransformer(cfg);
    }
    throw std::invalid_argument("make_forecaster: unknown kind");
}

}  // namespace qts::models
