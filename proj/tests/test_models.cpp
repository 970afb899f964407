#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <random>

#include "doctest.h"
#include "qts/models/checkpoint.hpp"
#include "qts/models/forecaster.hpp"
#include "qts/models/observables.hpp"
#include "qts/train/metrics.hpp"
#include "support/dense_oracle.hpp"
#include "support/fd.hpp"

using namespace qts;
using diff::Tensor;
using models::ModelConfig;
using models::ModelKind;

namespace {

constexpr double kPi = std::numbers::pi;

Tensor random_window(std::mt19937_64& rng, int T, int C, double lo = 0.0, double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    Tensor w(static_cast<std::size_t>(T), static_cast<std::size_t>(C));
    for (double& v : w.data) v = dist(rng);
    return w;
}

void zero_params_matching(models::Forecaster& m, const std::string& needle) {
    for (models::Param& p : m.parameters())
        if (p.name.find(needle) != std::string::npos)
            for (double& v : p.value.data) v = 0.0;
}

ModelConfig lorenz_st(ModelKind kind) {
    ModelConfig c;
    c.kind = kind;
    c.lookback = 5;
    c.horizon = 1;
    c.channels = 3;
    c.depth = 24;
    c.n_qubits = kind == ModelKind::IQTransformer ? 3 : 8;
    c.blocks = 2;
    c.embed_dim = 9;
    c.ffn_dim = 12;
    c.p_enc = 1;
    c.p_vqc = 3;
    return c;
}

}  // namespace

TEST_CASE("config validation") {
    ModelConfig iqt = lorenz_st(ModelKind::IQTransformer);
    CHECK_NOTHROW(iqt.validate());
    iqt.embed_dim = 10;  // != n (p_enc + 2)
    CHECK_THROWS_AS(iqt.validate(), std::invalid_argument);

    ModelConfig ru = lorenz_st(ModelKind::Reupload);
    ru.horizon = 2;
    CHECK_THROWS_AS(ru.validate(), std::invalid_argument);

    ModelConfig de = lorenz_st(ModelKind::DenseEmbedObs);
    de.channels = 4;
    CHECK_THROWS_AS(de.validate(), std::invalid_argument);

    CHECK_THROWS_AS(models::model_kind_from_string("qgru"), std::invalid_argument);
}

TEST_CASE("value observable sets") {
    const auto local = models::value_observable_set(3, 9);
    REQUIRE(local.size() == 9);
    CHECK(local[0].to_string() == "X0");
    CHECK(local[1].to_string() == "Y0");
    CHECK(local[2].to_string() == "Z0");
    CHECK(local[8].to_string() == "Z2");

    const auto iter = models::value_observable_set(4, 16);
    REQUIRE(iter.size() == 16);
    CHECK(iter[12].to_string() == "Z0Z1");
    CHECK(iter[13].to_string() == "Z1Z2");
    CHECK(iter[14].to_string() == "Z2Z3");
    CHECK(iter[15].to_string() == "Z0Z3");  // ring pair, stored ascending

    CHECK(models::value_observable_set(2, 6).size() == 6);
    CHECK_THROWS_AS(models::value_observable_set(2, 9), std::invalid_argument);
    CHECK_THROWS_AS(models::value_observable_set(3, 8), std::invalid_argument);
}

TEST_CASE("independent per-channel circuits") {
    ModelConfig cfg = lorenz_st(ModelKind::IndepVqc);
    cfg.depth = 2;
    auto m = models::make_forecaster(cfg);
    for (models::Param& p : m->parameters())
        for (double& v : p.value.data) v = 0.0;

    const Tensor zeros(5, 3, 0.0);
    const Tensor y0 = m->predict(zeros);
    REQUIRE(y0.rows == 1);
    REQUIRE(y0.cols == 3);
    for (double v : y0.data) CHECK(v == doctest::Approx(1.0));

    // All-ones window: R_y(pi) flips every qubit. With an even qubit count
    // and a single layer the CNOT ring leaves qubit 0 set, so <Z_0> = -1.
    ModelConfig even = cfg;
    even.lookback = 2;
    even.depth = 1;
    auto m2 = models::make_forecaster(even);
    for (models::Param& p : m2->parameters())
        for (double& v : p.value.data) v = 0.0;
    const Tensor y1 = m2->predict(Tensor(2, 3, 1.0));
    for (double v : y1.data) CHECK(v == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("independent circuits match the dense oracle per channel") {
    ModelConfig cfg;
    cfg.kind = ModelKind::IndepVqc;
    cfg.lookback = 3;
    cfg.channels = 2;
    cfg.horizon = 1;
    cfg.depth = 1;
    auto m = models::make_forecaster(cfg);
    std::mt19937_64 rng(42);
    m->init_params(7);
    const Tensor w = random_window(rng, 3, 2);

    const Tensor pred = m->predict(w);
    for (int ch = 0; ch < 2; ++ch) {
        // Reconstruct the per-channel circuit: R_y(pi x_t) rows then one ring
        // layer, measured on qubit 0.
        qsim::ParamCircuit c;
        c.n_qubits = 3;
        for (int q = 0; q < 3; ++q) c.add_rotation(qsim::GateKind::RY, q, qsim::SlotKind::Encoding);
        qsim::append_ring_layers(c, 1, qsim::SlotKind::Trainable);
        std::vector<double> bind;
        for (int t = 0; t < 3; ++t)
            bind.push_back(kPi * w.at(static_cast<std::size_t>(t), static_cast<std::size_t>(ch)));
        const Tensor& theta = m->parameters()[static_cast<std::size_t>(ch)].value;
        for (double v : theta.data) bind.push_back(v);
        const auto state =
            testing::oracle_run(c, bind, testing::oracle_initial(3, qsim::Basis::AllZero));
        const double z = testing::oracle_expectation(3, state, qsim::PauliString::z(0));
        CHECK(pred.data[static_cast<std::size_t>(ch)] ==
              doctest::Approx((z + 1.0) / 2.0).epsilon(1e-10));
    }
}

TEST_CASE("permuting channels and their circuits permutes the output") {
    ModelConfig cfg;
    cfg.kind = ModelKind::IndepVqc;
    cfg.lookback = 3;
    cfg.channels = 3;
    cfg.horizon = 1;
    cfg.depth = 1;
    auto m = models::make_forecaster(cfg);
    m->init_params(11);
    std::mt19937_64 rng(5);
    const Tensor w = random_window(rng, 3, 3);
    const Tensor base = m->predict(w);

    // Swap channels 0 and 2 in both the window and the per-channel circuits.
    auto m2 = models::make_forecaster(cfg);
    m2->init_params(11);
    std::swap(m2->parameter("channel0.theta").value, m2->parameter("channel2.theta").value);
    Tensor w2 = w;
    for (std::size_t t = 0; t < 3; ++t) std::swap(w2.at(t, 0), w2.at(t, 2));
    const Tensor swapped = m2->predict(w2);
    CHECK(swapped.data[0] == doctest::Approx(base.data[2]));
    CHECK(swapped.data[1] == doctest::Approx(base.data[1]));
    CHECK(swapped.data[2] == doctest::Approx(base.data[0]));
}

TEST_CASE("vqc+mlp head") {
    ModelConfig cfg = lorenz_st(ModelKind::VqcMlp);
    cfg.horizon = 5;
    cfg.depth = 1;
    auto m = models::make_forecaster(cfg);
    m->init_params(3);
    // Hidden width 2*C*S and output S x C.
    CHECK(m->parameter("mlp.W1").value.rows == 30);
    const Tensor y = m->predict(Tensor(5, 3, 0.4));
    CHECK(y.rows == 5);
    CHECK(y.cols == 3);

    zero_params_matching(*m, "mlp.");
    const Tensor z = m->predict(Tensor(5, 3, 0.3));
    for (double v : z.data) CHECK(v == 0.0);

    // Hand-built head that recovers Z when Z >= 0: W1 = [1; 0], W2 = [1, 0].
    ModelConfig tiny;
    tiny.kind = ModelKind::VqcMlp;
    tiny.lookback = 2;
    tiny.channels = 1;
    tiny.horizon = 1;
    tiny.depth = 1;
    auto t = models::make_forecaster(tiny);
    for (models::Param& p : t->parameters())
        for (double& v : p.value.data) v = 0.0;
    t->parameter("mlp.W1").value.at(0, 0) = 1.0;
    t->parameter("mlp.W2").value.at(0, 0) = 1.0;
    const double x = 0.25;
    const Tensor out = t->predict(Tensor(2, 1, x));
    // Identity variational block: Z = <Z_0> = cos(pi x).
    CHECK(out.data[0] == doctest::Approx(std::cos(kPi * x)).epsilon(1e-10));
}

TEST_CASE("dense rotational embedding") {
    ModelConfig cfg = lorenz_st(ModelKind::DenseEmbedObs);
    cfg.depth = 1;
    auto m = models::make_forecaster(cfg);
    for (models::Param& p : m->parameters())
        for (double& v : p.value.data) v = 0.0;

    const Tensor zeros(5, 3, 0.0);
    const Tensor y = m->predict(zeros);
    REQUIRE(y.cols == 3);
    CHECK(y.data[0] == doctest::Approx(1.0));  // <X> of |+> is 1
    CHECK(y.data[1] == doctest::Approx(0.5));  // <Y> is 0
    CHECK(y.data[2] == doctest::Approx(0.5));  // <Z> is 0

    Tensor w(5, 3, 0.0);
    w.at(0, 1) = 1.0;  // R_y(pi) on qubit 0 flips <X> to -1
    const Tensor y2 = m->predict(w);
    CHECK(y2.data[0] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(y2.data[1] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(y2.data[2] == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("dense embedding matches the dense oracle") {
    ModelConfig cfg;
    cfg.kind = ModelKind::DenseEmbedQubits;
    cfg.lookback = 3;
    cfg.channels = 3;
    cfg.horizon = 1;
    cfg.depth = 1;
    auto m = models::make_forecaster(cfg);
    m->init_params(19);
    std::mt19937_64 rng(77);
    const Tensor w = random_window(rng, 3, 3);
    const Tensor pred = m->predict(w);

    qsim::ParamCircuit c;
    c.n_qubits = 3;
    for (int q = 0; q < 3; ++q) {
        c.add_rotation(qsim::GateKind::RZ, q, qsim::SlotKind::Encoding);
        c.add_rotation(qsim::GateKind::RY, q, qsim::SlotKind::Encoding);
        c.add_rotation(qsim::GateKind::RZ, q, qsim::SlotKind::Encoding);
    }
    qsim::append_ring_layers(c, 1, qsim::SlotKind::Trainable);
    std::vector<double> bind;
    for (double v : w.data) bind.push_back(kPi * v);
    for (double v : m->parameter("theta").value.data) bind.push_back(v);
    const auto state =
        testing::oracle_run(c, bind, testing::oracle_initial(3, qsim::Basis::AllPlus));
    for (int q = 0; q < 3; ++q) {
        const double z = testing::oracle_expectation(3, state, qsim::PauliString::z(q));
        CHECK(pred.data[static_cast<std::size_t>(q)] ==
              doctest::Approx((z + 1.0) / 2.0).epsilon(1e-10));
    }
}

TEST_CASE("encoder-circuit-decoder hybrid") {
    ModelConfig cfg = lorenz_st(ModelKind::EncVqcDec);
    cfg.horizon = 5;
    auto m = models::make_forecaster(cfg);
    m->init_params(1);
    CHECK(m->parameter("theta").value.size() == 576);  // 3 * 8 * 24

    zero_params_matching(*m, "decoder.");
    const Tensor y = m->predict(Tensor(5, 3, 0.5));
    CHECK(y.rows == 5);
    CHECK(y.cols == 3);
    for (double v : y.data) CHECK(v == 0.0);

    // Zero encoder + identity circuit leaves every qubit in |0>, so the
    // pass-through decoder row reads z_0 = 1.
    ModelConfig small;
    small.kind = ModelKind::EncVqcDec;
    small.lookback = 3;
    small.channels = 2;
    small.horizon = 1;
    small.n_qubits = 3;
    small.depth = 1;
    auto s = models::make_forecaster(small);
    for (models::Param& p : s->parameters())
        for (double& v : p.value.data) v = 0.0;
    s->parameter("decoder.W1").value.at(0, 0) = 1.0;
    s->parameter("decoder.W2").value.at(0, 0) = 1.0;
    const Tensor out = s->predict(Tensor(3, 2, 0.7));
    CHECK(out.data[0] == doctest::Approx(1.0));
}

TEST_CASE("re-uploading equals one concatenated circuit") {
    ModelConfig cfg;
    cfg.kind = ModelKind::Reupload;
    cfg.lookback = 2;
    cfg.channels = 2;
    cfg.horizon = 1;
    cfg.depth = 1;
    auto m = models::make_forecaster(cfg);
    m->init_params(23);
    CHECK(m->parameter("theta").value.size() == 2 * 3 * 2);  // T * 3 * C

    std::mt19937_64 rng(3);
    const Tensor w = random_window(rng, 2, 2);
    const Tensor pred = m->predict(w);

    qsim::ParamCircuit c;
    c.n_qubits = 2;
    for (int step = 0; step < 2; ++step) {
        for (int q = 0; q < 2; ++q) c.add_rotation(qsim::GateKind::RY, q, qsim::SlotKind::Encoding);
        qsim::append_ring_layers(c, 1, qsim::SlotKind::Trainable);
    }
    // Interleave bindings in slot order: enc rows then the step's layer.
    const Tensor& theta = m->parameter("theta").value;
    std::vector<double> bind;
    std::size_t next_theta = 0;
    for (int step = 0; step < 2; ++step) {
        for (int q = 0; q < 2; ++q)
            bind.push_back(kPi * w.at(static_cast<std::size_t>(step), static_cast<std::size_t>(q)));
        for (int k = 0; k < 6; ++k) bind.push_back(theta.data[next_theta++]);
    }
    const auto state =
        testing::oracle_run(c, bind, testing::oracle_initial(2, qsim::Basis::AllZero));
    for (int q = 0; q < 2; ++q) {
        const double z = testing::oracle_expectation(2, state, qsim::PauliString::z(q));
        CHECK(pred.data[static_cast<std::size_t>(q)] ==
              doctest::Approx((z + 1.0) / 2.0).epsilon(1e-10));
    }

    // A single zero step with identity parameters forecasts 1 per channel.
    ModelConfig one = cfg;
    one.lookback = 1;
    auto m1 = models::make_forecaster(one);
    for (models::Param& p : m1->parameters())
        for (double& v : p.value.data) v = 0.0;
    const Tensor y1 = m1->predict(Tensor(1, 2, 0.0));
    for (double v : y1.data) CHECK(v == doctest::Approx(1.0));
}

TEST_CASE("quantum forecasts stay in the unit interval") {
    std::mt19937_64 rng(31);
    for (ModelKind kind : {ModelKind::IndepVqc, ModelKind::DenseEmbedObs, ModelKind::Reupload}) {
        ModelConfig cfg;
        cfg.kind = kind;
        cfg.lookback = 3;
        cfg.channels = 3;
        cfg.horizon = 1;
        cfg.depth = 1;
        auto m = models::make_forecaster(cfg);
        for (int trial = 0; trial < 5; ++trial) {
            m->init_params(static_cast<std::uint64_t>(trial));
            const Tensor y = m->predict(random_window(rng, 3, 3));
            for (double v : y.data) {
                CHECK(v >= -1e-12);
                CHECK(v <= 1.0 + 1e-12);
            }
        }
    }
}

TEST_CASE("itransformer zeroed blocks reduce to the tokenizer path") {
    ModelConfig cfg = lorenz_st(ModelKind::ITransformer);
    auto m = models::make_forecaster(cfg);
    m->init_params(9);
    zero_params_matching(*m, "attn.Wo");
    zero_params_matching(*m, "attn.bo");
    zero_params_matching(*m, "ffn.W2");
    zero_params_matching(*m, "ffn.b2");

    std::mt19937_64 rng(8);
    const Tensor w = random_window(rng, 5, 3);
    const Tensor got = m->predict(w);

    // Expected: denorm(proj(tokenizer(norm(window)))) with the model's own
    // tensors, computed with plain loops.
    const auto stats = diff::window_stats(w, cfg.layer_norm_eps);
    const Tensor& tokW = m->parameter("tokenizer.W").value;
    const Tensor& tokB = m->parameter("tokenizer.b").value;
    const Tensor& prjW = m->parameter("projector.W").value;
    const Tensor& prjB = m->parameter("projector.b").value;
    for (std::size_t c = 0; c < 3; ++c) {
        std::vector<double> token(9, 0.0);
        for (std::size_t d = 0; d < 9; ++d) {
            double s = tokB.data[d];
            for (std::size_t t = 0; t < 5; ++t)
                s += tokW.at(d, t) * (w.at(t, c) - stats.mu[c]) / stats.sigma[c];
            token[d] = s;
        }
        double yn = prjB.data[0];
        for (std::size_t d = 0; d < 9; ++d) yn += prjW.at(0, d) * token[d];
        const double expect = yn * stats.sigma[c] + stats.mu[c];
        CHECK(got.at(0, c) == doctest::Approx(expect).epsilon(1e-10));
    }
}

TEST_CASE("transformer parameter counts are stable") {
    CHECK(models::make_forecaster(lorenz_st(ModelKind::ITransformer))->param_count() == 1336);
    CHECK(models::make_forecaster(lorenz_st(ModelKind::IQTransformer))->param_count() == 706);
    ModelConfig lt_it = lorenz_st(ModelKind::ITransformer);
    lt_it.horizon = 5;
    CHECK(models::make_forecaster(lt_it)->param_count() == 1376);
    ModelConfig lt_iqt = lorenz_st(ModelKind::IQTransformer);
    lt_iqt.horizon = 5;
    CHECK(models::make_forecaster(lt_iqt)->param_count() == 746);

    // Zero-block degenerate model: input norm + tokenizer + projector only.
    ModelConfig deg = lorenz_st(ModelKind::ITransformer);
    deg.blocks = 0;
    CHECK(models::make_forecaster(deg)->param_count() == 6 + 54 + 10);

    // Breakdown sums to the total.
    auto m = models::make_forecaster(lorenz_st(ModelKind::IQTransformer));
    long sum = 0;
    for (const auto& [name, n] : m->param_breakdown()) sum += n;
    CHECK(sum == m->param_count());
}

TEST_CASE("shape contract across the experiment grid") {
    std::mt19937_64 rng(2);
    struct Case {
        ModelKind kind;
        int T, S, C, target;
    };
    const std::vector<Case> grid{
        {ModelKind::IndepVqc, 5, 1, 3, -1},     {ModelKind::VqcMlp, 5, 5, 3, -1},
        {ModelKind::DenseEmbedObs, 5, 1, 3, -1}, {ModelKind::DenseEmbedQubits, 5, 1, 3, -1},
        {ModelKind::EncVqcDec, 5, 5, 3, -1},     {ModelKind::Reupload, 5, 1, 3, -1},
        {ModelKind::ITransformer, 5, 5, 3, -1},  {ModelKind::IQTransformer, 5, 1, 3, -1},
        {ModelKind::VqcMlp, 5, 1, 7, 6},         {ModelKind::EncVqcDec, 5, 24, 7, 6},
        {ModelKind::ITransformer, 8, 24, 7, 6},  {ModelKind::IQTransformer, 8, 24, 7, 6},
    };
    for (const Case& tc : grid) {
        ModelConfig cfg;
        cfg.kind = tc.kind;
        cfg.lookback = tc.T;
        cfg.horizon = tc.S;
        cfg.channels = tc.C;
        cfg.target_channel = tc.target;
        cfg.depth = 2;
        if (tc.kind == ModelKind::IQTransformer) {
            cfg.n_qubits = 3;
            cfg.p_enc = 1;
            cfg.p_vqc = 2;
            cfg.embed_dim = 9;
            cfg.ffn_dim = 6;
            cfg.blocks = 1;
        } else {
            cfg.n_qubits = 3;
            cfg.blocks = 1;
            cfg.embed_dim = 7;
            cfg.ffn_dim = 5;
        }
        auto m = models::make_forecaster(cfg);
        m->init_params(4);
        const Tensor y = m->predict(random_window(rng, tc.T, tc.C));
        CHECK(y.rows == static_cast<std::size_t>(tc.S));
        CHECK(y.cols == static_cast<std::size_t>(tc.target >= 0 ? 1 : tc.C));
    }
}

TEST_CASE("same seed initializes identical models") {
    const ModelConfig cfg = lorenz_st(ModelKind::IQTransformer);
    auto a = models::make_forecaster(cfg);
    auto b = models::make_forecaster(cfg);
    a->init_params(123);
    b->init_params(123);
    std::mt19937_64 rng(6);
    const Tensor w = random_window(rng, 5, 3);
    CHECK(a->predict(w).data == b->predict(w).data);
    b->init_params(124);
    CHECK(a->predict(w).data != b->predict(w).data);
}

TEST_CASE("end-to-end gradients match finite differences for every architecture") {
    std::mt19937_64 rng(99);
    struct Case {
        ModelKind kind;
        int T, S, C;
    };
    const std::vector<Case> cases{
        {ModelKind::Linear, 3, 2, 2},        {ModelKind::IndepVqc, 3, 1, 2},
        {ModelKind::VqcMlp, 3, 2, 2},        {ModelKind::DenseEmbedObs, 3, 1, 3},
        {ModelKind::DenseEmbedQubits, 3, 1, 3}, {ModelKind::EncVqcDec, 3, 2, 2},
        {ModelKind::Reupload, 3, 1, 2},      {ModelKind::ITransformer, 3, 2, 2},
        {ModelKind::IQTransformer, 3, 1, 2},
    };
    for (const Case& tc : cases) {
        ModelConfig cfg;
        cfg.kind = tc.kind;
        cfg.lookback = tc.T;
        cfg.horizon = tc.S;
        cfg.channels = tc.C;
        cfg.depth = 1;
        cfg.n_qubits = tc.kind == ModelKind::IQTransformer ? 2 : 3;
        cfg.blocks = 1;
        cfg.embed_dim = tc.kind == ModelKind::IQTransformer ? 6 : 4;
        cfg.ffn_dim = 3;
        cfg.p_enc = 1;
        cfg.p_vqc = 1;
        auto m = models::make_forecaster(cfg);
        m->init_params(1234);

        const Tensor w = random_window(rng, tc.T, tc.C);
        Tensor target(static_cast<std::size_t>(tc.S), static_cast<std::size_t>(tc.C));
        std::uniform_real_distribution<double> dist(0.0, 1.0);
        for (double& v : target.data) v = dist(rng);

        diff::Tape tape;
        const models::BuiltGraph g = m->build(tape, w, true);
        const diff::VarId tgt = tape.leaf(target);
        const diff::VarId loss =
            diff::mean(tape, diff::square(tape, diff::sub(tape, g.prediction, tgt)));
        tape.backward(loss);

        for (std::size_t p = 0; p < m->parameters().size(); ++p) {
            const Tensor& grad = tape.grad(g.params[p]);
            Tensor& value = m->parameters()[p].value;
            for (std::size_t i = 0; i < value.size(); ++i) {
                const double saved = value.data[i];
                value.data[i] = saved + testing::kFdStep;
                const double fp = train::mse(m->predict(w), target);
                value.data[i] = saved - testing::kFdStep;
                const double fm = train::mse(m->predict(w), target);
                value.data[i] = saved;
                const double fd = (fp - fm) / (2.0 * testing::kFdStep);
                INFO(models::to_string(tc.kind), " param ", m->parameters()[p].name,
                     " elem ", i);
                CHECK(testing::grad_close(grad.data[i], fd));
            }
        }
    }
}

TEST_CASE("checkpoints round-trip through JSON") {
    ModelConfig cfg = lorenz_st(ModelKind::IQTransformer);
    auto m = models::make_forecaster(cfg);
    m->init_params(55);
    const std::string path =
        (std::filesystem::temp_directory_path() / "qts_test_ckpt.json").string();
    models::save_checkpoint(*m, path);
    auto back = models::load_checkpoint(path);
    std::mt19937_64 rng(1);
    const Tensor w = random_window(rng, 5, 3);
    CHECK(back->predict(w).data == m->predict(w).data);
    CHECK(back->param_count() == m->param_count());
    std::remove(path.c_str());
}
