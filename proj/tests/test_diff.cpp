#include <cmath>
#include <memory>
#include <numbers>
#include <random>

#include "doctest.h"
#include "qts/diff/adam.hpp"
#include "qts/diff/ops.hpp"
#include "qts/diff/quantum_node.hpp"
#include "qts/diff/tape.hpp"
#include "support/dense_oracle.hpp"
#include "support/fd.hpp"
#include "support/random_circuit.hpp"

using namespace qts;
using diff::Tape;
using diff::Tensor;
using diff::VarId;

namespace {

constexpr double kPi = std::numbers::pi;

Tensor random_tensor(std::mt19937_64& rng, std::size_t r, std::size_t c, double lo = -1.5,
                     double hi = 1.5) {
    std::uniform_real_distribution<double> dist(lo, hi);
    Tensor t(r, c);
    for (double& v : t.data) v = dist(rng);
    return t;
}

// Checks d(scalar graph)/d(each input) against central finite differences.
// build() must construct the same graph for given leaf values.
void check_grads(const std::vector<Tensor>& inputs,
                 const std::function<VarId(Tape&, const std::vector<VarId>&)>& build,
                 double tol = 1e-5) {
    Tape tape;
    std::vector<VarId> ids;
    for (const Tensor& in : inputs) ids.push_back(tape.leaf(in, true));
    const VarId root = build(tape, ids);
    tape.backward(root);

    for (std::size_t which = 0; which < inputs.size(); ++which) {
        const Tensor& g = tape.grad(ids[which]);
        for (std::size_t i = 0; i < inputs[which].size(); ++i) {
            const double fd = testing::fd_grad(
                [&](const Tensor& x) {
                    Tape t2;
                    std::vector<VarId> ids2;
                    for (std::size_t k = 0; k < inputs.size(); ++k)
                        ids2.push_back(t2.leaf(k == which ? x : inputs[k], false));
                    return t2.value(build(t2, ids2)).data[0];
                },
                inputs[which], i);
            INFO("input ", which, " element ", i);
            CHECK(testing::grad_close(g.data[i], fd, tol));
        }
    }
}

}  // namespace

TEST_CASE("elementwise op values") {
    Tape t;
    const VarId r = diff::relu(t, t.leaf(Tensor::row({-1.0, 2.0})));
    CHECK(t.value(r).data[0] == 0.0);
    CHECK(t.value(r).data[1] == 2.0);

    const VarId sm = diff::softmax(t, t.leaf(Tensor::row({0.0, 0.0, 0.0})));
    for (double v : t.value(sm).data) CHECK(v == doctest::Approx(1.0 / 3.0));

    const VarId ln = diff::layer_norm(t, t.leaf(Tensor::row({3.0, 3.0, 3.0})), 1e-5);
    for (double v : t.value(ln).data) CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("classical op gradients match finite differences") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 50; ++trial) {
        // add / sub / mul / scale_shift / square / exp / mean chain
        check_grads({random_tensor(rng, 2, 3), random_tensor(rng, 2, 3)},
                    [](Tape& t, const std::vector<VarId>& in) {
                        const VarId a = diff::mul(t, in[0], in[1]);
                        const VarId b = diff::add(t, a, diff::scale_shift(t, in[1], 0.7, 0.1));
                        const VarId c = diff::sub(t, b, in[0]);
                        return diff::mean(t, diff::square(t, c));
                    });
    }

    std::mt19937_64 rng2(77);
    for (int trial = 0; trial < 50; ++trial) {
        check_grads({random_tensor(rng2, 2, 3), random_tensor(rng2, 3, 4)},
                    [](Tape& t, const std::vector<VarId>& in) {
                        return diff::mean(t, diff::matmul(t, in[0], in[1]));
                    });
        check_grads({random_tensor(rng2, 3, 4)}, [](Tape& t, const std::vector<VarId>& in) {
            return diff::mean(t, diff::square(t, diff::transpose(t, in[0])));
        });
        check_grads({random_tensor(rng2, 2, 3), random_tensor(rng2, 4, 3),
                     random_tensor(rng2, 1, 4)},
                    [](Tape& t, const std::vector<VarId>& in) {
                        return diff::mean(
                            t, diff::square(t, diff::affine(t, in[0], in[1], in[2])));
                    });
        check_grads({random_tensor(rng2, 2, 4)}, [](Tape& t, const std::vector<VarId>& in) {
            return diff::mean(t, diff::square(t, diff::softmax(t, in[0])));
        });
        check_grads({random_tensor(rng2, 2, 5)}, [](Tape& t, const std::vector<VarId>& in) {
            return diff::mean(t, diff::square(t, diff::layer_norm(t, in[0], 1e-5)));
        });
        check_grads({random_tensor(rng2, 3, 4), random_tensor(rng2, 1, 4, 0.5, 1.5),
                     random_tensor(rng2, 1, 4)},
                    [](Tape& t, const std::vector<VarId>& in) {
                        return diff::mean(
                            t, diff::square(t, diff::rows_scale_shift(t, in[0], in[1], in[2])));
                    });
        // Positive inputs keep relu away from the kink.
        check_grads({random_tensor(rng2, 2, 3, 0.2, 1.5)},
                    [](Tape& t, const std::vector<VarId>& in) {
                        return diff::mean(t, diff::relu(t, in[0]));
                    });
        check_grads({random_tensor(rng2, 2, 2)}, [](Tape& t, const std::vector<VarId>& in) {
            return diff::mean(t, diff::exp(t, in[0]));
        });
    }
}

TEST_CASE("structural op gradients") {
    std::mt19937_64 rng(5);
    check_grads({random_tensor(rng, 3, 4)}, [](Tape& t, const std::vector<VarId>& in) {
        const VarId r = diff::row(t, in[0], 1);
        const VarId c = diff::col(t, in[0], 2);
        const VarId rc = diff::matmul(t, c, r);
        return diff::mean(t, diff::square(t, rc));
    });
    check_grads({random_tensor(rng, 1, 3), random_tensor(rng, 1, 3)},
                [](Tape& t, const std::vector<VarId>& in) {
                    std::vector<VarId> parts{in[0], in[1]};
                    const VarId m = diff::vstack(t, parts);
                    const VarId h = diff::hstack(t, parts);
                    const VarId r = diff::reshape(t, h, 2, 3);
                    return diff::mean(t, diff::square(t, diff::add(t, m, r)));
                });
}

TEST_CASE("window denorm round-trips and differentiates") {
    std::mt19937_64 rng(11);
    const Tensor x = random_tensor(rng, 5, 3);
    const auto stats = diff::window_stats(x, 1e-5);

    // Round trip with unit gain, zero offset.
    Tape t;
    Tensor normed(5, 3);
    for (std::size_t c = 0; c < 3; ++c)
        for (std::size_t r = 0; r < 5; ++r)
            normed.at(r, c) = (x.at(r, c) - stats.mu[c]) / stats.sigma[c];
    const VarId y = t.leaf(normed);
    const VarId gain = t.leaf(Tensor(1, 3, 1.0));
    const VarId offset = t.leaf(Tensor(1, 3, 0.0));
    const VarId back = diff::window_denorm(t, y, gain, offset, stats, {0, 1, 2});
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(t.value(back).data[i] == doctest::Approx(x.data[i]).epsilon(1e-8));

    check_grads({normed, random_tensor(rng, 1, 3, 0.5, 1.5), random_tensor(rng, 1, 3)},
                [&stats](Tape& tp, const std::vector<VarId>& in) {
                    return diff::mean(tp, diff::square(tp, diff::window_denorm(
                                                               tp, in[0], in[1], in[2], stats,
                                                               {0, 1, 2})));
                });
    // Target-channel map uses a subset of the stats.
    check_grads({random_tensor(rng, 4, 1), random_tensor(rng, 1, 3, 0.5, 1.5),
                 random_tensor(rng, 1, 3)},
                [&stats](Tape& tp, const std::vector<VarId>& in) {
                    return diff::mean(tp, diff::square(tp, diff::window_denorm(
                                                               tp, in[0], in[1], in[2], stats,
                                                               {2})));
                });
}

TEST_CASE("gaussian attention values and gradients") {
    // Equal queries and keys give uniform rows and the mean of v.
    Tape t;
    const VarId q = t.leaf(Tensor(3, 1, 0.4));
    const VarId k = t.leaf(Tensor(3, 1, 0.4));
    Tensor vv(3, 2);
    for (std::size_t i = 0; i < vv.size(); ++i) vv.data[i] = static_cast<double>(i);
    const VarId v = t.leaf(vv);
    const VarId out = diff::gaussian_attention(t, q, k, v);
    CHECK(t.value(out).at(0, 0) == doctest::Approx(2.0));
    CHECK(t.value(out).at(2, 1) == doctest::Approx(3.0));

    // Single token: coefficient 1, output is v.
    Tape t1;
    const VarId out1 = diff::gaussian_attention(t1, t1.leaf(Tensor::scalar(0.3)),
                                                t1.leaf(Tensor::scalar(-2.0)),
                                                t1.leaf(Tensor::row({5.0, 6.0})));
    CHECK(t1.value(out1).data[0] == doctest::Approx(5.0));
    CHECK(t1.value(out1).data[1] == doctest::Approx(6.0));

    // Hand-evaluated kernel: q=(0,1), k=(0,1).
    const Tensor qa = Tensor::from_rows(2, 1, {0.0, 1.0});
    const Tensor ka = Tensor::from_rows(2, 1, {0.0, 1.0});
    const Tensor alpha = diff::gaussian_attention_matrix(qa, ka);
    CHECK(alpha.at(0, 0) == doctest::Approx(1.0 / (1.0 + std::exp(-1.0))));
    CHECK(alpha.at(0, 0) == doctest::Approx(0.7311).epsilon(1e-4));
    CHECK(alpha.at(0, 0) + alpha.at(0, 1) == doctest::Approx(1.0));

    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 10; ++trial) {
        check_grads({random_tensor(rng, 3, 1), random_tensor(rng, 3, 1),
                     random_tensor(rng, 3, 4)},
                    [](Tape& tp, const std::vector<VarId>& in) {
                        return diff::mean(
                            tp, diff::square(tp, diff::gaussian_attention(tp, in[0], in[1],
                                                                          in[2])));
                    });
    }
}

TEST_CASE("backward is linear in the upstream seed") {
    std::mt19937_64 rng(3);
    const Tensor a = random_tensor(rng, 2, 3);
    const Tensor b = random_tensor(rng, 2, 3);
    auto run = [&](double seed) {
        Tape t;
        const VarId ia = t.leaf(a, true);
        const VarId ib = t.leaf(b, true);
        const VarId out = diff::mean(t, diff::mul(t, diff::exp(t, ia), ib));
        t.backward(out, Tensor::scalar(seed));
        return std::pair{t.grad(ia), t.grad(ib)};
    };
    const auto [g1a, g1b] = run(1.0);
    const auto [g2a, g2b] = run(2.0);
    for (std::size_t i = 0; i < g1a.size(); ++i) {
        CHECK(g2a.data[i] == doctest::Approx(2.0 * g1a.data[i]));
        CHECK(g2b.data[i] == doctest::Approx(2.0 * g1b.data[i]));
    }
}

TEST_CASE("tape reruns are bit identical") {
    auto run = [] {
        std::mt19937_64 rng(555);
        const Tensor a = random_tensor(rng, 3, 3);
        Tape t;
        const VarId ia = t.leaf(a, true);
        const VarId out = diff::mean(t, diff::square(t, diff::softmax(t, ia)));
        t.backward(out);
        return std::pair{t.value(out).data[0], t.grad(ia).data};
    };
    const auto r1 = run();
    const auto r2 = run();
    CHECK(r1.first == r2.first);
    CHECK(r1.second == r2.second);
}

TEST_CASE("quantum forward closed forms") {
    using diff::QuantumNode;
    qsim::ParamCircuit c;
    c.n_qubits = 1;
    c.add_rotation(qsim::GateKind::RY, 0, qsim::SlotKind::Encoding);
    auto node = QuantumNode::sequential(c, {qsim::PauliString::z(0)});
    const Tensor out = node.forward(Tensor::scalar(kPi), Tensor(1, 0));
    CHECK(out.data[0] == doctest::Approx(-1.0));

    auto ring = qsim::build_ring_ansatz(3, 1);
    auto node3 = QuantumNode::sequential(
        ring, {qsim::PauliString::z(0), qsim::PauliString::z(1), qsim::PauliString::z(2)});
    const Tensor z = node3.forward(Tensor(1, 0), Tensor(1, 9, 0.0));
    for (double v : z.data) CHECK(v == doctest::Approx(1.0));
}

TEST_CASE("quantum forward matches the dense oracle") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        auto rc = testing::random_circuit(rng, 2, 8, 0.4);
        const auto obs = testing::random_pauli(rng, 2);
        auto node = diff::QuantumNode::sequential(rc.circuit, {obs});
        Tensor inputs(1, static_cast<std::size_t>(node.n_inputs()));
        Tensor params(1, static_cast<std::size_t>(node.n_params()));
        {
            std::size_t ii = 0, pp = 0;
            for (std::size_t s = 0; s < rc.bindings.size(); ++s) {
                if (node.input_index[s] >= 0)
                    inputs.data[ii++] = rc.bindings[s];
                else
                    params.data[pp++] = rc.bindings[s];
            }
        }
        const Tensor out = node.forward(inputs, params);
        const auto oracle_state = testing::oracle_run(rc.circuit, rc.bindings,
                                                      testing::oracle_initial(2, qsim::Basis::AllZero));
        CHECK(std::abs(out.data[0] - testing::oracle_expectation(2, oracle_state, obs)) < 1e-10);
    }
}

TEST_CASE("parameter-shift gradient closed forms") {
    qsim::ParamCircuit c;
    c.n_qubits = 1;
    c.add_rotation(qsim::GateKind::RY, 0, qsim::SlotKind::Trainable);
    auto node = diff::QuantumNode::sequential(c, {qsim::PauliString::z(0)});

    auto grad_at = [&](double theta) {
        Tensor gp(1, 1);
        node.backward(Tensor(1, 0), Tensor::scalar(theta), Tensor::scalar(1.0), nullptr, &gp);
        return gp.data[0];
    };
    CHECK(grad_at(kPi / 2) == doctest::Approx(-1.0));
    CHECK(grad_at(0.0) == doctest::Approx(0.0));
}

TEST_CASE("quantum gradients: shift rule vs finite differences vs adjoint") {
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 12; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 3);  // up to 4 qubits
        auto rc = testing::random_circuit(rng, n, 14, 0.5);
        std::vector<qsim::PauliString> obs{testing::random_pauli(rng, n),
                                           qsim::PauliString::z(0)};
        auto node = diff::QuantumNode::sequential(rc.circuit, obs);

        Tensor inputs(1, static_cast<std::size_t>(node.n_inputs()));
        Tensor params(1, static_cast<std::size_t>(node.n_params()));
        std::uniform_real_distribution<double> dist(-2.0, 2.0);
        for (double& v : inputs.data) v = dist(rng);
        for (double& v : params.data) v = dist(rng);
        Tensor upstream(1, obs.size());
        for (double& v : upstream.data) v = dist(rng);

        Tensor gi_shift(1, inputs.cols), gp_shift(1, params.cols);
        node.backward(inputs, params, upstream, &gi_shift, &gp_shift);

        node.grad_method = diff::GradMethod::Adjoint;
        Tensor gi_adj(1, inputs.cols), gp_adj(1, params.cols);
        node.backward(inputs, params, upstream, &gi_adj, &gp_adj);
        node.grad_method = diff::GradMethod::ParamShift;

        for (std::size_t i = 0; i < inputs.cols; ++i)
            CHECK(gi_shift.data[i] == doctest::Approx(gi_adj.data[i]).epsilon(1e-9));
        for (std::size_t i = 0; i < params.cols; ++i)
            CHECK(gp_shift.data[i] == doctest::Approx(gp_adj.data[i]).epsilon(1e-9));

        auto weighted = [&](const Tensor& in, const Tensor& par) {
            const Tensor out = node.forward(in, par);
            double s = 0.0;
            for (std::size_t j = 0; j < out.size(); ++j) s += upstream.data[j] * out.data[j];
            return s;
        };
        for (std::size_t i = 0; i < inputs.cols; ++i) {
            const double fd = testing::fd_grad(
                [&](const Tensor& x) { return weighted(x, params); }, inputs, i);
            CHECK(testing::grad_close(gi_shift.data[i], fd));
        }
        for (std::size_t i = 0; i < params.cols; ++i) {
            const double fd = testing::fd_grad(
                [&](const Tensor& x) { return weighted(inputs, x); }, params, i);
            CHECK(testing::grad_close(gp_shift.data[i], fd));
        }
    }
}

TEST_CASE("quantum tape op routes gradients to both sources") {
    std::mt19937_64 rng(71);
    auto rc = testing::random_circuit(rng, 2, 10, 0.5);
    auto node = std::make_shared<diff::QuantumNode>(diff::QuantumNode::sequential(
        rc.circuit, {qsim::PauliString::z(0), qsim::PauliString::x(1)}));
    const auto n_in = static_cast<std::size_t>(node->n_inputs());
    const auto n_par = static_cast<std::size_t>(node->n_params());
    check_grads({random_tensor(rng, 1, std::max<std::size_t>(n_in, 1)),
                 random_tensor(rng, 1, std::max<std::size_t>(n_par, 1))},
                [node](Tape& t, const std::vector<VarId>& in) {
                    return diff::mean(t, diff::square(t, diff::quantum(t, node, in[0], in[1])));
                });
}

TEST_CASE("quantum node validates slot mappings") {
    qsim::ParamCircuit c;
    c.n_qubits = 1;
    c.add_rotation(qsim::GateKind::RY, 0, qsim::SlotKind::Trainable);
    diff::QuantumNode node = diff::QuantumNode::sequential(c, {qsim::PauliString::z(0)});
    node.param_index[0] = -1;  // unmap
    CHECK_THROWS_AS(node.validate(), std::invalid_argument);
}

TEST_CASE("adam steps") {
    using diff::AdamConfig;
    using diff::AdamState;
    AdamConfig cfg;
    cfg.lr = 0.001;

    Tensor p = Tensor::scalar(1.0);
    std::vector<Tensor*> params{&p};
    AdamState st;
    diff::adam_step(params, {Tensor::scalar(1.0)}, st, cfg);
    // First step: mhat = vhat = 1, so the move is lr / (1 + eps).
    CHECK(p.data[0] == doctest::Approx(1.0 - 0.001).epsilon(1e-7));

    Tensor q = Tensor::scalar(0.5);
    std::vector<Tensor*> params2{&q};
    AdamState st2;
    diff::adam_step(params2, {Tensor::scalar(0.0)}, st2, cfg);
    CHECK(q.data[0] == 0.5);

    // Two constant-gradient steps accumulate the second moment as a
    // beta2-weighted sum of g^2.
    Tensor r = Tensor::scalar(0.0);
    std::vector<Tensor*> params3{&r};
    AdamState st3;
    const double g = 0.3;
    diff::adam_step(params3, {Tensor::scalar(g)}, st3, cfg);
    diff::adam_step(params3, {Tensor::scalar(g)}, st3, cfg);
    const double expect_v = 0.999 * ((1 - 0.999) * g * g) + (1 - 0.999) * g * g;
    CHECK(st3.v[0].data[0] == doctest::Approx(expect_v).epsilon(1e-12));

    CHECK_THROWS_AS(diff::adam_step(params3, {Tensor(2, 2)}, st3, cfg), std::invalid_argument);
}

TEST_CASE("validation passes do not run backward sweeps") {
    std::mt19937_64 rng(9);
    const Tensor a = random_tensor(rng, 2, 2);
    const auto before = Tape::backward_sweeps();
    Tape t;
    const VarId ia = t.leaf(a, false);
    const VarId out = diff::mean(t, diff::square(t, ia));
    (void)t.value(out);
    CHECK(Tape::backward_sweeps() == before);
}
