#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "qts/qsim/ansatz.hpp"
#include "qts/qsim/pauli.hpp"
#include "qts/qsim/state_vector.hpp"
#include "support/dense_oracle.hpp"
#include "support/random_circuit.hpp"

using namespace qts;
using qsim::Basis;
using qsim::Gate;
using qsim::GateKind;
using qsim::ParamCircuit;
using qsim::PauliString;
using qsim::SlotKind;
using qsim::StateVector;

namespace {
constexpr double kPi = std::numbers::pi;

double amp_distance(std::span<const qsim::cplx> a, const std::vector<qsim::cplx>& b) {
    double mx = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) mx = std::max(mx, std::abs(a[i] - b[i]));
    return mx;
}
}  // namespace

TEST_CASE("init_state basis states") {
    const StateVector z1 = qsim::init_state(1, Basis::AllZero);
    CHECK(z1.amplitudes()[0] == qsim::cplx{1.0, 0.0});
    CHECK(z1.amplitudes()[1] == qsim::cplx{0.0, 0.0});

    const StateVector p1 = qsim::init_state(1, Basis::AllPlus);
    CHECK(p1.amplitudes()[0].real() == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(p1.amplitudes()[1].real() == doctest::Approx(1.0 / std::sqrt(2.0)));

    const StateVector p2 = qsim::init_state(2, Basis::AllPlus);
    for (const auto& a : p2.amplitudes()) CHECK(a.real() == doctest::Approx(0.5));

    CHECK_THROWS_AS(qsim::init_state(0, Basis::AllZero), std::invalid_argument);
    CHECK_THROWS_AS(qsim::init_state(25, Basis::AllZero), std::invalid_argument);
}

TEST_CASE("single-qubit gate semantics") {
    StateVector s(1);
    s.apply_ry(0, kPi);
    CHECK(std::abs(s.amplitudes()[0]) == doctest::Approx(0.0));
    CHECK(s.amplitudes()[1].real() == doctest::Approx(1.0));

    StateVector h(1);
    h.apply_h(0);
    CHECK(h.amplitudes()[0].real() == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(h.amplitudes()[1].real() == doctest::Approx(1.0 / std::sqrt(2.0)));

    // RZ on |+> rotates the relative phase.
    StateVector r(1, Basis::AllPlus);
    r.apply_rz(0, kPi / 2);
    CHECK(std::arg(r.amplitudes()[1] / r.amplitudes()[0]) == doctest::Approx(kPi / 2));
}

TEST_CASE("cnot moves amplitude when the control bit is set") {
    // Qubit 0 is the least-significant index bit, so index 1 has the control
    // set for CNOT(0 -> 1) and maps to index 3.
    StateVector s(2);
    s.apply_ry(0, kPi);  // |q0=1>
    CHECK(std::abs(s.amplitudes()[1].real()) == doctest::Approx(1.0));
    s.apply_cnot(0, 1);
    CHECK(std::abs(s.amplitudes()[3].real()) == doctest::Approx(1.0));
    // Control clear: nothing moves.
    StateVector t(2);
    t.apply_ry(1, kPi);  // index 2
    t.apply_cnot(0, 1);
    CHECK(std::abs(t.amplitudes()[2].real()) == doctest::Approx(1.0));

    CHECK_THROWS_AS(s.apply_cnot(0, 0), std::invalid_argument);
    CHECK_THROWS_AS(s.apply_cnot(0, 5), std::invalid_argument);
}

TEST_CASE("gate apply overloads enforce angle presence") {
    StateVector s(2);
    CHECK_THROWS_AS(s.apply(Gate::h(0), 0.5), std::invalid_argument);
    CHECK_THROWS_AS(s.apply(Gate::ry(0, 0)), std::invalid_argument);
}

TEST_CASE("run_circuit applies gates in order") {
    ParamCircuit empty;
    empty.n_qubits = 2;
    const StateVector init(2, Basis::AllPlus);
    const StateVector out = qsim::run_circuit(empty, {}, init);
    CHECK(amp_distance(out.amplitudes(),
                       {init.amplitudes().begin(), init.amplitudes().end()}) == 0.0);

    ParamCircuit c;
    c.n_qubits = 1;
    c.add_rotation(GateKind::RY, 0, SlotKind::Trainable);
    const double theta = kPi * 0.5;
    const StateVector r = qsim::run_circuit(c, std::vector<double>{theta}, StateVector(1));
    CHECK(r.amplitudes()[0].real() == doctest::Approx(std::cos(kPi / 4)));
    CHECK(r.amplitudes()[1].real() == doctest::Approx(std::sin(kPi / 4)));

    CHECK_THROWS_AS(qsim::run_circuit(c, {}, StateVector(1)), std::invalid_argument);
}

TEST_CASE("run_circuit matches the dense matrix oracle") {
    std::mt19937_64 rng(12345);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 3);
        auto rc = testing::random_circuit(rng, n, 12);
        const StateVector out =
            qsim::run_circuit(rc.circuit, rc.bindings, StateVector(n, Basis::AllZero));
        const auto expect =
            testing::oracle_run(rc.circuit, rc.bindings, testing::oracle_initial(n, Basis::AllZero));
        CHECK(amp_distance(out.amplitudes(), expect) < 1e-10);
        CHECK(std::abs(out.norm() - 1.0) < 1e-10);
    }
}

TEST_CASE("expectation closed forms") {
    CHECK(qsim::expectation(StateVector(1), PauliString::z(0)) == doctest::Approx(1.0));

    StateVector s(1);
    s.apply_ry(0, kPi / 3);
    CHECK(qsim::expectation(s, PauliString::z(0)) == doctest::Approx(0.5));

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> angle(-6.0, 6.0);
    for (int i = 0; i < 100; ++i) {
        const double theta = angle(rng);
        StateVector t(1);
        t.apply_ry(0, theta);
        CHECK(std::abs(qsim::expectation(t, PauliString::z(0)) - std::cos(theta)) < 1e-12);
    }

    StateVector u(2);
    CHECK_THROWS_AS(qsim::expectation(u, PauliString::z(5)), std::invalid_argument);
}

TEST_CASE("expectation matches oracle and stays within bounds") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 3;
        auto rc = testing::random_circuit(rng, n, 10);
        const StateVector out =
            qsim::run_circuit(rc.circuit, rc.bindings, StateVector(n));
        const auto oracle_state =
            testing::oracle_run(rc.circuit, rc.bindings, testing::oracle_initial(n, Basis::AllZero));

        const PauliString zz = PauliString::zz(0, 2);
        CHECK(std::abs(qsim::expectation(out, zz) -
                       testing::oracle_expectation(n, oracle_state, zz)) < 1e-10);

        const PauliString p = testing::random_pauli(rng, n);
        const double e = qsim::expectation(out, p);
        CHECK(e >= -1.0 - 1e-12);
        CHECK(e <= 1.0 + 1e-12);
        CHECK(std::abs(e - testing::oracle_expectation(n, oracle_state, p)) < 1e-10);
    }
}

TEST_CASE("ring ansatz structure and slot counts") {
    const ParamCircuit a = qsim::build_ring_ansatz(3, 1);
    CHECK(a.slot_count() == 9);
    CHECK(a.count_slots(SlotKind::Trainable) == 9);
    int cnots = 0;
    for (const auto& g : a.gates)
        if (g.kind == GateKind::CNOT) ++cnots;
    CHECK(cnots == 3);
    // Ring closes last -> first.
    CHECK(a.gates.back().control == 2);
    CHECK(a.gates.back().target == 0);

    const ParamCircuit b = qsim::build_ring_ansatz(2, 1);
    CHECK(b.slot_count() == 6);
    int cnots2 = 0;
    for (const auto& g : b.gates)
        if (g.kind == GateKind::CNOT) ++cnots2;
    CHECK(cnots2 == 2);

    CHECK(qsim::build_ring_ansatz(8, 24).slot_count() == 576);
    CHECK_THROWS_AS(qsim::build_ring_ansatz(1, 1), std::invalid_argument);

    // Layer layout: per qubit RZ, RY, RZ columns before the ring.
    CHECK(a.gates[0].kind == GateKind::RZ);
    CHECK(a.gates[1].kind == GateKind::RY);
    CHECK(a.gates[2].kind == GateKind::RZ);
}

TEST_CASE("qsann ansatz slot counts") {
    CHECK(qsim::build_qsann_ansatz(4, 1).slot_count() == 12);
    CHECK(qsim::build_qsann_ansatz(3, 1).slot_count() == 9);
    CHECK(qsim::build_qsann_ansatz(4, 2).slot_count() == 16);
    CHECK_THROWS_AS(qsim::build_qsann_ansatz(1, 1), std::invalid_argument);

    const ParamCircuit c = qsim::build_qsann_ansatz(4, 2);
    CHECK(c.gates[0].kind == GateKind::RX);
    CHECK(c.gates[4].kind == GateKind::RY);
    int cnots = 0;
    for (const auto& g : c.gates)
        if (g.kind == GateKind::CNOT) ++cnots;
    CHECK(cnots == 8);
}

TEST_CASE("norm preserved across random circuits") {
    std::mt19937_64 rng(4242);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 4);
        auto rc = testing::random_circuit(rng, n, 20);
        const StateVector out = qsim::run_circuit(rc.circuit, rc.bindings, StateVector(n));
        CHECK(std::abs(out.norm() - 1.0) < 1e-10);
    }
}

TEST_CASE("circuit validation rejects malformed circuits") {
    ParamCircuit c;
    c.n_qubits = 2;
    c.gates.push_back(Gate::ry(0, 3));  // slot out of range
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);

    ParamCircuit d;
    d.n_qubits = 2;
    d.slots.push_back(SlotKind::Trainable);  // never referenced
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);

    ParamCircuit e;
    e.n_qubits = 2;
    e.gates.push_back(Gate::cnot(1, 1));
    CHECK_THROWS_AS(e.validate(), std::invalid_argument);
}
