#include "qts/qsim/ansatz.hpp"

#include <stdexcept>

namespace qts::qsim {

namespace {

void append_cnot_ring(ParamCircuit& c) {
    const int n = c.n_qubits;
    for (int q = 0; q < n - 1; ++q) c.add_cnot(q, q + 1);
    c.add_cnot(n - 1, 0);
}

}  // namespace

void append_ring_layers(ParamCircuit& circuit, int depth, SlotKind kind) {
    if (circuit.n_qubits < 2) throw std::invalid_argument("ring ansatz needs >= 2 qubits");
    if (depth < 1) throw std::invalid_argument("ring ansatz needs depth >= 1");
    for (int layer = 0; layer < depth; ++layer) {
        for (int q = 0; q < circuit.n_qubits; ++q) {
            circuit.add_rotation(GateKind::RZ, q, kind);
            circuit.add_rotation(GateKind::RY, q, kind);
            circuit.add_rotation(GateKind::RZ, q, kind);
        }
        append_cnot_ring(circuit);
    }
}

ParamCircuit build_ring_ansatz(int n_qubits, int depth) {
    ParamCircuit c;
    c.n_qubits = n_qubits;
    append_ring_layers(c, depth, SlotKind::Trainable);
    c.validate();
    return c;
}

void append_qsann_layers(ParamCircuit& circuit, int depth_p, SlotKind kind) {
    if (circuit.n_qubits < 2) throw std::invalid_argument("qsann ansatz needs >= 2 qubits");
    if (depth_p < 1) throw std::invalid_argument("qsann ansatz needs depth >= 1");
    const int n = circuit.n_qubits;
    for (int q = 0; q < n; ++q) circuit.add_rotation(GateKind::RX, q, kind);
    for (int q = 0; q < n; ++q) circuit.add_rotation(GateKind::RY, q, kind);
    for (int rep = 0; rep < depth_p; ++rep) {
        append_cnot_ring(circuit);
        for (int q = 0; q < n; ++q) circuit.add_rotation(GateKind::RY, q, kind);
    }
}

ParamCircuit build_qsann_ansatz(int n_qubits, int depth_p) {
    ParamCircuit c;
    c.n_qubits = n_qubits;
    append_qsann_layers(c, depth_p, SlotKind::Trainable);
    c.validate();
    return c;
}

}  // namespace qts::qsim
