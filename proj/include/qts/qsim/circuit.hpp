#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace qts::qsim {

enum class GateKind { RX, RY, RZ, H, CNOT };

inline bool is_rotation(GateKind k) {
    return k == GateKind::RX || k == GateKind::RY || k == GateKind::RZ;
}

/// Parameter slots are tagged by what binds them at evaluation time:
/// encoding slots carry data values, trainable slots carry weights.
enum class SlotKind { Encoding, Trainable };

struct Gate {
    GateKind kind;
    int target = 0;
    int control = -1;  // CNOT only
    int slot = -1;     // rotation gates only; index into ParamCircuit::slots

    static Gate rx(int q, int slot) { return {GateKind::RX, q, -1, slot}; }
    static Gate ry(int q, int slot) { return {GateKind::RY, q, -1, slot}; }
    static Gate rz(int q, int slot) { return {GateKind::RZ, q, -1, slot}; }
    static Gate h(int q) { return {GateKind::H, q, -1, -1}; }
    static Gate cnot(int control, int target) { return {GateKind::CNOT, target, control, -1}; }
};

/// Ordered gate list with symbolic parameter slots. Binding a full vector of
/// slot values yields a deterministic unitary. Each slot is referenced by
/// exactly one rotation gate.
struct ParamCircuit {
    int n_qubits = 0;
    std::vector<Gate> gates;
    std::vector<SlotKind> slots;

    int slot_count() const { return static_cast<int>(slots.size()); }
    int count_slots(SlotKind kind) const;

    /// Appends a rotation gate with a fresh slot; returns the slot index.
    int add_rotation(GateKind kind, int qubit, SlotKind slot_kind);
    void add_h(int qubit) { gates.push_back(Gate::h(qubit)); }
    void add_cnot(int control, int target) { gates.push_back(Gate::cnot(control, target)); }

    /// Appends another circuit on the same qubit count; its slots are
    /// renumbered to follow this circuit's slots.
    void append(const ParamCircuit& other);

    /// Checks qubit bounds, control != target, and that every slot is
    /// referenced by exactly one gate. Throws std::invalid_argument.
    void validate() const;
};

}  // namespace qts::qsim
