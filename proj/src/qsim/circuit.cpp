#include "qts/qsim/circuit.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace qts::qsim {

int ParamCircuit::count_slots(SlotKind kind) const {
    return static_cast<int>(std::count(slots.begin(), slots.end(), kind));
}

int ParamCircuit::add_rotation(GateKind kind, int qubit, SlotKind slot_kind) {
    if (!is_rotation(kind)) throw std::invalid_argument("add_rotation: gate is not a rotation");
    const int slot = static_cast<int>(slots.size());
    slots.push_back(slot_kind);
    gates.push_back(Gate{kind, qubit, -1, slot});
    return slot;
}

void ParamCircuit::append(const ParamCircuit& other) {
    if (other.n_qubits != n_qubits)
        throw std::invalid_argument("append: qubit counts differ");
    const int offset = static_cast<int>(slots.size());
    slots.insert(slots.end(), other.slots.begin(), other.slots.end());
    for (Gate g : other.gates) {
        if (g.slot >= 0) g.slot += offset;
        gates.push_back(g);
    }
}

void ParamCircuit::validate() const {
    if (n_qubits < 1) throw std::invalid_argument("circuit: n_qubits must be >= 1");
    std::vector<int> refs(slots.size(), 0);
    for (const Gate& g : gates) {
        if (g.target < 0 || g.target >= n_qubits)
            throw std::invalid_argument("circuit: target qubit out of range");
        if (g.kind == GateKind::CNOT) {
            if (g.control < 0 || g.control >= n_qubits)
                throw std::invalid_argument("circuit: control qubit out of range");
            if (g.control == g.target)
                throw std::invalid_argument("circuit: CNOT control equals target");
            if (g.slot >= 0) throw std::invalid_argument("circuit: CNOT cannot take a slot");
        } else if (g.kind == GateKind::H) {
            if (g.slot >= 0) throw std::invalid_argument("circuit: H cannot take a slot");
        } else {
            if (g.slot < 0 || g.slot >= static_cast<int>(slots.size()))
                throw std::invalid_argument("circuit: rotation slot out of range");
            refs[g.slot] += 1;
        }
    }
    for (std::size_t s = 0; s < refs.size(); ++s) {
        if (refs[s] != 1)
            throw std::invalid_argument("circuit: slot " + std::to_string(s) +
                                        " must be referenced by exactly one gate");
    }
}

}  // namespace qts::qsim
