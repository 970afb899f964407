#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qts/qsim/state_vector.hpp"

namespace qts::qsim {

enum class PauliOp { X, Y, Z };

/// Tensor product of Pauli factors on selected qubits, identity elsewhere.
struct PauliString {
    std::vector<std::pair<int, PauliOp>> factors;  // unique qubits, ascending

    static PauliString single(PauliOp op, int qubit) { return PauliString{{{qubit, op}}}; }
    static PauliString x(int qubit) { return single(PauliOp::X, qubit); }
    static PauliString y(int qubit) { return single(PauliOp::Y, qubit); }
    static PauliString z(int qubit) { return single(PauliOp::Z, qubit); }
    static PauliString zz(int i, int j);

    void validate(int n_qubits) const;
    std::string to_string() const;
};

/// <psi|P|psi>. The value is real for any Pauli string; the residual
/// imaginary part is asserted below 1e-12 and discarded.
double expectation(const StateVector& state, const PauliString& obs);

/// out = P|psi>, written into a caller-provided buffer (resized as needed).
void apply_pauli(const StateVector& state, const PauliString& obs, std::vector<cplx>& out);

/// Accumulates weight * P|psi> into acc (acc must have state.dim() entries).
void accumulate_pauli(const StateVector& state, const PauliString& obs, double weight,
                      std::span<cplx> acc);

}  // namespace qts::qsim
