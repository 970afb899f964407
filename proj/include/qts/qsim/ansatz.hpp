#pragma once

#include "qts/qsim/circuit.hpp"

namespace qts::qsim {

/// One ring layer: per-qubit R_z, R_y, R_z columns followed by a CNOT ring
/// (qubit i controls i+1, last controls first). Appended `depth` times;
/// adds 3 * n_qubits * depth slots of the given kind.
void append_ring_layers(ParamCircuit& circuit, int depth, SlotKind kind);

/// Ring ansatz on n_qubits with `depth` layers; 3*n*depth trainable slots.
ParamCircuit build_ring_ansatz(int n_qubits, int depth);

/// Appends the rotation ladder used by the self-attention circuits: an R_x
/// row and an R_y row, then depth_p repetitions of [CNOT ring + R_y row].
/// Adds n_qubits * (depth_p + 2) slots of the given kind.
void append_qsann_layers(ParamCircuit& circuit, int depth_p, SlotKind kind);

/// Ladder ansatz on n_qubits with depth_p repetitions; n*(depth_p+2)
/// trainable slots.
ParamCircuit build_qsann_ansatz(int n_qubits, int depth_p);

}  // namespace qts::qsim
