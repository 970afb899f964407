#pragma once

#include <vector>

#include "qts/qsim/pauli.hpp"

namespace qts::models {

/// Value-measurement set: X_i, Y_i, Z_i per qubit in qubit order (3n
/// entries), then adjacent Z_i Z_{i+1} ring pairs until dim is reached.
/// Requires 3n <= dim <= 4n.
std::vector<qsim::PauliString> value_observable_set(int n_qubits, int dim);

}  // namespace qts::models
