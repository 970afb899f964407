#pragma once

#include <random>
#include <vector>

#include "qts/qsim/circuit.hpp"
#include "qts/qsim/pauli.hpp"

namespace qts::testing {

struct RandomCircuit {
    qsim::ParamCircuit circuit;
    std::vector<double> bindings;
};

inline RandomCircuit random_circuit(std::mt19937_64& rng, int n_qubits, int n_gates,
                                    double encoding_fraction = 0.0) {
    std::uniform_int_distribution<int> kind_dist(0, 4);
    std::uniform_int_distribution<int> qubit_dist(0, n_qubits - 1);
    std::uniform_real_distribution<double> angle_dist(-3.14159, 3.14159);
    std::uniform_real_distribution<double> frac(0.0, 1.0);

    RandomCircuit rc;
    rc.circuit.n_qubits = n_qubits;
    for (int i = 0; i < n_gates; ++i) {
        const int kind = kind_dist(rng);
        const int q = qubit_dist(rng);
        switch (kind) {
            case 0:
            case 1:
            case 2: {
                const auto gk = kind == 0   ? qsim::GateKind::RX
                                : kind == 1 ? qsim::GateKind::RY
                                            : qsim::GateKind::RZ;
                const auto sk = frac(rng) < encoding_fraction ? qsim::SlotKind::Encoding
                                                              : qsim::SlotKind::Trainable;
                rc.circuit.add_rotation(gk, q, sk);
                rc.bindings.push_back(angle_dist(rng));
                break;
            }
            case 3: rc.circuit.add_h(q); break;
            default: {
                if (n_qubits < 2) {
                    rc.circuit.add_h(q);
                    break;
                }
                int t = qubit_dist(rng);
                while (t == q) t = qubit_dist(rng);
                rc.circuit.add_cnot(q, t);
                break;
            }
        }
    }
    rc.circuit.validate();
    return rc;
}

inline qsim::PauliString random_pauli(std::mt19937_64& rng, int n_qubits, int max_factors = 3) {
    std::uniform_int_distribution<int> count_dist(1, std::min(max_factors, n_qubits));
    std::uniform_int_distribution<int> op_dist(0, 2);
    const int count = count_dist(rng);
    std::vector<int> qubits(static_cast<std::size_t>(n_qubits));
    for (int q = 0; q < n_qubits; ++q) qubits[static_cast<std::size_t>(q)] = q;
    std::shuffle(qubits.begin(), qubits.end(), rng);
    qubits.resize(static_cast<std::size_t>(count));
    std::sort(qubits.begin(), qubits.end());
    qsim::PauliString p;
    for (int q : qubits) {
        const auto op = static_cast<qsim::PauliOp>(op_dist(rng));
        p.factors.emplace_back(q, op);
    }
    return p;
}

}  // namespace qts::testing
