#include "qts/models/observables.hpp"

#include <stdexcept>

namespace qts::models {

std::vector<qsim::PauliString> value_observable_set(int n_qubits, int dim) {
    if (n_qubits < 1) throw std::invalid_argument("value_observable_set: need >= 1 qubit");
    if (dim < 3 * n_qubits)
        throw std::invalid_argument("value_observable_set: dim below the local set size 3n");
    if (dim > 4 * n_qubits)
        throw std::invalid_argument(
            "value_observable_set: dim above 4n is not constructible from local + ring pairs");
    std::vector<qsim::PauliString> obs;
    obs.reserve(static_cast<std::size_t>(dim));
    for (int q = 0; q < n_qubits; ++q) {
        obs.push_back(qsim::PauliString::x(q));
        obs.push_back(qsim::PauliString::y(q));
        obs.push_back(qsim::PauliString::z(q));
    }
    for (int q = 0; static_cast<int>(obs.size()) < dim; ++q)
        obs.push_back(qsim::PauliString::zz(q, (q + 1) % n_qubits));
    return obs;
}

}  // namespace qts::models
