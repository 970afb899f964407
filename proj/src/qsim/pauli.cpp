#include "qts/qsim/pauli.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace qts::qsim {

PauliString PauliString::zz(int i, int j) {
    if (i == j) throw std::invalid_argument("PauliString::zz: qubits must differ");
    if (i > j) std::swap(i, j);
    return PauliString{{{i, PauliOp::Z}, {j, PauliOp::Z}}};
}

void PauliString::validate(int n_qubits) const {
    int prev = -1;
    for (const auto& [q, op] : factors) {
        if (q < 0 || q >= n_qubits)
            throw std::invalid_argument("PauliString: qubit index out of range");
        if (q <= prev) throw std::invalid_argument("PauliString: qubits must be unique ascending");
        prev = q;
    }
}

std::string PauliString::to_string() const {
    std::string s;
    for (const auto& [q, op] : factors) {
        s += (op == PauliOp::X ? 'X' : op == PauliOp::Y ? 'Y' : 'Z');
        s += std::to_string(q);
    }
    return s.empty() ? "I" : s;
}

namespace {

struct PauliMasks {
    std::uint64_t flip = 0;   // X and Y factors flip the bit
    std::uint64_t phase = 0;  // Y and Z factors contribute (-1)^bit
    int y_count = 0;          // global i^y_count
};

PauliMasks masks_for(const PauliString& obs, int n_qubits) {
    obs.validate(n_qubits);
    PauliMasks m;
    for (const auto& [q, op] : obs.factors) {
        const std::uint64_t bit = std::uint64_t{1} << q;
        switch (op) {
            case PauliOp::X: m.flip |= bit; break;
            case PauliOp::Y:
                m.flip |= bit;
                m.phase |= bit;
                m.y_count += 1;
                break;
            case PauliOp::Z: m.phase |= bit; break;
        }
    }
    return m;
}

// i^k for k in 0..3
inline cplx i_power(int k) {
    switch (k & 3) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

}  // namespace

double expectation(const StateVector& state, const PauliString& obs) {
    const PauliMasks m = masks_for(obs, state.n_qubits());
    const auto amps = state.amplitudes();
    const cplx global = i_power(m.y_count);
    cplx acc{0.0, 0.0};
    for (std::uint64_t k = 0; k < amps.size(); ++k) {
        // P|k> = global * (-1)^parity(k & phase) |k ^ flip>
        const double sign = (std::popcount(k & m.phase) & 1) ? -1.0 : 1.0;
        acc += std::conj(amps[k ^ m.flip]) * (sign * amps[k]);
    }
    acc *= global;
    if (std::abs(acc.imag()) >= 1e-12)
        throw std::runtime_error("expectation: non-negligible imaginary part");
    return acc.real();
}

void apply_pauli(const StateVector& state, const PauliString& obs, std::vector<cplx>& out) {
    const PauliMasks m = masks_for(obs, state.n_qubits());
    const auto amps = state.amplitudes();
    out.assign(amps.size(), cplx{0.0, 0.0});
    const cplx global = i_power(m.y_count);
    for (std::uint64_t k = 0; k < amps.size(); ++k) {
        const double sign = (std::popcount(k & m.phase) & 1) ? -1.0 : 1.0;
        out[k ^ m.flip] = global * sign * amps[k];
    }
}

void accumulate_pauli(const StateVector& state, const PauliString& obs, double weight,
                      std::span<cplx> acc) {
    const PauliMasks m = masks_for(obs, state.n_qubits());
    const auto amps = state.amplitudes();
    const cplx g = weight * i_power(m.y_count);
    for (std::uint64_t k = 0; k < amps.size(); ++k) {
        const double sign = (std::popcount(k & m.phase) & 1) ? -1.0 : 1.0;
        acc[k ^ m.flip] += g * sign * amps[k];
    }
}

}  // namespace qts::qsim
