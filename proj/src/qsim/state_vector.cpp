#include "qts/qsim/state_vector.hpp"

#include <cmath>
#include <stdexcept>

namespace qts::qsim {

StateVector::StateVector(int n_qubits, Basis basis) : n_(n_qubits) {
    if (n_qubits < 1 || n_qubits > kMaxQubits)
        throw std::invalid_argument("StateVector: qubit count out of range [1, 24]");
    const std::size_t dim = std::size_t{1} << n_qubits;
    amp_.assign(dim, cplx{0.0, 0.0});
    if (basis == Basis::AllZero) {
        amp_[0] = cplx{1.0, 0.0};
    } else {
        const double a = std::pow(2.0, -0.5 * n_qubits);
        amp_.assign(dim, cplx{a, 0.0});
    }
}

void StateVector::check_qubit(int qubit) const {
    if (qubit < 0 || qubit >= n_) throw std::invalid_argument("gate qubit index out of range");
}

// Single-qubit kernels iterate over (i0, i1) amplitude pairs that differ in
// the target bit; the bit stride follows the LSB-first index convention.

void StateVector::apply_rx(int qubit, double theta) {
    check_qubit(qubit);
    const double c = std::cos(0.5 * theta);
    const double s = std::sin(0.5 * theta);
    const std::size_t step = std::size_t{1} << qubit;
    for (std::size_t base = 0; base < amp_.size(); base += 2 * step) {
        for (std::size_t i0 = base; i0 < base + step; ++i0) {
            const std::size_t i1 = i0 + step;
            const cplx a0 = amp_[i0];
            const cplx a1 = amp_[i1];
            // [[c, -is], [-is, c]]
            amp_[i0] = cplx{c * a0.real() + s * a1.imag(), c * a0.imag() - s * a1.real()};
            amp_[i1] = cplx{s * a0.imag() + c * a1.real(), -s * a0.real() + c * a1.imag()};
        }
    }
}

void StateVector::apply_ry(int qubit, double theta) {
    check_qubit(qubit);
    const double c = std::cos(0.5 * theta);
    const double s = std::sin(0.5 * theta);
    const std::size_t step = std::size_t{1} << qubit;
    for (std::size_t base = 0; base < amp_.size(); base += 2 * step) {
        for (std::size_t i0 = base; i0 < base + step; ++i0) {
            const std::size_t i1 = i0 + step;
            const cplx a0 = amp_[i0];
            const cplx a1 = amp_[i1];
            // [[c, -s], [s, c]]
            amp_[i0] = c * a0 - s * a1;
            amp_[i1] = s * a0 + c * a1;
        }
    }
}

void StateVector::apply_rz(int qubit, double theta) {
    check_qubit(qubit);
    const cplx p0{std::cos(0.5 * theta), -std::sin(0.5 * theta)};
    const cplx p1 = std::conj(p0);
    const std::size_t step = std::size_t{1} << qubit;
    for (std::size_t base = 0; base < amp_.size(); base += 2 * step) {
        for (std::size_t i0 = base; i0 < base + step; ++i0) {
            amp_[i0] *= p0;
            amp_[i0 + step] *= p1;
        }
    }
}

void StateVector::apply_h(int qubit) {
    check_qubit(qubit);
    constexpr double kInvSqrt2 = 0.70710678118654752440;
    const std::size_t step = std::size_t{1} << qubit;
    for (std::size_t base = 0; base < amp_.size(); base += 2 * step) {
        for (std::size_t i0 = base; i0 < base + step; ++i0) {
            const std::size_t i1 = i0 + step;
            const cplx a0 = amp_[i0];
            const cplx a1 = amp_[i1];
            amp_[i0] = kInvSqrt2 * (a0 + a1);
            amp_[i1] = kInvSqrt2 * (a0 - a1);
        }
    }
}

void StateVector::apply_cnot(int control, int target) {
    check_qubit(control);
    check_qubit(target);
    if (control == target) throw std::invalid_argument("CNOT control equals target");
    const std::size_t cbit = std::size_t{1} << control;
    const std::size_t tbit = std::size_t{1} << target;
    for (std::size_t i = 0; i < amp_.size(); ++i) {
        if ((i & cbit) && !(i & tbit)) std::swap(amp_[i], amp_[i | tbit]);
    }
}

void StateVector::apply(const Gate& g, double angle) {
    switch (g.kind) {
        case GateKind::RX: apply_rx(g.target, angle); return;
        case GateKind::RY: apply_ry(g.target, angle); return;
        case GateKind::RZ: apply_rz(g.target, angle); return;
        case GateKind::H:
        case GateKind::CNOT:
            throw std::invalid_argument("apply: angle given for a non-rotation gate");
    }
}

void StateVector::apply(const Gate& g) {
    switch (g.kind) {
        case GateKind::H: apply_h(g.target); return;
        case GateKind::CNOT: apply_cnot(g.control, g.target); return;
        default: throw std::invalid_argument("apply: rotation gate requires an angle");
    }
}

void StateVector::apply_adjoint(const Gate& g, double angle) {
    if (is_rotation(g.kind)) {
        apply(g, -angle);
    } else {
        apply(g);
    }
}

double StateVector::norm() const {
    double s = 0.0;
    for (const cplx& a : amp_) s += std::norm(a);
    return std::sqrt(s);
}

StateVector init_state(int n_qubits, Basis basis) { return StateVector(n_qubits, basis); }

StateVector run_circuit(const ParamCircuit& circuit, std::span<const double> bindings,
                        StateVector initial) {
    if (static_cast<int>(bindings.size()) != circuit.slot_count())
        throw std::invalid_argument("run_circuit: binding length does not match slot count");
    if (initial.n_qubits() != circuit.n_qubits)
        throw std::invalid_argument("run_circuit: initial state qubit count mismatch");
    for (const Gate& g : circuit.gates) {
        if (is_rotation(g.kind)) {
            initial.apply(g, bindings[static_cast<std::size_t>(g.slot)]);
        } else {
            initial.apply(g);
        }
    }
    return initial;
}

}  // namespace qts::qsim
