#pragma once

#include <complex>
#include <span>
#include <vector>

#include "qts/qsim/circuit.hpp"

namespace qts::qsim {

using cplx = std::complex<double>;

enum class Basis { AllZero, AllPlus };

/// Dense statevector over n qubits. Qubit 0 is the least-significant bit of
/// the amplitude index. Rotations use the half-angle convention
/// R_y(theta) = exp(-i theta Y / 2), likewise R_x and R_z.
class StateVector {
  public:
    StateVector() = default;
    explicit StateVector(int n_qubits, Basis basis = Basis::AllZero);

    int n_qubits() const { return n_; }
    std::size_t dim() const { return amp_.size(); }
    std::span<const cplx> amplitudes() const { return amp_; }
    std::span<cplx> amplitudes_mut() { return amp_; }

    void apply_rx(int qubit, double theta);
    void apply_ry(int qubit, double theta);
    void apply_rz(int qubit, double theta);
    void apply_h(int qubit);
    void apply_cnot(int control, int target);

    /// Applies one gate; angle must be given iff the gate is a rotation.
    /// The angle overload taking a Gate with a slot is resolved by run_circuit.
    void apply(const Gate& g, double angle);
    void apply(const Gate& g);

    /// Applies the adjoint of the gate (rotations negate the angle; H and
    /// CNOT are self-inverse).
    void apply_adjoint(const Gate& g, double angle);

    double norm() const;

  private:
    void check_qubit(int qubit) const;

    int n_ = 0;
    std::vector<cplx> amp_;
};

/// Maximum dense-simulation width; guards against runaway allocations.
inline constexpr int kMaxQubits = 24;

StateVector init_state(int n_qubits, Basis basis);

/// Applies the circuit's gates in order with the given slot bindings.
StateVector run_circuit(const ParamCircuit& circuit, std::span<const double> bindings,
                        StateVector initial);

}  // namespace qts::qsim
