#pragma once

#include <memory>
#include <vector>

#include "qts/diff/ops.hpp"
#include "qts/diff/tape.hpp"
#include "qts/qsim/ansatz.hpp"
#include "qts/qsim/pauli.hpp"
#include "qts/qsim/state_vector.hpp"

namespace qts::diff {

enum class GradMethod {
    /// Two shifted circuit evaluations per slot; the documented gradient rule.
    ParamShift,
    /// Single reverse sweep with Pauli generators; exact for this gate set
    /// and far cheaper for deep circuits. Verified against ParamShift.
    Adjoint,
};

/// A parameterized circuit embedded as a differentiable node: encoding slots
/// bind input tensor elements, trainable slots bind parameter elements, and
/// the forward value is the vector of observable expectations.
struct QuantumNode {
    qsim::ParamCircuit circuit;
    qsim::Basis initial = qsim::Basis::AllZero;
    std::vector<qsim::PauliString> observables;
    /// For slot s: index into the input tensor if the slot is Encoding,
    /// or into the parameter tensor if Trainable (-1 in the other vector).
    std::vector<int> input_index;
    std::vector<int> param_index;
    GradMethod grad_method = GradMethod::ParamShift;

    /// Maps encoding slots to input elements in slot order and trainable
    /// slots to parameter elements in slot order.
    static QuantumNode sequential(qsim::ParamCircuit circuit,
                                  std::vector<qsim::PauliString> observables,
                                  qsim::Basis initial = qsim::Basis::AllZero);

    int n_inputs() const;
    int n_params() const;
    void validate() const;

    Tensor forward(const Tensor& inputs, const Tensor& params) const;

    /// Accumulates upstream-weighted gradients into grad_inputs/grad_params
    /// (pass nullptr to skip a side). upstream has one entry per observable.
    void backward(const Tensor& inputs, const Tensor& params, const Tensor& upstream,
                  Tensor* grad_inputs, Tensor* grad_params) const;

  private:
    std::vector<double> bind(const Tensor& inputs, const Tensor& params) const;
    void backward_param_shift(std::vector<double>& bindings, const Tensor& upstream,
                              Tensor* grad_inputs, Tensor* grad_params) const;
    void backward_adjoint(const std::vector<double>& bindings, const Tensor& upstream,
                          Tensor* grad_inputs, Tensor* grad_params) const;
};

/// Tape op evaluating a QuantumNode; output is (1 x observables).
VarId quantum(Tape& t, std::shared_ptr<const QuantumNode> node, VarId inputs, VarId params);

}  // namespace qts::diff
