#include "qts/diff/quantum_node.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qts::diff {

using qsim::Gate;
using qsim::GateKind;
using qsim::ParamCircuit;
using qsim::PauliString;
using qsim::SlotKind;
using qsim::StateVector;

QuantumNode QuantumNode::sequential(ParamCircuit circuit, std::vector<PauliString> observables,
                                    qsim::Basis initial) {
    QuantumNode node;
    node.circuit = std::move(circuit);
    node.observables = std::move(observables);
    node.initial = initial;
    const int n_slots = node.circuit.slot_count();
    node.input_index.assign(static_cast<std::size_t>(n_slots), -1);
    node.param_index.assign(static_cast<std::size_t>(n_slots), -1);
    int in = 0, pr = 0;
    for (int s = 0; s < n_slots; ++s) {
        if (node.circuit.slots[static_cast<std::size_t>(s)] == SlotKind::Encoding) {
            node.input_index[static_cast<std::size_t>(s)] = in++;
        } else {
            node.param_index[static_cast<std::size_t>(s)] = pr++;
        }
    }
    node.validate();
    return node;
}

int QuantumNode::n_inputs() const {
    int mx = -1;
    for (int i : input_index) mx = std::max(mx, i);
    return mx + 1;
}

int QuantumNode::n_params() const {
    int mx = -1;
    for (int i : param_index) mx = std::max(mx, i);
    return mx + 1;
}

void QuantumNode::validate() const {
    circuit.validate();
    const std::size_t n_slots = static_cast<std::size_t>(circuit.slot_count());
    if (input_index.size() != n_slots || param_index.size() != n_slots)
        throw std::invalid_argument("QuantumNode: slot mapping incomplete");
    for (std::size_t s = 0; s < n_slots; ++s) {
        const bool enc = circuit.slots[s] == SlotKind::Encoding;
        const bool has_in = input_index[s] >= 0;
        const bool has_pr = param_index[s] >= 0;
        if (enc != has_in || enc == has_pr)
            throw std::invalid_argument("QuantumNode: slot must map to exactly one source");
    }
    if (observables.empty()) throw std::invalid_argument("QuantumNode: no observables");
    for (const PauliString& p : observables) p.validate(circuit.n_qubits);
}

std::vector<double> QuantumNode::bind(const Tensor& inputs, const Tensor& params) const {
    const std::size_t n_slots = static_cast<std::size_t>(circuit.slot_count());
    if (static_cast<int>(inputs.size()) < n_inputs())
        throw std::invalid_argument("QuantumNode: input tensor too small for slot mapping");
    if (static_cast<int>(params.size()) < n_params())
        throw std::invalid_argument("QuantumNode: parameter tensor too small for slot mapping");
    std::vector<double> b(n_slots);
    for (std::size_t s = 0; s < n_slots; ++s) {
        b[s] = input_index[s] >= 0 ? inputs[static_cast<std::size_t>(input_index[s])]
                                   : params[static_cast<std::size_t>(param_index[s])];
    }
    return b;
}

Tensor QuantumNode::forward(const Tensor& inputs, const Tensor& params) const {
    const std::vector<double> bindings = bind(inputs, params);
    const StateVector state =
        qsim::run_circuit(circuit, bindings, StateVector(circuit.n_qubits, initial));
    Tensor out(1, observables.size());
    for (std::size_t j = 0; j < observables.size(); ++j)
        out.data[j] = qsim::expectation(state, observables[j]);
    return out;
}

void QuantumNode::backward(const Tensor& inputs, const Tensor& params, const Tensor& upstream,
                           Tensor* grad_inputs, Tensor* grad_params) const {
    if (upstream.size() != observables.size())
        throw std::invalid_argument("QuantumNode: upstream size mismatch");
    if (grad_inputs == nullptr && grad_params == nullptr) return;
    std::vector<double> bindings = bind(inputs, params);
    if (grad_method == GradMethod::Adjoint) {
        backward_adjoint(bindings, upstream, grad_inputs, grad_params);
    } else {
        backward_param_shift(bindings, upstream, grad_inputs, grad_params);
    }
}

// Parameter-shift rule: for a rotation slot s,
// d<P>/ds = (<P>(s + pi/2) - <P>(s - pi/2)) / 2, exact for {RX, RY, RZ}.
// Applies to encoding and trainable slots alike.
void QuantumNode::backward_param_shift(std::vector<double>& bindings, const Tensor& upstream,
                                       Tensor* grad_inputs, Tensor* grad_params) const {
    constexpr double kShift = std::numbers::pi / 2.0;
    const std::size_t n_slots = bindings.size();
    for (std::size_t s = 0; s < n_slots; ++s) {
        Tensor* target = input_index[s] >= 0 ? grad_inputs : grad_params;
        if (target == nullptr) continue;
        const int elem = input_index[s] >= 0 ? input_index[s] : param_index[s];
        const double saved = bindings[s];

        bindings[s] = saved + kShift;
        const StateVector plus =
            qsim::run_circuit(circuit, bindings, StateVector(circuit.n_qubits, initial));
        bindings[s] = saved - kShift;
        const StateVector minus =
            qsim::run_circuit(circuit, bindings, StateVector(circuit.n_qubits, initial));
        bindings[s] = saved;

        double acc = 0.0;
        for (std::size_t j = 0; j < observables.size(); ++j) {
            if (upstream.data[j] == 0.0) continue;
            const double d = 0.5 * (qsim::expectation(plus, observables[j]) -
                                    qsim::expectation(minus, observables[j]));
            acc += upstream.data[j] * d;
        }
        target->data[static_cast<std::size_t>(elem)] += acc;
    }
}

namespace {

PauliString generator_of(GateKind kind, int qubit) {
    switch (kind) {
        case GateKind::RX: return PauliString::x(qubit);
        case GateKind::RY: return PauliString::y(qubit);
        default: return PauliString::z(qubit);
    }
}

}  // namespace

// Reverse sweep computing d<O_eff>/d(theta) for every rotation at once, with
// O_eff = sum_j upstream_j P_j. Maintains the pair
//   |phi> = U_i ... U_1 |init>,   |lam> = U_{i+1}^dag ... U_L^dag O_eff |psi>,
// and for U_i = exp(-i theta P/2) contributes grad_i = Im(<lam| P |phi>).
void QuantumNode::backward_adjoint(const std::vector<double>& bindings, const Tensor& upstream,
                                   Tensor* grad_inputs, Tensor* grad_params) const {
    StateVector phi =
        qsim::run_circuit(circuit, bindings, StateVector(circuit.n_qubits, initial));

    StateVector lam(circuit.n_qubits);
    {
        auto acc = lam.amplitudes_mut();
        for (auto& a : acc) a = qsim::cplx{0.0, 0.0};
        for (std::size_t j = 0; j < observables.size(); ++j) {
            if (upstream.data[j] == 0.0) continue;
            qsim::accumulate_pauli(phi, observables[j], upstream.data[j], acc);
        }
    }

    std::vector<qsim::cplx> scratch(phi.dim());
    for (std::size_t gi = circuit.gates.size(); gi-- > 0;) {
        const Gate& g = circuit.gates[gi];
        if (qsim::is_rotation(g.kind)) {
            const std::size_t slot = static_cast<std::size_t>(g.slot);
            const double angle = bindings[slot];
            Tensor* target = input_index[slot] >= 0 ? grad_inputs : grad_params;
            if (target != nullptr) {
                qsim::apply_pauli(phi, generator_of(g.kind, g.target), scratch);
                qsim::cplx ip{0.0, 0.0};
                const auto la = lam.amplitudes();
                for (std::size_t k = 0; k < scratch.size(); ++k)
                    ip += std::conj(la[k]) * scratch[k];
                const int elem =
                    input_index[slot] >= 0 ? input_index[slot] : param_index[slot];
                target->data[static_cast<std::size_t>(elem)] += ip.imag();
            }
            phi.apply_adjoint(g, angle);
            lam.apply_adjoint(g, angle);
        } else {
            phi.apply_adjoint(g, 0.0);
            lam.apply_adjoint(g, 0.0);
        }
    }
}

VarId quantum(Tape& t, std::shared_ptr<const QuantumNode> node, VarId inputs, VarId params) {
    const Tensor vin = t.value(inputs);
    const Tensor vpar = t.value(params);
    Tensor out = node->forward(vin, vpar);
    const bool grad = t.requires_grad(inputs) || t.requires_grad(params);
    return t.emplace(std::move(out), grad,
                     [node, inputs, params, vin, vpar](Tape& tp, const Tensor& g) {
                         Tensor gin(vin.rows, vin.cols);
                         Tensor gpar(vpar.rows, vpar.cols);
                         Tensor* pin = tp.requires_grad(inputs) ? &gin : nullptr;
                         Tensor* ppar = tp.requires_grad(params) ? &gpar : nullptr;
                         node->backward(vin, vpar, g, pin, ppar);
                         if (pin != nullptr) tp.accumulate(inputs, gin);
                         if (ppar != nullptr) tp.accumulate(params, gpar);
                     });
}

}  // namespace qts::diff
