#include "qts/diff/tape.hpp"

#include <stdexcept>

namespace qts::diff {

std::atomic<std::uint64_t> Tape::sweeps_{0};

VarId Tape::leaf(Tensor value, bool requires_grad) {
    Node n;
    n.value = std::move(value);
    n.requires_grad = requires_grad;
    nodes_.push_back(std::move(n));
    return static_cast<VarId>(nodes_.size() - 1);
}

VarId Tape::emplace(Tensor value, bool requires_grad,
                    std::function<void(Tape&, const Tensor&)> backward) {
    Node n;
    n.value = std::move(value);
    n.requires_grad = requires_grad;
    if (requires_grad) n.backward = std::move(backward);
    nodes_.push_back(std::move(n));
    return static_cast<VarId>(nodes_.size() - 1);
}

void Tape::ensure_grad(Node& n) {
    if (n.grad.size() == 0) n.grad = Tensor(n.value.rows, n.value.cols);
}

const Tensor& Tape::grad(VarId id) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    ensure_grad(n);
    return n.grad;
}

void Tape::accumulate(VarId id, const Tensor& g) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (!n.requires_grad) return;
    ensure_grad(n);
    if (!n.grad.same_shape(g)) throw std::invalid_argument("accumulate: gradient shape mismatch");
    for (std::size_t i = 0; i < g.size(); ++i) n.grad.data[i] += g.data[i];
}

void Tape::accumulate_scaled(VarId id, const Tensor& g, double weight) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (!n.requires_grad) return;
    ensure_grad(n);
    if (!n.grad.same_shape(g)) throw std::invalid_argument("accumulate: gradient shape mismatch");
    for (std::size_t i = 0; i < g.size(); ++i) n.grad.data[i] += weight * g.data[i];
}

void Tape::backward(VarId root) {
    const Node& r = nodes_[static_cast<std::size_t>(root)];
    if (r.value.size() != 1) throw std::invalid_argument("backward: root must be a scalar");
    backward(root, Tensor::scalar(1.0));
}

void Tape::backward(VarId root, const Tensor& seed) {
    sweeps_.fetch_add(1, std::memory_order_relaxed);
    Node& r = nodes_[static_cast<std::size_t>(root)];
    if (!r.requires_grad)
        throw std::invalid_argument("backward: root does not require gradients");
    if (!r.value.same_shape(seed)) throw std::invalid_argument("backward: seed shape mismatch");
    accumulate(root, seed);
    for (std::size_t i = nodes_.size(); i-- > 0;) {
        Node& n = nodes_[i];
        if (!n.requires_grad || !n.backward) continue;
        if (n.grad.size() == 0) continue;  // not on any path to the root
        n.backward(*this, n.grad);
    }
}

}  // namespace qts::diff
