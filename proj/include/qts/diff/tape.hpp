#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <vector>

#include "qts/diff/tensor.hpp"

namespace qts::diff {

using VarId = int;

/// Reverse-mode tape. Nodes are appended in evaluation order, so creation
/// order is a topological order and backward() is a single reverse sweep
/// touching each node once.
class Tape {
  public:
    struct Node {
        Tensor value;
        Tensor grad;  // allocated lazily on first accumulation
        bool requires_grad = false;
        // Backward hook: receives this node's output grad, accumulates into
        // parents via Tape::accumulate.
        std::function<void(Tape&, const Tensor& out_grad)> backward;
    };

    VarId leaf(Tensor value, bool requires_grad = false);

    VarId emplace(Tensor value, bool requires_grad,
                  std::function<void(Tape&, const Tensor&)> backward);

    const Tensor& value(VarId id) const { return nodes_[static_cast<std::size_t>(id)].value; }
    bool requires_grad(VarId id) const {
        return nodes_[static_cast<std::size_t>(id)].requires_grad;
    }
    /// Zero tensor of the node's shape if no gradient was accumulated.
    const Tensor& grad(VarId id);

    void accumulate(VarId id, const Tensor& g);
    /// Adds weight * g into the node's grad buffer.
    void accumulate_scaled(VarId id, const Tensor& g, double weight);

    /// Seeds the root (must be scalar) with 1 and sweeps the tape in reverse.
    void backward(VarId root);
    void backward(VarId root, const Tensor& seed);

    std::size_t size() const { return nodes_.size(); }

    /// Process-wide count of backward sweeps; used to assert that validation
    /// passes never trigger gradient work.
    static std::uint64_t backward_sweeps() { return sweeps_.load(); }

  private:
    void ensure_grad(Node& n);

    std::vector<Node> nodes_;
    static std::atomic<std::uint64_t> sweeps_;
};

}  // namespace qts::diff
