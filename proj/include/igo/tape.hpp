#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "igo/tensor.hpp"

namespace igo {

enum class Activation { tanh, relu, silu };

Activation activation_from_string(const std::string& s);
std::string to_string(Activation a);

// A trainable tensor. `version` tracks in-place mutation of `value`; a tape
// records the version of every leaf it touches and refuses to backpropagate
// through stale values.
struct Param {
    Tensor value;
    Tensor grad;
    std::string name;
    std::uint64_t version = 0;

    Param() = default;
    Param(std::string n, Tensor v)
        : value(std::move(v)), grad(Tensor::zeros(value.shape)), name(std::move(n)) {}

    void zero_grad() { grad.fill(0.0); }

    // Call after any in-place edit of `value`.
    void bump() { ++version; }
};

void zero_grads(const std::vector<Param*>& params);

// Reverse-mode tape. Forward ops record values and a backward closure; a
// backward pass seeds the output gradient and accumulates into Param.grad.
// Repeated backward calls keep accumulating (the pass re-propagates from a
// fresh seed each time, so two calls double the parameter gradients).
class Tape {
public:
    using NodeId = int;

    // Differentiable non-parameter leaf (e.g. a latent vector being optimized).
    NodeId input(Tensor x);
    // Non-differentiable data (targets, sensing matrices, embeddings).
    NodeId constant(Tensor x);
    // Parameter leaf; backward adds this node's gradient into p.grad.
    NodeId leaf(Param& p);

    // y = x * W^T + b with x [B,in], W [out,in], b [out].
    NodeId affine(NodeId w, NodeId b, NodeId x);
    // y = x * W^T (no bias term).
    NodeId linear(NodeId w, NodeId x);
    NodeId activation(NodeId x, Activation act);
    NodeId concat_cols(NodeId a, NodeId b);
    NodeId add(NodeId a, NodeId b);
    NodeId sub(NodeId a, NodeId b);
    NodeId scale(NodeId a, double c);

    // Scalar: (1/B) * sum_b row_weight[b] * ||pred_b - target_b||^2.
    NodeId weighted_sq_error(NodeId pred, Tensor target,
                             std::vector<double> row_weights);
    // Scalar: sum of squares over all entries.
    NodeId sq_norm(NodeId x);

    const Tensor& value(NodeId id) const { return nodes_[id].val; }
    // Gradient of the most recent backward pass at this node.
    const Tensor& grad(NodeId id) const { return nodes_[id].grad; }

    void backward(NodeId out, const Tensor& out_grad);
    void backward_scalar(NodeId out, double seed = 1.0);

    std::size_t node_count() const noexcept { return nodes_.size(); }

private:
    struct Node {
        Tensor val;
        Tensor grad;
        std::function<void(Tape&)> back;  // empty for leaves/constants
        Param* param = nullptr;
        std::uint64_t version_at_record = 0;
    };

    NodeId push(Tensor val, std::function<void(Tape&)> back);
    void check_versions() const;

    std::vector<Node> nodes_;
};

}  // namespace igo
