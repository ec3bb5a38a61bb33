#include "igo/tape.hpp"

#include <cmath>
#include <utility>

#include "igo/errors.hpp"

namespace igo {

Activation activation_from_string(const std::string& s) {
    if (s == "tanh") return Activation::tanh;
    if (s == "relu") return Activation::relu;
    if (s == "silu") return Activation::silu;
    throw ConfigError("unknown activation '" + s + "'");
}

std::string to_string(Activation a) {
    switch (a) {
        case Activation::tanh: return "tanh";
        case Activation::relu: return "relu";
        case Activation::silu: return "silu";
    }
    return "?";
}

void zero_grads(const std::vector<Param*>& params) {
    for (Param* p : params) p->zero_grad();
}

Tape::NodeId Tape::push(Tensor val, std::function<void(Tape&)> back) {
    Node n;
    n.val = std::move(val);
    n.back = std::move(back);
    nodes_.push_back(std::move(n));
    return static_cast<NodeId>(nodes_.size()) - 1;
}

Tape::NodeId Tape::input(Tensor x) {
    require_finite(x, "tape.input");
    return push(std::move(x), {});
}

Tape::NodeId Tape::constant(Tensor x) {
    require_finite(x, "tape.constant");
    return push(std::move(x), {});
}

Tape::NodeId Tape::leaf(Param& p) {
    require_finite(p.value, "tape.leaf(" + p.name + ")");
    NodeId id = push(p.value, {});
    nodes_[id].param = &p;
    nodes_[id].version_at_record = p.version;
    return id;
}

Tape::NodeId Tape::affine(NodeId w, NodeId b, NodeId x) {
    const Tensor& wv = nodes_[w].val;
    const Tensor& bv = nodes_[b].val;
    const Tensor& xv = nodes_[x].val;
    if (wv.shape.size() != 2 || xv.shape.size() != 2 || bv.shape.size() != 1 ||
        xv.cols() != wv.cols() || bv.shape[0] != wv.rows()) {
        throw ShapeMismatch("tape.affine: W " + wv.shape_str() + ", b " +
                            bv.shape_str() + ", x " + xv.shape_str());
    }
    const std::size_t batch = xv.rows();
    const std::size_t in = wv.cols();
    const std::size_t out = wv.rows();
    Tensor y = Tensor::zeros({batch, out});
    for (std::size_t r = 0; r < batch; ++r) {
        for (std::size_t o = 0; o < out; ++o) {
            double acc = bv.data[o];
            for (std::size_t i = 0; i < in; ++i) {
                acc += xv.at(r, i) * wv.at(o, i);
            }
            y.at(r, o) = acc;
        }
    }
    require_finite(y, "tape.affine");
    NodeId id = push(std::move(y), {});
    nodes_[id].back = [id, w, b, x, batch, in, out](Tape& t) {
        const Tensor& gy = t.nodes_[id].grad;
        const Tensor& wv2 = t.nodes_[w].val;
        const Tensor& xv2 = t.nodes_[x].val;
        Tensor& gw = t.nodes_[w].grad;
        Tensor& gb = t.nodes_[b].grad;
        Tensor& gx = t.nodes_[x].grad;
        for (std::size_t r = 0; r < batch; ++r) {
            for (std::size_t o = 0; o < out; ++o) {
                const double g = gy.at(r, o);
                if (g == 0.0) continue;
                gb.data[o] += g;
                for (std::size_t i = 0; i < in; ++i) {
                    gw.at(o, i) += g * xv2.at(r, i);
                    gx.at(r, i) += g * wv2.at(o, i);
                }
            }
        }
    };
    return id;
}

Tape::NodeId Tape::linear(NodeId w, NodeId x) {
    const Tensor& wv = nodes_[w].val;
    const Tensor& xv = nodes_[x].val;
    if (wv.shape.size() != 2 || xv.shape.size() != 2 || xv.cols() != wv.cols()) {
        throw ShapeMismatch("tape.linear: W " + wv.shape_str() + ", x " +
                            xv.shape_str());
    }
    const std::size_t batch = xv.rows();
    const std::size_t in = wv.cols();
    const std::size_t out = wv.rows();
    Tensor y = Tensor::zeros({batch, out});
    for (std::size_t r = 0; r < batch; ++r) {
        for (std::size_t o = 0; o < out; ++o) {
            double acc = 0.0;
            for (std::size_t i = 0; i < in; ++i) {
                acc += xv.at(r, i) * wv.at(o, i);
            }
            y.at(r, o) = acc;
        }
    }
    require_finite(y, "tape.linear");
    NodeId id = push(std::move(y), {});
    nodes_[id].back = [id, w, x, batch, in, out](Tape& t) {
        const Tensor& gy = t.nodes_[id].grad;
        const Tensor& wv2 = t.nodes_[w].val;
        const Tensor& xv2 = t.nodes_[x].val;
        Tensor& gw = t.nodes_[w].grad;
        Tensor& gx = t.nodes_[x].grad;
        for (std::size_t r = 0; r < batch; ++r) {
            for (std::size_t o = 0; o < out; ++o) {
                const double g = gy.at(r, o);
                if (g == 0.0) continue;
                for (std::size_t i = 0; i < in; ++i) {
                    gw.at(o, i) += g * xv2.at(r, i);
                    gx.at(r, i) += g * wv2.at(o, i);
                }
            }
        }
    };
    return id;
}

namespace {

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

double act_forward(Activation a, double v) {
    switch (a) {
        case Activation::tanh: return std::tanh(v);
        case Activation::relu: return v > 0.0 ? v : 0.0;
        case Activation::silu: return v * sigmoid(v);
    }
    return v;
}

double act_derivative(Activation a, double v) {
    switch (a) {
        case Activation::tanh: {
            const double th = std::tanh(v);
            return 1.0 - th * th;
        }
        case Activation::relu:
            return v > 0.0 ? 1.0 : 0.0;
        case Activation::silu: {
            const double s = sigmoid(v);
            return s * (1.0 + v * (1.0 - s));
        }
    }
    return 1.0;
}

}  // namespace

Tape::NodeId Tape::activation(NodeId x, Activation act) {
    const Tensor& xv = nodes_[x].val;
    Tensor y = xv;
    for (double& v : y.data) v = act_forward(act, v);
    require_finite(y, "tape.activation");
    NodeId id = push(std::move(y), {});
    nodes_[id].back = [id, x, act](Tape& t) {
        const Tensor& gy = t.nodes_[id].grad;
        const Tensor& xv2 = t.nodes_[x].val;
        Tensor& gx = t.nodes_[x].grad;
        for (std::size_t k = 0; k < gx.data.size(); ++k) {
            gx.data[k] += gy.data[k] * act_derivative(act, xv2.data[k]);
        }
    };
    return id;
}

Tape::NodeId Tape::concat_cols(NodeId a, NodeId b) {
    const Tensor& av = nodes_[a].val;
    const Tensor& bv = nodes_[b].val;
    if (av.shape.size() != 2 || bv.shape.size() != 2 || av.rows() != bv.rows()) {
        throw ShapeMismatch("tape.concat_cols: " + av.shape_str() + " vs " +
                            bv.shape_str());
    }
    const std::size_t batch = av.rows();
    const std::size_t pa = av.cols();
    const std::size_t pb = bv.cols();
    Tensor y = Tensor::zeros({batch, pa + pb});
    for (std::size_t r = 0; r < batch; ++r) {
        for (std::size_t i = 0; i < pa; ++i) y.at(r, i) = av.at(r, i);
        for (std::size_t i = 0; i < pb; ++i) y.at(r, pa + i) = bv.at(r, i);
    }
    NodeId id = push(std::move(y), {});
    nodes_[id].back = [id, a, b, batch, pa, pb](Tape& t) {
        const Tensor& gy = t.nodes_[id].grad;
        Tensor& ga = t.nodes_[a].grad;
        Tensor& gb = t.nodes_[b].grad;
        for (std::size_t r = 0; r < batch; ++r) {
            for (std::size_t i = 0; i < pa; ++i) ga.at(r, i) += gy.at(r, i);
            for (std::size_t i = 0; i < pb; ++i) gb.at(r, i) += gy.at(r, pa + i);
        }
    };
    return id;
}

Tape::NodeId Tape::add(NodeId a, NodeId b) {
    require_same_shape(nodes_[a].val, nodes_[b].val, "tape.add");
    Tensor y = nodes_[a].val;
    for (std::size_t k = 0; k < y.data.size(); ++k) y.data[k] += nodes_[b].val.data[k];
    require_finite(y, "tape.add");
    NodeId id = push(std::move(y), {});
    nodes_[id].back = [id, a, b](Tape& t) {
        const Tensor& gy = t.nodes_[id].grad;
        Tensor& ga = t.nodes_[a].grad;
        Tensor& gb = t.nodes_[b].grad;
        for (std::size_t k = 0; k < gy.data.size(); ++k) {
            ga.data[k] += gy.data[k];
            gb.data[k] += gy.data[k];
        }
    };
    return id;
}

Tape::NodeId Tape::sub(NodeId a, NodeId b) {
    require_same_shape(nodes_[a].val, nodes_[b].val, "tape.sub");
    Tensor y = nodes_[a].val;
    for (std::size_t k = 0; k < y.data.size(); ++k) y.data[k] -= nodes_[b].val.data[k];
    require_finite(y, "tape.sub");
    NodeId id = push(std::move(y), {});
    nodes_[id].back = [id, a, b](Tape& t) {
        const Tensor& gy = t.nodes_[id].grad;
        Tensor& ga = t.nodes_[a].grad;
        Tensor& gb = t.nodes_[b].grad;
        for (std::size_t k = 0; k < gy.data.size(); ++k) {
            ga.data[k] += gy.data[k];
            gb.data[k] -= gy.data[k];
        }
    };
    return id;
}

Tape::NodeId Tape::scale(NodeId a, double c) {
    Tensor y = nodes_[a].val;
    for (double& v : y.data) v *= c;
    require_finite(y, "tape.scale");
    NodeId id = push(std::move(y), {});
    nodes_[id].back = [id, a, c](Tape& t) {
        const Tensor& gy = t.nodes_[id].grad;
        Tensor& ga = t.nodes_[a].grad;
        for (std::size_t k = 0; k < gy.data.size(); ++k) ga.data[k] += c * gy.data[k];
    };
    return id;
}

Tape::NodeId Tape::weighted_sq_error(NodeId pred, Tensor target,
                                     std::vector<double> row_weights) {
    const Tensor& pv = nodes_[pred].val;
    require_same_shape(pv, target, "tape.weighted_sq_error");
    if (pv.shape.size() != 2 || row_weights.size() != pv.rows()) {
        throw ShapeMismatch("tape.weighted_sq_error: pred " + pv.shape_str() +
                            ", weights " + std::to_string(row_weights.size()));
    }
    const std::size_t batch = pv.rows();
    const std::size_t n = pv.cols();
    double loss = 0.0;
    for (std::size_t r = 0; r < batch; ++r) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = pv.at(r, i) - target.at(r, i);
            acc += d * d;
        }
        loss += row_weights[r] * acc;
    }
    loss /= static_cast<double>(batch);
    Tensor y({}, {loss});
    require_finite(y, "tape.weighted_sq_error");
    NodeId id = push(std::move(y), {});
    nodes_[id].back = [id, pred, target = std::move(target),
                       row_weights = std::move(row_weights), batch, n](Tape& t) {
        const double g = t.nodes_[id].grad.data[0];
        if (g == 0.0) return;
        const Tensor& pv2 = t.nodes_[pred].val;
        Tensor& gp = t.nodes_[pred].grad;
        const double inv_b = 1.0 / static_cast<double>(batch);
        for (std::size_t r = 0; r < batch; ++r) {
            const double c = g * inv_b * 2.0 * row_weights[r];
            for (std::size_t i = 0; i < n; ++i) {
                gp.at(r, i) += c * (pv2.at(r, i) - target.at(r, i));
            }
        }
    };
    return id;
}

Tape::NodeId Tape::sq_norm(NodeId x) {
    const Tensor& xv = nodes_[x].val;
    double acc = 0.0;
    for (double v : xv.data) acc += v * v;
    Tensor y({}, {acc});
    require_finite(y, "tape.sq_norm");
    NodeId id = push(std::move(y), {});
    nodes_[id].back = [id, x](Tape& t) {
        const double g = t.nodes_[id].grad.data[0];
        if (g == 0.0) return;
        const Tensor& xv2 = t.nodes_[x].val;
        Tensor& gx = t.nodes_[x].grad;
        for (std::size_t k = 0; k < gx.data.size(); ++k) {
            gx.data[k] += 2.0 * g * xv2.data[k];
        }
    };
    return id;
}

void Tape::check_versions() const {
    for (const Node& n : nodes_) {
        if (n.param != nullptr && n.param->version != n.version_at_record) {
            throw StaleTape("parameter '" + n.param->name +
                            "' mutated after being recorded (version " +
                            std::to_string(n.version_at_record) + " -> " +
                            std::to_string(n.param->version) + ")");
        }
    }
}

void Tape::backward(NodeId out, const Tensor& out_grad) {
    if (out < 0 || static_cast<std::size_t>(out) >= nodes_.size()) {
        throw ShapeMismatch("tape.backward: invalid node id");
    }
    require_same_shape(nodes_[out].val, out_grad, "tape.backward seed");
    check_versions();
    for (NodeId i = 0; i <= out; ++i) {
        nodes_[i].grad = Tensor::zeros(nodes_[i].val.shape);
    }
    nodes_[out].grad = out_grad;
    for (NodeId i = out; i >= 0; --i) {
        if (nodes_[i].back) nodes_[i].back(*this);
    }
    for (NodeId i = 0; i <= out; ++i) {
        Node& n = nodes_[i];
        if (n.param == nullptr) continue;
        for (std::size_t k = 0; k < n.grad.data.size(); ++k) {
            n.param->grad.data[k] += n.grad.data[k];
        }
    }
}

void Tape::backward_scalar(NodeId out, double seed) {
    if (out < 0 || static_cast<std::size_t>(out) >= nodes_.size() ||
        nodes_[out].val.data.size() != 1) {
        throw ShapeMismatch("tape.backward_scalar: output is not scalar");
    }
    Tensor g = nodes_[out].val;
    g.data[0] = seed;
    backward(out, g);
}

}  // namespace igo
