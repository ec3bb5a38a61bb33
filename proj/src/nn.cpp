#include "igo/nn.hpp"

#include <cmath>

#include "igo/errors.hpp"

namespace igo {

std::vector<double> sinusoidal_embed(double t, std::size_t dim) {
    if (dim % 2 != 0) {
        throw OddDim("sinusoidal_embed: dim " + std::to_string(dim) +
                     " is not even");
    }
    std::vector<double> out(dim);
    const double a = 1000.0 * t;
    const std::size_t pairs = dim / 2;
    for (std::size_t k = 0; k < pairs; ++k) {
        const double omega =
            std::pow(10000.0, -2.0 * static_cast<double>(k) /
                                  static_cast<double>(dim));
        out[2 * k] = std::sin(a * omega);
        out[2 * k + 1] = std::cos(a * omega);
    }
    return out;
}

Tensor sinusoidal_embed_rows(const std::vector<double>& ts, std::size_t dim) {
    Tensor out = Tensor::zeros({ts.size(), dim});
    for (std::size_t r = 0; r < ts.size(); ++r) {
        out.set_row(r, sinusoidal_embed(ts[r], dim));
    }
    return out;
}

void MlpSpec::validate() const {
    if (widths.size() < 2) {
        throw ShapeMismatch("MlpSpec: need at least input and output widths");
    }
    for (std::size_t w : widths) {
        if (w == 0) throw ShapeMismatch("MlpSpec: zero layer width");
    }
    if (time_embed_dim % 2 != 0) {
        throw OddDim("MlpSpec: time_embed_dim " +
                     std::to_string(time_embed_dim) + " is not even");
    }
}

Mlp::Mlp(MlpSpec spec, const std::string& name_prefix, StreamCursor& init)
    : spec_(std::move(spec)) {
    spec_.validate();
    const std::size_t layers = spec_.layer_count();
    ws_.reserve(layers);
    bs_.reserve(layers);
    for (std::size_t l = 0; l < layers; ++l) {
        const std::size_t fan_in = spec_.widths[l] + spec_.time_embed_dim;
        const std::size_t fan_out = spec_.widths[l + 1];
        Tensor w = Tensor::zeros({fan_out, fan_in});
        const double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
        for (double& v : w.data) v = scale * init.normal();
        ws_.emplace_back(name_prefix + ".w" + std::to_string(l), std::move(w));
        bs_.emplace_back(name_prefix + ".b" + std::to_string(l),
                         Tensor::zeros({fan_out}));
    }
}

Tape::NodeId Mlp::forward_range(Tape& tape, Tape::NodeId x, Tape::NodeId embed,
                                std::size_t from, std::size_t to) {
    if (from > to || to > spec_.layer_count()) {
        throw ShapeMismatch("Mlp::forward_range: layers [" +
                            std::to_string(from) + ", " + std::to_string(to) +
                            ") out of range");
    }
    if (spec_.time_embed_dim > 0 && embed < 0) {
        throw ShapeMismatch("Mlp::forward_range: missing time embedding node");
    }
    Tape::NodeId h = x;
    for (std::size_t l = from; l < to; ++l) {
        Tape::NodeId in = h;
        if (spec_.time_embed_dim > 0) in = tape.concat_cols(h, embed);
        h = tape.affine(tape.leaf(ws_[l]), tape.leaf(bs_[l]), in);
        const bool last = (l + 1 == spec_.layer_count());
        if (!last || spec_.final_activation) h = tape.activation(h, spec_.act);
    }
    return h;
}

Tape::NodeId Mlp::forward(Tape& tape, Tape::NodeId x, Tape::NodeId embed) {
    return forward_range(tape, x, embed, 0, spec_.layer_count());
}

Tensor Mlp::evaluate(const Tensor& x, double t) {
    Tape tape;
    Tape::NodeId xn = tape.constant(x);
    Tape::NodeId en = -1;
    if (spec_.time_embed_dim > 0) {
        en = tape.constant(sinusoidal_embed_rows(
            std::vector<double>(x.rows(), t), spec_.time_embed_dim));
    }
    return tape.value(forward(tape, xn, en));
}

std::vector<Param*> Mlp::params() {
    std::vector<Param*> out;
    out.reserve(2 * ws_.size());
    for (std::size_t l = 0; l < ws_.size(); ++l) {
        out.push_back(&ws_[l]);
        out.push_back(&bs_[l]);
    }
    return out;
}

std::vector<const Param*> Mlp::params() const {
    std::vector<const Param*> out;
    out.reserve(2 * ws_.size());
    for (std::size_t l = 0; l < ws_.size(); ++l) {
        out.push_back(&ws_[l]);
        out.push_back(&bs_[l]);
    }
    return out;
}

}  // namespace igo
