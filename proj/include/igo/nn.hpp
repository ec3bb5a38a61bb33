#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "igo/rng.hpp"
#include "igo/tape.hpp"
#include "igo/tensor.hpp"

namespace igo {

// Interleaved sinusoidal features of a scalar time value:
// [sin(a*w_1), cos(a*w_1), sin(a*w_2), ...] with w_k = 10000^(-2(k-1)/dim)
// and a = 1000*t. `dim` must be even.
std::vector<double> sinusoidal_embed(double t, std::size_t dim);

// One embedding row per entry of `ts`; result is [ts.size(), dim].
Tensor sinusoidal_embed_rows(const std::vector<double>& ts, std::size_t dim);

struct MlpSpec {
    std::vector<std::size_t> widths;  // [in, hidden..., out]
    Activation act = Activation::silu;
    std::size_t time_embed_dim = 16;  // 0 disables time conditioning
    bool final_activation = false;

    std::size_t layer_count() const { return widths.empty() ? 0 : widths.size() - 1; }
    std::size_t in_dim() const { return widths.front(); }
    std::size_t out_dim() const { return widths.back(); }
    void validate() const;
};

// Fully connected stack. When time conditioning is on, the embedding row
// block is concatenated to the input of every layer.
class Mlp {
public:
    Mlp() = default;
    Mlp(MlpSpec spec, const std::string& name_prefix, StreamCursor& init);

    const MlpSpec& spec() const { return spec_; }

    // Applies layers [from, to). Activation follows every layer except the
    // final layer of the whole stack when spec.final_activation is false.
    // `embed` is a [B, time_embed_dim] node, or -1 when conditioning is off.
    Tape::NodeId forward_range(Tape& tape, Tape::NodeId x, Tape::NodeId embed,
                               std::size_t from, std::size_t to);
    Tape::NodeId forward(Tape& tape, Tape::NodeId x, Tape::NodeId embed);

    // Plain evaluation without a caller-managed tape.
    Tensor evaluate(const Tensor& x, double t);

    std::vector<Param*> params();
    std::vector<const Param*> params() const;
    Param& weight(std::size_t layer) { return ws_[layer]; }
    Param& bias(std::size_t layer) { return bs_[layer]; }
    const Param& weight(std::size_t layer) const { return ws_[layer]; }
    const Param& bias(std::size_t layer) const { return bs_[layer]; }

private:
    MlpSpec spec_;
    std::vector<Param> ws_;
    std::vector<Param> bs_;
};

}  // namespace igo
