#pragma once

#include <cstdint>
#include <vector>

#include "igo/nn.hpp"
#include "igo/tape.hpp"
#include "igo/tensor.hpp"

namespace igo {

struct ScoreNetSpec {
    std::size_t data_dim = 2;
    std::size_t hidden = 64;
    std::size_t encoder_depth = 1;
    std::size_t core_depth = 2;
    // Core layer where the intermediate pathway enters; default is the
    // middle layer core_depth / 2.
    std::size_t tap_layer = kDefaultTap;
    std::size_t time_embed_dim = 16;
    Activation act = Activation::silu;

    static constexpr std::size_t kDefaultTap = static_cast<std::size_t>(-1);
    std::size_t resolved_tap() const {
        return tap_layer == kDefaultTap ? core_depth / 2 : tap_layer;
    }
    void validate() const;
};

// Score model s = D ∘ S ∘ E with a second entry point into the trunk:
// the intermediate pathway D_tau ∘ S_tau ∘ E_tau, where S_tau is the core
// sub-stack from tap_layer to the end. E_tau and D_tau are single affine
// layers initialized from half the matching outer weights.
class ScoreNet {
public:
    ScoreNet(ScoreNetSpec spec, std::uint64_t seed);

    const ScoreNetSpec& spec() const { return spec_; }
    std::size_t tap_layer() const { return tap_; }

    // Embedding rows for per-sample times, as a constant node.
    Tape::NodeId embed_node(Tape& tape, const std::vector<double>& times);

    // Full pathway D(S(E(x))). x is [B, data_dim].
    Tape::NodeId forward_full(Tape& tape, Tape::NodeId x, Tape::NodeId embed);
    // Intermediate pathway D_tau(S_tau(E_tau(x))).
    Tape::NodeId forward_intermediate(Tape& tape, Tape::NodeId x,
                                      Tape::NodeId embed);

    // Tape-free evaluation at a single time for all rows of x.
    Tensor score(const Tensor& x, double t);
    Tensor score_intermediate(const Tensor& x, double tau);
    std::vector<double> score_at(const std::vector<double>& x, double t);

    std::vector<Param*> params();
    std::vector<Param*> outer_params();       // E, S, D
    std::vector<Param*> inter_params();       // E_tau, D_tau
    // Parameters the regularizer is allowed to touch:
    // E_tau, D_tau and core layers >= tap_layer.
    std::vector<Param*> restricted_params();

    Mlp& encoder() { return encoder_; }
    Mlp& core() { return core_; }
    Mlp& decoder() { return decoder_; }
    Mlp& inter_encoder() { return inter_encoder_; }
    Mlp& inter_decoder() { return inter_decoder_; }
    const Mlp& encoder() const { return encoder_; }
    const Mlp& core() const { return core_; }
    const Mlp& decoder() const { return decoder_; }
    const Mlp& inter_encoder() const { return inter_encoder_; }
    const Mlp& inter_decoder() const { return inter_decoder_; }

private:
    ScoreNetSpec spec_;
    std::size_t tap_ = 0;
    Mlp encoder_;
    Mlp core_;
    Mlp decoder_;
    Mlp inter_encoder_;
    Mlp inter_decoder_;
};

}  // namespace igo
