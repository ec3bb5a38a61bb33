#pragma once

#include <cstdint>
#include <vector>

#include "igo/score_net.hpp"
#include "igo/tape.hpp"
#include "igo/tensor.hpp"

namespace igo {

// final:        z in R^data_dim -> full net D(S(E(z))) at a fixed time.
// intermediate: z in R^hidden   -> D_tau(S_tau(z)), the post-tap map.
// inter_full:   z in R^data_dim -> D_tau(S_tau(E_tau(z))), the whole
//               intermediate pathway (the E_tau-mapped draw of the
//               Minkowski-sum construction).
// linear_rig:   z in R^k        -> B z for an explicit matrix (oracles).
// union_both:   holds final and intermediate together; only ppower
//               consumes this mode, projecting onto each range in turn.
enum class GeneratorMode { final, intermediate, inter_full, linear_rig, union_both };

class Generator {
public:
    static Generator linear_rig(Tensor B, double latent_radius);
    static Generator identity_rig(std::size_t n, double latent_radius);
    static Generator from_net_final(ScoreNet& net, double t_gen,
                                    double latent_radius);
    static Generator from_net_intermediate(ScoreNet& net, double t_gen,
                                           double latent_radius);
    static Generator from_net_inter_full(ScoreNet& net, double t_gen,
                                         double latent_radius);
    static Generator union_of(ScoreNet& net, double t_gen,
                              double latent_radius);

    GeneratorMode mode() const { return mode_; }
    std::size_t latent_dim() const { return latent_dim_; }
    std::size_t output_dim() const { return output_dim_; }
    double latent_radius() const { return radius_; }
    double gen_time() const { return t_gen_; }

    // The two range choices behind union_both.
    Generator final_member() const;
    Generator intermediate_member() const;

    // Differentiable forward for a [B, latent_dim] node.
    Tape::NodeId forward(Tape& tape, Tape::NodeId z) const;

    // Plain evaluation of one latent.
    std::vector<double> map(const std::vector<double>& z) const;

    // Cheap preimage surrogate of an output-space target, used to start
    // range projections: B^T w for the rig, w itself when latent and output
    // spaces coincide, E_tau(w) for the post-tap map.
    std::vector<double> warm_start(const std::vector<double>& w) const;

    // Scales z into the latent ball when it lies outside.
    std::vector<double> clamp_latent(const std::vector<double>& z) const;

private:
    GeneratorMode mode_ = GeneratorMode::linear_rig;
    std::size_t latent_dim_ = 0;
    std::size_t output_dim_ = 0;
    double radius_ = 10.0;
    double t_gen_ = 1e-3;
    Tensor b_;               // linear_rig only
    ScoreNet* net_ = nullptr;  // net-backed modes
};

}  // namespace igo
