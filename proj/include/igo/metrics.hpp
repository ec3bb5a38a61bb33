#pragma once

#include "igo/score_net.hpp"
#include "igo/tensor.hpp"

namespace igo {

// Cosine similarity between flattened tensors; the shorter is zero-padded
// to the longer length. Throws ZeroVector when either input has zero norm.
double cosine_padded(const Tensor& a, const Tensor& b);

// Euclidean distance between flattened, zero-padded tensors.
double euclidean_padded(const Tensor& a, const Tensor& b);

// Drift of the intermediate pathway away from the outer layers it was
// seeded from: first encoder layer vs E_tau, last decoder layer vs D_tau.
struct WeightDivergence {
    double cos_E = 0.0;
    double cos_D = 0.0;
    double eucl_E = 0.0;
    double eucl_D = 0.0;
};

WeightDivergence weight_divergence(const ScoreNet& net);

}  // namespace igo
