#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "igo/score_net.hpp"
#include "igo/sde.hpp"

namespace igo {

enum class Pathway { final_path, intermediate };

Pathway pathway_from_string(const std::string& s);
std::string to_string(Pathway p);

struct SamplerConfig {
    std::size_t n_steps = 500;
    double t_start = 1.0;
    Pathway pathway = Pathway::final_path;
    double rtol = 1e-6;
    double atol = 1e-9;
    std::uint64_t seed = 0;
    // The score target blows up at t=0; reversal stops here instead.
    double t_min = 1e-3;
    std::string stream_label = "sample.em";
    std::uint64_t stream_instance = 0;

    void validate(double horizon) const;
};

// Reverse-time Euler–Maruyama from t_start down to t_min:
// x <- x - [f - g^2 s(x,t)] dt + g z sqrt(dt). The final step injects no
// noise so the walk lands on the conditional mean.
std::vector<double> reverse_em(ScoreNet& net, const SdeSpec& spec,
                               const std::vector<double>& x_T,
                               const SamplerConfig& cfg);

// Row-parallel variant: row k of x_T uses noise stream instance
// cfg.stream_instance + k, and each row equals the single-state call bit
// for bit.
Tensor reverse_em_ensemble(ScoreNet& net, const SdeSpec& spec,
                           const Tensor& x_T, const SamplerConfig& cfg);

// Probability-flow ODE dx/dt = f - (1/2) g^2 s(x,t) integrated backward
// with adaptive RK45; deterministic given x_T.
std::vector<double> probability_flow_sample(ScoreNet& net, const SdeSpec& spec,
                                            const std::vector<double>& x_T,
                                            const SamplerConfig& cfg);

// Integrates all rows as one stacked system (shared adaptive step).
Tensor probability_flow_ensemble(ScoreNet& net, const SdeSpec& spec,
                                 const Tensor& x_T, const SamplerConfig& cfg);

// One row per sample, columns x0..x{d-1}; a leading comment line records
// pathway, t_start and seed.
void write_samples_csv(const std::string& path, const Tensor& samples,
                       const SamplerConfig& cfg);

}  // namespace igo
