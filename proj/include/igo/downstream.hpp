#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "igo/generator.hpp"
#include "igo/metrics.hpp"
#include "igo/tensor.hpp"

namespace igo {

struct ProjectionResult {
    std::vector<double> latent;
    std::vector<double> output;
    double residual = 0.0;  // ||G(z*) - w||
};

// Minimizes ||G(z) - w||^2 over the latent ball with Adam, clamping after
// every step; returns the best iterate by objective (the start included).
ProjectionResult project_to_range(const Generator& gen,
                                  const std::vector<double>& w,
                                  std::size_t steps = 100, double lr = 0.001,
                                  std::uint64_t seed = 0);

// Projected power method w <- normalize(project(V w)). A union generator
// projects onto both ranges and keeps the larger Rayleigh quotient.
std::vector<double> ppower(const Tensor& V, const Generator& gen,
                           std::size_t iters, std::uint64_t seed);

struct MeasurementModel {
    Tensor A;                    // [m, n], i.i.d. N(0,1)/sqrt(m)
    std::vector<double> y;       // A x_true + noise
    double noise_std = 0.0;
    std::vector<double> x_true;  // retained for evaluation only
};

MeasurementModel make_measurement(const std::vector<double>& x_true,
                                  std::size_t m, double noise_std,
                                  std::uint64_t seed,
                                  std::uint64_t instance = 0);

struct CsgmOptions {
    std::size_t steps = 2000;
    double lr = 0.02;
    std::size_t restarts = 1;
    // Exact quadratic line search along -grad; linear_rig only.
    bool line_search = false;
};

struct CsgmResult {
    std::vector<double> x_hat;
    std::vector<double> latent;
    double objective = 0.0;      // ||A x_hat - y||^2
    double residual = 0.0;       // ||A x_hat - y||
    double rel_error = -1.0;     // vs x_true when available, else -1
};

// Gradient descent on ||A G(z) - y||^2 over the latent ball.
CsgmResult csgm_recover(const MeasurementModel& model, const Generator& gen,
                        const CsgmOptions& opts, std::uint64_t seed);

struct SweepRow {
    std::size_t m = 0;
    double mean_rel_error = 0.0;
};

struct SweepTable {
    std::vector<SweepRow> rows;
};

// Recovery-error curve over measurement counts: fresh Gaussian A and
// in-range x_true per trial, relative error averaged per m.
SweepTable sample_complexity_sweep(const Generator& gen,
                                   const std::vector<std::size_t>& m_list,
                                   std::size_t trials, std::uint64_t seed,
                                   const CsgmOptions& opts = {});

struct RangeProbeReport {
    std::vector<double> base_nearest;  // per test point, base cloud
    std::vector<double> sum_nearest;   // per test point, Minkowski-sum cloud
    double coverage = 0.0;  // fraction with strictly smaller sum distance
};

// Compares nearest-sample distances for each test point under the base
// generator alone and under base(z1) + inter(z2). The base draws are
// shared between the two clouds, so a zero inter map reproduces the base
// distances exactly.
RangeProbeReport range_expansion_probe(const Generator& base,
                                       const Generator& inter,
                                       const Tensor& test_set,
                                       std::size_t n_samples,
                                       std::uint64_t seed);

// Max sampled ratio ||G(z1)-G(z2)|| / ||z1-z2||; a lower bound on the true
// Lipschitz constant.
double lipschitz_estimate(const Generator& gen, std::size_t n_pairs,
                          std::uint64_t seed);

// Uniform draw from the radius-r ball in R^k, addressed by
// (seed, label, index); label + ".r" supplies the radial coordinate.
std::vector<double> ball_latent(std::size_t k, double r, std::uint64_t seed,
                                const std::string& label,
                                std::uint64_t index = 0);

void write_sweep_csv(const std::string& path, const SweepTable& table,
                     const std::string& meta_comment);
void write_probe_csv(const std::string& path, const RangeProbeReport& report,
                     const std::string& meta_comment);

// weight_divergence(const ScoreNet&) comes from metrics.hpp.

}  // namespace igo
