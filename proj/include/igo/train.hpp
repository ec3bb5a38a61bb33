#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "igo/losses.hpp"
#include "igo/score_net.hpp"
#include "igo/sde.hpp"

namespace igo {

struct TrainStepLog {
    std::size_t step = 0;
    double loss_total = 0.0;
    double loss_std = 0.0;
    double loss_R = 0.0;
    double cos_E = 0.0;
    double cos_D = 0.0;
    double eucl_E = 0.0;
    double eucl_D = 0.0;
};

struct TrainLog {
    std::vector<TrainStepLog> steps;
};

// Batch slices for one optimization step: every slice shares the clean
// samples and the (xt, t) standard-loss fields; slices differ in their
// intermediate capture (xtau, tau). Assembly consumes the same random
// draws regardless of alpha so loss-weighting choices never shift the
// stream.
std::vector<TrainBatch> assemble_batch(const Tensor& dataset,
                                       const SdeSpec& fwd,
                                       const IgoConfig& cfg,
                                       std::uint64_t seed, std::size_t step);

// Runs epochs * steps_per_epoch optimization steps of
// alpha * L_standard + (1 - alpha) * sum_tau R. Deterministic given seed.
TrainLog train(ScoreNet& net, const Tensor& dataset, const SdeSpec& fwd,
               const IgoConfig& cfg, std::uint64_t seed);

void write_train_log_csv(const std::string& path, const TrainLog& log);

}  // namespace igo
