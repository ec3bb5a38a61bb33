#pragma once

#include <cstdint>
#include <vector>

#include "igo/tape.hpp"

namespace igo {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Adam with bias correction. Moment buffers are keyed by position in the
// parameter list; the list must stay fixed for the optimizer's lifetime.
class Adam {
public:
    Adam(std::vector<Param*> params, AdamConfig cfg);

    // Applies one update from the current Param.grad values and bumps each
    // parameter's version.
    void step();

    // Clears moments and the step counter.
    void reset();

    std::uint64_t step_count() const noexcept { return t_; }
    const AdamConfig& config() const noexcept { return cfg_; }

private:
    std::vector<Param*> params_;
    AdamConfig cfg_;
    std::vector<Tensor> m_;
    std::vector<Tensor> v_;
    std::uint64_t t_ = 0;
};

}  // namespace igo
