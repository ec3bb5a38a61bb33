#pragma once

#include <functional>
#include <vector>

#include "igo/optim.hpp"
#include "igo/score_net.hpp"
#include "igo/sde.hpp"

namespace igo {

// Exact conditional Gaussian score (mean(x0,t) - xt) / std(t)^2 for the
// variance-preserving kernel. t must carry nonzero corruption noise.
std::vector<double> dsm_target_gaussian(const std::vector<double>& x0,
                                        const std::vector<double>& xt,
                                        double t, const VpSchedule& schedule);

// Conditional score of the one-step Euler–Maruyama transition from x_prev
// at time t to x_next: (x_prev + a*dt - x_next) / (b^2 * dt), elementwise.
std::vector<double> dsm_target_em(const std::vector<double>& x_prev,
                                  const std::vector<double>& x_next, double t,
                                  double dt, const SdeSpec& spec);

using LambdaFn = std::function<double(double)>;

LambdaFn lambda_constant();
// lambda(t) = std(t)^2 of the variance-preserving kernel.
LambdaFn lambda_sigma_sq(const VpSchedule& schedule);

enum class TauRule { half_t, fixed_list };
enum class CorruptionKind { gaussian_kernel, em_simulation };

struct IgoConfig {
    double alpha = 0.5;           // weight on the standard loss
    LambdaFn lambda_schedule;     // empty means constant 1
    TauRule tau_rule = TauRule::half_t;
    std::vector<double> fixed_taus;  // used when tau_rule == fixed_list
    std::size_t batch_size = 64;
    std::size_t epochs = 1;
    std::size_t steps_per_epoch = 0;  // 0 derives from dataset / batch size
    AdamConfig adam;
    CorruptionKind corruption = CorruptionKind::gaussian_kernel;
    VpSchedule schedule;   // gaussian_kernel route
    double em_dt = 1e-2;   // em_simulation grid
    double t_min = 1e-3;   // smallest training time
    bool regularizer_enabled = true;
    std::size_t checkpoint_every = 0;  // steps; 0 disables
    std::string checkpoint_prefix;

    double lambda(double t) const;
    void validate() const;
};

struct TrainBatch {
    Tensor x0;               // [B, d] clean samples
    std::vector<double> t;   // per-sample times
    Tensor xt;               // corrupted states at t
    Tensor target_t;         // score targets at (xt, t)
    std::vector<double> tau;
    Tensor xtau;             // intermediate states at tau
    Tensor target_tau;       // score targets at (xtau, tau)

    std::size_t size() const { return t.size(); }
    void validate() const;
};

// Mean over the batch of lambda(t_i) * ||s(xt_i, t_i) - target_i||^2 via
// the full pathway. Backpropagates grad_scale * d(loss) into E, S, D
// unless grad_scale is zero.
double loss_standard(ScoreNet& net, const TrainBatch& batch,
                     const IgoConfig& cfg, double grad_scale = 1.0);

// Same objective through the intermediate pathway at (xtau, tau).
// Gradients reach only E_tau, D_tau and core layers >= tap_layer; every
// other parameter is untouched by construction of the pathway.
double loss_igo(ScoreNet& net, const TrainBatch& batch, const IgoConfig& cfg,
                double grad_scale = 1.0);

// Sum of loss_igo over one batch slice per capture time.
double loss_multi(ScoreNet& net, const std::vector<TrainBatch>& slices,
                  const IgoConfig& cfg, double grad_scale = 1.0);

}  // namespace igo
