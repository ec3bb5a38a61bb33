#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "igo/tensor.hpp"

namespace igo {

// Vector field over (state, time).
using FieldFn =
    std::function<std::vector<double>(const std::vector<double>&, double)>;

struct SdeSpec {
    std::size_t dim = 0;
    FieldFn drift;      // a(x, t)
    FieldFn diffusion;  // b(x, t), elementwise scale of the noise
    double horizon = 1.0;
};

struct EmConfig {
    double dt = 1e-3;
    std::uint64_t seed = 0;
    std::vector<double> capture_times;  // sorted, in (0, horizon]
    // Noise stream identity; ensembles advance the instance per trajectory.
    std::string stream_label = "sde.em";
    std::uint64_t stream_instance = 0;
};

struct Trajectory {
    std::vector<double> times;
    Tensor states;                               // [times.size(), dim]
    std::map<double, std::vector<double>> captures;  // snapped time -> state

    std::vector<double> state(std::size_t j) const { return states.row(j); }
    std::vector<double> final_state() const {
        return states.row(times.size() - 1);
    }
    // Capture whose snapped time is nearest to tau.
    const std::vector<double>& capture_near(double tau) const;
};

// One Euler–Maruyama update: x + a(x,t)*dt + b(x,t) .* z * sqrt(dt).
std::vector<double> em_step(const std::vector<double>& x, double t, double dt,
                            const SdeSpec& spec, const std::vector<double>& z);

// Full grid walk from t=0 with capture bookkeeping. Capture times snap to
// the nearest grid index; a capture beyond the horizon is rejected.
Trajectory simulate(const SdeSpec& spec, const std::vector<double>& x0,
                    const EmConfig& cfg);

// Final states of n independent trajectories, row k drawn from stream
// instance cfg.stream_instance + k.
Tensor simulate_final_ensemble(const SdeSpec& spec,
                               const std::vector<double>& x0,
                               const EmConfig& cfg, std::size_t n);

FieldFn lotka_volterra_drift(double alpha, double beta, double gamma,
                             double delta);
// Continuous-time embedding of the cat map: (M - I) x with M = [[1,1],[1,2]],
// so unit-time linear flow advances one discrete map application.
FieldFn cat_map_drift();
FieldFn zero_field(std::size_t dim);
FieldFn constant_field(std::size_t dim, double value);

struct VpSchedule {
    double beta_min = 0.1;
    double beta_max = 20.0;

    double beta(double t) const { return beta_min + t * (beta_max - beta_min); }
    // int_0^t beta(s) ds for the linear schedule.
    double integral(double t) const {
        return beta_min * t + 0.5 * t * t * (beta_max - beta_min);
    }
};

struct VpKernel {
    std::vector<double> mean;
    double std = 0.0;
};

// Marginal of the variance-preserving SDE at time t given x0 at time 0.
VpKernel vp_kernel(const std::vector<double>& x0, double t,
                   const VpSchedule& schedule);

// Coefficients of the transition from time tau to t >= tau:
// x_t | x_tau ~ N(mean_coef * x_tau, std^2 I).
struct VpTransition {
    double mean_coef = 1.0;
    double std = 0.0;
};
VpTransition vp_transition(double tau, double t, const VpSchedule& schedule);

SdeSpec make_vp_sde(const VpSchedule& schedule, std::size_t dim,
                    double horizon = 1.0);
// Ornstein–Uhlenbeck: a = -x, b = sqrt(2); marginal from x0=0 at time t is
// N(0, 1 - e^{-2t}).
SdeSpec make_ou_sde(std::size_t dim, double horizon = 1.0);

void write_trajectory_csv(const std::string& path, const Trajectory& traj);
void write_captures_csv(const std::string& path, const Trajectory& traj);

}  // namespace igo
