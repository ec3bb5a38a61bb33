#include "igo/sde.hpp"

#include <cmath>

#include "igo/csv.hpp"
#include "igo/errors.hpp"
#include "igo/rng.hpp"

namespace igo {

namespace {

void check_field_output(const std::vector<double>& v, std::size_t dim,
                        double t, const char* which) {
    if (v.size() != dim) {
        throw ShapeMismatch(std::string(which) + " returned length " +
                            std::to_string(v.size()) + ", state dimension is " +
                            std::to_string(dim));
    }
    for (std::size_t i = 0; i < dim; ++i) {
        if (!std::isfinite(v[i])) {
            throw DivergedTrajectory(std::string(which) + " non-finite at t=" +
                                     fmt_g17(t) + ", component " +
                                     std::to_string(i));
        }
    }
}

// Number of grid steps covering the horizon; accepts a horizon that is an
// integer multiple of dt up to 1e-9 rounding.
std::size_t grid_steps(double horizon, double dt) {
    const double ratio = horizon / dt;
    const auto rounded = static_cast<std::size_t>(std::llround(ratio));
    if (rounded > 0 && std::abs(static_cast<double>(rounded) * dt - horizon) <= 1e-9) {
        return rounded;
    }
    return static_cast<std::size_t>(std::floor(ratio));
}

}  // namespace

const std::vector<double>& Trajectory::capture_near(double tau) const {
    if (captures.empty()) {
        throw InvalidCapture("no captures recorded");
    }
    auto it = captures.lower_bound(tau);
    if (it == captures.end()) return std::prev(it)->second;
    if (it == captures.begin()) return it->second;
    auto prev = std::prev(it);
    return (tau - prev->first <= it->first - tau) ? prev->second : it->second;
}

std::vector<double> em_step(const std::vector<double>& x, double t, double dt,
                            const SdeSpec& spec, const std::vector<double>& z) {
    if (x.size() != spec.dim || z.size() != spec.dim) {
        throw ShapeMismatch("em_step: state length " + std::to_string(x.size()) +
                            ", noise length " + std::to_string(z.size()) +
                            ", dimension " + std::to_string(spec.dim));
    }
    const std::vector<double> a = spec.drift(x, t);
    check_field_output(a, spec.dim, t, "drift");
    const std::vector<double> b = spec.diffusion(x, t);
    check_field_output(b, spec.dim, t, "diffusion");
    const double sqrt_dt = std::sqrt(dt);
    std::vector<double> out(spec.dim);
    for (std::size_t i = 0; i < spec.dim; ++i) {
        out[i] = x[i] + a[i] * dt + b[i] * z[i] * sqrt_dt;
    }
    return out;
}

Trajectory simulate(const SdeSpec& spec, const std::vector<double>& x0,
                    const EmConfig& cfg) {
    if (x0.size() != spec.dim) {
        throw ShapeMismatch("simulate: x0 length " + std::to_string(x0.size()) +
                            ", dimension " + std::to_string(spec.dim));
    }
    if (!(cfg.dt > 0.0) || cfg.dt > spec.horizon) {
        throw ConfigError("simulate: dt must lie in (0, horizon]");
    }
    const std::size_t steps = grid_steps(spec.horizon, cfg.dt);

    // Snap each capture to its grid index up front.
    std::vector<std::size_t> capture_idx;
    capture_idx.reserve(cfg.capture_times.size());
    for (double tau : cfg.capture_times) {
        if (!(tau > 0.0) || tau > spec.horizon + 1e-12) {
            throw InvalidCapture("capture time " + fmt_g17(tau) +
                                 " outside (0, " + fmt_g17(spec.horizon) + "]");
        }
        auto idx = static_cast<std::size_t>(std::llround(tau / cfg.dt));
        if (idx == 0) idx = 1;
        if (idx > steps) idx = steps;
        capture_idx.push_back(idx);
    }

    RandomStream stream(cfg.seed, cfg.stream_label, cfg.stream_instance);

    Trajectory traj;
    traj.times.resize(steps + 1);
    traj.states = Tensor::zeros({steps + 1, spec.dim});
    std::vector<double> x = x0;
    traj.times[0] = 0.0;
    traj.states.set_row(0, x);
    for (std::size_t j = 0; j < steps; ++j) {
        const double t = static_cast<double>(j) * cfg.dt;
        const std::vector<double> z =
            stream.normal_vec(static_cast<std::uint64_t>(j) * spec.dim, spec.dim);
        x = em_step(x, t, cfg.dt, spec, z);
        for (std::size_t i = 0; i < spec.dim; ++i) {
            if (!std::isfinite(x[i])) {
                throw DivergedTrajectory("iterate non-finite after step " +
                                         std::to_string(j + 1) + " (t=" +
                                         fmt_g17(t + cfg.dt) + "), component " +
                                         std::to_string(i));
            }
        }
        traj.times[j + 1] = static_cast<double>(j + 1) * cfg.dt;
        traj.states.set_row(j + 1, x);
    }
    for (std::size_t k = 0; k < capture_idx.size(); ++k) {
        const std::size_t idx = capture_idx[k];
        traj.captures[traj.times[idx]] = traj.states.row(idx);
    }
    return traj;
}

Tensor simulate_final_ensemble(const SdeSpec& spec,
                               const std::vector<double>& x0,
                               const EmConfig& cfg, std::size_t n) {
    Tensor out = Tensor::zeros({n, spec.dim});
    EmConfig local = cfg;
    local.capture_times.clear();
    for (std::size_t k = 0; k < n; ++k) {
        local.stream_instance = cfg.stream_instance + k;
        const Trajectory traj = simulate(spec, x0, local);
        out.set_row(k, traj.states.row(traj.times.size() - 1));
    }
    return out;
}

FieldFn lotka_volterra_drift(double alpha, double beta, double gamma,
                             double delta) {
    return [alpha, beta, gamma, delta](const std::vector<double>& x,
                                       double) -> std::vector<double> {
        return {alpha * x[0] - beta * x[0] * x[1],
                delta * x[0] * x[1] - gamma * x[1]};
    };
}

FieldFn cat_map_drift() {
    return [](const std::vector<double>& x, double) -> std::vector<double> {
        return {x[1], x[0] + x[1]};
    };
}

FieldFn zero_field(std::size_t dim) {
    return [dim](const std::vector<double>&, double) {
        return std::vector<double>(dim, 0.0);
    };
}

FieldFn constant_field(std::size_t dim, double value) {
    return [dim, value](const std::vector<double>&, double) {
        return std::vector<double>(dim, value);
    };
}

VpKernel vp_kernel(const std::vector<double>& x0, double t,
                   const VpSchedule& schedule) {
    const double integral = schedule.integral(t);
    VpKernel k;
    k.mean.resize(x0.size());
    const double coef = std::exp(-0.5 * integral);
    for (std::size_t i = 0; i < x0.size(); ++i) k.mean[i] = x0[i] * coef;
    k.std = std::sqrt(std::max(0.0, 1.0 - std::exp(-integral)));
    return k;
}

VpTransition vp_transition(double tau, double t, const VpSchedule& schedule) {
    const double gap = schedule.integral(t) - schedule.integral(tau);
    VpTransition tr;
    tr.mean_coef = std::exp(-0.5 * gap);
    tr.std = std::sqrt(std::max(0.0, 1.0 - std::exp(-gap)));
    return tr;
}

SdeSpec make_vp_sde(const VpSchedule& schedule, std::size_t dim,
                    double horizon) {
    SdeSpec spec;
    spec.dim = dim;
    spec.horizon = horizon;
    spec.drift = [schedule, dim](const std::vector<double>& x,
                                 double t) -> std::vector<double> {
        const double c = -0.5 * schedule.beta(t);
        std::vector<double> a(dim);
        for (std::size_t i = 0; i < dim; ++i) a[i] = c * x[i];
        return a;
    };
    spec.diffusion = [schedule, dim](const std::vector<double>&,
                                     double t) -> std::vector<double> {
        return std::vector<double>(dim, std::sqrt(schedule.beta(t)));
    };
    return spec;
}

SdeSpec make_ou_sde(std::size_t dim, double horizon) {
    SdeSpec spec;
    spec.dim = dim;
    spec.horizon = horizon;
    spec.drift = [dim](const std::vector<double>& x, double) {
        std::vector<double> a(dim);
        for (std::size_t i = 0; i < dim; ++i) a[i] = -x[i];
        return a;
    };
    spec.diffusion = constant_field(dim, std::sqrt(2.0));
    return spec;
}

namespace {

std::string state_header(std::size_t dim, const char* t_name) {
    std::string h = t_name;
    for (std::size_t i = 0; i < dim; ++i) h += ",x" + std::to_string(i);
    return h;
}

}  // namespace

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
    const std::size_t dim = traj.states.cols();
    std::vector<std::string> rows;
    rows.reserve(traj.times.size());
    for (std::size_t j = 0; j < traj.times.size(); ++j) {
        std::vector<double> vals;
        vals.reserve(dim + 1);
        vals.push_back(traj.times[j]);
        const std::vector<double> s = traj.states.row(j);
        vals.insert(vals.end(), s.begin(), s.end());
        rows.push_back(csv_row(vals));
    }
    write_csv(path, state_header(dim, "t"), rows);
}

void write_captures_csv(const std::string& path, const Trajectory& traj) {
    const std::size_t dim = traj.states.cols();
    std::vector<std::string> rows;
    rows.reserve(traj.captures.size());
    for (const auto& [tau, state] : traj.captures) {
        std::vector<double> vals;
        vals.reserve(dim + 1);
        vals.push_back(tau);
        vals.insert(vals.end(), state.begin(), state.end());
        rows.push_back(csv_row(vals));
    }
    write_csv(path, state_header(dim, "tau"), rows);
}

}  // namespace igo
