#include "igo/losses.hpp"

#include <cmath>

#include "igo/errors.hpp"

namespace igo {

std::vector<double> dsm_target_gaussian(const std::vector<double>& x0,
                                        const std::vector<double>& xt,
                                        double t, const VpSchedule& schedule) {
    const VpKernel k = vp_kernel(x0, t, schedule);
    if (k.std <= 0.0) {
        throw ZeroVariance("dsm_target_gaussian: no corruption noise at t=" +
                           std::to_string(t));
    }
    const double inv_var = 1.0 / (k.std * k.std);
    std::vector<double> target(x0.size());
    for (std::size_t i = 0; i < x0.size(); ++i) {
        target[i] = (k.mean[i] - xt[i]) * inv_var;
    }
    return target;
}

std::vector<double> dsm_target_em(const std::vector<double>& x_prev,
                                  const std::vector<double>& x_next, double t,
                                  double dt, const SdeSpec& spec) {
    const std::vector<double> a = spec.drift(x_prev, t);
    const std::vector<double> b = spec.diffusion(x_prev, t);
    std::vector<double> target(x_prev.size());
    for (std::size_t i = 0; i < x_prev.size(); ++i) {
        if (b[i] == 0.0) {
            throw DegenerateDiffusion(
                "dsm_target_em: zero diffusion in component " +
                std::to_string(i) + " at t=" + std::to_string(t));
        }
        target[i] = (x_prev[i] + a[i] * dt - x_next[i]) / (b[i] * b[i] * dt);
    }
    return target;
}

LambdaFn lambda_constant() {
    return [](double) { return 1.0; };
}

LambdaFn lambda_sigma_sq(const VpSchedule& schedule) {
    return [schedule](double t) {
        const double s = vp_kernel({0.0}, t, schedule).std;
        return s * s;
    };
}

double IgoConfig::lambda(double t) const {
    const double v = lambda_schedule ? lambda_schedule(t) : 1.0;
    if (!(v > 0.0)) {
        throw ConfigError("lambda(" + std::to_string(t) +
                          ") = " + std::to_string(v) + " is not positive");
    }
    return v;
}

void IgoConfig::validate() const {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw ConfigError("alpha must lie in [0, 1]");
    }
    if (batch_size == 0) throw ConfigError("batch_size must be positive");
    if (!(t_min > 0.0)) throw ConfigError("t_min must be positive");
    if (tau_rule == TauRule::fixed_list && fixed_taus.empty()) {
        throw EmptyIterateList("fixed_list tau rule needs at least one time");
    }
}

void TrainBatch::validate() const {
    const std::size_t b = t.size();
    if (x0.rows() != b || xt.rows() != b || target_t.rows() != b ||
        tau.size() != b || xtau.rows() != b || target_tau.rows() != b) {
        throw ShapeMismatch("TrainBatch: arrays disagree on the batch size");
    }
}

namespace {

std::vector<double> lambda_weights(const IgoConfig& cfg,
                                   const std::vector<double>& times) {
    std::vector<double> w(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) w[i] = cfg.lambda(times[i]);
    return w;
}

}  // namespace

double loss_standard(ScoreNet& net, const TrainBatch& batch,
                     const IgoConfig& cfg, double grad_scale) {
    batch.validate();
    Tape tape;
    auto embed = net.embed_node(tape, batch.t);
    auto out = net.forward_full(tape, tape.constant(batch.xt), embed);
    auto loss = tape.weighted_sq_error(out, batch.target_t,
                                       lambda_weights(cfg, batch.t));
    if (grad_scale != 0.0) tape.backward_scalar(loss, grad_scale);
    return tape.value(loss).data[0];
}

double loss_igo(ScoreNet& net, const TrainBatch& batch, const IgoConfig& cfg,
                double grad_scale) {
    batch.validate();
    Tape tape;
    auto embed = net.embed_node(tape, batch.tau);
    auto out = net.forward_intermediate(tape, tape.constant(batch.xtau), embed);
    auto loss = tape.weighted_sq_error(out, batch.target_tau,
                                       lambda_weights(cfg, batch.tau));
    if (grad_scale != 0.0) tape.backward_scalar(loss, grad_scale);
    return tape.value(loss).data[0];
}

double loss_multi(ScoreNet& net, const std::vector<TrainBatch>& slices,
                  const IgoConfig& cfg, double grad_scale) {
    if (slices.empty()) {
        throw EmptyIterateList("loss_multi: no capture-time slices");
    }
    double total = 0.0;
    for (const TrainBatch& slice : slices) {
        total += loss_igo(net, slice, cfg, grad_scale);
    }
    return total;
}

}  // namespace igo
