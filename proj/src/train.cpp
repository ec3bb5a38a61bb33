#include "igo/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "igo/checkpoint.hpp"
#include "igo/csv.hpp"
#include "igo/errors.hpp"
#include "igo/metrics.hpp"
#include "igo/optim.hpp"
#include "igo/rng.hpp"

namespace igo {

namespace {

// Capture times for one sample, in the order fixed by the config.
std::vector<double> sample_taus(const IgoConfig& cfg, double t) {
    if (cfg.tau_rule == TauRule::half_t) return {0.5 * t};
    return cfg.fixed_taus;
}

std::vector<TrainBatch> assemble_gaussian(const Tensor& dataset,
                                          const IgoConfig& cfg,
                                          std::uint64_t seed,
                                          std::size_t step) {
    const std::size_t b = cfg.batch_size;
    const std::size_t d = dataset.cols();
    const std::size_t n_taus =
        cfg.tau_rule == TauRule::half_t ? 1 : cfg.fixed_taus.size();
    RandomStream pick(seed, "train.batch");
    RandomStream tdraw(seed, "train.t");
    RandomStream noise(seed, "train.noise");

    std::vector<TrainBatch> slices(n_taus);
    for (TrainBatch& s : slices) {
        s.x0 = Tensor::zeros({b, d});
        s.t.resize(b);
        s.xt = Tensor::zeros({b, d});
        s.target_t = Tensor::zeros({b, d});
        s.tau.resize(b);
        s.xtau = Tensor::zeros({b, d});
        s.target_tau = Tensor::zeros({b, d});
    }

    for (std::size_t i = 0; i < b; ++i) {
        const std::uint64_t g = static_cast<std::uint64_t>(step) * b + i;
        const std::size_t row = pick.uniform_index(g, dataset.rows());
        const std::vector<double> x0 = dataset.row(row);
        const double t = std::max(tdraw.uniform(g), cfg.t_min);
        const std::vector<double> taus = sample_taus(cfg, t);

        // Chain the corruption through all times in ascending order so the
        // intermediate states are iterates of one trajectory through the
        // Gaussian kernel. One noise slot per chained time, always consumed.
        std::vector<std::pair<double, std::size_t>> chain;  // (time, slot)
        for (std::size_t j = 0; j < taus.size(); ++j) chain.push_back({taus[j], j});
        chain.push_back({t, taus.size()});
        std::stable_sort(chain.begin(), chain.end(),
                         [](const auto& a, const auto& c) { return a.first < c.first; });

        std::vector<double> state = x0;
        double prev_time = 0.0;
        std::vector<std::vector<double>> at_slot(taus.size() + 1);
        for (const auto& [time, slot] : chain) {
            const VpTransition tr = vp_transition(prev_time, time, cfg.schedule);
            const std::vector<double> z = noise.normal_vec(
                (g * (taus.size() + 1) + slot) * d, d);
            std::vector<double> next(d);
            for (std::size_t k = 0; k < d; ++k) {
                next[k] = tr.mean_coef * state[k] + tr.std * z[k];
            }
            state = std::move(next);
            at_slot[slot] = state;
            prev_time = time;
        }

        const std::vector<double>& xt = at_slot[taus.size()];
        const std::vector<double> target_t =
            dsm_target_gaussian(x0, xt, t, cfg.schedule);
        for (std::size_t j = 0; j < n_taus; ++j) {
            TrainBatch& s = slices[j];
            s.x0.set_row(i, x0);
            s.t[i] = t;
            s.xt.set_row(i, xt);
            s.target_t.set_row(i, target_t);
            s.tau[i] = taus[j];
            s.xtau.set_row(i, at_slot[j]);
            s.target_tau.set_row(
                i, dsm_target_gaussian(x0, at_slot[j], taus[j], cfg.schedule));
        }
    }
    return slices;
}

std::vector<TrainBatch> assemble_em(const Tensor& dataset, const SdeSpec& fwd,
                                    const IgoConfig& cfg, std::uint64_t seed,
                                    std::size_t step) {
    const std::size_t b = cfg.batch_size;
    const std::size_t d = dataset.cols();
    const std::size_t n_taus =
        cfg.tau_rule == TauRule::half_t ? 1 : cfg.fixed_taus.size();
    RandomStream pick(seed, "train.batch");
    RandomStream tdraw(seed, "train.t");

    std::vector<TrainBatch> slices(n_taus);
    for (TrainBatch& s : slices) {
        s.x0 = Tensor::zeros({b, d});
        s.t.resize(b);
        s.xt = Tensor::zeros({b, d});
        s.target_t = Tensor::zeros({b, d});
        s.tau.resize(b);
        s.xtau = Tensor::zeros({b, d});
        s.target_tau = Tensor::zeros({b, d});
    }

    EmConfig em;
    em.dt = cfg.em_dt;
    em.seed = seed;
    em.stream_label = "train.traj";

    for (std::size_t i = 0; i < b; ++i) {
        const std::uint64_t g = static_cast<std::uint64_t>(step) * b + i;
        const std::size_t row = pick.uniform_index(g, dataset.rows());
        const std::vector<double> x0 = dataset.row(row);
        em.stream_instance = g;
        const Trajectory traj = simulate(fwd, x0, em);
        const std::size_t last = traj.times.size() - 1;

        // The target needs a predecessor, so the earliest usable index is 1;
        // t additionally leaves room for a capture strictly before it.
        const double t_raw = std::max(tdraw.uniform(g), cfg.t_min);
        std::size_t jt = static_cast<std::size_t>(
            std::llround(t_raw / cfg.em_dt));
        jt = std::clamp<std::size_t>(jt, 2, last);

        auto em_pair = [&](std::size_t j) {
            return dsm_target_em(traj.states.row(j - 1), traj.states.row(j),
                                 traj.times[j - 1], cfg.em_dt, fwd);
        };
        const std::vector<double> target_t = em_pair(jt);

        for (std::size_t s_idx = 0; s_idx < n_taus; ++s_idx) {
            std::size_t jtau;
            if (cfg.tau_rule == TauRule::half_t) {
                jtau = std::clamp<std::size_t>(jt / 2, 1, jt - 1);
            } else {
                jtau = std::clamp<std::size_t>(
                    static_cast<std::size_t>(
                        std::llround(cfg.fixed_taus[s_idx] / cfg.em_dt)),
                    1, last);
            }
            TrainBatch& s = slices[s_idx];
            s.x0.set_row(i, x0);
            s.t[i] = traj.times[jt];
            s.xt.set_row(i, traj.states.row(jt));
            s.target_t.set_row(i, target_t);
            s.tau[i] = traj.times[jtau];
            s.xtau.set_row(i, traj.states.row(jtau));
            s.target_tau.set_row(i, em_pair(jtau));
        }
    }
    return slices;
}

}  // namespace

std::vector<TrainBatch> assemble_batch(const Tensor& dataset,
                                       const SdeSpec& fwd,
                                       const IgoConfig& cfg,
                                       std::uint64_t seed, std::size_t step) {
    if (dataset.rows() == 0) {
        throw ConfigError("assemble_batch: empty dataset");
    }
    if (cfg.corruption == CorruptionKind::gaussian_kernel) {
        return assemble_gaussian(dataset, cfg, seed, step);
    }
    return assemble_em(dataset, fwd, cfg, seed, step);
}

TrainLog train(ScoreNet& net, const Tensor& dataset, const SdeSpec& fwd,
               const IgoConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    if (dataset.rows() == 0) throw ConfigError("train: empty dataset");

    const std::size_t spe =
        cfg.steps_per_epoch > 0
            ? cfg.steps_per_epoch
            : std::max<std::size_t>(1, dataset.rows() / cfg.batch_size);
    const std::size_t total_steps = cfg.epochs * spe;

    // With the regularizer off the objective is plain L, exactly alpha = 1.
    const double alpha = cfg.regularizer_enabled ? cfg.alpha : 1.0;

    Adam opt(net.params(), cfg.adam);
    TrainLog log;
    log.steps.reserve(total_steps);

    for (std::size_t step = 0; step < total_steps; ++step) {
        double l_std = 0.0;
        double l_reg = 0.0;
        try {
            const std::vector<TrainBatch> slices =
                assemble_batch(dataset, fwd, cfg, seed, step);
            zero_grads(net.params());
            l_std = loss_standard(net, slices.front(), cfg, alpha);
            if (alpha < 1.0) {
                l_reg = loss_multi(net, slices, cfg, 1.0 - alpha);
            }
            const double total = alpha * l_std + (1.0 - alpha) * l_reg;
            if (!std::isfinite(total)) {
                throw NumericError("loss value " + std::to_string(total));
            }
            opt.step();

            TrainStepLog row;
            row.step = step + 1;
            row.loss_total = total;
            row.loss_std = l_std;
            row.loss_R = l_reg;
            const WeightDivergence wd = weight_divergence(net);
            row.cos_E = wd.cos_E;
            row.cos_D = wd.cos_D;
            row.eucl_E = wd.eucl_E;
            row.eucl_D = wd.eucl_D;
            log.steps.push_back(row);
        } catch (const NumericError& e) {
            throw DivergedTraining("step " + std::to_string(step + 1) + ": " +
                                   e.what());
        }

        if (cfg.checkpoint_every > 0 && (step + 1) % cfg.checkpoint_every == 0) {
            std::vector<const Param*> cparams;
            for (Param* p : net.params()) cparams.push_back(p);
            save_checkpoint(cfg.checkpoint_prefix + "-step" +
                                std::to_string(step + 1) + ".ckpt",
                            cparams);
        }
    }
    return log;
}

void write_train_log_csv(const std::string& path, const TrainLog& log) {
    std::vector<std::string> rows;
    rows.reserve(log.steps.size());
    for (const TrainStepLog& s : log.steps) {
        rows.push_back(std::to_string(s.step) + "," +
                       csv_row({s.loss_total, s.loss_std, s.loss_R, s.cos_E,
                                s.cos_D, s.eucl_E, s.eucl_D}));
    }
    write_csv(path, "step,loss_total,loss_std,loss_R,cos_E,cos_D,eucl_E,eucl_D",
              rows);
}

}  // namespace igo
