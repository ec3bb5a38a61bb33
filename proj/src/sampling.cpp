#include "igo/sampling.hpp"

#include <cmath>

#include "igo/csv.hpp"
#include "igo/errors.hpp"
#include "igo/rk45.hpp"
#include "igo/rng.hpp"

namespace igo {

Pathway pathway_from_string(const std::string& s) {
    if (s == "final") return Pathway::final_path;
    if (s == "intermediate") return Pathway::intermediate;
    throw ConfigError("unknown pathway '" + s + "'");
}

std::string to_string(Pathway p) {
    return p == Pathway::final_path ? "final" : "intermediate";
}

void SamplerConfig::validate(double horizon) const {
    if (n_steps == 0) throw ConfigError("sampler: n_steps must be >= 1");
    if (!(rtol > 0.0) || !(atol > 0.0)) {
        throw ConfigError("sampler: tolerances must be positive");
    }
    if (!(t_start > t_min)) {
        throw ConfigError("sampler: t_start must exceed the t_min floor");
    }
    if (t_start > horizon) {
        throw ConfigError("sampler: t_start beyond the process horizon");
    }
}

namespace {

Tensor score_batch(ScoreNet& net, const Tensor& x, double t, Pathway p) {
    return p == Pathway::final_path ? net.score(x, t)
                                    : net.score_intermediate(x, t);
}

void check_state(const Tensor& x, double t) {
    if (!x.all_finite()) {
        throw DivergedSample("reverse walk non-finite at t=" +
                             std::to_string(t));
    }
}

}  // namespace

Tensor reverse_em_ensemble(ScoreNet& net, const SdeSpec& spec,
                           const Tensor& x_T, const SamplerConfig& cfg) {
    cfg.validate(spec.horizon);
    if (x_T.cols() != spec.dim) {
        throw ShapeMismatch("reverse_em: state dimension " +
                            std::to_string(x_T.cols()) + ", process has " +
                            std::to_string(spec.dim));
    }
    const std::size_t rows = x_T.rows();
    const std::size_t d = spec.dim;
    const double dt = (cfg.t_start - cfg.t_min) / static_cast<double>(cfg.n_steps);
    const double sqrt_dt = std::sqrt(dt);

    std::vector<RandomStream> streams;
    streams.reserve(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        streams.emplace_back(cfg.seed, cfg.stream_label,
                             cfg.stream_instance + r);
    }

    Tensor x = x_T;
    for (std::size_t k = 0; k < cfg.n_steps; ++k) {
        const double t = cfg.t_start - static_cast<double>(k) * dt;
        const bool last = (k + 1 == cfg.n_steps);
        const Tensor s = score_batch(net, x, t, cfg.pathway);
        for (std::size_t r = 0; r < rows; ++r) {
            const std::vector<double> state = x.row(r);
            const std::vector<double> f = spec.drift(state, t);
            const std::vector<double> g = spec.diffusion(state, t);
            const std::vector<double> z =
                last ? std::vector<double>(d, 0.0)
                     : streams[r].normal_vec(static_cast<std::uint64_t>(k) * d, d);
            for (std::size_t i = 0; i < d; ++i) {
                const double rev_drift = f[i] - g[i] * g[i] * s.at(r, i);
                x.at(r, i) = state[i] - rev_drift * dt + g[i] * z[i] * sqrt_dt;
            }
        }
        check_state(x, t - dt);
    }
    return x;
}

std::vector<double> reverse_em(ScoreNet& net, const SdeSpec& spec,
                               const std::vector<double>& x_T,
                               const SamplerConfig& cfg) {
    Tensor one({1, x_T.size()}, x_T);
    return reverse_em_ensemble(net, spec, one, cfg).row(0);
}

Tensor probability_flow_ensemble(ScoreNet& net, const SdeSpec& spec,
                                 const Tensor& x_T, const SamplerConfig& cfg) {
    cfg.validate(spec.horizon);
    if (x_T.cols() != spec.dim) {
        throw ShapeMismatch("probability_flow: state dimension " +
                            std::to_string(x_T.cols()) + ", process has " +
                            std::to_string(spec.dim));
    }
    const std::size_t rows = x_T.rows();
    const std::size_t d = spec.dim;

    // All rows ride one stacked ODE system so the score network is
    // evaluated batched per stage.
    const OdeField field = [&](const std::vector<double>& flat,
                               double t) -> std::vector<double> {
        Tensor x({rows, d}, flat);
        const Tensor s = score_batch(net, x, t, cfg.pathway);
        std::vector<double> out(rows * d);
        for (std::size_t r = 0; r < rows; ++r) {
            const std::vector<double> state = x.row(r);
            const std::vector<double> f = spec.drift(state, t);
            const std::vector<double> g = spec.diffusion(state, t);
            for (std::size_t i = 0; i < d; ++i) {
                out[r * d + i] = f[i] - 0.5 * g[i] * g[i] * s.at(r, i);
            }
        }
        return out;
    };

    const std::vector<double> flat_out = rk45_integrate(
        field, x_T.data, cfg.t_start, cfg.t_min, cfg.rtol, cfg.atol);
    return Tensor({rows, d}, flat_out);
}

std::vector<double> probability_flow_sample(ScoreNet& net, const SdeSpec& spec,
                                            const std::vector<double>& x_T,
                                            const SamplerConfig& cfg) {
    Tensor one({1, x_T.size()}, x_T);
    return probability_flow_ensemble(net, spec, one, cfg).row(0);
}

void write_samples_csv(const std::string& path, const Tensor& samples,
                       const SamplerConfig& cfg) {
    std::string header = "# pathway=" + to_string(cfg.pathway) +
                         " t_start=" + fmt_g17(cfg.t_start) +
                         " seed=" + std::to_string(cfg.seed) + "\n";
    std::string cols;
    for (std::size_t i = 0; i < samples.cols(); ++i) {
        if (i > 0) cols += ',';
        cols += "x" + std::to_string(i);
    }
    std::vector<std::string> rows;
    rows.reserve(samples.rows());
    for (std::size_t r = 0; r < samples.rows(); ++r) {
        rows.push_back(csv_row(samples.row(r)));
    }
    write_csv(path, header + cols, rows);
}

}  // namespace igo
