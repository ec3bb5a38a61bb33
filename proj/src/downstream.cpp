#include "igo/downstream.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "igo/csv.hpp"
#include "igo/errors.hpp"
#include "igo/optim.hpp"
#include "igo/rng.hpp"

namespace igo {

namespace {

std::vector<double> normalize_or_throw(const std::vector<double>& v,
                                       const char* where) {
    const double n = norm2(v);
    if (n == 0.0) throw ZeroVector(std::string(where) + ": zero vector");
    return scaled(v, 1.0 / n);
}

// Uniform draw from the radius-r ball, addressed by a sample index.
std::vector<double> ball_point(const RandomStream& normals,
                               const RandomStream& radii, std::uint64_t index,
                               std::size_t k, double r) {
    std::vector<double> g = normals.normal_vec(index * k, k);
    const double gn = norm2(g);
    if (gn == 0.0) return std::vector<double>(k, 0.0);
    const double u = radii.uniform(index);
    const double scale = r * std::pow(u, 1.0 / static_cast<double>(k)) / gn;
    return scaled(g, scale);
}

double sq_residual(const Generator& gen, const std::vector<double>& z,
                   const std::vector<double>& w) {
    const std::vector<double> d = sub(gen.map(z), w);
    return dot(d, d);
}

double rayleigh(const Tensor& V, const std::vector<double>& unit) {
    return dot(unit, matvec(V, unit));
}

void require_square_symmetric(const Tensor& V) {
    if (V.rank() != 2 || V.rows() != V.cols()) {
        throw ShapeMismatch("ppower: V must be square, got " + V.shape_str());
    }
    for (std::size_t i = 0; i < V.rows(); ++i) {
        for (std::size_t j = i + 1; j < V.cols(); ++j) {
            if (std::abs(V.at(i, j) - V.at(j, i)) > 1e-12) {
                throw ShapeMismatch("ppower: V is not symmetric at (" +
                                    std::to_string(i) + "," +
                                    std::to_string(j) + ")");
            }
        }
    }
}

}  // namespace

ProjectionResult project_to_range(const Generator& gen,
                                  const std::vector<double>& w,
                                  std::size_t steps, double lr,
                                  std::uint64_t seed) {
    if (w.size() != gen.output_dim()) {
        throw ShapeMismatch("project_to_range: target length " +
                            std::to_string(w.size()) + ", generator outputs " +
                            std::to_string(gen.output_dim()));
    }
    (void)seed;  // start is deterministic; kept for interface stability

    Param z("proj.z", Tensor({1, gen.latent_dim()},
                             gen.clamp_latent(gen.warm_start(w))));
    std::vector<double> best_z = z.value.row(0);
    double best_obj = sq_residual(gen, best_z, w);

    Adam opt({&z}, {.lr = lr, .beta1 = 0.9, .beta2 = 0.999, .eps = 1e-8});
    const Tensor target({1, w.size()}, w);
    for (std::size_t s = 0; s < steps; ++s) {
        z.zero_grad();
        {
            Tape tape;
            auto out = gen.forward(tape, tape.leaf(z));
            auto obj = tape.sq_norm(tape.sub(out, tape.constant(target)));
            tape.backward_scalar(obj);
        }
        opt.step();
        const std::vector<double> clamped = gen.clamp_latent(z.value.row(0));
        z.value = Tensor({1, clamped.size()}, clamped);
        z.bump();
        const double obj = sq_residual(gen, clamped, w);
        if (obj < best_obj) {
            best_obj = obj;
            best_z = clamped;
        }
    }

    ProjectionResult res;
    res.latent = best_z;
    res.output = gen.map(best_z);
    res.residual = norm2(sub(res.output, w));
    return res;
}

std::vector<double> ppower(const Tensor& V, const Generator& gen,
                           std::size_t iters, std::uint64_t seed) {
    require_square_symmetric(V);
    const std::size_t n = V.rows();
    if (gen.output_dim() != n) {
        throw ShapeMismatch("ppower: generator output dim " +
                            std::to_string(gen.output_dim()) +
                            ", matrix side " + std::to_string(n));
    }
    RandomStream init(seed, "ppower.init");
    std::vector<double> w =
        normalize_or_throw(init.normal_vec(0, n), "ppower start");

    for (std::size_t it = 0; it < iters; ++it) {
        const std::vector<double> u = matvec(V, w);
        if (norm2(u) == 0.0) throw ZeroVector("ppower: V w vanished");
        if (gen.mode() == GeneratorMode::union_both) {
            const Generator gf = gen.final_member();
            const Generator gi = gen.intermediate_member();
            const std::vector<double> pf =
                project_to_range(gf, u, 100, 0.001, seed).output;
            const std::vector<double> pi =
                project_to_range(gi, u, 100, 0.001, seed).output;
            const double nf = norm2(pf);
            const double ni = norm2(pi);
            if (nf == 0.0 && ni == 0.0) {
                throw ZeroVector("ppower: both range projections vanished");
            }
            if (nf == 0.0) {
                w = scaled(pi, 1.0 / ni);
            } else if (ni == 0.0) {
                w = scaled(pf, 1.0 / nf);
            } else {
                const std::vector<double> cf = scaled(pf, 1.0 / nf);
                const std::vector<double> ci = scaled(pi, 1.0 / ni);
                w = rayleigh(V, cf) >= rayleigh(V, ci) ? cf : ci;
            }
        } else {
            const std::vector<double> p =
                project_to_range(gen, u, 100, 0.001, seed).output;
            w = normalize_or_throw(p, "ppower projection");
        }
    }
    return w;
}

MeasurementModel make_measurement(const std::vector<double>& x_true,
                                  std::size_t m, double noise_std,
                                  std::uint64_t seed, std::uint64_t instance) {
    const std::size_t n = x_true.size();
    MeasurementModel model;
    model.noise_std = noise_std;
    model.x_true = x_true;
    model.A = Tensor::zeros({m, n});
    RandomStream a_stream(seed, "meas.A", instance);
    const double scale = m > 0 ? 1.0 / std::sqrt(static_cast<double>(m)) : 1.0;
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            model.A.at(r, c) =
                scale * a_stream.normal(static_cast<std::uint64_t>(r) * n + c);
        }
    }
    model.y = matvec(model.A, x_true);
    if (noise_std > 0.0) {
        RandomStream noise(seed, "meas.noise", instance);
        for (std::size_t r = 0; r < m; ++r) {
            model.y[r] += noise_std * noise.normal(r);
        }
    }
    return model;
}

CsgmResult csgm_recover(const MeasurementModel& model, const Generator& gen,
                        const CsgmOptions& opts, std::uint64_t seed) {
    const std::size_t n = gen.output_dim();
    if (model.A.cols() != n) {
        throw ShapeMismatch("csgm: A has " + std::to_string(model.A.cols()) +
                            " columns, generator outputs " + std::to_string(n));
    }
    if (opts.line_search && gen.mode() != GeneratorMode::linear_rig) {
        throw ConfigError("csgm: exact line search needs the linear rig");
    }
    const std::size_t k = gen.latent_dim();
    const std::size_t m = model.A.rows();
    const Tensor y_row({1, m}, model.y);

    RandomStream z0_normals(seed, "csgm.z0");
    RandomStream z0_radii(seed, "csgm.z0.r");

    auto objective = [&](const std::vector<double>& z) {
        const std::vector<double> r = sub(matvec(model.A, gen.map(z)), model.y);
        return dot(r, r);
    };

    std::vector<double> best_z;
    double best_obj = 0.0;
    bool have_best = false;

    for (std::size_t rs = 0; rs < std::max<std::size_t>(1, opts.restarts); ++rs) {
        std::vector<double> z = gen.clamp_latent(
            ball_point(z0_normals, z0_radii, rs, k, gen.latent_radius()));
        double obj = objective(z);
        if (!have_best || obj < best_obj) {
            best_obj = obj;
            best_z = z;
            have_best = true;
        }

        for (std::size_t s = 0; s < opts.steps; ++s) {
            Param zp("csgm.z", Tensor({1, k}, z));
            {
                Tape tape;
                auto out = gen.forward(tape, tape.leaf(zp));
                auto meas = tape.linear(tape.constant(model.A), out);
                auto diff = tape.sub(meas, tape.constant(y_row));
                tape.backward_scalar(tape.sq_norm(diff));
            }
            const std::vector<double> g = zp.grad.row(0);
            const double gn = norm2(g);
            if (gn == 0.0) break;

            double step_len = opts.lr;
            if (opts.line_search) {
                // Exact minimizer along -g for the linear quadratic:
                // alpha = ||g||^2 / (2 ||A B g||^2).
                const std::vector<double> abg = matvec(model.A, gen.map(g));
                const double denom = 2.0 * dot(abg, abg);
                if (denom == 0.0) break;
                step_len = dot(g, g) / denom;
            }
            for (std::size_t i = 0; i < k; ++i) z[i] -= step_len * g[i];
            z = gen.clamp_latent(z);
            obj = objective(z);
            if (obj < best_obj) {
                best_obj = obj;
                best_z = z;
            }
        }
    }

    CsgmResult res;
    res.latent = best_z;
    res.x_hat = gen.map(best_z);
    res.objective = best_obj;
    res.residual = std::sqrt(best_obj);
    if (!model.x_true.empty()) {
        const double denom = norm2(model.x_true);
        const double err = norm2(sub(res.x_hat, model.x_true));
        res.rel_error = denom > 0.0 ? err / denom : err;
    }
    return res;
}

SweepTable sample_complexity_sweep(const Generator& gen,
                                   const std::vector<std::size_t>& m_list,
                                   std::size_t trials, std::uint64_t seed,
                                   const CsgmOptions& opts) {
    if (!std::is_sorted(m_list.begin(), m_list.end())) {
        throw ConfigError("sample_complexity_sweep: m_list must ascend");
    }
    if (trials == 0) throw ConfigError("sample_complexity_sweep: zero trials");

    RandomStream z_normals(seed, "sweep.z");
    RandomStream z_radii(seed, "sweep.z.r");

    SweepTable table;
    for (std::size_t mi = 0; mi < m_list.size(); ++mi) {
        double acc = 0.0;
        for (std::size_t tr = 0; tr < trials; ++tr) {
            const std::uint64_t instance = mi * trials + tr;
            const std::vector<double> z_star =
                ball_point(z_normals, z_radii, instance, gen.latent_dim(),
                           gen.latent_radius());
            const std::vector<double> x_true = gen.map(z_star);
            const MeasurementModel model =
                make_measurement(x_true, m_list[mi], 0.0, seed, instance);
            const CsgmResult r = csgm_recover(
                model, gen, opts, derive_seed(seed, "sweep.trial", instance));
            acc += r.rel_error;
        }
        table.rows.push_back(
            {m_list[mi], acc / static_cast<double>(trials)});
    }
    return table;
}

RangeProbeReport range_expansion_probe(const Generator& base,
                                       const Generator& inter,
                                       const Tensor& test_set,
                                       std::size_t n_samples,
                                       std::uint64_t seed) {
    if (base.output_dim() != inter.output_dim()) {
        throw ShapeMismatch("range probe: output dims differ, " +
                            std::to_string(base.output_dim()) + " vs " +
                            std::to_string(inter.output_dim()));
    }
    const std::size_t d = base.output_dim();
    if (test_set.rows() > 0 && test_set.cols() != d) {
        throw ShapeMismatch("range probe: test set width " +
                            std::to_string(test_set.cols()) +
                            ", generator outputs " + std::to_string(d));
    }

    RandomStream base_normals(seed, "probe.base");
    RandomStream base_radii(seed, "probe.base.r");
    RandomStream inter_normals(seed, "probe.inter");
    RandomStream inter_radii(seed, "probe.inter.r");

    // The base draws are shared between the two clouds.
    std::vector<std::vector<double>> cloud_base(n_samples);
    std::vector<std::vector<double>> cloud_sum(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
        const std::vector<double> zb = ball_point(
            base_normals, base_radii, i, base.latent_dim(),
            base.latent_radius());
        const std::vector<double> zi = ball_point(
            inter_normals, inter_radii, i, inter.latent_dim(),
            inter.latent_radius());
        cloud_base[i] = base.map(zb);
        cloud_sum[i] = add(cloud_base[i], inter.map(zi));
    }

    RangeProbeReport report;
    std::size_t improved = 0;
    for (std::size_t trow = 0; trow < test_set.rows(); ++trow) {
        const std::vector<double> point = test_set.row(trow);
        double best_base = std::numeric_limits<double>::infinity();
        double best_sum = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n_samples; ++i) {
            best_base = std::min(best_base, norm2(sub(cloud_base[i], point)));
            best_sum = std::min(best_sum, norm2(sub(cloud_sum[i], point)));
        }
        report.base_nearest.push_back(best_base);
        report.sum_nearest.push_back(best_sum);
        if (best_sum < best_base) ++improved;
    }
    report.coverage = test_set.rows() > 0
                          ? static_cast<double>(improved) /
                                static_cast<double>(test_set.rows())
                          : 0.0;
    return report;
}

double lipschitz_estimate(const Generator& gen, std::size_t n_pairs,
                          std::uint64_t seed) {
    if (n_pairs == 0) throw ConfigError("lipschitz_estimate: zero pairs");
    RandomStream a_normals(seed, "lip.a");
    RandomStream a_radii(seed, "lip.a.r");
    RandomStream b_normals(seed, "lip.b");
    RandomStream b_radii(seed, "lip.b.r");

    double best = 0.0;
    for (std::size_t i = 0; i < n_pairs; ++i) {
        const std::vector<double> z1 = ball_point(
            a_normals, a_radii, i, gen.latent_dim(), gen.latent_radius());
        const std::vector<double> z2 = ball_point(
            b_normals, b_radii, i, gen.latent_dim(), gen.latent_radius());
        const double dz = norm2(sub(z1, z2));
        if (dz == 0.0) continue;
        const double dg = norm2(sub(gen.map(z1), gen.map(z2)));
        best = std::max(best, dg / dz);
    }
    return best;
}

std::vector<double> ball_latent(std::size_t k, double r, std::uint64_t seed,
                                const std::string& label,
                                std::uint64_t index) {
    const RandomStream normals(seed, label);
    const RandomStream radii(seed, label + ".r");
    return ball_point(normals, radii, index, k, r);
}

void write_sweep_csv(const std::string& path, const SweepTable& table,
                     const std::string& meta_comment) {
    std::vector<std::string> rows;
    rows.reserve(table.rows.size());
    for (const SweepRow& r : table.rows) {
        rows.push_back(std::to_string(r.m) + "," + fmt_g17(r.mean_rel_error));
    }
    write_csv(path, "# " + meta_comment + "\nm,mean_rel_error", rows);
}

void write_probe_csv(const std::string& path, const RangeProbeReport& report,
                     const std::string& meta_comment) {
    std::vector<std::string> rows;
    rows.reserve(report.base_nearest.size());
    for (std::size_t i = 0; i < report.base_nearest.size(); ++i) {
        rows.push_back(std::to_string(i) + "," +
                       fmt_g17(report.base_nearest[i]) + "," +
                       fmt_g17(report.sum_nearest[i]));
    }
    write_csv(path,
              "# " + meta_comment + " coverage=" + fmt_g17(report.coverage) +
                  "\npoint,base_nearest,sum_nearest",
              rows);
}

}  // namespace igo
