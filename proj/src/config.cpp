#include "igo/config.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <utility>

#include "igo/checkpoint.hpp"
#include "igo/csv.hpp"
#include "igo/downstream.hpp"
#include "igo/errors.hpp"
#include "igo/generator.hpp"
#include "igo/losses.hpp"
#include "igo/metrics.hpp"
#include "igo/rng.hpp"
#include "igo/sampling.hpp"
#include "igo/score_net.hpp"
#include "igo/sde.hpp"
#include "igo/train.hpp"

namespace igo {

#define IGO_STR2(x) #x
#define IGO_STR(x) IGO_STR2(x)
const char* const kBuildFingerprint =
    "igo-0.1.0 gcc-" IGO_STR(__GNUC__) "." IGO_STR(__GNUC_MINOR__);
#undef IGO_STR
#undef IGO_STR2

Command command_from_string(const std::string& s) {
    if (s == "simulate") return Command::simulate;
    if (s == "train") return Command::train;
    if (s == "sample") return Command::sample;
    if (s == "gpca") return Command::gpca;
    if (s == "csgm") return Command::csgm;
    if (s == "sweep") return Command::sweep;
    if (s == "probe") return Command::probe;
    if (s == "metrics") return Command::metrics;
    throw ConfigError("unknown command '" + s + "'");
}

std::string to_string(Command c) {
    switch (c) {
        case Command::simulate: return "simulate";
        case Command::train: return "train";
        case Command::sample: return "sample";
        case Command::gpca: return "gpca";
        case Command::csgm: return "csgm";
        case Command::sweep: return "sweep";
        case Command::probe: return "probe";
        case Command::metrics: return "metrics";
    }
    throw ConfigError("invalid command enum value");
}

namespace {

using nlohmann::json;

// Reads one JSON object, tracking which keys were consumed so that any
// leftover key is a hard error naming its full path.
class StrictReader {
public:
    StrictReader(const json& j, std::string path)
        : j_(&j), path_(std::move(path)) {
        if (!j_->is_object()) {
            throw ConfigError(path_.empty()
                                  ? "config root must be an object"
                                  : "config: '" + path_ + "' must be an object");
        }
    }

    template <typename T>
    T get_or(const char* key, T def) {
        seen_.insert(key);
        const auto it = j_->find(key);
        if (it == j_->end()) return def;
        try {
            return it->get<T>();
        } catch (const json::exception&) {
            throw ConfigError("config: bad value for '" + join(key) + "'");
        }
    }

    StrictReader child(const char* key) {
        seen_.insert(key);
        const auto it = j_->find(key);
        if (it == j_->end()) return StrictReader(empty_object(), join(key));
        if (!it->is_object()) {
            throw ConfigError("config: '" + join(key) + "' must be an object");
        }
        return StrictReader(*it, join(key));
    }

    void finish() const {
        for (const auto& item : j_->items()) {
            if (seen_.count(item.key()) == 0) {
                throw ConfigError("config: unknown key '" + join(item.key()) +
                                  "'");
            }
        }
    }

private:
    static const json& empty_object() {
        static const json empty = json::object();
        return empty;
    }

    std::string join(const std::string& key) const {
        return path_.empty() ? key : path_ + "." + key;
    }

    const json* j_;
    std::string path_;
    std::set<std::string> seen_;
};

void require_choice(const std::string& value, const char* key,
                    std::initializer_list<const char*> allowed) {
    for (const char* a : allowed) {
        if (value == a) return;
    }
    throw ConfigError("config: bad value '" + value + "' for '" + key + "'");
}

ProcessSection parse_process(StrictReader r) {
    ProcessSection p;
    p.kind = r.get_or<std::string>("kind", p.kind);
    require_choice(p.kind, "process.kind",
                   {"ou", "vp", "lotka_volterra", "cat_map"});
    p.horizon = r.get_or<double>("horizon", p.horizon);
    p.dt = r.get_or<double>("dt", p.dt);
    p.x0 = r.get_or<std::vector<double>>("x0", p.x0);
    p.n_paths = r.get_or<std::size_t>("n_paths", p.n_paths);
    p.capture_times =
        r.get_or<std::vector<double>>("capture_times", p.capture_times);
    p.beta_min = r.get_or<double>("beta_min", p.beta_min);
    p.beta_max = r.get_or<double>("beta_max", p.beta_max);
    p.lv_alpha = r.get_or<double>("lv_alpha", p.lv_alpha);
    p.lv_beta = r.get_or<double>("lv_beta", p.lv_beta);
    p.lv_gamma = r.get_or<double>("lv_gamma", p.lv_gamma);
    p.lv_delta = r.get_or<double>("lv_delta", p.lv_delta);
    p.diffusion = r.get_or<double>("diffusion", p.diffusion);
    r.finish();
    return p;
}

ModelSection parse_model(StrictReader r) {
    ModelSection m;
    m.data_dim = r.get_or<std::size_t>("data_dim", m.data_dim);
    m.hidden = r.get_or<std::size_t>("hidden", m.hidden);
    m.encoder_depth = r.get_or<std::size_t>("encoder_depth", m.encoder_depth);
    m.core_depth = r.get_or<std::size_t>("core_depth", m.core_depth);
    m.tap_layer = r.get_or<long long>("tap_layer", m.tap_layer);
    m.time_embed_dim = r.get_or<std::size_t>("time_embed_dim", m.time_embed_dim);
    m.act = r.get_or<std::string>("act", m.act);
    activation_from_string(m.act);
    m.checkpoint = r.get_or<std::string>("checkpoint", m.checkpoint);
    r.finish();
    return m;
}

DataSection parse_data(StrictReader r) {
    DataSection d;
    d.kind = r.get_or<std::string>("kind", d.kind);
    require_choice(d.kind, "data.kind", {"gaussian_mixture", "explicit"});
    d.centers = r.get_or<std::vector<std::vector<double>>>("centers", d.centers);
    d.n_per_center = r.get_or<std::size_t>("n_per_center", d.n_per_center);
    d.spread = r.get_or<double>("spread", d.spread);
    d.rows = r.get_or<std::vector<std::vector<double>>>("rows", d.rows);
    r.finish();
    return d;
}

IgoSection parse_igo(StrictReader r) {
    IgoSection g;
    g.alpha = r.get_or<double>("alpha", g.alpha);
    g.lambda = r.get_or<std::string>("lambda", g.lambda);
    require_choice(g.lambda, "igo.lambda", {"constant", "sigma_sq"});
    g.tau_rule = r.get_or<std::string>("tau_rule", g.tau_rule);
    require_choice(g.tau_rule, "igo.tau_rule", {"half_t", "fixed_list"});
    g.fixed_taus = r.get_or<std::vector<double>>("fixed_taus", g.fixed_taus);
    g.batch = r.get_or<std::size_t>("batch", g.batch);
    g.epochs = r.get_or<std::size_t>("epochs", g.epochs);
    g.steps_per_epoch =
        r.get_or<std::size_t>("steps_per_epoch", g.steps_per_epoch);
    g.lr = r.get_or<double>("lr", g.lr);
    g.corruption = r.get_or<std::string>("corruption", g.corruption);
    require_choice(g.corruption, "igo.corruption", {"gaussian", "em"});
    g.em_dt = r.get_or<double>("em_dt", g.em_dt);
    g.t_min = r.get_or<double>("t_min", g.t_min);
    g.regularizer_enabled =
        r.get_or<bool>("regularizer_enabled", g.regularizer_enabled);
    g.checkpoint_every =
        r.get_or<std::size_t>("checkpoint_every", g.checkpoint_every);
    r.finish();
    return g;
}

SamplerSection parse_sampler(StrictReader r) {
    SamplerSection s;
    s.method = r.get_or<std::string>("method", s.method);
    require_choice(s.method, "sampler.method", {"em", "pf"});
    s.pathway = r.get_or<std::string>("pathway", s.pathway);
    pathway_from_string(s.pathway);
    s.n_steps = r.get_or<std::size_t>("n_steps", s.n_steps);
    s.n_samples = r.get_or<std::size_t>("n_samples", s.n_samples);
    s.t_start = r.get_or<double>("t_start", s.t_start);
    s.t_min = r.get_or<double>("t_min", s.t_min);
    s.rtol = r.get_or<double>("rtol", s.rtol);
    s.atol = r.get_or<double>("atol", s.atol);
    r.finish();
    return s;
}

DownstreamSection parse_downstream(StrictReader r) {
    DownstreamSection d;
    d.generator = r.get_or<std::string>("generator", d.generator);
    require_choice(
        d.generator, "downstream.generator",
        {"final", "intermediate", "inter_full", "linear_rig", "union_both"});
    d.radius = r.get_or<double>("radius", d.radius);
    d.gen_time = r.get_or<double>("gen_time", d.gen_time);
    d.rig = r.get_or<std::vector<std::vector<double>>>("rig", d.rig);
    d.rig_inter =
        r.get_or<std::vector<std::vector<double>>>("rig_inter", d.rig_inter);
    d.m_list = r.get_or<std::vector<std::size_t>>("m_list", d.m_list);
    d.trials = r.get_or<std::size_t>("trials", d.trials);
    d.iters = r.get_or<std::size_t>("iters", d.iters);
    d.steps = r.get_or<std::size_t>("steps", d.steps);
    d.lr = r.get_or<double>("lr", d.lr);
    d.restarts = r.get_or<std::size_t>("restarts", d.restarts);
    d.line_search = r.get_or<bool>("line_search", d.line_search);
    d.m = r.get_or<std::size_t>("m", d.m);
    d.noise_std = r.get_or<double>("noise_std", d.noise_std);
    d.gpca_dim = r.get_or<std::size_t>("gpca_dim", d.gpca_dim);
    d.n_pairs = r.get_or<std::size_t>("n_pairs", d.n_pairs);
    d.n_probe_samples =
        r.get_or<std::size_t>("n_probe_samples", d.n_probe_samples);
    d.test_points =
        r.get_or<std::vector<std::vector<double>>>("test_points", d.test_points);
    r.finish();
    return d;
}

json rows_json(const std::vector<std::vector<double>>& rows) {
    json arr = json::array();
    for (const auto& row : rows) arr.push_back(row);
    return arr;
}

json config_json(const ExperimentConfig& cfg) {
    json j;
    j["command"] = to_string(cfg.command);
    j["seed"] = cfg.seed;
    j["output_dir"] = cfg.output_dir;
    j["fingerprint"] = std::string(kBuildFingerprint);

    json p;
    p["kind"] = cfg.process.kind;
    p["horizon"] = cfg.process.horizon;
    p["dt"] = cfg.process.dt;
    p["x0"] = cfg.process.x0;
    p["n_paths"] = cfg.process.n_paths;
    p["capture_times"] = cfg.process.capture_times;
    p["beta_min"] = cfg.process.beta_min;
    p["beta_max"] = cfg.process.beta_max;
    p["lv_alpha"] = cfg.process.lv_alpha;
    p["lv_beta"] = cfg.process.lv_beta;
    p["lv_gamma"] = cfg.process.lv_gamma;
    p["lv_delta"] = cfg.process.lv_delta;
    p["diffusion"] = cfg.process.diffusion;
    j["process"] = p;

    json m;
    m["data_dim"] = cfg.model.data_dim;
    m["hidden"] = cfg.model.hidden;
    m["encoder_depth"] = cfg.model.encoder_depth;
    m["core_depth"] = cfg.model.core_depth;
    m["tap_layer"] = cfg.model.tap_layer;
    m["time_embed_dim"] = cfg.model.time_embed_dim;
    m["act"] = cfg.model.act;
    m["checkpoint"] = cfg.model.checkpoint;
    j["model"] = m;

    json d;
    d["kind"] = cfg.data.kind;
    d["centers"] = rows_json(cfg.data.centers);
    d["n_per_center"] = cfg.data.n_per_center;
    d["spread"] = cfg.data.spread;
    d["rows"] = rows_json(cfg.data.rows);
    j["data"] = d;

    json g;
    g["alpha"] = cfg.igo.alpha;
    g["lambda"] = cfg.igo.lambda;
    g["tau_rule"] = cfg.igo.tau_rule;
    g["fixed_taus"] = cfg.igo.fixed_taus;
    g["batch"] = cfg.igo.batch;
    g["epochs"] = cfg.igo.epochs;
    g["steps_per_epoch"] = cfg.igo.steps_per_epoch;
    g["lr"] = cfg.igo.lr;
    g["corruption"] = cfg.igo.corruption;
    g["em_dt"] = cfg.igo.em_dt;
    g["t_min"] = cfg.igo.t_min;
    g["regularizer_enabled"] = cfg.igo.regularizer_enabled;
    g["checkpoint_every"] = cfg.igo.checkpoint_every;
    j["igo"] = g;

    json s;
    s["method"] = cfg.sampler.method;
    s["pathway"] = cfg.sampler.pathway;
    s["n_steps"] = cfg.sampler.n_steps;
    s["n_samples"] = cfg.sampler.n_samples;
    s["t_start"] = cfg.sampler.t_start;
    s["t_min"] = cfg.sampler.t_min;
    s["rtol"] = cfg.sampler.rtol;
    s["atol"] = cfg.sampler.atol;
    j["sampler"] = s;

    json w;
    w["generator"] = cfg.downstream.generator;
    w["radius"] = cfg.downstream.radius;
    w["gen_time"] = cfg.downstream.gen_time;
    w["rig"] = rows_json(cfg.downstream.rig);
    w["rig_inter"] = rows_json(cfg.downstream.rig_inter);
    w["m_list"] = cfg.downstream.m_list;
    w["trials"] = cfg.downstream.trials;
    w["iters"] = cfg.downstream.iters;
    w["steps"] = cfg.downstream.steps;
    w["lr"] = cfg.downstream.lr;
    w["restarts"] = cfg.downstream.restarts;
    w["line_search"] = cfg.downstream.line_search;
    w["m"] = cfg.downstream.m;
    w["noise_std"] = cfg.downstream.noise_std;
    w["gpca_dim"] = cfg.downstream.gpca_dim;
    w["n_pairs"] = cfg.downstream.n_pairs;
    w["n_probe_samples"] = cfg.downstream.n_probe_samples;
    w["test_points"] = rows_json(cfg.downstream.test_points);
    j["downstream"] = w;

    return j;
}

std::string join_path(const std::string& dir, const char* name) {
    return (std::filesystem::path(dir) / name).string();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << text;
    out.close();
    if (!out) throw IoError("failed writing '" + path + "'");
}

std::string xs_header(std::size_t dim) {
    std::string h;
    for (std::size_t i = 0; i < dim; ++i) {
        if (i) h += ',';
        h += "x" + std::to_string(i);
    }
    return h;
}

Tensor rows_to_tensor(const std::vector<std::vector<double>>& rows,
                      const char* key) {
    if (rows.empty()) {
        throw ConfigError(std::string("config: '") + key + "' is empty");
    }
    const std::size_t cols = rows.front().size();
    Tensor t = Tensor::zeros({rows.size(), cols});
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != cols) {
            throw ConfigError(std::string("config: ragged rows in '") + key +
                              "'");
        }
        t.set_row(i, rows[i]);
    }
    return t;
}

SdeSpec build_sde(const ProcessSection& p, std::size_t dim) {
    if (p.kind == "ou") return make_ou_sde(dim, p.horizon);
    if (p.kind == "vp") {
        return make_vp_sde(VpSchedule{p.beta_min, p.beta_max}, dim, p.horizon);
    }
    if (dim != 2) {
        throw ConfigError("config: process '" + p.kind +
                          "' is two-dimensional, got dim " +
                          std::to_string(dim));
    }
    SdeSpec s;
    s.dim = 2;
    s.horizon = p.horizon;
    s.drift = p.kind == "lotka_volterra"
                  ? lotka_volterra_drift(p.lv_alpha, p.lv_beta, p.lv_gamma,
                                         p.lv_delta)
                  : cat_map_drift();
    s.diffusion = constant_field(2, p.diffusion);
    return s;
}

ScoreNet build_net(const ExperimentConfig& cfg) {
    const ModelSection& m = cfg.model;
    ScoreNetSpec s;
    s.data_dim = m.data_dim;
    s.hidden = m.hidden;
    s.encoder_depth = m.encoder_depth;
    s.core_depth = m.core_depth;
    s.tap_layer = m.tap_layer < 0 ? ScoreNetSpec::kDefaultTap
                                  : static_cast<std::size_t>(m.tap_layer);
    s.time_embed_dim = m.time_embed_dim;
    s.act = activation_from_string(m.act);
    ScoreNet net(s, derive_seed(cfg.seed, "model"));
    if (!m.checkpoint.empty()) load_checkpoint(m.checkpoint, net.params());
    return net;
}

Tensor build_dataset(const DataSection& d, std::size_t dim,
                     std::uint64_t seed) {
    if (d.kind == "explicit") {
        Tensor t = rows_to_tensor(d.rows, "data.rows");
        if (t.cols() != dim) {
            throw ConfigError("config: data.rows width " +
                              std::to_string(t.cols()) +
                              " does not match model.data_dim " +
                              std::to_string(dim));
        }
        return t;
    }
    if (d.centers.empty()) throw ConfigError("config: 'data.centers' is empty");
    if (d.n_per_center == 0) {
        throw ConfigError("config: data.n_per_center must be positive");
    }
    for (const auto& c : d.centers) {
        if (c.size() != dim) {
            throw ConfigError("config: data.centers width " +
                              std::to_string(c.size()) +
                              " does not match model.data_dim " +
                              std::to_string(dim));
        }
    }
    const RandomStream noise(seed, "data.noise");
    Tensor t = Tensor::zeros({d.centers.size() * d.n_per_center, dim});
    std::size_t g = 0;
    for (const auto& center : d.centers) {
        for (std::size_t i = 0; i < d.n_per_center; ++i, ++g) {
            for (std::size_t k = 0; k < dim; ++k) {
                t.at(g, k) = center[k] + d.spread * noise.normal(g * dim + k);
            }
        }
    }
    return t;
}

IgoConfig build_igo(const ExperimentConfig& cfg) {
    const IgoSection& g = cfg.igo;
    const VpSchedule schedule{cfg.process.beta_min, cfg.process.beta_max};
    IgoConfig c;
    c.alpha = g.alpha;
    c.lambda_schedule = g.lambda == "sigma_sq" ? lambda_sigma_sq(schedule)
                                               : lambda_constant();
    c.tau_rule =
        g.tau_rule == "fixed_list" ? TauRule::fixed_list : TauRule::half_t;
    c.fixed_taus = g.fixed_taus;
    c.batch_size = g.batch;
    c.epochs = g.epochs;
    c.steps_per_epoch = g.steps_per_epoch;
    c.adam.lr = g.lr;
    c.corruption = g.corruption == "em" ? CorruptionKind::em_simulation
                                        : CorruptionKind::gaussian_kernel;
    c.schedule = schedule;
    c.em_dt = g.em_dt;
    c.t_min = g.t_min;
    c.regularizer_enabled = g.regularizer_enabled;
    c.checkpoint_every = g.checkpoint_every;
    c.checkpoint_prefix = join_path(cfg.output_dir, "ckpt");
    return c;
}

Generator make_generator(const ExperimentConfig& cfg, ScoreNet& net) {
    const DownstreamSection& d = cfg.downstream;
    if (d.generator == "linear_rig") {
        return Generator::linear_rig(rows_to_tensor(d.rig, "downstream.rig"),
                                     d.radius);
    }
    if (d.generator == "final") {
        return Generator::from_net_final(net, d.gen_time, d.radius);
    }
    if (d.generator == "intermediate") {
        return Generator::from_net_intermediate(net, d.gen_time, d.radius);
    }
    if (d.generator == "inter_full") {
        return Generator::from_net_inter_full(net, d.gen_time, d.radius);
    }
    return Generator::union_of(net, d.gen_time, d.radius);
}

void run_simulate(const ExperimentConfig& cfg,
                  std::vector<std::string>& artifacts) {
    const ProcessSection& p = cfg.process;
    if (p.x0.empty()) throw ConfigError("config: 'process.x0' is empty");
    const SdeSpec spec = build_sde(p, p.x0.size());
    EmConfig em;
    em.dt = p.dt;
    em.seed = cfg.seed;
    em.capture_times = p.capture_times;

    const Trajectory traj = simulate(spec, p.x0, em);
    const std::string traj_path = join_path(cfg.output_dir, "trajectory.csv");
    write_trajectory_csv(traj_path, traj);
    artifacts.push_back(traj_path);

    if (!p.capture_times.empty()) {
        const std::string cap_path = join_path(cfg.output_dir, "captures.csv");
        write_captures_csv(cap_path, traj);
        artifacts.push_back(cap_path);
    }
    if (p.n_paths > 1) {
        const Tensor finals = simulate_final_ensemble(spec, p.x0, em, p.n_paths);
        std::vector<std::string> rows;
        rows.reserve(finals.rows());
        for (std::size_t r = 0; r < finals.rows(); ++r) {
            rows.push_back(csv_row(finals.row(r)));
        }
        const std::string fin_path =
            join_path(cfg.output_dir, "final_states.csv");
        write_csv(fin_path, xs_header(finals.cols()), rows);
        artifacts.push_back(fin_path);
    }
}

void run_train(const ExperimentConfig& cfg,
               std::vector<std::string>& artifacts) {
    ScoreNet net = build_net(cfg);
    const Tensor dataset = build_dataset(cfg.data, cfg.model.data_dim, cfg.seed);
    const SdeSpec fwd = build_sde(cfg.process, cfg.model.data_dim);
    const IgoConfig icfg = build_igo(cfg);

    const TrainLog log = train(net, dataset, fwd, icfg,
                               derive_seed(cfg.seed, "train"));

    const std::string log_path = join_path(cfg.output_dir, "train_log.csv");
    write_train_log_csv(log_path, log);
    artifacts.push_back(log_path);

    const std::vector<Param*> params = net.params();
    const std::vector<const Param*> view(params.begin(), params.end());
    const std::string ckpt_path = join_path(cfg.output_dir, "model.ckpt");
    save_checkpoint(ckpt_path, view);
    artifacts.push_back(ckpt_path);
}

void run_sample(const ExperimentConfig& cfg,
                std::vector<std::string>& artifacts) {
    const SamplerSection& s = cfg.sampler;
    if (s.n_samples == 0) {
        throw ConfigError("config: sampler.n_samples must be positive");
    }
    ScoreNet net = build_net(cfg);
    const SdeSpec spec = build_sde(cfg.process, cfg.model.data_dim);

    SamplerConfig sc;
    sc.n_steps = s.n_steps;
    sc.t_start = s.t_start;
    sc.pathway = pathway_from_string(s.pathway);
    sc.rtol = s.rtol;
    sc.atol = s.atol;
    sc.t_min = s.t_min;
    sc.seed = derive_seed(cfg.seed, "sample");
    sc.validate(spec.horizon);

    const RandomStream init(cfg.seed, "sample.xT");
    Tensor x_T = Tensor::zeros({s.n_samples, cfg.model.data_dim});
    x_T.data = init.normal_vec(0, x_T.data.size());

    const Tensor out = s.method == "pf"
                           ? probability_flow_ensemble(net, spec, x_T, sc)
                           : reverse_em_ensemble(net, spec, x_T, sc);
    const std::string path = join_path(cfg.output_dir, "samples.csv");
    write_samples_csv(path, out, sc);
    artifacts.push_back(path);
}

void run_gpca(const ExperimentConfig& cfg,
              std::vector<std::string>& artifacts) {
    const DownstreamSection& d = cfg.downstream;
    if (d.gpca_dim == 0) {
        throw ConfigError("config: downstream.gpca_dim must be positive");
    }
    const std::size_t n = d.gpca_dim;
    const RandomStream vs(cfg.seed, "gpca.V");
    Tensor V = Tensor::zeros({n, n});
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double a = vs.normal(i * n + j);
            V.at(i, j) += 0.5 * a;
            V.at(j, i) += 0.5 * a;
        }
    }

    ScoreNet net = build_net(cfg);
    const Generator gen = make_generator(cfg, net);
    const std::vector<double> v_hat =
        ppower(V, gen, d.iters, derive_seed(cfg.seed, "gpca"));

    const std::string path = join_path(cfg.output_dir, "v_hat.csv");
    write_csv(path, xs_header(n), {csv_row(v_hat)});
    artifacts.push_back(path);
}

void run_csgm(const ExperimentConfig& cfg,
              std::vector<std::string>& artifacts) {
    const DownstreamSection& d = cfg.downstream;
    ScoreNet net = build_net(cfg);
    const Generator gen = make_generator(cfg, net);

    const std::vector<double> z_true =
        ball_latent(gen.latent_dim(), gen.latent_radius(), cfg.seed,
                    "csgm.xtrue");
    const std::vector<double> x_true = gen.map(z_true);
    MeasurementModel model = make_measurement(
        x_true, d.m, d.noise_std, derive_seed(cfg.seed, "meas"));

    CsgmOptions opts;
    opts.steps = d.steps;
    opts.lr = d.lr;
    opts.restarts = d.restarts;
    opts.line_search = d.line_search;
    const CsgmResult res = csgm_recover(model, gen, opts,
                                        derive_seed(cfg.seed, "csgm"));

    const std::string path = join_path(cfg.output_dir, "csgm.csv");
    write_csv(path, "m,objective,residual,rel_error",
              {std::to_string(d.m) + "," +
               csv_row({res.objective, res.residual, res.rel_error})});
    artifacts.push_back(path);

    const std::string x_path = join_path(cfg.output_dir, "csgm_x.csv");
    write_csv(x_path, xs_header(x_true.size()),
              {csv_row(x_true), csv_row(res.x_hat)});
    artifacts.push_back(x_path);
}

void run_sweep(const ExperimentConfig& cfg, const std::string& meta,
               std::vector<std::string>& artifacts) {
    const DownstreamSection& d = cfg.downstream;
    ScoreNet net = build_net(cfg);
    const Generator gen = make_generator(cfg, net);

    CsgmOptions opts;
    opts.steps = d.steps;
    opts.lr = d.lr;
    opts.restarts = d.restarts;
    opts.line_search = d.line_search;
    const SweepTable table = sample_complexity_sweep(
        gen, d.m_list, d.trials, derive_seed(cfg.seed, "sweep"), opts);

    const std::string path = join_path(cfg.output_dir, "sweep.csv");
    write_sweep_csv(path, table, meta);
    artifacts.push_back(path);
}

void run_probe(const ExperimentConfig& cfg, const std::string& meta,
               std::vector<std::string>& artifacts) {
    const DownstreamSection& d = cfg.downstream;
    if (d.test_points.empty()) {
        throw ConfigError(
            "config: 'downstream.test_points' is required for probe");
    }
    const Tensor tests = rows_to_tensor(d.test_points, "downstream.test_points");

    ScoreNet net = build_net(cfg);
    RangeProbeReport report;
    if (d.generator == "linear_rig") {
        const Generator base =
            Generator::linear_rig(rows_to_tensor(d.rig, "downstream.rig"),
                                  d.radius);
        const Generator inter = Generator::linear_rig(
            rows_to_tensor(d.rig_inter, "downstream.rig_inter"), d.radius);
        report = range_expansion_probe(base, inter, tests, d.n_probe_samples,
                                       derive_seed(cfg.seed, "probe"));
    } else {
        const Generator base =
            Generator::from_net_final(net, d.gen_time, d.radius);
        const Generator inter =
            Generator::from_net_intermediate(net, d.gen_time, d.radius);
        report = range_expansion_probe(base, inter, tests, d.n_probe_samples,
                                       derive_seed(cfg.seed, "probe"));
    }

    const std::string path = join_path(cfg.output_dir, "probe.csv");
    write_probe_csv(path, report, meta);
    artifacts.push_back(path);
}

void run_metrics(const ExperimentConfig& cfg,
                 std::vector<std::string>& artifacts) {
    ScoreNet net = build_net(cfg);
    const WeightDivergence wd = weight_divergence(net);
    const std::string path = join_path(cfg.output_dir, "divergence.csv");
    write_csv(path, "cos_E,cos_D,eucl_E,eucl_D",
              {csv_row({wd.cos_E, wd.cos_D, wd.eucl_E, wd.eucl_D})});
    artifacts.push_back(path);

    if (cfg.downstream.n_pairs > 0) {
        const Generator gen = make_generator(cfg, net);
        const double estimate = lipschitz_estimate(
            gen, cfg.downstream.n_pairs, derive_seed(cfg.seed, "lipschitz"));
        const std::string lpath = join_path(cfg.output_dir, "lipschitz.csv");
        write_csv(lpath, "n_pairs,estimate",
                  {std::to_string(cfg.downstream.n_pairs) + "," +
                   csv_row({estimate})});
        artifacts.push_back(lpath);
    }
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    StrictReader r(j, "");
    ExperimentConfig cfg;
    cfg.command =
        command_from_string(r.get_or<std::string>("command", "simulate"));
    cfg.seed = r.get_or<std::uint64_t>("seed", cfg.seed);
    cfg.output_dir = r.get_or<std::string>("output_dir", cfg.output_dir);
    cfg.fingerprint = r.get_or<std::string>("fingerprint", cfg.fingerprint);
    cfg.process = parse_process(r.child("process"));
    cfg.model = parse_model(r.child("model"));
    cfg.data = parse_data(r.child("data"));
    cfg.igo = parse_igo(r.child("igo"));
    cfg.sampler = parse_sampler(r.child("sampler"));
    cfg.downstream = parse_downstream(r.child("downstream"));
    r.finish();

    if (cfg.output_dir.empty()) {
        throw ConfigError("config: 'output_dir' is empty");
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read config file '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return parse_config_text(text);
}

std::string resolved_config_text(const ExperimentConfig& cfg) {
    return config_json(cfg).dump(2) + "\n";
}

std::string config_hash(const ExperimentConfig& cfg) {
    const std::string text = resolved_config_text(cfg);
    std::uint64_t h = 1469598103934665603ull;
    for (const unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(h));
    return std::string(buf);
}

std::vector<std::string> run_experiment(const ExperimentConfig& cfg) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(cfg.output_dir, ec);
    if (ec) {
        throw IoError("cannot create output directory '" + cfg.output_dir +
                      "': " + ec.message());
    }

    const std::string resolved_path =
        join_path(cfg.output_dir, "resolved_config.json");
    write_text_file(resolved_path, resolved_config_text(cfg));
    std::vector<std::string> artifacts = {resolved_path};

    const std::string meta =
        "seed=" + std::to_string(cfg.seed) + " config=" + config_hash(cfg);

    switch (cfg.command) {
        case Command::simulate: run_simulate(cfg, artifacts); break;
        case Command::train: run_train(cfg, artifacts); break;
        case Command::sample: run_sample(cfg, artifacts); break;
        case Command::gpca: run_gpca(cfg, artifacts); break;
        case Command::csgm: run_csgm(cfg, artifacts); break;
        case Command::sweep: run_sweep(cfg, meta, artifacts); break;
        case Command::probe: run_probe(cfg, meta, artifacts); break;
        case Command::metrics: run_metrics(cfg, artifacts); break;
    }
    return artifacts;
}

void run_file(const std::string& config_path) {
    const ExperimentConfig cfg = load_config(config_path);
    if (!cfg.fingerprint.empty() && cfg.fingerprint != kBuildFingerprint) {
        throw VersionMismatch("config fingerprint '" + cfg.fingerprint +
                              "' does not match this build '" +
                              kBuildFingerprint + "'");
    }
    run_experiment(cfg);
}

void replay_file(const std::string& resolved_path) {
    const ExperimentConfig cfg = load_config(resolved_path);
    if (cfg.fingerprint.empty()) {
        throw ConfigError("replay: '" + resolved_path +
                          "' is not a resolved config (missing fingerprint)");
    }
    if (cfg.fingerprint != kBuildFingerprint) {
        throw VersionMismatch("config fingerprint '" + cfg.fingerprint +
                              "' does not match this build '" +
                              kBuildFingerprint + "'");
    }
    run_experiment(cfg);
}

}  // namespace igo
