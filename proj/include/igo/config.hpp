#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace igo {

// Stamped into every resolved config; replay refuses to run a config
// produced by a different build.
extern const char* const kBuildFingerprint;

enum class Command { simulate, train, sample, gpca, csgm, sweep, probe, metrics };

Command command_from_string(const std::string& s);
std::string to_string(Command c);

// Forward process selection. x0/dt/n_paths drive `simulate`; the schedule
// fields feed both the VP process and sigma-squared loss weighting.
struct ProcessSection {
    std::string kind = "ou";  // ou | vp | lotka_volterra | cat_map
    double horizon = 1.0;
    double dt = 1e-3;
    std::vector<double> x0 = {1.0};
    std::size_t n_paths = 1;
    std::vector<double> capture_times;
    double beta_min = 0.1;
    double beta_max = 20.0;
    double lv_alpha = 1.5;
    double lv_beta = 1.0;
    double lv_gamma = 3.0;
    double lv_delta = 1.0;
    // Constant noise scale for the drift-catalogue processes.
    double diffusion = 0.0;
};

struct ModelSection {
    std::size_t data_dim = 2;
    std::size_t hidden = 32;
    std::size_t encoder_depth = 1;
    std::size_t core_depth = 2;
    long long tap_layer = -1;  // -1 resolves to the middle core layer
    std::size_t time_embed_dim = 16;
    std::string act = "silu";
    std::string checkpoint;  // optional weights to load before running
};

struct DataSection {
    std::string kind = "gaussian_mixture";  // gaussian_mixture | explicit
    std::vector<std::vector<double>> centers = {{2.0, 2.0}, {-2.0, -2.0}};
    std::size_t n_per_center = 256;
    double spread = 0.0;  // stddev around each center
    std::vector<std::vector<double>> rows;  // explicit dataset
};

struct IgoSection {
    double alpha = 0.5;
    std::string lambda = "constant";  // constant | sigma_sq
    std::string tau_rule = "half_t";  // half_t | fixed_list
    std::vector<double> fixed_taus;
    std::size_t batch = 64;
    std::size_t epochs = 1;
    std::size_t steps_per_epoch = 0;  // 0 derives from dataset size
    double lr = 1e-3;
    std::string corruption = "gaussian";  // gaussian | em
    double em_dt = 1e-2;
    double t_min = 1e-3;
    bool regularizer_enabled = true;
    std::size_t checkpoint_every = 0;
};

struct SamplerSection {
    std::string method = "em";  // em | pf
    std::string pathway = "final";
    std::size_t n_steps = 500;
    std::size_t n_samples = 64;
    double t_start = 1.0;
    double t_min = 1e-3;
    double rtol = 1e-6;
    double atol = 1e-9;
};

struct DownstreamSection {
    // final | intermediate | inter_full | linear_rig | union_both
    std::string generator = "linear_rig";
    double radius = 10.0;
    double gen_time = 1e-3;
    std::vector<std::vector<double>> rig;        // linear_rig matrix
    std::vector<std::vector<double>> rig_inter;  // probe partner rig
    std::vector<std::size_t> m_list = {4, 8, 16, 32};
    std::size_t trials = 5;
    std::size_t iters = 50;   // power-iteration count
    std::size_t steps = 300;  // recovery descent steps
    double lr = 0.02;
    std::size_t restarts = 1;
    bool line_search = false;
    std::size_t m = 16;  // measurement count for a single recovery
    double noise_std = 0.0;
    std::size_t gpca_dim = 8;
    std::size_t n_pairs = 0;  // expansion-ratio pairs; 0 skips the probe
    std::size_t n_probe_samples = 200;
    std::vector<std::vector<double>> test_points;
};

struct ExperimentConfig {
    Command command = Command::simulate;
    std::uint64_t seed = 0;
    std::string output_dir = "out";
    ProcessSection process;
    ModelSection model;
    DataSection data;
    IgoSection igo;
    SamplerSection sampler;
    DownstreamSection downstream;
    // Non-empty only for configs written by a prior run.
    std::string fingerprint;
};

// Strict parse: unknown keys anywhere in the tree are a hard error naming
// the offending key.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Canonical serialization with every default filled in; parsing it back
// reproduces the same text byte for byte.
std::string resolved_config_text(const ExperimentConfig& cfg);

// FNV-1a hash of the resolved text, embedded in report headers.
std::string config_hash(const ExperimentConfig& cfg);

// Executes cfg.command. Writes the resolved config plus command-specific
// artifacts into cfg.output_dir; returns the paths written, resolved
// config first. All files are closed before return.
std::vector<std::string> run_experiment(const ExperimentConfig& cfg);

// Parse, validate and execute a config file.
void run_file(const std::string& config_path);

// Re-run a resolved config; VersionMismatch unless its fingerprint matches
// this build. Artifacts regenerate byte-identically.
void replay_file(const std::string& resolved_path);

}  // namespace igo
