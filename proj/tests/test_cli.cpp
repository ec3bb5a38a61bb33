#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "igo/cli.hpp"
#include "igo/config.hpp"
#include "igo/csv.hpp"
#include "igo/errors.hpp"

using namespace igo;
namespace fs = std::filesystem;

namespace {

// Fresh scratch directory per test case, removed on destruction.
struct ScratchDir {
    fs::path root;

    explicit ScratchDir(const std::string& name)
        : root(fs::temp_directory_path() / ("igo_cli_" + name)) {
        fs::remove_all(root);
        fs::create_directories(root);
    }
    ~ScratchDir() { fs::remove_all(root); }

    std::string file(const std::string& name, const std::string& text) const {
        const fs::path p = root / name;
        std::ofstream out(p, std::ios::binary);
        out << text;
        return p.string();
    }

    std::string path(const std::string& name) const {
        return (root / name).string();
    }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
}

int run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "igo");
    std::vector<char*> argv;
    argv.reserve(args.size());
    for (std::string& a : args) argv.push_back(a.data());
    return cli_main(static_cast<int>(argv.size()), argv.data());
}

std::string first_line(const std::string& text) {
    return text.substr(0, text.find('\n'));
}

}  // namespace

TEST_CASE("defaults fill in for an empty config") {
    const ExperimentConfig cfg = parse_config_text("{}");
    CHECK(cfg.command == Command::simulate);
    CHECK(cfg.seed == 0);
    CHECK(cfg.output_dir == "out");
    CHECK(cfg.process.kind == "ou");
    CHECK(cfg.igo.alpha == 0.5);
    CHECK(cfg.sampler.n_steps == 500);
    CHECK(cfg.downstream.m_list == std::vector<std::size_t>{4, 8, 16, 32});
    CHECK(cfg.fingerprint.empty());
}

TEST_CASE("unknown keys are hard errors naming the key") {
    CHECK_THROWS_WITH_AS(
        parse_config_text(R"({"command":"train","igo":{"alpah":1.0}})"),
        doctest::Contains("igo.alpah"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config_text(R"({"sede":3})"),
                         doctest::Contains("sede"), ConfigError);
    CHECK_THROWS_WITH_AS(
        parse_config_text(R"({"downstream":{"m_lst":[4]}})"),
        doctest::Contains("downstream.m_lst"), ConfigError);
}

TEST_CASE("malformed values are rejected with their path") {
    CHECK_THROWS_WITH_AS(parse_config_text(R"({"seed":"abc"})"),
                         doctest::Contains("seed"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config_text(R"({"process":{"x0":"no"}})"),
                         doctest::Contains("process.x0"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[1,2]"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("{not json"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"process":7})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"command":"dance"})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"igo":{"lambda":"cubic"}})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"output_dir":""})"), ConfigError);
}

TEST_CASE("resolved config text is a fixed point of parsing") {
    ExperimentConfig cfg = parse_config_text(
        R"({"command":"train","seed":99,"igo":{"alpha":0.25},
            "process":{"kind":"vp","beta_max":17.5}})");
    const std::string text = resolved_config_text(cfg);
    const ExperimentConfig back = parse_config_text(text);
    CHECK(back.command == Command::train);
    CHECK(back.seed == 99);
    CHECK(back.igo.alpha == 0.25);
    CHECK(back.process.beta_max == 17.5);
    CHECK(back.fingerprint == std::string(kBuildFingerprint));
    CHECK(resolved_config_text(back) == text);
}

TEST_CASE("config hash is stable and seed-sensitive") {
    ExperimentConfig a = parse_config_text(R"({"seed":1})");
    ExperimentConfig b = parse_config_text(R"({"seed":2})");
    CHECK(config_hash(a) == config_hash(a));
    CHECK(config_hash(a) != config_hash(b));
    CHECK(config_hash(a).size() == 16);
}

TEST_CASE("simulate emits an ou trajectory with the documented header") {
    ScratchDir dir("simulate");
    ExperimentConfig cfg = parse_config_text(R"({
        "command": "simulate", "seed": 42,
        "process": {"kind": "ou", "x0": [1.0], "dt": 0.01, "horizon": 0.5}
    })");
    cfg.output_dir = dir.path("run");
    const std::vector<std::string> artifacts = run_experiment(cfg);
    REQUIRE(artifacts.size() == 2);
    CHECK(artifacts[0] == dir.path("run") + "/resolved_config.json");

    const std::string traj = slurp(artifacts[1]);
    CHECK(first_line(traj) == "t,x0");
    const CsvTable table = read_csv(artifacts[1]);
    REQUIRE(table.rows.size() == 51);
    CHECK(table.rows[0][0] == 0.0);
    CHECK(table.rows[0][1] == 1.0);
}

TEST_CASE("identical config and seed produce byte-identical artifacts") {
    ScratchDir dir("determinism");
    const char* text = R"({
        "command": "simulate", "seed": 7,
        "process": {"kind": "ou", "x0": [0.5, -0.5], "dt": 0.01,
                     "horizon": 0.3, "n_paths": 4,
                     "capture_times": [0.1, 0.2]}
    })";
    ExperimentConfig cfg = parse_config_text(text);
    cfg.output_dir = dir.path("a");
    run_experiment(cfg);
    cfg.output_dir = dir.path("b");
    run_experiment(cfg);

    for (const char* name :
         {"trajectory.csv", "captures.csv", "final_states.csv"}) {
        CHECK(slurp(dir.path("a") + "/" + name) ==
              slurp(dir.path("b") + "/" + name));
    }
}

TEST_CASE("seed changes flow into the artifacts") {
    ScratchDir dir("seeded");
    ExperimentConfig cfg = parse_config_text(R"({
        "command": "simulate",
        "process": {"kind": "ou", "x0": [1.0], "dt": 0.01, "horizon": 0.2}
    })");
    cfg.output_dir = dir.path("s1");
    cfg.seed = 1;
    run_experiment(cfg);
    cfg.output_dir = dir.path("s2");
    cfg.seed = 2;
    run_experiment(cfg);
    CHECK(slurp(dir.path("s1") + "/trajectory.csv") !=
          slurp(dir.path("s2") + "/trajectory.csv"));
}

TEST_CASE("replay regenerates a train run byte for byte") {
    ScratchDir dir("replay_train");
    ExperimentConfig cfg = parse_config_text(R"({
        "command": "train", "seed": 3,
        "process": {"kind": "vp"},
        "model": {"data_dim": 2, "hidden": 6, "core_depth": 2,
                   "time_embed_dim": 8},
        "data": {"kind": "gaussian_mixture", "n_per_center": 8},
        "igo": {"alpha": 0.5, "batch": 8, "steps_per_epoch": 5,
                 "lambda": "sigma_sq"}
    })");
    cfg.output_dir = dir.path("run");
    run_experiment(cfg);

    const std::string log_before = slurp(dir.path("run") + "/train_log.csv");
    const std::string ckpt_before = slurp(dir.path("run") + "/model.ckpt");
    const std::string resolved_before =
        slurp(dir.path("run") + "/resolved_config.json");

    replay_file(dir.path("run") + "/resolved_config.json");

    CHECK(slurp(dir.path("run") + "/train_log.csv") == log_before);
    CHECK(slurp(dir.path("run") + "/model.ckpt") == ckpt_before);
    CHECK(slurp(dir.path("run") + "/resolved_config.json") == resolved_before);
}

TEST_CASE("replay regenerates a gpca run byte for byte") {
    ScratchDir dir("replay_gpca");
    ExperimentConfig cfg = parse_config_text(R"({
        "command": "gpca", "seed": 5,
        "downstream": {"generator": "linear_rig",
                        "rig": [[1.0, 0.0], [0.0, 1.0]],
                        "radius": 100.0, "gpca_dim": 2, "iters": 25}
    })");
    cfg.output_dir = dir.path("run");
    run_experiment(cfg);
    const std::string v_before = slurp(dir.path("run") + "/v_hat.csv");

    replay_file(dir.path("run") + "/resolved_config.json");
    CHECK(slurp(dir.path("run") + "/v_hat.csv") == v_before);
}

TEST_CASE("replay refuses foreign or unresolved configs") {
    ScratchDir dir("replay_guard");
    ExperimentConfig cfg = parse_config_text(R"({
        "command": "simulate",
        "process": {"kind": "ou", "x0": [1.0], "dt": 0.01, "horizon": 0.1}
    })");
    cfg.output_dir = dir.path("run");
    run_experiment(cfg);

    const std::string resolved = dir.path("run") + "/resolved_config.json";
    std::string text = slurp(resolved);
    const std::string current(kBuildFingerprint);
    const std::size_t at = text.find(current);
    REQUIRE(at != std::string::npos);
    text.replace(at, current.size(), "igo-0.0.0 other-compiler");
    const std::string tampered = dir.file("tampered.json", text);
    CHECK_THROWS_AS(replay_file(tampered), VersionMismatch);
    CHECK_THROWS_AS(run_file(tampered), VersionMismatch);

    const std::string plain =
        dir.file("plain.json", R"({"command":"simulate"})");
    CHECK_THROWS_AS(replay_file(plain), ConfigError);

    CHECK_THROWS_AS(replay_file(dir.path("missing.json")), IoError);
}

TEST_CASE("module errors surface with the originating module") {
    ScratchDir dir("module_error");
    // An unsorted m_list is rejected after dispatch; the diagnostic keeps
    // the configuration module tag and names the offending field.
    ExperimentConfig cfg = parse_config_text(R"({
        "command": "sweep",
        "downstream": {"generator": "linear_rig",
                        "rig": [[1.0], [0.5]],
                        "m_list": [8, 4], "trials": 1, "steps": 5}
    })");
    cfg.output_dir = dir.path("run");
    try {
        run_experiment(cfg);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.module_name() == "cli");
        CHECK(std::string(e.what()).find("m_list") != std::string::npos);
    }
}

TEST_CASE("the command line drives a full run and reports failures") {
    ScratchDir dir("cli_main");
    const std::string good = dir.file("ou.json", R"({
        "command": "simulate", "seed": 9,
        "output_dir": ")" + dir.path("outA") + R"(",
        "process": {"kind": "ou", "x0": [1.0], "dt": 0.01, "horizon": 0.2}
    })");

    CHECK(run_cli({"simulate", "--config", good}) == 0);
    CHECK(fs::exists(dir.path("outA") + "/trajectory.csv"));

    // --out and --seed override the config and land in the resolved copy.
    CHECK(run_cli({"simulate", "--config", good, "--seed", "77", "--out",
                   dir.path("outB")}) == 0);
    const ExperimentConfig resolved =
        parse_config_text(slurp(dir.path("outB") + "/resolved_config.json"));
    CHECK(resolved.seed == 77);
    CHECK(resolved.output_dir == dir.path("outB"));
    CHECK(slurp(dir.path("outA") + "/trajectory.csv") !=
          slurp(dir.path("outB") + "/trajectory.csv"));

    // Replay through the CLI reproduces the run.
    const std::string before = slurp(dir.path("outB") + "/trajectory.csv");
    CHECK(run_cli({"replay", "--config",
                   dir.path("outB") + "/resolved_config.json"}) == 0);
    CHECK(slurp(dir.path("outB") + "/trajectory.csv") == before);

    // Command/config mismatch, bad keys, unknown commands, missing files.
    CHECK(run_cli({"train", "--config", good}) == 1);
    const std::string typo =
        dir.file("typo.json", R"({"command":"train","igo":{"alpah":1}})");
    CHECK(run_cli({"train", "--config", typo}) == 1);
    CHECK(run_cli({"dance", "--config", good}) == 1);
    CHECK(run_cli({"simulate", "--config", dir.path("nope.json")}) == 1);
    CHECK(run_cli({"simulate"}) != 0);  // --config is required
}

TEST_CASE("explicit datasets must match the model dimension") {
    ScratchDir dir("explicit_data");
    ExperimentConfig cfg = parse_config_text(R"({
        "command": "train",
        "model": {"data_dim": 2, "hidden": 6, "core_depth": 2,
                   "time_embed_dim": 8},
        "data": {"kind": "explicit", "rows": [[1.0, 2.0, 3.0]]},
        "igo": {"batch": 1, "steps_per_epoch": 1}
    })");
    cfg.output_dir = dir.path("run");
    CHECK_THROWS_AS(run_experiment(cfg), ConfigError);

    cfg.data.rows = {{1.0, 2.0}, {-1.0, -2.0}};
    const std::vector<std::string> artifacts = run_experiment(cfg);
    CHECK(artifacts.size() == 3);
}

TEST_CASE("probe requires test points and a partner rig") {
    ScratchDir dir("probe_cfg");
    ExperimentConfig cfg = parse_config_text(R"({
        "command": "probe",
        "downstream": {"generator": "linear_rig",
                        "rig": [[1.0], [0.0]], "rig_inter": [[0.0], [1.0]],
                        "radius": 1.0, "n_probe_samples": 50,
                        "test_points": [[0.5, 0.5]]}
    })");
    cfg.output_dir = dir.path("run");
    run_experiment(cfg);
    const CsvTable table = read_csv(dir.path("run") + "/probe.csv");
    REQUIRE(table.rows.size() == 1);

    cfg.downstream.test_points.clear();
    CHECK_THROWS_AS(run_experiment(cfg), ConfigError);

    cfg.downstream.test_points = {{0.5, 0.5}};
    cfg.downstream.rig_inter.clear();
    CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
}

TEST_CASE("reports embed the seed and config hash") {
    ScratchDir dir("meta");
    ExperimentConfig cfg = parse_config_text(R"({
        "command": "sweep", "seed": 21,
        "downstream": {"generator": "linear_rig",
                        "rig": [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]],
                        "radius": 10.0, "m_list": [3], "trials": 1,
                        "steps": 20, "line_search": true}
    })");
    cfg.output_dir = dir.path("run");
    run_experiment(cfg);
    const std::string head =
        first_line(slurp(dir.path("run") + "/sweep.csv"));
    CHECK(head.find("seed=21") != std::string::npos);
    CHECK(head.find("config=" + config_hash(cfg)) != std::string::npos);
}
