#include "igo/cli.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <string>

#include "igo/config.hpp"
#include "igo/errors.hpp"

namespace igo {

int cli_main(int argc, char** argv) {
    CLI::App app{"Desk-scale laboratory for score-model training, sampling "
                 "and generator-based recovery"};
    app.allow_extras(false);

    std::string command;
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;

    app.add_option("command", command,
                   "simulate | train | sample | gpca | csgm | sweep | probe "
                   "| metrics | replay")
        ->required();
    app.add_option("--config", config_path, "configuration file")->required();
    CLI::Option* seed_opt =
        app.add_option("--seed", seed, "override the config seed");
    CLI::Option* out_opt =
        app.add_option("--out", out_dir, "override the output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (command != "replay") command_from_string(command);

        ExperimentConfig cfg = load_config(config_path);
        if (command == "replay") {
            if (cfg.fingerprint.empty()) {
                throw ConfigError("replay: '" + config_path +
                                  "' is not a resolved config (missing "
                                  "fingerprint)");
            }
            if (cfg.fingerprint != kBuildFingerprint) {
                throw VersionMismatch("config fingerprint '" +
                                      cfg.fingerprint +
                                      "' does not match this build '" +
                                      kBuildFingerprint + "'");
            }
        } else {
            if (to_string(cfg.command) != command) {
                throw ConfigError("config declares command '" +
                                  to_string(cfg.command) +
                                  "' but the command line says '" + command +
                                  "'");
            }
            if (!cfg.fingerprint.empty() &&
                cfg.fingerprint != kBuildFingerprint) {
                throw VersionMismatch("config fingerprint '" +
                                      cfg.fingerprint +
                                      "' does not match this build '" +
                                      kBuildFingerprint + "'");
            }
        }
        if (*seed_opt) cfg.seed = seed;
        if (*out_opt) cfg.output_dir = out_dir;

        run_experiment(cfg);
        return 0;
    } catch (const Error& e) {
        std::fprintf(stderr, "error [%s]: %s\n", e.module_name().c_str(),
                     e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error [cli]: %s\n", e.what());
        return 1;
    }
}

}  // namespace igo
