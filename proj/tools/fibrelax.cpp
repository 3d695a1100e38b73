// fibrelax: cross-linked fiber network simulation and verification suite.
//
//   fibrelax <mode> --config <path> [--seed N] [--out DIR]
//   fibrelax coeffs|ellipticity --r-min A --r-max B --steps N [--d D] [--L L] --out FILE
//
// Exit codes: 0 success, 2 config error, 3 numerical failure, 4 validation
// fail.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fibrelax/errors.hpp"
#include "fibrelax/io.hpp"
#include "fibrelax/scenario.hpp"

namespace {

struct ModeArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    // direct-flag sweep form for coeffs / ellipticity
    std::optional<double> r_min, r_max, d, L;
    std::optional<int> steps;
    std::optional<std::string> out_file;
};

void add_mode(CLI::App& app, const std::string& name, const std::string& desc, ModeArgs& args,
              bool sweep_flags) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->add_option("--config", args.config_path, "scenario config (JSON)");
    sub->add_option("--seed", args.seed, "override the config seed");
    sub->add_option("--out", args.out, "override the output directory");
    if (sweep_flags) {
        sub->add_option("--r-min", args.r_min, "sweep start");
        sub->add_option("--r-max", args.r_max, "sweep end");
        sub->add_option("--steps", args.steps, "sweep points");
        sub->add_option("--d", args.d, "noise amplitude (default 1)");
        sub->add_option("--L", args.L, "fiber length (default 1)");
    }
}

// The sweep modes accept plain flags; build the equivalent scenario JSON so
// everything funnels through the same manifest-writing path.
std::string sweep_config_json(const std::string& mode, const ModeArgs& a,
                              const std::string& out_dir) {
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "{\"mode\":\"%s\",\"outputs\":\"%s\",\"model\":{\"d\":%.17g,\"L\":%.17g},"
                  "\"sweep\":{\"r_min\":%.17g,\"r_max\":%.17g,\"steps\":%d}}",
                  mode.c_str(), out_dir.c_str(), a.d.value_or(1.0), a.L.value_or(1.0),
                  a.r_min.value(), a.r_max.value(), a.steps.value());
    return buf;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"cross-linked fiber network simulation suite"};
    app.require_subcommand(1);

    ModeArgs args;
    add_mode(app, "ibm", "run the individual-based simulation", args, false);
    add_mode(app, "coeffs", "tabulate the macroscopic coefficients over r", args, true);
    add_mode(app, "pde", "run the macroscopic density/orientation solver", args, false);
    add_mode(app, "ellipticity", "sweep the ellipticity condition over r", args, true);
    add_mode(app, "validate", "cross-scale equilibrium validation", args, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const std::string mode = app.get_subcommands().front()->get_name();
    try {
        std::string config_text;
        if (!args.config_path.empty()) {
            config_text = fibrelax::read_file(args.config_path);
        } else if ((mode == "coeffs" || mode == "ellipticity") && args.r_min && args.r_max &&
                   args.steps) {
            // --out names the CSV in flag form; artifacts land next to it
            std::string out_dir = ".";
            if (args.out) {
                const std::filesystem::path p(*args.out);
                if (p.extension() == ".csv") {
                    out_dir = p.parent_path().empty() ? "." : p.parent_path().string();
                } else {
                    out_dir = p.string();
                }
            }
            config_text = sweep_config_json(mode, args, out_dir);
            args.out.reset();
        } else {
            std::fprintf(stderr, "error: --config is required (or the sweep flags for "
                                 "coeffs/ellipticity)\n");
            return 2;
        }
        fibrelax::ScenarioConfig cfg = fibrelax::parse_scenario(config_text, args.seed, args.out);
        if (cfg.mode != mode)
            throw fibrelax::ConfigInvalid("mode", "config mode '" + cfg.mode +
                                                      "' does not match subcommand '" + mode + "'");
        return fibrelax::run_scenario(cfg);
    } catch (const fibrelax::ConfigInvalid& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const fibrelax::NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    } catch (const fibrelax::DomainError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    } catch (const fibrelax::IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
