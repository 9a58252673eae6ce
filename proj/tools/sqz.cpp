// sqz: command-line front end for two-qubit squeezed-reservoir simulations.
//
// Exit codes: 0 success, 1 verification failure, 2 configuration error,
// 3 numerical failure (outputs written so far are flagged in summary.json).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sqz/harness.hpp"

namespace fs = std::filesystem;
using namespace sqz;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_verify_failed = 1;
constexpr int exit_config = 2;
constexpr int exit_numerical = 3;

struct Overrides {
    std::string config_path;
    std::string preset;
    std::string out;
    std::vector<std::string> regimes;
    std::optional<double> t_max;
    std::optional<double> kt;
    std::optional<double> epsilon;
    std::optional<std::string> r;
    std::optional<std::string> theta;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON experiment config");
        cmd->add_option("--preset", preset, "named preset (see list-presets)");
        cmd->add_option("--out", out, "output directory");
        cmd->add_option("--regime", regimes, "regime(s): markov, nonmarkov, markov_unsqueezed");
        cmd->add_option("--tmax", t_max, "integration horizon");
        cmd->add_option("--kt", kt, "bath temperature kT");
        cmd->add_option("--epsilon", epsilon, "initial-state amplitude epsilon");
        cmd->add_option("--r", r, "squeeze magnitude r");
        cmd->add_option("--theta", theta, "squeeze phase theta (accepts pi fractions, e.g. pi/6)");
    }

    void apply(ExperimentConfig& cfg) const {
        if (!regimes.empty()) {
            cfg.regimes.clear();
            for (const auto& name : regimes) {
                try {
                    cfg.regimes.push_back(regime_from_string(name));
                } catch (const std::invalid_argument& e) {
                    throw ConfigError(e.what());
                }
            }
        }
        if (t_max) cfg.integrator.t_max = *t_max;
        if (kt) cfg.bath.temperature = *kt;
        if (epsilon) cfg.initial_state.epsilon = *epsilon;
        if (r) cfg.bath.squeeze_r = parse_scalar(*r);
        if (theta) cfg.bath.squeeze_theta = parse_scalar(*theta);
        cfg.bath = cfg.bath.normalized();
    }

    // Runs described by --config or --preset, with overrides applied and
    // output paths resolved.
    std::vector<ExperimentConfig> configs() const {
        if (config_path.empty() == preset.empty()) throw ConfigError("give exactly one of --config or --preset");
        std::vector<ExperimentConfig> runs;
        if (!config_path.empty()) {
            runs.push_back(load_config(config_path));
        } else {
            runs = find_preset(preset).runs;
        }
        for (auto& cfg : runs) {
            apply(cfg);
            if (!out.empty()) cfg.output = out;
        }
        return runs;
    }
};

fs::path run_dir(const ExperimentConfig& cfg) {
    return cfg.label.empty() ? fs::path(cfg.output) : fs::path(cfg.output) / cfg.label;
}

int cmd_run(const Overrides& o) {
    const auto runs = o.configs();
    for (const auto& cfg : runs) cfg.validate();
    int status = exit_ok;
    for (const auto& cfg : runs) {
        const auto result = simulate(cfg);
        const auto dir = run_dir(cfg);
        write_outputs(result, dir);
        std::printf("%s: %s (%.2f s)\n", dir.string().c_str(), result.ok() ? "ok" : "FAILED", result.seconds);
        for (const auto& r : result.regimes) {
            std::printf("  %-18s cycles=%zu asymptotic_C=%.6f first_death=%s\n", to_string(r.regime).c_str(),
                        r.esd.cycle_count, r.esd.asymptotic_concurrence,
                        r.first_death() ? std::to_string(*r.first_death()).c_str() : "none");
        }
        if (!result.ok()) {
            std::fprintf(stderr, "numerical failure: %s\n", result.error.c_str());
            status = exit_numerical;
        }
    }
    return status;
}

int cmd_sweep(const Overrides& o, const std::string& parameter, const std::string& values_text) {
    const auto runs = o.configs();
    const auto& base = runs.front();
    std::vector<double> values;
    std::stringstream ss(values_text);
    std::string item;
    while (std::getline(ss, item, ',')) values.push_back(parse_scalar(item));

    const fs::path dir = o.out.empty() ? fs::path(base.output) / ("sweep_" + parameter) : fs::path(o.out);
    const auto result = sweep(base, parameter, values, dir);
    std::printf("%s\n", (dir / "sweep_summary.csv").string().c_str());
    for (const auto& p : result.points) {
        if (!p.result.ok()) {
            std::fprintf(stderr, "numerical failure at %s=%g: %s\n", parameter.c_str(), p.value,
                         p.result.error.c_str());
        }
    }
    return result.ok() ? exit_ok : exit_numerical;
}

int cmd_verify(const std::string& preset, const std::string& report_path) {
    const auto report = verify(preset);
    const auto j = report.to_json();
    std::cout << j.dump(2) << '\n';
    if (!report_path.empty()) {
        const fs::path file(report_path);
        if (file.has_parent_path()) fs::create_directories(file.parent_path());
        std::ofstream(file) << j.dump(2) << '\n';
    }
    return report.passed() ? exit_ok : exit_verify_failed;
}

int cmd_list() {
    for (const auto& p : preset_catalog()) {
        std::printf("%-14s %zu run(s)  %s\n", p.name.c_str(), p.runs.size(), p.description.c_str());
    }
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-qubit entanglement dynamics in a common squeezed reservoir"};
    app.require_subcommand(1);

    Overrides run_opts;
    auto* run = app.add_subcommand("run", "simulate a config or preset and write CSV/SVG outputs");
    run_opts.attach(run);

    Overrides sweep_opts;
    std::string parameter;
    std::string values;
    auto* sw = app.add_subcommand("sweep", "vary one scalar config field over a list of values");
    sweep_opts.attach(sw);
    sw->add_option("--param", parameter, "dotted config path, e.g. bath.temperature")->required();
    sw->add_option("--values", values, "comma-separated values, e.g. 0,2,5 or pi/6,pi")->required();

    std::string verify_preset;
    std::string report_path;
    auto* ver = app.add_subcommand("verify", "run a preset's acceptance assertions");
    ver->add_option("preset", verify_preset, "preset name")->required();
    ver->add_option("--report", report_path, "also write the JSON report here");

    auto* list = app.add_subcommand("list-presets", "list available presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    try {
        if (run->parsed()) return cmd_run(run_opts);
        if (sw->parsed()) return cmd_sweep(sweep_opts, parameter, values);
        if (ver->parsed()) return cmd_verify(verify_preset, report_path);
        if (list->parsed()) return cmd_list();
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return exit_config;
    } catch (const UnknownPreset& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return exit_config;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return exit_config;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_numerical;
    }
    return exit_config;
}
