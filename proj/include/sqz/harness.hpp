#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sqz/config.hpp"
#include "sqz/presets.hpp"

namespace sqz {

/// Raised when a run fails numerically (quadrature, integration, or a state
/// too far from positive); maps to CLI exit code 3.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RegimeResult {
    Regime regime = Regime::markov;
    Trajectory trajectory;
    std::vector<double> concurrence;
    EsdReport esd;
    std::optional<double> first_death() const;
};

struct RunResult {
    ExperimentConfig config;
    std::vector<RegimeResult> regimes;
    std::shared_ptr<const CoefficientTable> table;  // non-Markov runs only
    double seconds = 0.0;
    std::string error;  // non-empty when a regime failed; regimes holds the completed ones

    const RegimeResult* find(Regime r) const;
    const RegimeResult& at(Regime r) const;
    bool ok() const { return error.empty(); }
};

/// Generator for one regime of a config (builds or reuses the coefficient
/// table for the non-Markov regime).
GeneratorSpec make_generator(const ExperimentConfig& cfg, Regime regime);

/// Coefficient table for a config, memoized process-wide by bath,
/// quadrature settings and horizon. Safe to call concurrently.
std::shared_ptr<const CoefficientTable> coefficient_table_for(const ExperimentConfig& cfg);

/// Step used for the coefficient table of a config.
double table_step_for(const ExperimentConfig& cfg);

/// Runs every selected regime. Numerical failures are captured in
/// RunResult::error rather than thrown; ConfigError propagates.
RunResult simulate(const ExperimentConfig& cfg);

// Output files. All CSV uses 17 significant digits, ',' separators, LF.
void write_trajectory_csv(const RegimeResult& r, const std::filesystem::path& file);
void write_coefficients_csv(const CoefficientTable& table, const std::filesystem::path& file);
void write_esd_csv(const EsdReport& report, const std::filesystem::path& file);
void write_concurrence_svg(const RunResult& run, const std::filesystem::path& file);
nlohmann::json run_summary(const RunResult& run);

/// Writes all outputs of a run into `dir` and returns the run summary.
nlohmann::json write_outputs(const RunResult& run, const std::filesystem::path& dir);

struct PresetRun {
    std::string name;
    std::vector<RunResult> runs;  // parallel to the preset's runs
    bool ok() const;
};

/// Simulates every run of a preset, optionally with a config transform.
PresetRun run_preset(const Preset& preset, const std::function<void(ExperimentConfig&)>& adjust = {});

struct SweepPoint {
    double value;
    RunResult result;
};

struct SweepResult {
    std::string parameter;
    std::vector<SweepPoint> points;
    bool ok() const;
};

/// One run per value (executed concurrently); writes per-value outputs under
/// `out_dir/<parameter>=<value>/` and `out_dir/sweep_summary.csv` when
/// out_dir is non-empty.
SweepResult sweep(const ExperimentConfig& base, const std::string& parameter, const std::vector<double>& values,
                  const std::filesystem::path& out_dir);

struct Assertion {
    std::string name;
    double measured;
    double bound;
    std::string relation;  // "<", "<=", ">", ">=", "==", or "info"
    bool passed;
};

struct VerifyReport {
    std::string preset;
    std::vector<Assertion> assertions;
    bool passed() const;
    nlohmann::json to_json() const;
};

/// Runs a preset and evaluates the acceptance assertions that apply to it.
/// Throws UnknownPreset.
VerifyReport verify(const std::string& preset_name);
VerifyReport verify(const PresetRun& run);

/// Names accepted by verify(): the catalog.
std::vector<std::string> verifiable_presets();

}  // namespace sqz
