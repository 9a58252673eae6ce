#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include <json.hpp>

#include "sqz/bath.hpp"
#include "sqz/dynamics.hpp"
#include "sqz/entanglement.hpp"
#include "sqz/qubits.hpp"

namespace sqz {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class InitialFamily { psi1, psi2, phi1, phi2, phi3, phi4, custom };

// Which squeezing numbers build phi1/phi4 (and Psi1): the zero-temperature
// values from r alone, or N(omega0), |M(omega0)| of the thermal bath.
enum class DfsParameters { vacuum, thermal };

struct InitialStateSpec {
    InitialFamily family = InitialFamily::psi1;
    double epsilon = 0.0;
    DfsParameters dfs_parameters = DfsParameters::vacuum;
    std::array<std::complex<double>, 4> amplitudes{};  // custom only; normalized on use
};

struct ExperimentConfig {
    std::string label;  // subdirectory for multi-run presets; empty for single runs
    BathSpec bath;
    double markov_gamma = 1.0;
    InitialStateSpec initial_state;
    std::vector<Regime> regimes{Regime::markov, Regime::nonmarkov};
    IntegratorConfig integrator;
    QuadratureConfig quadrature;
    EsdConfig esd;
    std::string output = "out";

    /// Throws ConfigError.
    void validate() const;
};

PureState make_initial_state(const ExperimentConfig& cfg);

nlohmann::json to_json(const ExperimentConfig& cfg);
/// Missing fields keep their defaults; unknown fields are rejected.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

/// Sets a numeric field addressed by a dotted path such as
/// "bath.temperature" or "initial_state.epsilon".
ExperimentConfig with_parameter(const ExperimentConfig& cfg, const std::string& path, double value);

/// Parses "0.5", "pi", "-pi/6", "2pi", "2*pi/3".
double parse_scalar(const std::string& text);

std::string to_string(InitialFamily family);

}  // namespace sqz
