#pragma once

#include <string>
#include <vector>

#include "sqz/config.hpp"

namespace sqz {

/// A named set of labelled runs sharing a theme.
struct Preset {
    std::string name;
    std::string description;
    std::vector<ExperimentConfig> runs;
};

class UnknownPreset : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Reference parameters: r = 0.31, theta = 0, gamma = 1, omega_c = omega0 = 1,
/// Gamma = 1/pi.
ExperimentConfig reference_config();

const std::vector<Preset>& preset_catalog();
const Preset& find_preset(const std::string& name);

}  // namespace sqz
