#include "sqz/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace sqz {

using nlohmann::json;

namespace {

const std::array<std::pair<InitialFamily, const char*>, 7> family_names = {{
    {InitialFamily::psi1, "psi1"},
    {InitialFamily::psi2, "psi2"},
    {InitialFamily::phi1, "phi1"},
    {InitialFamily::phi2, "phi2"},
    {InitialFamily::phi3, "phi3"},
    {InitialFamily::phi4, "phi4"},
    {InitialFamily::custom, "custom"},
}};

InitialFamily family_from_string(const std::string& s) {
    for (const auto& [f, name] : family_names) {
        if (s == name) return f;
    }
    throw ConfigError("unknown initial_state.family '" + s + "'");
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.count(key)) throw ConfigError("unknown field '" + where + "." + key + "'");
    }
}

template <class T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("bad value for '" + where + "." + key + "': " + e.what());
    }
}

void read_optional(const json& obj, const char* key, std::optional<double>& out, const std::string& where) {
    if (!obj.contains(key)) return;
    if (obj.at(key).is_null()) {
        out.reset();
        return;
    }
    double v = 0.0;
    read(obj, key, v, where);
    out = v;
}

json optional_to_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::pair<double, double> thermal_dfs_numbers(const BathSpec& bath) {
    return {occupancy_N(bath.omega0, bath), std::abs(correlation_M(bath.omega0, bath))};
}

}  // namespace

std::string to_string(InitialFamily family) {
    for (const auto& [f, name] : family_names) {
        if (f == family) return name;
    }
    return "unknown";
}

void ExperimentConfig::validate() const {
    try {
        bath.validate();
        integrator.validate();
        quadrature.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (regimes.empty()) throw ConfigError("at least one regime must be selected");
    if (!(markov_gamma > 0.0)) throw ConfigError("markov_gamma must be > 0");
    if (!(esd.threshold >= 0.0)) throw ConfigError("esd.threshold must be >= 0");
    if (esd.min_width == 0) throw ConfigError("esd.min_width must be >= 1");

    const auto& s = initial_state;
    const bool uses_epsilon = s.family == InitialFamily::psi1 || s.family == InitialFamily::psi2;
    if (uses_epsilon && !(s.epsilon >= 0.0 && s.epsilon <= 1.0)) {
        throw ConfigError("initial_state.epsilon must lie in [0, 1]");
    }
    const bool uses_r = s.family == InitialFamily::psi1 || s.family == InitialFamily::phi1 ||
                        s.family == InitialFamily::phi4;
    if (uses_r && s.dfs_parameters == DfsParameters::vacuum && !(bath.squeeze_r > 0.0)) {
        throw ConfigError("initial state " + to_string(s.family) + " needs bath.squeeze_r > 0");
    }
    if (s.family == InitialFamily::custom) {
        double norm = 0.0;
        for (const auto& a : s.amplitudes) norm += std::norm(a);
        if (!(norm > 0.0) || !std::isfinite(norm)) throw ConfigError("custom amplitudes must be a nonzero vector");
    }
}

PureState make_initial_state(const ExperimentConfig& cfg) {
    const auto& s = cfg.initial_state;
    const auto& b = cfg.bath;
    auto dfs_numbers = [&]() -> std::pair<double, double> {
        if (s.dfs_parameters == DfsParameters::thermal) return thermal_dfs_numbers(b);
        const double sh = std::sinh(b.squeeze_r);
        return {sh * sh, sh * std::cosh(b.squeeze_r)};
    };
    switch (s.family) {
        case InitialFamily::psi1: {
            const auto [n, m] = dfs_numbers();
            return initial_psi1_from(s.epsilon, n, m, b.squeeze_theta);
        }
        case InitialFamily::psi2: return initial_psi2(s.epsilon);
        case InitialFamily::phi1: {
            const auto [n, m] = dfs_numbers();
            return phi1_from(n, m, b.squeeze_theta);
        }
        case InitialFamily::phi2: return dfs_state_phi2();
        case InitialFamily::phi3: return dfs_state_phi3();
        case InitialFamily::phi4: {
            const auto [n, m] = dfs_numbers();
            return phi4_from(n, m, b.squeeze_theta);
        }
        case InitialFamily::custom: {
            Ket v;
            for (int i = 0; i < 4; ++i) v[i] = s.amplitudes[static_cast<std::size_t>(i)];
            return normalized_state(v);
        }
    }
    throw ConfigError("unhandled initial state family");
}

json to_json(const ExperimentConfig& cfg) {
    json j;
    j["label"] = cfg.label;
    j["bath"] = {
        {"coupling", cfg.bath.coupling},
        {"omega0", cfg.bath.omega0},
        {"cutoff", cfg.bath.cutoff},
        {"squeeze_r", cfg.bath.squeeze_r},
        {"squeeze_theta", cfg.bath.squeeze_theta},
        {"temperature", cfg.bath.temperature},
    };
    j["markov_gamma"] = cfg.markov_gamma;

    json amps = json::array();
    for (const auto& a : cfg.initial_state.amplitudes) amps.push_back({a.real(), a.imag()});
    j["initial_state"] = {
        {"family", to_string(cfg.initial_state.family)},
        {"epsilon", cfg.initial_state.epsilon},
        {"dfs_parameters", cfg.initial_state.dfs_parameters == DfsParameters::thermal ? "thermal" : "vacuum"},
        {"amplitudes", amps},
    };

    json regimes = json::array();
    for (auto r : cfg.regimes) regimes.push_back(to_string(r));
    j["regimes"] = regimes;

    const auto& in = cfg.integrator;
    j["integrator"] = {
        {"method", in.method == IntegratorMethod::rk4_fixed ? "rk4_fixed" : "rk45_adaptive"},
        {"dt", in.dt},
        {"rel_tol", in.rel_tol},
        {"abs_tol", in.abs_tol},
        {"dt_min", in.dt_min},
        {"dt_max", in.dt_max},
        {"t_max", in.t_max},
        {"sample_stride", in.sample_stride},
    };
    const auto& q = cfg.quadrature;
    j["quadrature"] = {
        {"tol", q.tol},
        {"max_subdivisions", q.max_subdivisions},
        {"omega_max", optional_to_json(q.omega_max)},
        {"resolution", q.resolution},
        {"table_step", optional_to_json(q.table_step)},
    };
    j["esd"] = {{"threshold", cfg.esd.threshold}, {"min_width", cfg.esd.min_width}};
    j["output"] = cfg.output;
    return j;
}

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig cfg;
    reject_unknown(j, {"label", "bath", "markov_gamma", "initial_state", "regimes", "integrator", "quadrature", "esd",
                       "output"},
                   "config");
    read(j, "label", cfg.label, "config");
    read(j, "markov_gamma", cfg.markov_gamma, "config");
    read(j, "output", cfg.output, "config");

    if (j.contains("bath")) {
        const auto& b = j.at("bath");
        reject_unknown(b, {"coupling", "omega0", "cutoff", "squeeze_r", "squeeze_theta", "temperature"}, "bath");
        read(b, "coupling", cfg.bath.coupling, "bath");
        read(b, "omega0", cfg.bath.omega0, "bath");
        read(b, "cutoff", cfg.bath.cutoff, "bath");
        read(b, "squeeze_r", cfg.bath.squeeze_r, "bath");
        read(b, "squeeze_theta", cfg.bath.squeeze_theta, "bath");
        read(b, "temperature", cfg.bath.temperature, "bath");
    }
    cfg.bath = cfg.bath.normalized();

    if (j.contains("initial_state")) {
        const auto& s = j.at("initial_state");
        reject_unknown(s, {"family", "epsilon", "dfs_parameters", "amplitudes"}, "initial_state");
        std::string family = to_string(cfg.initial_state.family);
        read(s, "family", family, "initial_state");
        cfg.initial_state.family = family_from_string(family);
        read(s, "epsilon", cfg.initial_state.epsilon, "initial_state");
        std::string dfs = "vacuum";
        read(s, "dfs_parameters", dfs, "initial_state");
        if (dfs == "vacuum") {
            cfg.initial_state.dfs_parameters = DfsParameters::vacuum;
        } else if (dfs == "thermal") {
            cfg.initial_state.dfs_parameters = DfsParameters::thermal;
        } else {
            throw ConfigError("initial_state.dfs_parameters must be 'vacuum' or 'thermal'");
        }
        if (s.contains("amplitudes")) {
            const auto& a = s.at("amplitudes");
            if (!a.is_array() || a.size() != 4) throw ConfigError("initial_state.amplitudes needs 4 entries");
            for (std::size_t i = 0; i < 4; ++i) {
                const auto& e = a[i];
                if (e.is_number()) {
                    cfg.initial_state.amplitudes[i] = e.get<double>();
                } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
                    cfg.initial_state.amplitudes[i] = {e[0].get<double>(), e[1].get<double>()};
                } else {
                    throw ConfigError("initial_state.amplitudes entries must be numbers or [re, im] pairs");
                }
            }
        }
    }

    if (j.contains("regimes")) {
        const auto& r = j.at("regimes");
        if (!r.is_array()) throw ConfigError("regimes must be an array");
        cfg.regimes.clear();
        for (const auto& name : r) {
            if (!name.is_string()) throw ConfigError("regimes entries must be strings");
            try {
                cfg.regimes.push_back(regime_from_string(name.get<std::string>()));
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
        }
    }

    if (j.contains("integrator")) {
        const auto& in = j.at("integrator");
        reject_unknown(in, {"method", "dt", "rel_tol", "abs_tol", "dt_min", "dt_max", "t_max", "sample_stride"},
                       "integrator");
        std::string method = "rk45_adaptive";
        read(in, "method", method, "integrator");
        if (method == "rk45_adaptive") {
            cfg.integrator.method = IntegratorMethod::rk45_adaptive;
        } else if (method == "rk4_fixed") {
            cfg.integrator.method = IntegratorMethod::rk4_fixed;
        } else {
            throw ConfigError("integrator.method must be 'rk45_adaptive' or 'rk4_fixed'");
        }
        read(in, "dt", cfg.integrator.dt, "integrator");
        read(in, "rel_tol", cfg.integrator.rel_tol, "integrator");
        read(in, "abs_tol", cfg.integrator.abs_tol, "integrator");
        read(in, "dt_min", cfg.integrator.dt_min, "integrator");
        read(in, "dt_max", cfg.integrator.dt_max, "integrator");
        read(in, "t_max", cfg.integrator.t_max, "integrator");
        read(in, "sample_stride", cfg.integrator.sample_stride, "integrator");
    }

    if (j.contains("quadrature")) {
        const auto& q = j.at("quadrature");
        reject_unknown(q, {"tol", "max_subdivisions", "omega_max", "resolution", "table_step"}, "quadrature");
        read(q, "tol", cfg.quadrature.tol, "quadrature");
        read(q, "max_subdivisions", cfg.quadrature.max_subdivisions, "quadrature");
        read_optional(q, "omega_max", cfg.quadrature.omega_max, "quadrature");
        read(q, "resolution", cfg.quadrature.resolution, "quadrature");
        read_optional(q, "table_step", cfg.quadrature.table_step, "quadrature");
    }

    if (j.contains("esd")) {
        const auto& e = j.at("esd");
        reject_unknown(e, {"threshold", "min_width"}, "esd");
        read(e, "threshold", cfg.esd.threshold, "esd");
        read(e, "min_width", cfg.esd.min_width, "esd");
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("config parse error in '" + path + "': " + e.what());
    }
    return config_from_json(j);
}

ExperimentConfig with_parameter(const ExperimentConfig& cfg, const std::string& path, double value) {
    json j = to_json(cfg);
    json* node = &j;
    std::stringstream ss(path);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) parts.push_back(part);
    if (parts.empty()) throw ConfigError("empty parameter path");
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (!node->is_object() || !node->contains(parts[i])) {
            throw ConfigError("parameter path '" + path + "' does not exist");
        }
        node = &(*node)[parts[i]];
    }
    if (!node->is_number() && !node->is_null()) {
        throw ConfigError("parameter path '" + path + "' does not address a scalar number");
    }
    if (node->is_number_unsigned() || node->is_number_integer()) {
        if (value < 0.0 || value != std::floor(value)) {
            throw ConfigError("parameter '" + path + "' needs a non-negative integer");
        }
        *node = static_cast<std::uint64_t>(value);
    } else {
        *node = value;
    }
    return config_from_json(j);
}

double parse_scalar(const std::string& raw) {
    std::string s;
    for (char c : raw) {
        if (c != ' ' && c != '*') s += c;
    }
    if (s.empty()) throw ConfigError("empty numeric value");

    const auto pi_pos = s.find("pi");
    try {
        if (pi_pos == std::string::npos) {
            std::size_t used = 0;
            const double v = std::stod(s, &used);
            if (used != s.size()) throw ConfigError("bad numeric value '" + raw + "'");
            return v;
        }
        const std::string head = s.substr(0, pi_pos);
        const std::string tail = s.substr(pi_pos + 2);
        double factor = 1.0;
        if (head == "-") {
            factor = -1.0;
        } else if (!head.empty() && head != "+") {
            std::size_t used = 0;
            factor = std::stod(head, &used);
            if (used != head.size()) throw ConfigError("bad numeric value '" + raw + "'");
        }
        double divisor = 1.0;
        if (!tail.empty()) {
            if (tail[0] != '/') throw ConfigError("bad numeric value '" + raw + "'");
            std::size_t used = 0;
            divisor = std::stod(tail.substr(1), &used);
            if (used != tail.size() - 1 || divisor == 0.0) throw ConfigError("bad numeric value '" + raw + "'");
        }
        return factor * pi / divisor;
    } catch (const std::logic_error&) {
        throw ConfigError("bad numeric value '" + raw + "'");
    }
}

}  // namespace sqz
