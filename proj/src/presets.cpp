#include "sqz/presets.hpp"

#include <cstdio>

namespace sqz {

namespace {

std::string format_g(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

std::string kt_label(double kt) { return format_g("kt%g", kt); }

ExperimentConfig psi_run(InitialFamily family, double epsilon, double t_max) {
    ExperimentConfig c = reference_config();
    c.initial_state.family = family;
    c.initial_state.epsilon = epsilon;
    c.integrator.t_max = t_max;
    return c;
}

Preset single(std::string name, std::string description, ExperimentConfig run) {
    run.output = "out/" + name;
    return Preset{std::move(name), std::move(description), {std::move(run)}};
}

std::vector<Preset> build_catalog() {
    constexpr double t_fig = 15.0;
    std::vector<Preset> out;

    const double fig1_eps[] = {0.0, 0.5, 0.9, 1.0};
    const char* fig1_tag[] = {"a", "b", "c", "d"};
    for (int i = 0; i < 4; ++i) {
        out.push_back(single(std::string("fig1") + fig1_tag[i],
                             format_g("Psi1 initial state, epsilon = %g", fig1_eps[i]),
                             psi_run(InitialFamily::psi1, fig1_eps[i], t_fig)));
    }

    const double fig2_eps[] = {0.1, 0.4, 0.54, 0.707};
    for (int i = 0; i < 4; ++i) {
        out.push_back(single(std::string("fig2") + fig1_tag[i],
                             format_g("Psi2 initial state, epsilon = %g", fig2_eps[i]),
                             psi_run(InitialFamily::psi2, fig2_eps[i], t_fig)));
    }

    {
        Preset p{"fig2_singlet", "singlet (Psi2 with epsilon = 1) at kT = 0, 2, 5", {}};
        for (double kt : {0.0, 2.0, 5.0}) {
            auto c = psi_run(InitialFamily::psi2, 1.0, 5.0);
            c.bath.temperature = kt;
            c.label = kt_label(kt);
            c.output = "out/fig2_singlet";
            p.runs.push_back(c);
        }
        out.push_back(p);
    }

    {
        Preset p{"fig3a", "Markovian DFS state phi1 with r = 0.05 and r = 0.09, theta = 0", {}};
        for (double r : {0.05, 0.09}) {
            auto c = psi_run(InitialFamily::phi1, 0.0, 10.0);
            c.bath.squeeze_r = r;
            c.label = format_g("r%g", r);
            c.output = "out/fig3a";
            p.runs.push_back(c);
        }
        out.push_back(p);
    }

    {
        Preset p{"fig3b", "Markovian DFS state phi1 with theta = pi/6 and theta = pi, r = 0.3", {}};
        const std::pair<double, const char*> thetas[] = {{pi / 6.0, "theta_pi_6"}, {pi, "theta_pi"}};
        for (const auto& [theta, tag] : thetas) {
            auto c = psi_run(InitialFamily::phi1, 0.0, 10.0);
            c.bath.squeeze_r = 0.3;
            c.bath.squeeze_theta = theta;
            c.label = tag;
            c.output = "out/fig3b";
            p.runs.push_back(c);
        }
        out.push_back(p);
    }

    // Finite temperature variants of fig1a, fig1d, fig2a, fig2c.
    struct Fig4 {
        const char* name;
        InitialFamily family;
        double epsilon;
        const char* description;
    };
    const Fig4 fig4[] = {
        {"fig4a", InitialFamily::psi1, 0.0, "Psi1, epsilon = 0 at kT = 0, 2, 5"},
        {"fig4b", InitialFamily::phi1, 0.0, "phi1 (vacuum and thermal constructions) at kT = 0, 2, 5"},
        {"fig4c", InitialFamily::psi2, 0.1, "Psi2, epsilon = 0.1 at kT = 0, 2, 5"},
        {"fig4d", InitialFamily::psi2, 0.54, "Psi2, epsilon = 0.54 at kT = 0, 2, 5"},
    };
    for (const auto& f : fig4) {
        Preset p{f.name, f.description, {}};
        for (double kt : {0.0, 2.0, 5.0}) {
            auto c = psi_run(f.family, f.epsilon, t_fig);
            c.bath.temperature = kt;
            c.output = std::string("out/") + f.name;
            if (f.family == InitialFamily::phi1) {
                c.initial_state.dfs_parameters = DfsParameters::vacuum;
                c.label = kt_label(kt) + "/phi1_vacuum";
                p.runs.push_back(c);
                c.initial_state.dfs_parameters = DfsParameters::thermal;
                c.label = kt_label(kt) + "/phi1_thermal";
                p.runs.push_back(c);
            } else {
                c.label = kt_label(kt);
                p.runs.push_back(c);
            }
        }
        out.push_back(p);
    }
    return out;
}

}  // namespace

ExperimentConfig reference_config() {
    ExperimentConfig c;
    c.bath.coupling = 1.0 / pi;
    c.bath.omega0 = 1.0;
    c.bath.cutoff = 1.0;
    c.bath.squeeze_r = 0.31;
    c.bath.squeeze_theta = 0.0;
    c.bath.temperature = 0.0;
    c.markov_gamma = 1.0;
    c.regimes = {Regime::markov, Regime::nonmarkov};
    return c;
}

const std::vector<Preset>& preset_catalog() {
    static const std::vector<Preset> catalog = build_catalog();
    return catalog;
}

const Preset& find_preset(const std::string& name) {
    for (const auto& p : preset_catalog()) {
        if (p.name == name) return p;
    }
    throw UnknownPreset("unknown preset '" + name + "'");
}

}  // namespace sqz
