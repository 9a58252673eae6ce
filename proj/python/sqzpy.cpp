// Python bindings: bath functions, states, generators, concurrence and the
// experiment harness. Configs cross the boundary as plain dicts.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sqz/harness.hpp"
#include "sqz/quadrature.hpp"

namespace py = pybind11;
using namespace sqz;
using nlohmann::json;

namespace {

json to_cpp(const py::handle& obj) {
    const auto text = py::module_::import("json").attr("dumps")(obj).cast<std::string>();
    return json::parse(text);
}

py::object to_py(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

ExperimentConfig config_from(const py::object& cfg) {
    if (py::isinstance<py::str>(cfg)) return config_from_json(json::parse(cfg.cast<std::string>()));
    return config_from_json(to_cpp(cfg));
}

py::dict regime_dict(const RegimeResult& r) {
    const auto& tr = r.trajectory;
    const auto n = static_cast<py::ssize_t>(tr.times.size());
    py::array_t<std::complex<double>> states({n, py::ssize_t{4}, py::ssize_t{4}});
    auto s = states.mutable_unchecked<3>();
    py::array_t<double> min_eig(n);
    auto me = min_eig.mutable_unchecked<1>();
    for (py::ssize_t k = 0; k < n; ++k) {
        const auto& rho = tr.states[k].entries();
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) s(k, i, j) = rho(i, j);
        me(k) = tr.diagnostics[k].min_eig;
    }
    py::dict d;
    d["times"] = py::array_t<double>(n, tr.times.data());
    d["concurrence"] = py::array_t<double>(n, r.concurrence.data());
    d["states"] = states;
    d["min_eigenvalue"] = min_eig;
    d["max_trace_dev"] = tr.max_trace_dev;
    d["max_herm_dev"] = tr.max_herm_dev;
    py::list intervals;
    for (const auto& iv : r.esd.dead_intervals) intervals.append(py::make_tuple(iv.t_start, iv.t_end, iv.revived));
    d["dead_intervals"] = intervals;
    d["cycle_count"] = r.esd.cycle_count;
    d["asymptotic_concurrence"] = r.esd.asymptotic_concurrence;
    d["first_death_time"] = r.first_death() ? py::object(py::float_(*r.first_death())) : py::object(py::none());
    return d;
}

py::dict run_dict(const RunResult& run) {
    py::dict out;
    out["ok"] = run.ok();
    out["error"] = run.error;
    out["label"] = run.config.label;
    out["config"] = to_py(to_json(run.config));
    out["seconds"] = run.seconds;
    py::dict regimes;
    for (const auto& r : run.regimes) regimes[py::str(to_string(r.regime))] = regime_dict(r);
    out["regimes"] = regimes;
    return out;
}

}  // namespace

PYBIND11_MODULE(sqzpy, m) {
    m.doc() = "Two-qubit entanglement dynamics in a common squeezed reservoir";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<UnknownPreset>(m, "UnknownPreset", PyExc_KeyError);
    py::register_exception<QuadratureError>(m, "QuadratureError", PyExc_RuntimeError);
    py::register_exception<IntegrationError>(m, "IntegrationError", PyExc_RuntimeError);
    py::register_exception<NegativeStateError>(m, "NegativeStateError", PyExc_RuntimeError);

    m.attr("pi") = pi;

    py::class_<BathSpec>(m, "BathSpec")
        .def(py::init([](double coupling, double omega0, double cutoff, double r, double theta, double kt) {
                 BathSpec b{coupling, omega0, cutoff, r, theta, kt};
                 b.validate();
                 return b;
             }),
             py::arg("coupling") = 1.0 / pi, py::arg("omega0") = 1.0, py::arg("cutoff") = 1.0,
             py::arg("squeeze_r") = 0.0, py::arg("squeeze_theta") = 0.0, py::arg("temperature") = 0.0)
        .def_readwrite("coupling", &BathSpec::coupling)
        .def_readwrite("omega0", &BathSpec::omega0)
        .def_readwrite("cutoff", &BathSpec::cutoff)
        .def_readwrite("squeeze_r", &BathSpec::squeeze_r)
        .def_readwrite("squeeze_theta", &BathSpec::squeeze_theta)
        .def_readwrite("temperature", &BathSpec::temperature)
        .def("__repr__", [](const BathSpec& b) {
            return "BathSpec(coupling=" + std::to_string(b.coupling) + ", squeeze_r=" + std::to_string(b.squeeze_r) +
                   ", squeeze_theta=" + std::to_string(b.squeeze_theta) +
                   ", temperature=" + std::to_string(b.temperature) + ")";
        });

    // Reservoir
    m.def("planck_occupancy", &planck_occupancy, py::arg("omega"), py::arg("kt"));
    m.def("occupancy_N", &occupancy_N, py::arg("omega"), py::arg("bath"));
    m.def("correlation_M", &correlation_M, py::arg("omega"), py::arg("bath"));
    m.def("spectral_density", &spectral_density, py::arg("omega"), py::arg("bath"));
    m.def("memory_kernel", &memory_kernel, py::arg("delta"), py::arg("t"));
    m.def("anomalous_kernel", &anomalous_kernel, py::arg("delta"), py::arg("t"));
    m.def(
        "coefficients",
        [](double t, const BathSpec& bath, double tol, double resolution) {
            QuadratureConfig q;
            q.tol = tol;
            q.resolution = resolution;
            const auto c = coefficients(t, bath, q);
            return py::make_tuple(c.delta, c.mu, c.alpha);
        },
        py::arg("t"), py::arg("bath"), py::arg("tol") = 1e-10, py::arg("resolution") = 1.0,
        "(Delta, mu, alpha) at time t");
    m.def(
        "coefficient_table",
        [](const BathSpec& bath, double t_max, std::optional<double> step, double tol) {
            QuadratureConfig q;
            q.tol = tol;
            const auto table = CoefficientTable::build(bath, t_max, step.value_or(default_table_step(bath)), q);
            const auto n = static_cast<py::ssize_t>(table.size());
            py::array_t<double> t(n);
            py::array_t<std::complex<double>> delta(n), mu(n), alpha(n);
            for (py::ssize_t i = 0; i < n; ++i) {
                const auto& c = table.nodes()[i];
                t.mutable_at(i) = c.t;
                delta.mutable_at(i) = c.delta;
                mu.mutable_at(i) = c.mu;
                alpha.mutable_at(i) = c.alpha;
            }
            py::dict d;
            d["t"] = t;
            d["delta"] = delta;
            d["mu"] = mu;
            d["alpha"] = alpha;
            d["interpolation_error"] = table.interpolation_error();
            return d;
        },
        py::arg("bath"), py::arg("t_max"), py::arg("step") = py::none(), py::arg("tol") = 1e-10);
    m.def("default_table_step", &default_table_step, py::arg("bath"));

    // States and operators
    m.def("collective_lowering", &collective_lowering);
    m.def("collective_raising", &collective_raising);
    m.def("squeezed_lindblad_operator", &squeezed_lindblad_operator, py::arg("n"), py::arg("theta"));
    auto ket = [](const PureState& s) -> Ket { return s.amplitudes(); };
    m.def("dfs_state_phi1", [ket](double r, double theta) { return ket(dfs_state_phi1(r, theta)); }, py::arg("r"),
          py::arg("theta") = 0.0);
    m.def("dfs_state_phi2", [ket] { return ket(dfs_state_phi2()); });
    m.def("dfs_state_phi3", [ket] { return ket(dfs_state_phi3()); });
    m.def("dfs_state_phi4", [ket](double r, double theta) { return ket(dfs_state_phi4(r, theta)); }, py::arg("r"),
          py::arg("theta") = 0.0);
    m.def("initial_psi1", [ket](double eps, double r, double theta) { return ket(initial_psi1(eps, r, theta)); },
          py::arg("epsilon"), py::arg("r"), py::arg("theta") = 0.0);
    m.def("initial_psi2", [ket](double eps) { return ket(initial_psi2(eps)); }, py::arg("epsilon"));
    m.def("density_from_pure", [](const Ket& k) { return density_from_pure(PureState(k)).entries(); },
          py::arg("ket"));

    // Generators
    m.def("markov_rhs",
          [](const Operator& rho, double gamma, double n, double mm, double theta) {
              return markov_rhs(rho, MarkovParams{gamma, n, mm, theta});
          },
          py::arg("rho"), py::arg("gamma"), py::arg("n"), py::arg("m"), py::arg("theta"));
    m.def("nonmarkov_rhs",
          [](const Operator& rho, std::complex<double> delta, std::complex<double> mu, std::complex<double> alpha) {
              return nonmarkov_rhs(rho, CoefficientSet{0.0, delta, mu, alpha});
          },
          py::arg("rho"), py::arg("delta"), py::arg("mu"), py::arg("alpha"));

    // Entanglement
    m.def("spin_flip", &spin_flip, py::arg("rho"));
    m.def("concurrence", py::overload_cast<const Operator&>(&concurrence), py::arg("rho"));
    m.def("concurrence_roots", &concurrence_roots, py::arg("rho"));
    m.def(
        "detect_esd",
        [](const std::vector<double>& t, const std::vector<double>& c, double threshold, std::size_t min_width) {
            const auto r = detect_esd(t, c, EsdConfig{threshold, min_width});
            py::list intervals;
            for (const auto& iv : r.dead_intervals) intervals.append(py::make_tuple(iv.t_start, iv.t_end, iv.revived));
            py::dict d;
            d["dead_intervals"] = intervals;
            d["cycle_count"] = r.cycle_count;
            d["asymptotic_concurrence"] = r.asymptotic_concurrence;
            return d;
        },
        py::arg("times"), py::arg("concurrence"), py::arg("threshold") = 1e-3, py::arg("min_width") = 5);

    // Harness
    m.def("reference_config", [] { return to_py(to_json(reference_config())); });
    m.def("preset_names", [] {
        std::vector<std::string> names;
        for (const auto& p : preset_catalog()) names.push_back(p.name);
        return names;
    });
    m.def(
        "preset_configs",
        [](const std::string& name) {
            py::list out;
            for (const auto& c : find_preset(name).runs) out.append(to_py(to_json(c)));
            return out;
        },
        py::arg("name"));
    m.def(
        "simulate",
        [](const py::object& cfg) {
            const auto c = config_from(cfg);
            RunResult run;
            {
                py::gil_scoped_release release;
                run = simulate(c);
            }
            return run_dict(run);
        },
        py::arg("config"), "Run a config (dict or JSON string); returns trajectories and ESD data per regime");
    m.def(
        "run",
        [](const py::object& cfg, const std::string& out_dir) {
            const auto c = config_from(cfg);
            json summary;
            {
                py::gil_scoped_release release;
                summary = write_outputs(simulate(c), out_dir);
            }
            return to_py(summary);
        },
        py::arg("config"), py::arg("out_dir"), "Run a config and write CSV/SVG outputs; returns the summary");
    m.def(
        "verify",
        [](const std::string& name) {
            VerifyReport rep;
            {
                py::gil_scoped_release release;
                rep = verify(name);
            }
            return to_py(rep.to_json());
        },
        py::arg("preset"));
}
