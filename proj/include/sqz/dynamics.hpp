#pragma once

// Right-hand sides of the Markovian and time-local non-Markovian master
// equations (interaction picture) and the time integrators that drive them.

#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sqz/bath.hpp"
#include "sqz/qubits.hpp"

namespace sqz {

enum class Regime { markov, nonmarkov, markov_unsqueezed };

std::string to_string(Regime regime);
Regime regime_from_string(const std::string& name);

struct MarkovParams {
    double gamma = 1.0;
    double n = 0.0;      // N
    double m = 0.0;      // M, a non-negative magnitude
    double theta = 0.0;  // squeezing phase
};

/// Markov parameters from a bath at the qubit frequency: N(omega0),
/// |M(omega0)| and the bath phase.
MarkovParams markov_params_from_bath(const BathSpec& bath, double gamma);

/// Where a non-Markov generator gets its coefficients.
struct CoefficientSource {
    std::shared_ptr<const CoefficientTable> table;  // preferred
    std::optional<BathSpec> bath;                   // direct quadrature (validation mode)
    QuadratureConfig quadrature;
    std::optional<CoefficientSet> frozen;           // constant coefficients

    CoefficientSet at(double t) const;
    /// Latest time the source can serve; infinity for direct/frozen sources.
    double t_max() const;
};

struct GeneratorSpec {
    Regime regime = Regime::markov;
    MarkovParams markov;
    CoefficientSource source;

    static GeneratorSpec make_markov(const MarkovParams& p);
    static GeneratorSpec make_markov_unsqueezed(double gamma, double n);
    static GeneratorSpec make_nonmarkov(std::shared_ptr<const CoefficientTable> table);
    static GeneratorSpec make_nonmarkov_direct(const BathSpec& bath, const QuadratureConfig& quad);
    static GeneratorSpec make_frozen(const CoefficientSet& c);

    void validate() const;
};

Operator nonmarkov_rhs(const Operator& rho, const CoefficientSet& c);
Operator markov_rhs(const Operator& rho, const MarkovParams& p);
Operator markov_rhs(const Operator& rho, const GeneratorSpec& g);

/// d rho / dt at time t for any regime.
Operator generator_rhs(double t, const Operator& rho, const GeneratorSpec& g);

enum class IntegratorMethod { rk4_fixed, rk45_adaptive };

struct IntegratorConfig {
    IntegratorMethod method = IntegratorMethod::rk45_adaptive;
    double dt = 0.01;          // RK4 step; output grid spacing for RK45
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    double dt_min = 1e-12;
    double dt_max = 0.005;
    double t_max = 10.0;
    std::size_t sample_stride = 1;  // keep every n-th output grid point

    void validate() const;
};

struct SampleDiagnostics {
    double trace_dev = 0.0;  // |Tr rho - 1| before renormalization
    double herm_dev = 0.0;   // max |rho - rho^dagger| before hermitization
    double min_eig = 0.0;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<DensityMatrix> states;
    std::vector<SampleDiagnostics> diagnostics;

    // Worst pre-enforcement deviations over every accepted step, not only
    // the stored samples.
    double max_trace_dev = 0.0;
    double max_herm_dev = 0.0;
    std::size_t accepted_steps = 0;
    std::size_t rejected_steps = 0;
};

class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, double time) : std::runtime_error(what), time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

Trajectory evolve(const DensityMatrix& rho0, const GeneratorSpec& g, const IntegratorConfig& cfg);

}  // namespace sqz
