#pragma once

// Squeezed thermal reservoir with an Ohmic, Gaussian-cutoff spectral density
// and the time-dependent coefficients of the time-local two-qubit master
// equation. Natural units: hbar = k_B = 1, frequencies and temperature in
// units of the qubit frequency by default.

#include <complex>
#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

namespace sqz {

using complex = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

struct BathSpec {
    double coupling = 1.0 / pi;  // Gamma, dimensionless
    double omega0 = 1.0;         // qubit transition frequency
    double cutoff = 1.0;         // omega_c
    double squeeze_r = 0.0;
    double squeeze_theta = 0.0;  // radians
    double temperature = 0.0;    // k_B T; zero selects the squeezed vacuum

    /// Throws std::invalid_argument if any invariant is violated.
    void validate() const;

    /// Copy with theta reduced to [0, 2pi).
    BathSpec normalized() const;
};

struct QuadratureConfig {
    double tol = 1e-10;                   // absolute tolerance per coefficient
    std::size_t max_subdivisions = 200000;
    std::optional<double> omega_max;      // default omega0 + 6 * cutoff
    double resolution = 1.0;              // seed-panel density multiplier
    std::optional<double> table_step;     // h_coeff; default from default_table_step

    void validate() const;
};

struct CoefficientSet {
    double t = 0.0;
    complex delta{};
    complex mu{};
    complex alpha{};
};

// Reservoir spectral functions.
double planck_occupancy(double omega, double kt);
double occupancy_N(double omega, const BathSpec& bath);
complex correlation_M(double omega, const BathSpec& bath);
double spectral_density(double omega, const BathSpec& bath);

// Analytic inner time integrals of the coefficient definitions, with
// detuning delta = omega0 - omega.
complex memory_kernel(double delta, double t);
complex anomalous_kernel(double delta, double t);

/// Integrand weights J*N, J*(1+N) and J*M at omega, using the finite
/// omega -> 0 limit at nonzero temperature.
struct SpectralWeights {
    double jn;
    double jn1;
    complex jm;
};
SpectralWeights spectral_weights(double omega, const BathSpec& bath);

double default_omega_max(const BathSpec& bath);

/// Step for the coefficient cache: min(0.005 / gamma_eff, period / 20) where
/// gamma_eff = 2 pi J(omega0) (2 N(omega0) + 1) is the asymptotic decay scale.
double default_table_step(const BathSpec& bath);

/// Delta(t), mu(t), alpha(t) by adaptive quadrature over [0, omega_max].
/// Throws QuadratureError when the tolerance cannot be met.
CoefficientSet coefficients(double t, const BathSpec& bath, const QuadratureConfig& quad);

/// Immutable uniform-grid cache of coefficients with 4-point cubic
/// (Lagrange) interpolation; exact at nodes.
class CoefficientTable {
public:
    static CoefficientTable build(const BathSpec& bath, double t_max, double h_coeff,
                                  const QuadratureConfig& quad);

    CoefficientSet at(double t) const;

    double step() const { return step_; }
    double t_max() const { return t_max_; }
    std::size_t size() const { return nodes_.size(); }
    const std::vector<CoefficientSet>& nodes() const { return nodes_; }

    /// Max deviation between interpolated and directly evaluated coefficients
    /// at the sampled half-step points checked during build().
    double interpolation_error() const { return interpolation_error_; }

private:
    CoefficientTable(std::vector<CoefficientSet> nodes, double step, double t_max)
        : nodes_(std::move(nodes)), step_(step), t_max_(t_max) {}

    std::vector<CoefficientSet> nodes_;
    double step_;
    double t_max_;
    double interpolation_error_ = 0.0;
};

}  // namespace sqz
