#pragma once

// Two-qubit operator algebra in the fixed product basis
// (|00>, |01>, |10>, |11>), where |1> is the excited state and the left
// label belongs to qubit 1.

#include <complex>

#include <Eigen/Dense>

namespace sqz {

using Operator = Eigen::Matrix4cd;
using Ket = Eigen::Vector4cd;

namespace basis {
inline constexpr int k00 = 0;
inline constexpr int k01 = 1;
inline constexpr int k10 = 2;
inline constexpr int k11 = 3;
}  // namespace basis

Operator collective_lowering();
Operator collective_raising();

/// Markovian jump operator L = sqrt(N+1) S- - sqrt(N) e^{i theta} S+.
Operator squeezed_lindblad_operator(double n, double theta);

class PureState {
public:
    /// Throws std::invalid_argument unless |amplitudes| = 1 within 1e-12.
    explicit PureState(const Ket& amplitudes);

    const Ket& amplitudes() const { return amplitudes_; }
    std::complex<double> operator[](int i) const { return amplitudes_[i]; }

private:
    Ket amplitudes_;
};

/// Normalizes an arbitrary nonzero vector; throws on a zero vector.
PureState normalized_state(const Ket& v);

// Markovian decoherence-free plane {phi1, phi2} and its complement
// {phi3, phi4}. The r-dependent states use the zero-temperature squeezing
// numbers N = sinh^2 r, M = sinh r cosh r and reject r <= 0.
PureState dfs_state_phi1(double r, double theta);
PureState dfs_state_phi2();
PureState dfs_state_phi3();
PureState dfs_state_phi4(double r, double theta);

// Same states for explicit squeezing numbers (e.g. thermal N(omega0),
// |M(omega0)|); requires N^2 + M^2 > 0.
PureState phi1_from(double n, double m, double theta);
PureState phi4_from(double n, double m, double theta);

/// Psi1 = eps phi1 + sqrt(1 - eps^2) phi4.
PureState initial_psi1(double epsilon, double r, double theta);
PureState initial_psi1_from(double epsilon, double n, double m, double theta);
/// Psi2 = eps phi2 + sqrt(1 - eps^2) phi3.
PureState initial_psi2(double epsilon);

class DensityMatrix {
public:
    /// Validates Hermiticity (1e-10), unit trace (1e-10) and
    /// eigenvalues >= -1e-8.
    explicit DensityMatrix(const Operator& entries);

    static DensityMatrix from_pure(const PureState& psi);
    /// No validation; used for states produced by the integrator, whose
    /// diagnostics are recorded separately.
    static DensityMatrix unchecked(const Operator& entries);

    const Operator& entries() const { return entries_; }
    std::complex<double> operator()(int i, int j) const { return entries_(i, j); }

private:
    struct Unchecked {};
    DensityMatrix(const Operator& entries, Unchecked) : entries_(entries) {}
    Operator entries_;
};

DensityMatrix density_from_pure(const PureState& psi);

// Structure diagnostics.
double trace_deviation(const Operator& rho);
double hermiticity_deviation(const Operator& rho);

}  // namespace sqz
