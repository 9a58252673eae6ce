#include "sqz/qubits.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "sqz/jacobi.hpp"

namespace sqz {

Operator collective_lowering() {
    using namespace basis;
    Operator s = Operator::Zero();
    // sigma_- on qubit 1 (left label) and qubit 2 (right label).
    s(k00, k10) = 1.0;
    s(k01, k11) = 1.0;
    s(k00, k01) = 1.0;
    s(k10, k11) = 1.0;
    return s;
}

Operator collective_raising() { return collective_lowering().adjoint(); }

Operator squeezed_lindblad_operator(double n, double theta) {
    if (!(n >= 0.0)) throw std::invalid_argument("squeezed_lindblad_operator: N must be >= 0");
    return std::sqrt(n + 1.0) * collective_lowering() -
           std::sqrt(n) * std::polar(1.0, theta) * collective_raising();
}

PureState::PureState(const Ket& amplitudes) : amplitudes_(amplitudes) {
    const double norm = amplitudes_.norm();
    if (!std::isfinite(norm) || std::abs(norm - 1.0) > 1e-12) {
        throw std::invalid_argument("PureState: amplitudes must have unit norm (got " + std::to_string(norm) + ")");
    }
}

PureState normalized_state(const Ket& v) {
    const double norm = v.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw std::invalid_argument("normalized_state: zero or non-finite vector");
    }
    return PureState(v / norm);
}

namespace {

void require_squeezing(double r) {
    if (!(r > 0.0)) {
        throw std::invalid_argument("DFS state requires squeeze_r > 0 (degenerate at r = 0)");
    }
}

void require_epsilon(double epsilon) {
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
        throw std::out_of_range("epsilon must lie in [0, 1]");
    }
}

}  // namespace

PureState phi1_from(double n, double m, double theta) {
    if (!(n >= 0.0 && m >= 0.0 && n * n + m * m > 0.0)) {
        throw std::invalid_argument("phi1: need N, M >= 0 with N^2 + M^2 > 0");
    }
    const double norm = std::sqrt(n * n + m * m);
    Ket v = Ket::Zero();
    v[basis::k11] = n / norm;
    v[basis::k00] = m / norm * std::polar(1.0, -theta);
    return PureState(v);
}

PureState phi4_from(double n, double m, double theta) {
    if (!(n >= 0.0 && m >= 0.0 && n * n + m * m > 0.0)) {
        throw std::invalid_argument("phi4: need N, M >= 0 with N^2 + M^2 > 0");
    }
    const double norm = std::sqrt(n * n + m * m);
    Ket v = Ket::Zero();
    v[basis::k11] = m / norm;
    v[basis::k00] = -n / norm * std::polar(1.0, -theta);
    return PureState(v);
}

PureState dfs_state_phi1(double r, double theta) {
    require_squeezing(r);
    const double sh = std::sinh(r);
    return phi1_from(sh * sh, sh * std::cosh(r), theta);
}

PureState dfs_state_phi4(double r, double theta) {
    require_squeezing(r);
    const double sh = std::sinh(r);
    return phi4_from(sh * sh, sh * std::cosh(r), theta);
}

PureState dfs_state_phi2() {
    Ket v = Ket::Zero();
    v[basis::k01] = 1.0 / std::sqrt(2.0);
    v[basis::k10] = -1.0 / std::sqrt(2.0);
    return PureState(v);
}

PureState dfs_state_phi3() {
    Ket v = Ket::Zero();
    v[basis::k01] = 1.0 / std::sqrt(2.0);
    v[basis::k10] = 1.0 / std::sqrt(2.0);
    return PureState(v);
}

PureState initial_psi1_from(double epsilon, double n, double m, double theta) {
    require_epsilon(epsilon);
    const Ket v = epsilon * phi1_from(n, m, theta).amplitudes() +
                  std::sqrt(1.0 - epsilon * epsilon) * phi4_from(n, m, theta).amplitudes();
    return normalized_state(v);
}

PureState initial_psi1(double epsilon, double r, double theta) {
    require_epsilon(epsilon);
    require_squeezing(r);
    const double sh = std::sinh(r);
    return initial_psi1_from(epsilon, sh * sh, sh * std::cosh(r), theta);
}

PureState initial_psi2(double epsilon) {
    require_epsilon(epsilon);
    const Ket v = epsilon * dfs_state_phi2().amplitudes() +
                  std::sqrt(1.0 - epsilon * epsilon) * dfs_state_phi3().amplitudes();
    return normalized_state(v);
}

double trace_deviation(const Operator& rho) { return std::abs(rho.trace() - 1.0); }

double hermiticity_deviation(const Operator& rho) {
    return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

DensityMatrix::DensityMatrix(const Operator& entries) : entries_(entries) {
    if (!entries_.allFinite()) throw std::invalid_argument("DensityMatrix: non-finite entries");
    if (hermiticity_deviation(entries_) > 1e-10) throw std::invalid_argument("DensityMatrix: not Hermitian");
    if (trace_deviation(entries_) > 1e-10) throw std::invalid_argument("DensityMatrix: trace != 1");
    if (jacobi_eigen(entries_).values[3] < -1e-8) {
        throw std::invalid_argument("DensityMatrix: negative eigenvalue below -1e-8");
    }
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) {
    const Ket& a = psi.amplitudes();
    return DensityMatrix(a * a.adjoint());
}

DensityMatrix DensityMatrix::unchecked(const Operator& entries) { return DensityMatrix(entries, Unchecked{}); }

DensityMatrix density_from_pure(const PureState& psi) { return DensityMatrix::from_pure(psi); }

}  // namespace sqz
