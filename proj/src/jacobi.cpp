#include "sqz/jacobi.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numeric>
#include <string>

namespace sqz {

namespace {

double off_diagonal_norm(const Eigen::Matrix4cd& a) {
    double s = 0.0;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            if (i != j) s += std::norm(a(i, j));
        }
    }
    return std::sqrt(s);
}

}  // namespace

HermitianEigen jacobi_eigen(const Eigen::Matrix4cd& input) {
    Eigen::Matrix4cd a = 0.5 * (input + input.adjoint());
    Eigen::Matrix4cd v = Eigen::Matrix4cd::Identity();

    const double scale = std::max(a.norm(), 1e-300);
    constexpr int max_sweeps = 60;
    int sweep = 0;
    for (; sweep < max_sweeps; ++sweep) {
        if (off_diagonal_norm(a) <= 1e-16 * scale) break;
        for (int p = 0; p < 3; ++p) {
            for (int q = p + 1; q < 4; ++q) {
                const double apq = std::abs(a(p, q));
                if (apq <= 1e-300) continue;

                // Phase the pivot real, then a real Givens rotation.
                const std::complex<double> phase = std::conj(a(p, q)) / apq;
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(tau * tau + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                Eigen::Matrix4cd u = Eigen::Matrix4cd::Identity();
                u(p, p) = c;
                u(p, q) = s;
                u(q, p) = -s * phase;
                u(q, q) = c * phase;

                a = u.adjoint() * a * u;
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                v = v * u;
            }
        }
    }
    if (off_diagonal_norm(a) > 1e-12 * scale) {
        throw EigenSolverError("jacobi_eigen: no convergence after " + std::to_string(max_sweeps) + " sweeps");
    }

    std::array<int, 4> order{};
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int i, int j) { return a(i, i).real() > a(j, j).real(); });

    HermitianEigen out;
    for (int k = 0; k < 4; ++k) {
        out.values[k] = a(order[k], order[k]).real();
        out.vectors.col(k) = v.col(order[k]);
    }
    return out;
}

}  // namespace sqz
