#include "sqz/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sqz/jacobi.hpp"

namespace sqz {

namespace {

Operator sigma_yy() {
    // sigma_y x sigma_y in the product basis: anti-diagonal (-1, 1, 1, -1).
    Operator s = Operator::Zero();
    s(0, 3) = -1.0;
    s(1, 2) = 1.0;
    s(2, 1) = 1.0;
    s(3, 0) = -1.0;
    return s;
}

}  // namespace

Operator spin_flip(const Operator& rho) {
    static const Operator yy = sigma_yy();
    return yy * rho.conjugate() * yy;
}

Eigen::Vector4d concurrence_roots(const Operator& rho) {
    const auto eig = jacobi_eigen(rho);
    if (eig.values[3] < -negativity_limit) {
        throw NegativeStateError("concurrence: state has eigenvalue " + std::to_string(eig.values[3]) +
                                 " below -" + std::to_string(negativity_limit));
    }
    // Eigenvalues at the roundoff floor are taken as exact zeros; their square
    // roots would otherwise add ~1e-8 noise to the concurrence of pure states.
    constexpr double floor = 1e-14;
    Eigen::Vector4d sqrt_vals;
    for (int i = 0; i < 4; ++i) sqrt_vals[i] = eig.values[i] > floor ? std::sqrt(eig.values[i]) : 0.0;

    // W = V sqrt(Lambda), so rho = W W^dagger and sqrt(rho) = W V^dagger.
    // W^dagger rho~ W is unitarily equivalent to sqrt(rho) rho~ sqrt(rho) but
    // keeps exact zero rows and columns for the dropped eigenvalues.
    const Operator w = eig.vectors * sqrt_vals.cast<std::complex<double>>().asDiagonal();
    const Operator r = w.adjoint() * spin_flip(w * w.adjoint()) * w;
    const auto inner = jacobi_eigen(r);

    Eigen::Vector4d out;
    for (int i = 0; i < 4; ++i) out[i] = std::sqrt(std::max(inner.values[i], 0.0));
    return out;
}

double concurrence(const Operator& rho) {
    const auto l = concurrence_roots(rho);
    return std::clamp(l[0] - l[1] - l[2] - l[3], 0.0, 1.0);
}

double concurrence(const DensityMatrix& rho) { return concurrence(rho.entries()); }

EsdReport detect_esd(std::span<const double> times, std::span<const double> conc, const EsdConfig& cfg) {
    if (times.size() != conc.size()) throw std::invalid_argument("detect_esd: size mismatch");
    EsdReport report;
    const std::size_t n = times.size();
    if (n == 0) return report;

    // Linear crossing of the threshold between samples a and b.
    auto crossing = [&](std::size_t a, std::size_t b) {
        const double ca = conc[a] - cfg.threshold;
        const double cb = conc[b] - cfg.threshold;
        if (ca == cb) return times[b];
        const double w = ca / (ca - cb);
        return times[a] + w * (times[b] - times[a]);
    };

    std::size_t i = 0;
    while (i < n) {
        if (conc[i] > cfg.threshold) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < n && conc[j] <= cfg.threshold) ++j;
        // Run covers samples [i, j).
        if (j - i >= std::max<std::size_t>(cfg.min_width, 1)) {
            DeadInterval d;
            d.t_start = i == 0 ? times[0] : crossing(i - 1, i);
            d.revived = j < n;
            d.t_end = d.revived ? crossing(j - 1, j) : times[n - 1];
            report.dead_intervals.push_back(d);
        }
        i = j;
    }

    for (const auto& d : report.dead_intervals) {
        report.death_times.push_back(d.t_start);
        if (d.revived) report.revival_times.push_back(d.t_end);
    }
    report.cycle_count = report.dead_intervals.size();

    const std::size_t tail = std::max<std::size_t>(1, n / 10);
    double sum = 0.0;
    for (std::size_t k = n - tail; k < n; ++k) sum += conc[k];
    report.asymptotic_concurrence = sum / static_cast<double>(tail);
    return report;
}

}  // namespace sqz
