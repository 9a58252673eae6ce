#include "sqz/bath.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>

#include "sqz/quadrature.hpp"

namespace sqz {

void BathSpec::validate() const {
    if (!(coupling > 0.0)) throw std::invalid_argument("bath: coupling must be > 0");
    if (!(omega0 > 0.0)) throw std::invalid_argument("bath: omega0 must be > 0");
    if (!(cutoff > 0.0)) throw std::invalid_argument("bath: cutoff must be > 0");
    if (!(squeeze_r >= 0.0)) throw std::invalid_argument("bath: squeeze_r must be >= 0");
    if (!(temperature >= 0.0)) throw std::invalid_argument("bath: temperature must be >= 0");
    if (!std::isfinite(squeeze_theta)) throw std::invalid_argument("bath: squeeze_theta must be finite");
}

BathSpec BathSpec::normalized() const {
    BathSpec out = *this;
    out.squeeze_theta = std::fmod(squeeze_theta, 2.0 * pi);
    if (out.squeeze_theta < 0.0) out.squeeze_theta += 2.0 * pi;
    if (out.squeeze_theta >= 2.0 * pi) out.squeeze_theta = 0.0;
    return out;
}

void QuadratureConfig::validate() const {
    if (!(tol > 0.0)) throw std::invalid_argument("quadrature: tol must be > 0");
    if (max_subdivisions == 0) throw std::invalid_argument("quadrature: max_subdivisions must be > 0");
    if (omega_max && !(*omega_max > 0.0)) throw std::invalid_argument("quadrature: omega_max must be > 0");
    if (!(resolution > 0.0)) throw std::invalid_argument("quadrature: resolution must be > 0");
    if (table_step && !(*table_step > 0.0)) throw std::invalid_argument("quadrature: table_step must be > 0");
}

double planck_occupancy(double omega, double kt) {
    if (kt == 0.0) return 0.0;
    if (!(omega > 0.0)) {
        throw std::domain_error("planck_occupancy: omega must be > 0 at finite temperature");
    }
    return 1.0 / std::expm1(omega / kt);
}

double occupancy_N(double omega, const BathSpec& bath) {
    const double sh = std::sinh(bath.squeeze_r);
    const double ch = std::cosh(bath.squeeze_r);
    const double n = planck_occupancy(omega, bath.temperature);
    return n * (ch * ch + sh * sh) + sh * sh;
}

complex correlation_M(double omega, const BathSpec& bath) {
    const double sh = std::sinh(bath.squeeze_r);
    const double ch = std::cosh(bath.squeeze_r);
    const double n = planck_occupancy(omega, bath.temperature);
    return -ch * sh * (2.0 * n + 1.0) * std::polar(1.0, bath.squeeze_theta);
}

double spectral_density(double omega, const BathSpec& bath) {
    const double x = omega / bath.cutoff;
    return bath.coupling * omega * std::exp(-x * x);
}

complex memory_kernel(double delta, double t) {
    const double x = delta * t;
    if (std::abs(x) < 1e-6) {
        return t * complex(1.0 - x * x / 6.0, x / 2.0);
    }
    // (e^{ix} - 1) / (i x) = sin(x)/x + i 2 sin^2(x/2)/x, free of cancellation.
    const double s = std::sin(0.5 * x);
    return t * complex(std::sin(x) / x, 2.0 * s * s / x);
}

complex anomalous_kernel(double delta, double t) {
    return std::polar(1.0, delta * t) * memory_kernel(delta, t);
}

SpectralWeights spectral_weights(double omega, const BathSpec& bath) {
    const double sh = std::sinh(bath.squeeze_r);
    const double ch = std::cosh(bath.squeeze_r);
    const complex phase = std::polar(1.0, bath.squeeze_theta);

    // J(omega) n(omega) at omega -> 0 tends to Gamma * kT.
    double jn_thermal = 0.0;
    double j = 0.0;
    if (omega > 0.0) {
        j = spectral_density(omega, bath);
        if (bath.temperature > 0.0) {
            jn_thermal = j / std::expm1(omega / bath.temperature);
        }
    } else if (bath.temperature > 0.0) {
        jn_thermal = bath.coupling * bath.temperature;
    }

    const double jn = jn_thermal * (ch * ch + sh * sh) + j * sh * sh;
    const complex jm = -ch * sh * (2.0 * jn_thermal + j) * phase;
    return {jn, j + jn, jm};
}

double default_omega_max(const BathSpec& bath) { return bath.omega0 + 6.0 * bath.cutoff; }

double default_table_step(const BathSpec& bath) {
    const double n0 = occupancy_N(bath.omega0, bath);
    const double gamma_eff = 2.0 * pi * spectral_density(bath.omega0, bath) * (2.0 * n0 + 1.0);
    const double period = 2.0 * pi / bath.omega0;
    return std::min(0.005 / gamma_eff, period / 20.0);
}

CoefficientSet coefficients(double t, const BathSpec& bath, const QuadratureConfig& quad) {
    if (!(t >= 0.0)) throw std::invalid_argument("coefficients: t must be >= 0");
    CoefficientSet out;
    out.t = t;
    if (t == 0.0) return out;

    const double omega_max = quad.omega_max.value_or(default_omega_max(bath));
    const double width = std::min(bath.cutoff / 8.0, pi / (4.0 * t));
    const auto seeds = static_cast<std::size_t>(std::ceil(quad.resolution * omega_max / width));

    auto integrand = [&](double omega) {
        const auto w = spectral_weights(omega, bath);
        const double delta = bath.omega0 - omega;
        const complex k = memory_kernel(delta, t);
        const complex a = std::polar(1.0, delta * t) * k;
        return ComplexArray<3>{w.jn * k, w.jn1 * k, w.jm * a};
    };

    const auto res = integrate_adaptive<3>(integrand, 0.0, omega_max, quad.tol, seeds,
                                           std::max(quad.max_subdivisions, seeds));
    out.delta = res.value[0];
    out.mu = res.value[1];
    out.alpha = res.value[2];
    return out;
}

namespace {

CoefficientSet lagrange4(const std::vector<CoefficientSet>& nodes, std::size_t i0, double s, double t) {
    const double l0 = -(s - 1.0) * (s - 2.0) * (s - 3.0) / 6.0;
    const double l1 = s * (s - 2.0) * (s - 3.0) / 2.0;
    const double l2 = -s * (s - 1.0) * (s - 3.0) / 2.0;
    const double l3 = s * (s - 1.0) * (s - 2.0) / 6.0;
    const auto& a = nodes[i0];
    const auto& b = nodes[i0 + 1];
    const auto& c = nodes[i0 + 2];
    const auto& d = nodes[i0 + 3];
    CoefficientSet out;
    out.t = t;
    out.delta = l0 * a.delta + l1 * b.delta + l2 * c.delta + l3 * d.delta;
    out.mu = l0 * a.mu + l1 * b.mu + l2 * c.mu + l3 * d.mu;
    out.alpha = l0 * a.alpha + l1 * b.alpha + l2 * c.alpha + l3 * d.alpha;
    return out;
}

double max_deviation(const CoefficientSet& x, const CoefficientSet& y) {
    return std::max({std::abs(x.delta - y.delta), std::abs(x.mu - y.mu), std::abs(x.alpha - y.alpha)});
}

}  // namespace

CoefficientTable CoefficientTable::build(const BathSpec& bath, double t_max, double h_coeff,
                                         const QuadratureConfig& quad) {
    if (!(t_max > 0.0)) throw std::invalid_argument("coefficient table: t_max must be > 0");
    if (!(h_coeff > 0.0)) throw std::invalid_argument("coefficient table: h_coeff must be > 0");
    bath.validate();
    quad.validate();

    const auto intervals = static_cast<std::size_t>(std::max(3.0, std::ceil(t_max / h_coeff - 1e-9)));
    const double step = t_max / static_cast<double>(intervals);
    std::vector<CoefficientSet> nodes(intervals + 1);

    // Nodes are independent; split them across threads in contiguous blocks.
    const std::size_t workers =
        std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, 16);
    auto fill = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            nodes[i] = coefficients(step * static_cast<double>(i), bath, quad);
        }
    };
    if (workers == 1) {
        fill(0, nodes.size());
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(workers);
        const std::size_t chunk = (nodes.size() + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t begin = std::min(nodes.size(), w * chunk);
            const std::size_t end = std::min(nodes.size(), begin + chunk);
            pool.emplace_back([&, w, begin, end] {
                try {
                    fill(begin, end);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }

    CoefficientTable table(std::move(nodes), step, t_max);

    // Half-step refinement check on a spread of intervals.
    const std::size_t checks = std::min<std::size_t>(intervals, 24);
    for (std::size_t k = 0; k < checks; ++k) {
        const std::size_t i = (k * intervals) / checks;
        const double tm = step * (static_cast<double>(i) + 0.5);
        const auto direct = coefficients(tm, bath, quad);
        table.interpolation_error_ = std::max(table.interpolation_error_, max_deviation(table.at(tm), direct));
    }
    return table;
}

CoefficientSet CoefficientTable::at(double t) const {
    const double slack = 1e-9 * step_;
    if (!(t >= 0.0) || t > t_max_ + slack) {
        throw std::out_of_range("coefficient table: t = " + std::to_string(t) + " outside [0, " +
                                std::to_string(t_max_) + "]");
    }
    const std::size_t last = nodes_.size() - 1;
    const auto i = std::min(static_cast<std::size_t>(std::floor(t / step_)), last);
    for (std::size_t j = (i > 0 ? i - 1 : 0); j <= std::min(i + 1, last); ++j) {
        if (nodes_[j].t == t) return nodes_[j];
    }
    const std::size_t i0 = std::min(i > 0 ? i - 1 : 0, last - 3);
    const double s = (t - nodes_[i0].t) / step_;
    return lagrange4(nodes_, i0, s, t);
}

}  // namespace sqz
