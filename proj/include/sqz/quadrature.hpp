#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature for vector-valued
// integrands. The integrand returns a fixed-size array of complex values so
// several integrals sharing one expensive envelope are computed on a single
// subdivision.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace sqz {

class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double error_estimate)
        : std::runtime_error(what), error_estimate_(error_estimate) {}

    double error_estimate() const noexcept { return error_estimate_; }

private:
    double error_estimate_;
};

namespace gk15 {

// Kronrod abscissae (positive half, descending); odd indices are Gauss nodes.
inline constexpr std::array<double, 8> xk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> wk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

inline constexpr std::array<double, 4> wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

}  // namespace gk15

template <std::size_t K>
using ComplexArray = std::array<std::complex<double>, K>;

template <std::size_t K>
struct QuadratureResult {
    ComplexArray<K> value{};
    double error = 0.0;
    std::size_t panels = 0;
};

namespace detail {

template <std::size_t K>
struct Panel {
    double a;
    double b;
    ComplexArray<K> value;
    double error;

    bool operator<(const Panel& other) const { return error < other.error; }
};

template <std::size_t K, class F>
Panel<K> gk15_panel(F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    ComplexArray<K> kronrod{};
    ComplexArray<K> gauss{};

    const auto fc = f(center);
    for (std::size_t k = 0; k < K; ++k) {
        kronrod[k] = gk15::wk[7] * fc[k];
        gauss[k] = gk15::wg[3] * fc[k];
    }
    for (std::size_t j = 0; j < 7; ++j) {
        const double dx = half * gk15::xk[j];
        const auto f1 = f(center - dx);
        const auto f2 = f(center + dx);
        for (std::size_t k = 0; k < K; ++k) {
            const auto s = f1[k] + f2[k];
            kronrod[k] += gk15::wk[j] * s;
            if (j % 2 == 1) gauss[k] += gk15::wg[j / 2] * s;
        }
    }

    Panel<K> p{a, b, {}, 0.0};
    for (std::size_t k = 0; k < K; ++k) {
        p.value[k] = kronrod[k] * half;
        p.error = std::max(p.error, std::abs((kronrod[k] - gauss[k]) * half));
    }
    return p;
}

}  // namespace detail

/// Integrates f over [a, b], starting from `seed_panels` equal panels and
/// bisecting the panel with the largest error estimate until the summed
/// estimate is below `abs_tol`. The error estimate is the max-norm over the
/// K components of |Kronrod - Gauss|.
template <std::size_t K, class F>
QuadratureResult<K> integrate_adaptive(F&& f, double a, double b, double abs_tol,
                                       std::size_t seed_panels, std::size_t max_panels) {
    if (!(b >= a)) throw std::invalid_argument("integrate_adaptive: b < a");
    QuadratureResult<K> out;
    if (b == a) return out;

    seed_panels = std::max<std::size_t>(seed_panels, 1);
    std::priority_queue<detail::Panel<K>> heap;
    double total_error = 0.0;
    const double width = (b - a) / static_cast<double>(seed_panels);
    for (std::size_t i = 0; i < seed_panels; ++i) {
        const double lo = a + width * static_cast<double>(i);
        const double hi = (i + 1 == seed_panels) ? b : lo + width;
        auto p = detail::gk15_panel<K>(f, lo, hi);
        total_error += p.error;
        heap.push(p);
    }

    // Bisection stops when the worst panel is at roundoff level relative to
    // its width; further splitting cannot reduce the estimate.
    while (total_error > abs_tol) {
        if (heap.size() >= std::max(max_panels, seed_panels)) {
            throw QuadratureError("adaptive quadrature did not converge within " +
                                      std::to_string(max_panels) + " panels",
                                  total_error);
        }
        auto worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            throw QuadratureError("adaptive quadrature reached machine resolution", total_error);
        }
        heap.pop();
        auto left = detail::gk15_panel<K>(f, worst.a, mid);
        auto right = detail::gk15_panel<K>(f, mid, worst.b);
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    // Sum from the stored panels so the running error bookkeeping does not
    // leak into the value.
    out.panels = heap.size();
    out.error = 0.0;
    while (!heap.empty()) {
        const auto& p = heap.top();
        for (std::size_t k = 0; k < K; ++k) out.value[k] += p.value[k];
        out.error += p.error;
        heap.pop();
    }
    return out;
}

}  // namespace sqz
