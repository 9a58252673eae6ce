#include <doctest.h>

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>

#include "sqz/bath.hpp"
#include "sqz/quadrature.hpp"

using namespace sqz;
using doctest::Approx;

namespace {

BathSpec reference_bath(double r = 0.31, double kt = 0.0, double theta = 0.0) {
    BathSpec b;
    b.coupling = 1.0 / pi;
    b.squeeze_r = r;
    b.temperature = kt;
    b.squeeze_theta = theta;
    return b;
}

// Composite Simpson on a fine uniform grid, written independently of the
// library quadrature and kernels.
complex simpson(const std::function<complex(double)>& f, double a, double b, int n) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    complex s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

struct OracleCoefficients {
    complex delta, mu, alpha;
};

OracleCoefficients oracle(double t, const BathSpec& b) {
    const double ch = std::cosh(b.squeeze_r), sh = std::sinh(b.squeeze_r);
    const complex phase = std::polar(1.0, b.squeeze_theta);
    auto jn_parts = [&](double w, double& jn, double& j, complex& jm) {
        j = b.coupling * w * std::exp(-w * w / (b.cutoff * b.cutoff));
        double jnbar;  // J * planck
        if (b.temperature == 0.0) {
            jnbar = 0.0;
        } else if (w == 0.0) {
            jnbar = b.coupling * b.temperature;
        } else {
            jnbar = j / (std::exp(w / b.temperature) - 1.0);
        }
        jn = jnbar * (ch * ch + sh * sh) + j * sh * sh;
        jm = -ch * sh * phase * (2.0 * jnbar + j);
    };
    auto inner = [&](double w, bool anomalous) {
        const double d = b.omega0 - w;
        if (std::abs(d) < 1e-9) return complex(t, 0.0);
        const complex k = (std::exp(complex(0, d * t)) - 1.0) / complex(0, d);
        return anomalous ? std::exp(complex(0, d * t)) * k : k;
    };
    const double top = b.omega0 + 6.0 * b.cutoff;
    const int n = 40000;
    OracleCoefficients o;
    o.delta = simpson([&](double w) { double jn, j; complex jm; jn_parts(w, jn, j, jm); return jn * inner(w, false); },
                      0.0, top, n);
    o.mu = simpson(
        [&](double w) { double jn, j; complex jm; jn_parts(w, jn, j, jm); return (jn + j) * inner(w, false); }, 0.0,
        top, n);
    o.alpha = simpson([&](double w) { double jn, j; complex jm; jn_parts(w, jn, j, jm); return jm * inner(w, true); },
                      0.0, top, n);
    return o;
}

}  // namespace

TEST_CASE("planck occupancy") {
    CHECK(planck_occupancy(1.0, 0.0) == 0.0);
    CHECK(planck_occupancy(1.0, 1.0) == Approx(1.0 / (std::exp(1.0) - 1.0)).epsilon(1e-14));
    CHECK(planck_occupancy(1.0, 1.0) == Approx(0.58198).epsilon(1e-5));
    CHECK(planck_occupancy(2.0, 2.0) == Approx(planck_occupancy(1.0, 1.0)).epsilon(1e-15));
    CHECK_THROWS_AS(planck_occupancy(0.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(planck_occupancy(-1.0, 1.0), std::domain_error);
}

TEST_CASE("squeezed occupancy and correlation") {
    CHECK(occupancy_N(0.7, reference_bath(0.0)) == 0.0);
    CHECK(occupancy_N(0.7, reference_bath(0.31)) == Approx(std::sinh(0.31) * std::sinh(0.31)).epsilon(1e-14));
    CHECK(occupancy_N(3.0, reference_bath(0.31)) == Approx(0.09921).epsilon(1e-4));
    CHECK(occupancy_N(1.0, reference_bath(0.0, 1.0)) == Approx(0.58198).epsilon(1e-5));

    CHECK(std::abs(correlation_M(0.4, reference_bath(0.0))) == 0.0);
    const complex m0 = correlation_M(1.0, reference_bath(0.31));
    CHECK(m0.real() == Approx(-0.33025).epsilon(1e-4));
    CHECK(m0.imag() == Approx(0.0).scale(1.0));
    const complex mpi = correlation_M(1.0, reference_bath(0.31, 0.0, pi));
    CHECK(mpi.real() == Approx(0.33025).epsilon(1e-4));
    CHECK(std::abs(mpi.imag()) < 1e-15);
}

TEST_CASE("squeezing identity |M|^2 = N(N+1) - n(n+1)") {
    for (double r : {0.0, 0.1, 0.31, 1.2}) {
        for (double kt : {0.0, 0.5, 2.0, 5.0}) {
            for (double w : {0.1, 1.0, 3.7}) {
                const auto b = reference_bath(r, kt, 0.4);
                const double n = planck_occupancy(w, kt);
                const double big = occupancy_N(w, b);
                const double m2 = std::norm(correlation_M(w, b));
                CHECK(m2 == Approx(big * (big + 1.0) - n * (n + 1.0)).epsilon(1e-12).scale(1.0));
                if (kt == 0.0) CHECK(m2 == Approx(big * (big + 1.0)).epsilon(1e-12).scale(1.0));
            }
        }
    }
}

TEST_CASE("spectral density") {
    BathSpec b;
    b.coupling = 1.0;
    CHECK(spectral_density(0.0, b) == 0.0);
    CHECK(spectral_density(1.0, b) == Approx(std::exp(-1.0)).epsilon(1e-15));
    const double peak = 1.0 / std::sqrt(2.0);
    CHECK(spectral_density(peak, b) == Approx(peak * std::exp(-0.5)).epsilon(1e-15));
    CHECK(spectral_density(peak, b) > spectral_density(peak * 1.01, b));
    CHECK(spectral_density(peak, b) > spectral_density(peak * 0.99, b));
    CHECK(spectral_density(6.2, b) < 1e-15 * spectral_density(peak, b));
    CHECK(spectral_density(6.0, b) < 1e-14 * spectral_density(peak, b));
}

TEST_CASE("memory and anomalous kernels") {
    CHECK(memory_kernel(0.0, 3.0) == complex(3.0, 0.0));
    CHECK(std::abs(memory_kernel(2.3, 0.0)) == 0.0);
    const complex k = memory_kernel(pi, 1.0);
    CHECK(std::abs(k.real()) < 1e-15);
    CHECK(k.imag() == Approx(2.0 / pi).epsilon(1e-14));

    CHECK(anomalous_kernel(0.0, 3.0) == complex(3.0, 0.0));
    CHECK(std::abs(anomalous_kernel(-1.1, 0.0)) == 0.0);
    const complex a = anomalous_kernel(pi, 1.0);
    CHECK(std::abs(a.real()) < 1e-15);
    CHECK(a.imag() == Approx(-2.0 / pi).epsilon(1e-14));

    // Closed form away from the series region, and continuity across it.
    for (double d : {-3.0, -0.2, 1e-3, 0.8, 5.0}) {
        for (double t : {0.3, 2.0, 17.0}) {
            const complex direct = (std::exp(complex(0, d * t)) - 1.0) / complex(0, d);
            CHECK(std::abs(memory_kernel(d, t) - direct) < 1e-12 * std::max(1.0, std::abs(direct)));
            CHECK(std::abs(anomalous_kernel(d, t) - std::exp(complex(0, d * t)) * direct) < 1e-12 * t);
            CHECK(std::abs(anomalous_kernel(d, t)) == Approx(std::abs(memory_kernel(d, t))).epsilon(1e-13));
        }
    }
    // Inside the series region, against a longer Taylor expansion.
    for (double x : {0.99e-6, 3e-7, -5e-7}) {
        const double t = 2.0, d = x / t;
        const complex taylor = t * complex(1.0 - x * x / 6.0, x / 2.0 - x * x * x / 24.0);
        CHECK(std::abs(memory_kernel(d, t) - taylor) < 1e-15);
    }
}

TEST_CASE("coefficients vanish at t = 0 and alpha vanishes without squeezing") {
    QuadratureConfig q;
    const auto c0 = coefficients(0.0, reference_bath(0.31, 2.0), q);
    CHECK(c0.delta == complex{});
    CHECK(c0.mu == complex{});
    CHECK(c0.alpha == complex{});

    for (double t : {0.5, 3.0, 12.0}) {
        const auto c = coefficients(t, reference_bath(0.0, 2.0), q);
        CHECK(std::abs(c.alpha) == 0.0);
        const auto vac = coefficients(t, reference_bath(0.0, 0.0), q);
        CHECK(std::abs(vac.delta) == 0.0);
        CHECK(std::abs(vac.alpha) == 0.0);
    }
}

TEST_CASE("mu - Delta is the bare memory integral") {
    QuadratureConfig q;
    const auto squeezed = reference_bath(0.31, 2.0);
    const auto vacuum = reference_bath(0.0, 0.0);
    for (double t : {0.7, 4.0, 15.0}) {
        const auto c = coefficients(t, squeezed, q);
        const auto bare = coefficients(t, vacuum, q);
        CHECK(std::abs((c.mu - c.delta) - bare.mu) < 10.0 * q.tol);
    }
}

TEST_CASE("coefficients agree with an independent Simpson oracle") {
    QuadratureConfig q;
    for (const auto& b : {reference_bath(0.31, 0.0), reference_bath(0.31, 2.0, pi / 6), reference_bath(0.0, 5.0)}) {
        for (double t : {0.4, 2.0, 6.0}) {
            const auto c = coefficients(t, b, q);
            const auto o = oracle(t, b);
            CHECK(std::abs(c.delta - o.delta) < 1e-8);
            CHECK(std::abs(c.mu - o.mu) < 1e-8);
            CHECK(std::abs(c.alpha - o.alpha) < 1e-8);
        }
    }
}

TEST_CASE("coefficients stable under doubled resolution") {
    QuadratureConfig q;
    QuadratureConfig fine = q;
    fine.resolution = 2.0;
    for (double kt : {0.0, 2.0, 5.0}) {
        for (double r : {0.0, 0.31}) {
            const auto b = reference_bath(r, kt);
            for (double t : {0.5, 5.0, 20.0}) {
                const auto a = coefficients(t, b, q);
                const auto c = coefficients(t, b, fine);
                CHECK(std::abs(a.delta - c.delta) < 10.0 * q.tol);
                CHECK(std::abs(a.mu - c.mu) < 10.0 * q.tol);
                CHECK(std::abs(a.alpha - c.alpha) < 10.0 * q.tol);
            }
        }
    }
}

TEST_CASE("long-time mu approaches the golden-rule rate") {
    QuadratureConfig q;
    q.tol = 1e-8;
    BathSpec vac;
    vac.coupling = 1.0;
    const auto c = coefficients(50.0, vac, q);
    CHECK(c.mu.real() == Approx(pi * std::exp(-1.0)).epsilon(0.02));
    CHECK(c.mu.real() == Approx(1.1557).epsilon(0.02));

    const auto b = reference_bath(0.31, 2.0);
    const auto cb = coefficients(50.0, b, q);
    const double expected = pi * spectral_density(1.0, b) * (1.0 + occupancy_N(1.0, b));
    CHECK(cb.mu.real() == Approx(expected).epsilon(0.02));
}

TEST_CASE("quadrature reports non-convergence") {
    QuadratureConfig q;
    q.tol = 1e-16;
    q.max_subdivisions = 4;
    CHECK_THROWS_AS(coefficients(3.0, reference_bath(0.31, 2.0), q), QuadratureError);
    try {
        coefficients(3.0, reference_bath(0.31, 2.0), q);
    } catch (const QuadratureError& e) {
        CHECK(e.error_estimate() > 0.0);
    }
}

TEST_CASE("adaptive Gauss-Kronrod on smooth and oscillatory integrands") {
    auto f = [](double x) { return ComplexArray<2>{complex(std::exp(-x), 0.0), std::exp(complex(0.0, 40.0 * x))}; };
    const auto r = integrate_adaptive<2>(f, 0.0, 3.0, 1e-13, 4, 10000);
    CHECK(r.value[0].real() == Approx(1.0 - std::exp(-3.0)).epsilon(1e-13));
    const complex exact = (std::exp(complex(0.0, 120.0)) - 1.0) / complex(0.0, 40.0);
    CHECK(std::abs(r.value[1] - exact) < 1e-12);
}

TEST_CASE("coefficient table grid and interpolation") {
    QuadratureConfig q;
    const auto b = reference_bath(0.31, 0.0);
    const auto table = CoefficientTable::build(b, 10.0, 0.01, q);
    CHECK(table.size() == 1001);
    CHECK(table.step() <= 0.01);
    const auto& node = table.nodes()[500];
    const auto at = table.at(node.t);
    CHECK(at.delta == node.delta);
    CHECK(at.mu == node.mu);
    CHECK(at.alpha == node.alpha);
    const auto zero = table.at(0.0);
    CHECK(zero.delta == complex{});
    CHECK(zero.mu == complex{});
    CHECK(zero.alpha == complex{});
    CHECK(table.interpolation_error() < 10.0 * q.tol);

    // Interpolated values between nodes against direct evaluation.
    for (double t : {0.005, 3.14159, 7.7777, 9.9951}) {
        const auto direct = coefficients(t, b, q);
        const auto interp = table.at(t);
        CHECK(std::abs(direct.mu - interp.mu) < 1e-9);
        CHECK(std::abs(direct.alpha - interp.alpha) < 1e-9);
    }
    CHECK_THROWS_AS(table.at(10.5), std::out_of_range);

    // A step that does not divide t_max is shrunk so the grid ends at t_max.
    const auto odd = CoefficientTable::build(b, 1.0, 0.3, q);
    CHECK(odd.step() <= 0.3);
    CHECK(odd.nodes().back().t == Approx(1.0).epsilon(1e-15));
}

TEST_CASE("default table step") {
    const auto b = reference_bath(0.31, 0.0);
    const double gamma_eff = 2.0 * pi * spectral_density(1.0, b) * (2.0 * occupancy_N(1.0, b) + 1.0);
    CHECK(default_table_step(b) == Approx(std::min(0.005 / gamma_eff, 2.0 * pi / 20.0)).epsilon(1e-14));
    CHECK(default_table_step(reference_bath(0.31, 5.0)) < default_table_step(b));
    CHECK(default_omega_max(b) == Approx(7.0));
}

TEST_CASE("bath validation") {
    BathSpec b;
    CHECK_NOTHROW(b.validate());
    b.coupling = 0.0;
    CHECK_THROWS_AS(b.validate(), std::invalid_argument);
    b = BathSpec{};
    b.temperature = -1.0;
    CHECK_THROWS_AS(b.validate(), std::invalid_argument);
    b = BathSpec{};
    b.squeeze_theta = 7.0;
    CHECK(b.normalized().squeeze_theta == Approx(7.0 - 2.0 * pi));
    QuadratureConfig q;
    q.tol = 0.0;
    CHECK_THROWS_AS(q.validate(), std::invalid_argument);
}
