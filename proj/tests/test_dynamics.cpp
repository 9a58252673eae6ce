#include <doctest.h>

#include <cmath>
#include <random>

#include "sqz/dynamics.hpp"
#include "sqz/jacobi.hpp"

using namespace sqz;
using doctest::Approx;
using C = std::complex<double>;

namespace {

std::mt19937_64 rng(7);

Operator random_density() {
    std::normal_distribution<double> g;
    Operator a;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) a(i, j) = C(g(rng), g(rng));
    Operator rho = a * a.adjoint();
    return rho / rho.trace();
}

CoefficientSet random_coefficients() {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    CoefficientSet c;
    c.delta = {u(rng), u(rng)};
    c.mu = {u(rng), u(rng)};
    c.alpha = {u(rng), u(rng)};
    return c;
}

double max_abs(const Operator& m) { return m.cwiseAbs().maxCoeff(); }

MarkovParams zero_t_params(double r, double theta, double gamma = 1.0) {
    return {gamma, std::sinh(r) * std::sinh(r), std::sinh(r) * std::cosh(r), theta};
}

BathSpec reference_bath() {
    BathSpec b;
    b.coupling = 1.0 / pi;
    b.squeeze_r = 0.31;
    return b;
}

}  // namespace

TEST_CASE("non-Markov generator basics") {
    const Operator rho = random_density();
    CHECK(max_abs(nonmarkov_rhs(rho, CoefficientSet{})) == 0.0);

    const Operator singlet = density_from_pure(dfs_state_phi2()).entries();
    for (int i = 0; i < 10; ++i) CHECK(max_abs(nonmarkov_rhs(singlet, random_coefficients())) < 1e-15);

    Operator ground = Operator::Zero();
    ground(0, 0) = 1.0;
    CoefficientSet c;
    c.delta = 1.0;
    const Operator d = nonmarkov_rhs(ground, c);
    // Delta (S+ rho S- - rho S- S+) + Delta* (S+ rho S- - S- S+ rho) on |00><00|
    // gives 2 S+|00><00|S- - 2|00><00|.
    Operator expected = Operator::Zero();
    expected(0, 0) = -4.0;
    for (int i : {1, 2})
        for (int j : {1, 2}) expected(i, j) = 2.0;
    CHECK(max_abs(d - expected) < 1e-15);
    CHECK(std::abs(d.trace()) < 1e-15);

    for (int i = 0; i < 50; ++i) {
        const Operator r = random_density();
        const Operator out = nonmarkov_rhs(r, random_coefficients());
        CHECK(std::abs(out.trace()) < 1e-13);
        CHECK(max_abs(out - out.adjoint()) < 1e-13);
    }
}

TEST_CASE("Markov generator basics") {
    const Operator singlet = density_from_pure(dfs_state_phi2()).entries();
    CHECK(max_abs(markov_rhs(singlet, zero_t_params(0.31, 0.4))) < 1e-15);

    for (double r : {0.05, 0.31, 1.0}) {
        for (double theta : {0.0, pi / 6, pi}) {
            const Operator phi1 = density_from_pure(dfs_state_phi1(r, theta)).entries();
            CHECK(max_abs(markov_rhs(phi1, zero_t_params(r, theta))) < 1e-12);
        }
    }

    const Operator phi3 = density_from_pure(dfs_state_phi3()).entries();
    const Operator d = markov_rhs(phi3, MarkovParams{1.0, 0.0, 0.0, 0.0});
    const Ket v = dfs_state_phi3().amplitudes();
    CHECK((v.adjoint() * d * v)(0, 0).real() == Approx(-2.0).epsilon(1e-14));

    const auto unsq = GeneratorSpec::make_markov_unsqueezed(1.0, 0.3);
    CHECK(unsq.markov.m == 0.0);
    const Operator r = random_density();
    CHECK(max_abs(markov_rhs(r, unsq) - markov_rhs(r, MarkovParams{1.0, 0.3, 0.0, 0.0})) == 0.0);
}

TEST_CASE("Markov generator equals a single squeezed Lindblad dissipator") {
    for (int i = 0; i < 100; ++i) {
        const double r = 0.05 + 0.01 * i;
        const double theta = 0.07 * i;
        const auto p = zero_t_params(r, theta, 0.8);
        const Operator l = squeezed_lindblad_operator(p.n, theta);
        const Operator rho = random_density();
        const Operator ll = l.adjoint() * l;
        const Operator lindblad = p.gamma * (l * rho * l.adjoint() - 0.5 * (ll * rho + rho * ll));
        CHECK(max_abs(markov_rhs(rho, p) - lindblad) < 1e-12);
    }
}

TEST_CASE("frozen non-Markov coefficients reproduce the Markov generator") {
    for (int i = 0; i < 100; ++i) {
        const MarkovParams p{0.5 + 0.01 * i, 0.02 * i, 0.015 * i, 0.06 * i};
        CoefficientSet c;
        c.delta = p.gamma * p.n / 2.0;
        c.mu = p.gamma * (p.n + 1.0) / 2.0;
        c.alpha = -p.gamma * p.m * std::polar(1.0, p.theta) / 2.0;
        const Operator rho = random_density();
        CHECK(max_abs(nonmarkov_rhs(rho, c) - markov_rhs(rho, p)) < 1e-12);
        CHECK(max_abs(generator_rhs(1.3, rho, GeneratorSpec::make_frozen(c)) - markov_rhs(rho, p)) < 1e-12);
    }
}

TEST_CASE("Markov parameters from a bath") {
    BathSpec b = reference_bath();
    b.squeeze_theta = 0.5;
    const auto p = markov_params_from_bath(b, 1.0);
    CHECK(p.n == Approx(std::sinh(0.31) * std::sinh(0.31)));
    CHECK(p.m == Approx(std::sinh(0.31) * std::cosh(0.31)));
    CHECK(p.theta == 0.5);
    CHECK(regime_from_string(to_string(Regime::markov_unsqueezed)) == Regime::markov_unsqueezed);
    CHECK_THROWS_AS(regime_from_string("quantum"), std::invalid_argument);
}

TEST_CASE("constant trajectories") {
    IntegratorConfig cfg;
    cfg.t_max = 5.0;

    SUBCASE("zero generator") {
        const DensityMatrix rho(random_density());
        const auto tr = evolve(rho, GeneratorSpec::make_frozen(CoefficientSet{}), cfg);
        CHECK(tr.times.size() == 501);
        for (const auto& s : tr.states) CHECK(max_abs(s.entries() - rho.entries()) < 1e-12);
    }
    SUBCASE("singlet in both regimes") {
        const auto rho = density_from_pure(dfs_state_phi2());
        const auto table = std::make_shared<const CoefficientTable>(
            CoefficientTable::build(reference_bath(), 5.0, 0.01, QuadratureConfig{}));
        for (const auto& g : {GeneratorSpec::make_markov(zero_t_params(0.31, 0.0)),
                              GeneratorSpec::make_nonmarkov(table)}) {
            auto c = cfg;
            c.dt_max = 0.01;
            const auto tr = evolve(rho, g, c);
            for (const auto& s : tr.states) CHECK(max_abs(s.entries() - rho.entries()) < 1e-8);
        }
    }
    SUBCASE("phi1 under the Markov generator") {
        const auto rho = density_from_pure(dfs_state_phi1(0.31, 0.0));
        const auto tr = evolve(rho, GeneratorSpec::make_markov(zero_t_params(0.31, 0.0)), cfg);
        for (const auto& s : tr.states) CHECK(max_abs(s.entries() - rho.entries()) < 1e-6);
    }
}

TEST_CASE("output grid, stride and diagnostics") {
    IntegratorConfig cfg;
    cfg.t_max = 1.05;
    cfg.dt = 0.1;
    cfg.sample_stride = 3;
    const auto tr = evolve(density_from_pure(initial_psi1(0.0, 0.31, 0.0)),
                           GeneratorSpec::make_markov(zero_t_params(0.31, 0.0)), cfg);
    REQUIRE(tr.times.size() == tr.states.size());
    REQUIRE(tr.times.size() == tr.diagnostics.size());
    CHECK(tr.times.front() == 0.0);
    CHECK(tr.times[1] == Approx(0.3));
    CHECK(tr.times.back() == Approx(1.05));
    CHECK(tr.max_trace_dev < 1e-9);
    CHECK(tr.max_herm_dev < 1e-10);
    CHECK(tr.accepted_steps > 0);
    for (const auto& s : tr.states) {
        CHECK(std::abs(s.entries().trace() - 1.0) < 1e-14);
        CHECK(hermiticity_deviation(s.entries()) == 0.0);
    }
}

TEST_CASE("Markov evolution keeps the state positive") {
    IntegratorConfig cfg;
    cfg.t_max = 10.0;
    for (double eps : {0.0, 0.5, 0.9}) {
        const auto tr = evolve(density_from_pure(initial_psi1(eps, 0.31, 0.0)),
                               GeneratorSpec::make_markov(zero_t_params(0.31, 0.0)), cfg);
        for (const auto& d : tr.diagnostics) CHECK(d.min_eig >= -1e-6);
    }
}

TEST_CASE("fixed-step RK4 converges at fourth order") {
    const auto rho0 = density_from_pure(initial_psi1(0.0, 0.31, 0.0));
    auto final_state = [&](const GeneratorSpec& g, double dt) {
        IntegratorConfig cfg;
        cfg.method = IntegratorMethod::rk4_fixed;
        cfg.dt = dt;
        cfg.t_max = 4.0;
        return evolve(rho0, g, cfg).states.back().entries();
    };
    const auto markov = GeneratorSpec::make_markov(zero_t_params(0.31, 0.0));
    const auto table = std::make_shared<const CoefficientTable>(
        CoefficientTable::build(reference_bath(), 4.0, 0.005, QuadratureConfig{}));
    const auto nonmarkov = GeneratorSpec::make_nonmarkov(table);

    for (const auto* g : {&markov, &nonmarkov}) {
        const double h = g == &markov ? 0.2 : 0.08;
        const Operator a = final_state(*g, h), b = final_state(*g, h / 2), c = final_state(*g, h / 4);
        const double ratio = max_abs(a - b) / max_abs(b - c);
        CHECK(ratio == Approx(16.0).epsilon(0.3));
    }
}

TEST_CASE("integration errors") {
    const auto table = std::make_shared<const CoefficientTable>(
        CoefficientTable::build(reference_bath(), 1.0, 0.01, QuadratureConfig{}));
    IntegratorConfig cfg;
    cfg.t_max = 2.0;
    CHECK_THROWS_AS(evolve(density_from_pure(dfs_state_phi3()), GeneratorSpec::make_nonmarkov(table), cfg),
                    IntegrationError);

    IntegratorConfig bad;
    bad.dt = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    GeneratorSpec empty;
    empty.regime = Regime::nonmarkov;
    CHECK_THROWS_AS(empty.validate(), std::invalid_argument);

    // A stiff generator with a tiny step ceiling underflows.
    IntegratorConfig stiff;
    stiff.dt_min = 1e-3;
    stiff.dt_max = 1e-3;
    stiff.rel_tol = 1e-14;
    stiff.abs_tol = 1e-16;
    stiff.t_max = 1.0;
    CoefficientSet c;
    c.mu = 500.0;
    CHECK_THROWS_AS(evolve(density_from_pure(dfs_state_phi3()), GeneratorSpec::make_frozen(c), stiff),
                    IntegrationError);
}
