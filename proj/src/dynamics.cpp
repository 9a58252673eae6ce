#include "sqz/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sqz/jacobi.hpp"

namespace sqz {

std::string to_string(Regime regime) {
    switch (regime) {
        case Regime::markov: return "markov";
        case Regime::nonmarkov: return "nonmarkov";
        case Regime::markov_unsqueezed: return "markov_unsqueezed";
    }
    return "unknown";
}

Regime regime_from_string(const std::string& name) {
    if (name == "markov") return Regime::markov;
    if (name == "nonmarkov") return Regime::nonmarkov;
    if (name == "markov_unsqueezed") return Regime::markov_unsqueezed;
    throw std::invalid_argument("unknown regime '" + name + "'");
}

MarkovParams markov_params_from_bath(const BathSpec& bath, double gamma) {
    MarkovParams p;
    p.gamma = gamma;
    p.n = occupancy_N(bath.omega0, bath);
    p.m = std::abs(correlation_M(bath.omega0, bath));
    p.theta = bath.squeeze_theta;
    return p;
}

CoefficientSet CoefficientSource::at(double t) const {
    if (frozen) {
        CoefficientSet c = *frozen;
        c.t = t;
        return c;
    }
    if (table) return table->at(t);
    if (bath) return coefficients(t, *bath, quadrature);
    throw std::logic_error("coefficient source is empty");
}

double CoefficientSource::t_max() const {
    if (frozen || (!table && bath)) return std::numeric_limits<double>::infinity();
    if (table) return table->t_max();
    return 0.0;
}

GeneratorSpec GeneratorSpec::make_markov(const MarkovParams& p) {
    GeneratorSpec g;
    g.regime = Regime::markov;
    g.markov = p;
    return g;
}

GeneratorSpec GeneratorSpec::make_markov_unsqueezed(double gamma, double n) {
    GeneratorSpec g;
    g.regime = Regime::markov_unsqueezed;
    g.markov = MarkovParams{gamma, n, 0.0, 0.0};
    return g;
}

GeneratorSpec GeneratorSpec::make_nonmarkov(std::shared_ptr<const CoefficientTable> table) {
    GeneratorSpec g;
    g.regime = Regime::nonmarkov;
    g.source.table = std::move(table);
    return g;
}

GeneratorSpec GeneratorSpec::make_nonmarkov_direct(const BathSpec& bath, const QuadratureConfig& quad) {
    GeneratorSpec g;
    g.regime = Regime::nonmarkov;
    g.source.bath = bath;
    g.source.quadrature = quad;
    return g;
}

GeneratorSpec GeneratorSpec::make_frozen(const CoefficientSet& c) {
    GeneratorSpec g;
    g.regime = Regime::nonmarkov;
    g.source.frozen = c;
    return g;
}

void GeneratorSpec::validate() const {
    if (regime == Regime::nonmarkov) {
        if (!source.frozen && !source.table && !source.bath) {
            throw std::invalid_argument("non-Markov generator needs a coefficient source");
        }
        return;
    }
    if (!(markov.gamma > 0.0)) throw std::invalid_argument("Markov generator: gamma must be > 0");
    if (!(markov.n >= 0.0)) throw std::invalid_argument("Markov generator: N must be >= 0");
    if (!(markov.m >= 0.0)) throw std::invalid_argument("Markov generator: M must be >= 0");
}

namespace {

struct Ladder {
    Operator sm = collective_lowering();
    Operator sp = collective_raising();
    Operator spsm = sp * sm;
    Operator smsp = sm * sp;
    Operator spsp = sp * sp;
    Operator smsm = sm * sm;
};

const Ladder& ladder() {
    static const Ladder l;
    return l;
}

}  // namespace

Operator nonmarkov_rhs(const Operator& rho, const CoefficientSet& c) {
    const auto& L = ladder();
    const Operator sp_rho_sm = L.sp * rho * L.sm;
    const Operator sm_rho_sp = L.sm * rho * L.sp;
    const Operator sp_rho_sp = L.sp * rho * L.sp;
    const Operator sm_rho_sm = L.sm * rho * L.sm;

    Operator out = c.delta * (sp_rho_sm - rho * L.smsp);
    out += std::conj(c.delta) * (sp_rho_sm - L.smsp * rho);
    out += c.mu * (sm_rho_sp - L.spsm * rho);
    out += std::conj(c.mu) * (sm_rho_sp - rho * L.spsm);
    out += c.alpha * (2.0 * sp_rho_sp - L.spsp * rho - rho * L.spsp);
    out += std::conj(c.alpha) * (2.0 * sm_rho_sm - L.smsm * rho - rho * L.smsm);
    return out;
}

Operator markov_rhs(const Operator& rho, const MarkovParams& p) {
    const auto& L = ladder();
    const double g = p.gamma;
    const complex squeeze = p.m * std::polar(1.0, p.theta);

    Operator out = 0.5 * g * (p.n + 1.0) * (2.0 * L.sm * rho * L.sp - L.spsm * rho - rho * L.spsm);
    out += 0.5 * g * p.n * (2.0 * L.sp * rho * L.sm - L.smsp * rho - rho * L.smsp);
    out -= 0.5 * g * squeeze * (2.0 * L.sp * rho * L.sp - L.spsp * rho - rho * L.spsp);
    out -= 0.5 * g * std::conj(squeeze) * (2.0 * L.sm * rho * L.sm - L.smsm * rho - rho * L.smsm);
    return out;
}

Operator markov_rhs(const Operator& rho, const GeneratorSpec& g) {
    if (g.regime == Regime::markov_unsqueezed) {
        MarkovParams p = g.markov;
        p.m = 0.0;
        return markov_rhs(rho, p);
    }
    return markov_rhs(rho, g.markov);
}

Operator generator_rhs(double t, const Operator& rho, const GeneratorSpec& g) {
    if (g.regime == Regime::nonmarkov) return nonmarkov_rhs(rho, g.source.at(t));
    return markov_rhs(rho, g);
}

void IntegratorConfig::validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("integrator: dt must be > 0");
    if (!(t_max > 0.0)) throw std::invalid_argument("integrator: t_max must be > 0");
    if (sample_stride == 0) throw std::invalid_argument("integrator: sample_stride must be >= 1");
    if (method == IntegratorMethod::rk45_adaptive) {
        if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw std::invalid_argument("integrator: tolerances must be > 0");
        if (!(dt_min > 0.0) || !(dt_max > 0.0)) throw std::invalid_argument("integrator: dt_min, dt_max must be > 0");
        if (dt_min > dt_max) throw std::invalid_argument("integrator: dt_min > dt_max");
    }
}

namespace {

// Dormand-Prince 5(4) tableau.
namespace dp {
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b - b* (fifth minus fourth order weights)
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
}  // namespace dp

class Stepper {
public:
    Stepper(const GeneratorSpec& g, const IntegratorConfig& cfg) : g_(g), cfg_(cfg) {}

    Operator rhs(double t, const Operator& y) const { return generator_rhs(t, y, g_); }

    Operator rk4(double t, const Operator& y, double h) const {
        const Operator k1 = rhs(t, y);
        const Operator k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1);
        const Operator k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2);
        const Operator k4 = rhs(t + h, y + h * k3);
        return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }

    // One Dormand-Prince attempt; returns the 5th-order solution and the
    // scaled error norm (accept when <= 1).
    std::pair<Operator, double> dopri(double t, const Operator& y, double h) const {
        using namespace dp;
        const Operator k1 = rhs(t, y);
        const Operator k2 = rhs(t + c2 * h, y + h * (a21 * k1));
        const Operator k3 = rhs(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
        const Operator k4 = rhs(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
        const Operator k5 = rhs(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const Operator k6 = rhs(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        const Operator y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const Operator k7 = rhs(t + h, y5);
        const Operator err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        double norm = 0.0;
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) {
                const double scale = cfg_.abs_tol + cfg_.rel_tol * std::max(std::abs(y(i, j)), std::abs(y5(i, j)));
                norm = std::max(norm, std::abs(err(i, j)) / scale);
            }
        }
        return {y5, norm};
    }

private:
    const GeneratorSpec& g_;
    const IntegratorConfig& cfg_;
};

// Records deviations, then restores Hermiticity and unit trace.
void enforce_structure(Operator& rho, Trajectory& traj, SampleDiagnostics& last) {
    last.trace_dev = trace_deviation(rho);
    last.herm_dev = hermiticity_deviation(rho);
    traj.max_trace_dev = std::max(traj.max_trace_dev, last.trace_dev);
    traj.max_herm_dev = std::max(traj.max_herm_dev, last.herm_dev);
    rho = 0.5 * (rho + rho.adjoint());
    rho /= rho.trace().real();
}

}  // namespace

Trajectory evolve(const DensityMatrix& rho0, const GeneratorSpec& g, const IntegratorConfig& cfg) {
    cfg.validate();
    g.validate();
    if (g.regime == Regime::nonmarkov && g.source.t_max() < cfg.t_max * (1.0 - 1e-12)) {
        throw IntegrationError("coefficient source covers t <= " + std::to_string(g.source.t_max()) +
                                   " but integration requested t_max = " + std::to_string(cfg.t_max),
                               g.source.t_max());
    }

    const auto grid_points = static_cast<std::size_t>(std::ceil(cfg.t_max / cfg.dt - 1e-9));
    auto grid_time = [&](std::size_t k) {
        return k == grid_points ? cfg.t_max : cfg.dt * static_cast<double>(k);
    };

    Trajectory traj;
    Stepper stepper(g, cfg);
    Operator rho = rho0.entries();
    SampleDiagnostics diag;

    auto record = [&](double t) {
        SampleDiagnostics d = diag;
        d.min_eig = jacobi_eigen(rho).values[3];
        traj.times.push_back(t);
        traj.states.push_back(DensityMatrix::unchecked(rho));
        traj.diagnostics.push_back(d);
    };
    record(0.0);

    double h = std::min(cfg.dt_max, cfg.dt);
    for (std::size_t k = 0; k < grid_points; ++k) {
        const double t0 = grid_time(k);
        const double t1 = grid_time(k + 1);

        if (cfg.method == IntegratorMethod::rk4_fixed) {
            rho = stepper.rk4(t0, rho, t1 - t0);
            enforce_structure(rho, traj, diag);
            ++traj.accepted_steps;
        } else {
            double t = t0;
            while (t < t1) {
                const bool last_piece = t + h >= t1 * (1.0 - 1e-14);
                const double step = last_piece ? t1 - t : h;
                auto [candidate, err] = stepper.dopri(t, rho, step);
                if (!candidate.allFinite()) err = std::numeric_limits<double>::infinity();
                if (err <= 1.0) {
                    rho = candidate;
                    t = last_piece ? t1 : t + step;
                    enforce_structure(rho, traj, diag);
                    ++traj.accepted_steps;
                    const double grow = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
                    // A clipped final piece says nothing about the natural step.
                    if (!last_piece || step >= h) h = std::min(cfg.dt_max, h * std::clamp(grow, 0.2, 5.0));
                } else {
                    ++traj.rejected_steps;
                    const double shrink = std::isfinite(err) ? 0.9 * std::pow(err, -0.2) : 0.2;
                    h = std::max(0.2, shrink) * step;
                    if (h < cfg.dt_min) {
                        throw IntegrationError("step size underflow at t = " + std::to_string(t), t);
                    }
                }
            }
        }

        if ((k + 1) % cfg.sample_stride == 0 || k + 1 == grid_points) record(t1);
    }
    return traj;
}

}  // namespace sqz
