#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "sqz/qubits.hpp"

namespace sqz {

/// (sigma_y x sigma_y) rho^* (sigma_y x sigma_y), conjugation entrywise in
/// the product basis.
Operator spin_flip(const Operator& rho);

/// Square roots of the eigenvalues of rho * spin_flip(rho), descending,
/// computed from the Hermitian matrix sqrt(rho) rho~ sqrt(rho).
Eigen::Vector4d concurrence_roots(const Operator& rho);

/// Wootters concurrence. Eigenvalues of rho down to -1e-4 are clamped to
/// zero; anything more negative throws NegativeStateError.
double concurrence(const Operator& rho);
double concurrence(const DensityMatrix& rho);

class NegativeStateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double negativity_limit = 1e-4;

struct EsdConfig {
    double threshold = 1e-3;
    std::size_t min_width = 5;  // samples
};

struct DeadInterval {
    double t_start;
    double t_end;
    bool revived;  // false when the interval runs to the end of the series
};

struct EsdReport {
    std::vector<DeadInterval> dead_intervals;
    std::vector<double> death_times;
    std::vector<double> revival_times;
    double asymptotic_concurrence = 0.0;  // mean of the final 10% of samples
    std::size_t cycle_count = 0;
};

EsdReport detect_esd(std::span<const double> times, std::span<const double> concurrence,
                     const EsdConfig& cfg = {});

}  // namespace sqz
