#pragma once

#include <stdexcept>

#include <Eigen/Dense>

namespace sqz {

class EigenSolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct HermitianEigen {
    Eigen::Vector4d values;   // descending
    Eigen::Matrix4cd vectors; // columns match values
};

/// Cyclic complex Jacobi diagonalization of a 4x4 Hermitian matrix. Only the
/// Hermitian part (A + A^dagger)/2 is used. Throws EigenSolverError if the
/// off-diagonal norm fails to vanish within the sweep limit.
HermitianEigen jacobi_eigen(const Eigen::Matrix4cd& a);

}  // namespace sqz
