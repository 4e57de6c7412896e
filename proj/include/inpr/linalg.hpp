#pragma once

#include "inpr/types.hpp"

namespace inpr::linalg {

struct SymmetricEigen {
    Vector values;   // ascending
    Matrix vectors;  // columns are orthonormal eigenvectors
};

/// Full eigendecomposition of a symmetric matrix (LAPACK dsyevd).
SymmetricEigen symmetric_eigen(const Matrix& a);

/// Eigenvalues only, ascending.
Vector symmetric_eigenvalues(const Matrix& a);

/// Solves (a + shift I) x = b for symmetric positive-definite a + shift I.
/// On factorization failure the diagonal is jittered once by
/// 1e-10 * trace(a + shift I) / n before giving up with NumericalError.
Vector solve_spd_shifted(const Matrix& a, double shift, const Vector& b);

}  // namespace inpr::linalg
