#include "inpr/linalg.hpp"

#include "inpr/error.hpp"

#include <lapacke.h>

namespace inpr::linalg {

SymmetricEigen symmetric_eigen(const Matrix& a) {
    const auto n = static_cast<lapack_int>(a.rows());
    SymmetricEigen out{Vector(n), a};
    const lapack_int info =
        LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, out.vectors.data(), n, out.values.data());
    if (info != 0) throw NumericalError("dsyevd failed with info " + std::to_string(info));
    return out;
}

Vector symmetric_eigenvalues(const Matrix& a) {
    const auto n = static_cast<lapack_int>(a.rows());
    Matrix work = a;
    Vector values(n);
    const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'L', n, work.data(), n, values.data());
    if (info != 0) throw NumericalError("dsyevd failed with info " + std::to_string(info));
    return values;
}

Vector solve_spd_shifted(const Matrix& a, double shift, const Vector& b) {
    Matrix m = a;
    m.diagonal().array() += shift;
    Eigen::LLT<Matrix> llt(m);
    if (llt.info() != Eigen::Success) {
        const double jitter = 1e-10 * m.trace() / static_cast<double>(m.rows());
        m.diagonal().array() += jitter;
        llt.compute(m);
        if (llt.info() != Eigen::Success) throw NumericalError("Cholesky factorization failed after jitter");
    }
    Vector x = llt.solve(b);
    if (!x.allFinite()) throw NumericalError("linear solve produced non-finite values");
    return x;
}

}  // namespace inpr::linalg
