#include "spectra2d/hermitian_eig.hpp"

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace spectra2d {

namespace {

void require_finite(const CMatrix& a) {
    if (!a.allFinite()) throw std::runtime_error("hermitian_eig: non-finite matrix entries");
}

}  // namespace

HermitianEig hermitian_eig(const CMatrix& a, std::optional<double> lower_bound) {
    if (a.rows() != a.cols()) throw std::invalid_argument("hermitian_eig: matrix must be square");
    require_finite(a);
    const auto n = static_cast<lapack_int>(a.rows());
    HermitianEig out;
    if (n == 0) return out;

    CMatrix work = a;  // zheevr destroys its input
    Eigen::VectorXd w(n);
    CMatrix z(n, n);
    std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(n));
    lapack_int found = 0;

    char range = 'A';
    double vl = 0.0, vu = 0.0;
    if (lower_bound) {
        // Every eigenvalue is bounded by the Frobenius norm.
        vu = a.norm() + 1.0;
        if (*lower_bound >= vu) {
            out.values.resize(0);
            out.vectors.resize(n, 0);
            return out;
        }
        range = 'V';
        vl = *lower_bound;
    }
    const lapack_int info = LAPACKE_zheevr(LAPACK_COL_MAJOR, 'V', range, 'L', n, work.data(), n, vl, vu, 0, 0, 0.0,
                                           &found, w.data(), z.data(), n, isuppz.data());
    if (info != 0) throw std::runtime_error("hermitian_eig: zheevr failed, info=" + std::to_string(info));
    out.values = w.head(found);
    out.vectors = z.leftCols(found);
    return out;
}

Eigen::VectorXd hermitian_eigenvalues(const CMatrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("hermitian_eigenvalues: matrix must be square");
    require_finite(a);
    const auto n = static_cast<lapack_int>(a.rows());
    CMatrix work = a;
    Eigen::VectorXd w(n);
    if (n == 0) return w;
    const lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'L', n, work.data(), n, w.data());
    if (info != 0) throw std::runtime_error("hermitian_eigenvalues: zheevd failed, info=" + std::to_string(info));
    return w;
}

}  // namespace spectra2d
