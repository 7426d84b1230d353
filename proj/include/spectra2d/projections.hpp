#pragma once

// Structure-enforcing maps used by the ADMM iteration on 2n x 2n block
// matrices [[T1, X], [X^H, T2]].

#include <string>
#include <string_view>

#include "spectra2d/signal_model.hpp"

namespace spectra2d {

enum class Variant {
    toeplitz,  // T1, T2 constrained Toeplitz
    nuclear,   // T1, T2 free (nuclear-norm baseline)
};

std::string_view to_string(Variant v) noexcept;
Variant variant_from_string(std::string_view s);

/// Named views onto a 2n x 2n block matrix.
class BlockMatrix2n {
public:
    BlockMatrix2n() = default;
    explicit BlockMatrix2n(CMatrix data);

    [[nodiscard]] int n() const noexcept { return n_; }
    [[nodiscard]] const CMatrix& data() const noexcept { return data_; }
    CMatrix& data() noexcept { return data_; }

    auto top_left() { return data_.topLeftCorner(n_, n_); }
    auto top_right() { return data_.topRightCorner(n_, n_); }
    auto bottom_left() { return data_.bottomLeftCorner(n_, n_); }
    auto bottom_right() { return data_.bottomRightCorner(n_, n_); }
    [[nodiscard]] auto top_left() const { return data_.topLeftCorner(n_, n_); }
    [[nodiscard]] auto top_right() const { return data_.topRightCorner(n_, n_); }
    [[nodiscard]] auto bottom_left() const { return data_.bottomLeftCorner(n_, n_); }
    [[nodiscard]] auto bottom_right() const { return data_.bottomRightCorner(n_, n_); }

private:
    int n_ = 0;
    CMatrix data_;
};

/// (A + A^H) / 2; the result is exactly Hermitian.
CMatrix symmetrize(const CMatrix& a);

/// argmin_{M >= 0} trace(M) + (rho/2) ||M - A||_F^2  =  V max(D - 1/rho, 0) V^H
/// for Hermitian A = V D V^H. Only the lower triangle of `a` is read and the
/// returned matrix is exactly Hermitian.
CMatrix psd_trace_prox(const CMatrix& a, double rho);

/// Replace every diagonal by its mean (orthogonal projection onto Toeplitz).
CMatrix toeplitz_project(const CMatrix& b);

/// Overwrite observed entries of `x` with their observed values.
CMatrix data_consistency(const CMatrix& x, const ObservationSet& obs);
void apply_data_consistency(Eigen::Ref<CMatrix> x, const ObservationSet& obs);

/// Euclidean projection of symmetrize(a) onto the affine feasible set:
/// Toeplitz diagonal blocks (toeplitz variant), observed top-right entries,
/// bottom-left = top-right^H.
BlockMatrix2n feasible_project(const CMatrix& a, const ObservationSet& obs, Variant variant);

/// Hermitian defect ||A - A^H||_F.
double hermitian_defect(const CMatrix& a);

/// Largest |A(i,j) - A(i+1,j+1)| over all diagonals.
double toeplitz_defect(const CMatrix& a);

struct FeasibilityReport {
    bool ok = false;
    double hermitian_defect = 0.0;
    double toeplitz_defect = 0.0;    // max over TL and BR
    bool observations_exact = false;  // bitwise match on T
};

FeasibilityReport check_feasible(const BlockMatrix2n& nmat, const ObservationSet& obs, Variant variant,
                                 double tol = 1e-12);

}  // namespace spectra2d
