#include "spectra2d/projections.hpp"

#include <cmath>
#include <stdexcept>

#include "spectra2d/hermitian_eig.hpp"

namespace spectra2d {

std::string_view to_string(Variant v) noexcept { return v == Variant::toeplitz ? "toeplitz" : "nuclear"; }

Variant variant_from_string(std::string_view s) {
    if (s == "toeplitz") return Variant::toeplitz;
    if (s == "nuclear") return Variant::nuclear;
    throw std::invalid_argument("unknown variant '" + std::string(s) + "' (expected toeplitz|nuclear)");
}

BlockMatrix2n::BlockMatrix2n(CMatrix data) : data_(std::move(data)) {
    if (data_.rows() != data_.cols() || data_.rows() % 2 != 0)
        throw std::invalid_argument("BlockMatrix2n: matrix must be square with even size");
    n_ = static_cast<int>(data_.rows() / 2);
}

CMatrix symmetrize(const CMatrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("symmetrize: matrix must be square");
    CMatrix out(a.rows(), a.cols());
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
        out(c, c) = {a(c, c).real(), 0.0};
        for (Eigen::Index r = c + 1; r < a.rows(); ++r) {
            const Complex v = 0.5 * (a(r, c) + std::conj(a(c, r)));
            out(r, c) = v;
            out(c, r) = std::conj(v);
        }
    }
    return out;
}

CMatrix psd_trace_prox(const CMatrix& a, double rho) {
    if (!(rho > 0.0)) throw std::invalid_argument("psd_trace_prox: rho must be positive");
    if (a.rows() != a.cols()) throw std::invalid_argument("psd_trace_prox: matrix must be square");
    const double shift = 1.0 / rho;
    // Eigenvalues of A - I/rho that survive clipping are exactly those of A above 1/rho.
    const HermitianEig eig = hermitian_eig(a, shift);

    CMatrix w = eig.vectors;
    for (Eigen::Index i = 0; i < w.cols(); ++i) w.col(i) *= std::sqrt(std::max(eig.values(i) - shift, 0.0));

    CMatrix m = CMatrix::Zero(a.rows(), a.cols());
    if (w.cols() > 0) {
        m.selfadjointView<Eigen::Lower>().rankUpdate(w);
        for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, i).imag(0.0);
        m = m.selfadjointView<Eigen::Lower>();
    }
    return m;
}

CMatrix toeplitz_project(const CMatrix& b) {
    if (b.rows() != b.cols()) throw std::invalid_argument("toeplitz_project: matrix must be square");
    const Eigen::Index n = b.rows();
    CMatrix out(n, n);
    for (Eigen::Index l = 0; l < n; ++l) {
        const Eigen::Index len = n - l;
        Complex lower{0.0, 0.0}, upper{0.0, 0.0};
        for (Eigen::Index i = 0; i < len; ++i) {
            lower += b(i + l, i);
            upper += b(i, i + l);
        }
        lower /= static_cast<double>(len);
        upper /= static_cast<double>(len);
        for (Eigen::Index i = 0; i < len; ++i) {
            out(i + l, i) = lower;
            out(i, i + l) = upper;
        }
    }
    return out;
}

void apply_data_consistency(Eigen::Ref<CMatrix> x, const ObservationSet& obs) {
    for (const auto& e : obs.entries) {
        if (e.j < 0 || e.k < 0 || e.j >= x.rows() || e.k >= x.cols())
            throw std::out_of_range("data_consistency: observation index out of range");
        x(e.j, e.k) = e.value;
    }
}

CMatrix data_consistency(const CMatrix& x, const ObservationSet& obs) {
    if (obs.n != x.rows() || x.rows() != x.cols()) throw std::invalid_argument("data_consistency: shape mismatch");
    CMatrix out = x;
    apply_data_consistency(out, obs);
    return out;
}

BlockMatrix2n feasible_project(const CMatrix& a, const ObservationSet& obs, Variant variant) {
    BlockMatrix2n out(symmetrize(a));
    if (obs.n != out.n()) throw std::invalid_argument("feasible_project: observation size does not match block size");
    if (variant == Variant::toeplitz) {
        out.top_left() = toeplitz_project(out.top_left());
        out.bottom_right() = toeplitz_project(out.bottom_right());
    }
    apply_data_consistency(out.top_right(), obs);
    out.bottom_left() = out.top_right().adjoint();
    return out;
}

double hermitian_defect(const CMatrix& a) { return (a - a.adjoint()).norm(); }

double toeplitz_defect(const CMatrix& a) {
    double worst = 0.0;
    for (Eigen::Index r = 1; r < a.rows(); ++r)
        for (Eigen::Index c = 1; c < a.cols(); ++c) worst = std::max(worst, std::abs(a(r, c) - a(r - 1, c - 1)));
    return worst;
}

FeasibilityReport check_feasible(const BlockMatrix2n& nmat, const ObservationSet& obs, Variant variant, double tol) {
    FeasibilityReport rep;
    rep.hermitian_defect = hermitian_defect(nmat.data());
    if (variant == Variant::toeplitz)
        rep.toeplitz_defect = std::max(toeplitz_defect(nmat.top_left()), toeplitz_defect(nmat.bottom_right()));
    rep.observations_exact = true;
    for (const auto& e : obs.entries)
        if (nmat.top_right()(e.j, e.k) != e.value) rep.observations_exact = false;
    const double scale = std::max(1.0, nmat.data().norm());
    rep.ok = rep.observations_exact && rep.hermitian_defect <= tol * scale && rep.toeplitz_defect <= tol * scale;
    return rep;
}

}  // namespace spectra2d
