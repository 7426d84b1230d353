#pragma once

// Reference computations for the tests. Each one takes a different route
// from the library (explicit loops, dense least squares, closed-form 2x2
// algebra) so agreement is meaningful.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "spectra2d/signal_model.hpp"

namespace oracle {

using spectra2d::CMatrix;
using spectra2d::Complex;

inline CMatrix direct_sum(const std::vector<spectra2d::FrequencyPair>& f, const std::vector<Complex>& c, int n) {
    CMatrix x(n, n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            Complex acc{0.0, 0.0};
            for (std::size_t p = 0; p < f.size(); ++p)
                acc += c[p] * std::exp(Complex(0.0, 2.0 * std::numbers::pi * (f[p].f1 * j + f[p].f2 * k)));
            x(j, k) = acc;
        }
    return x;
}

inline CMatrix random_matrix(int rows, int cols, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    CMatrix a(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) a(i, j) = {g(rng), g(rng)};
    return a;
}

inline CMatrix random_hermitian(int n, std::mt19937_64& rng) {
    const CMatrix a = random_matrix(n, n, rng);
    return (a + a.adjoint()) * 0.5;
}

// Real least squares: columns of `design` span the real parameter space,
// rows are the stacked (re, im) coordinates of the matrix.
inline Eigen::VectorXd stack_real(const CMatrix& a) {
    Eigen::VectorXd v(2 * a.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        v(2 * i) = a(i).real();
        v(2 * i + 1) = a(i).imag();
    }
    return v;
}

inline CMatrix unstack_real(const Eigen::VectorXd& v, Eigen::Index rows, Eigen::Index cols) {
    CMatrix a(rows, cols);
    for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = {v(2 * i), v(2 * i + 1)};
    return a;
}

inline CMatrix diagonal_indicator(int n, int l) {
    CMatrix e = CMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
        if (i + l >= 0 && i + l < n) e(i + l, i) = 1.0;
    return e;
}

/// argmin ||X - B||_F over span{E_l} solved through the normal equations.
inline CMatrix toeplitz_least_squares(const CMatrix& b) {
    const int n = static_cast<int>(b.rows());
    const int p = 2 * n - 1;
    CMatrix design(n * n, p);
    for (int l = -(n - 1), c = 0; l <= n - 1; ++l, ++c) design.col(c) = diagonal_indicator(n, l).reshaped();
    const CMatrix gram = design.adjoint() * design;
    const Eigen::VectorXcd rhs = design.adjoint() * b.reshaped();
    const Eigen::VectorXcd coef = gram.ldlt().solve(rhs);
    return (design * coef).reshaped(n, n);
}

/// Nearest Hermitian matrix by least squares over a real Hermitian basis.
inline CMatrix hermitian_least_squares(const CMatrix& a) {
    const int n = static_cast<int>(a.rows());
    std::vector<CMatrix> basis;
    for (int i = 0; i < n; ++i) {
        CMatrix e = CMatrix::Zero(n, n);
        e(i, i) = 1.0;
        basis.push_back(e);
        for (int j = i + 1; j < n; ++j) {
            CMatrix re = CMatrix::Zero(n, n), im = CMatrix::Zero(n, n);
            re(i, j) = re(j, i) = 1.0;
            im(i, j) = Complex(0, 1);
            im(j, i) = Complex(0, -1);
            basis.push_back(re);
            basis.push_back(im);
        }
    }
    Eigen::MatrixXd design(2 * n * n, static_cast<Eigen::Index>(basis.size()));
    for (std::size_t c = 0; c < basis.size(); ++c) design.col(c) = stack_real(basis[c]);
    const Eigen::VectorXd coef = design.colPivHouseholderQr().solve(stack_real(a));
    return unstack_real(design * coef, n, n);
}

/// Projection of (A + A^H)/2 onto {[[T1, X], [X^H, T2]] : T1, T2 Toeplitz (if
/// toeplitz), X = observed on T}, via real least squares over the free
/// parameters: diagonal values of T1/T2 (or all entries) and unobserved X.
inline CMatrix feasible_least_squares(const CMatrix& a, const spectra2d::ObservationSet& obs, bool toeplitz) {
    const int n = obs.n, N = 2 * n;
    const CMatrix target = (a + a.adjoint()) * 0.5;

    CMatrix offset = CMatrix::Zero(N, N);
    for (const auto& e : obs.entries) {
        offset(e.j, n + e.k) = e.value;
        offset(n + e.k, e.j) = std::conj(e.value);
    }

    std::vector<CMatrix> basis;  // real-coefficient directions
    auto push_pair = [&](const CMatrix& e) {
        basis.push_back(e);
        basis.push_back(e * Complex(0, 1));
    };
    for (int block = 0; block < 2; ++block) {
        const int o = block * n;
        if (toeplitz) {
            for (int l = -(n - 1); l <= n - 1; ++l) {
                CMatrix e = CMatrix::Zero(N, N);
                e.block(o, o, n, n) = diagonal_indicator(n, l);
                push_pair(e);
            }
        } else {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    CMatrix e = CMatrix::Zero(N, N);
                    e(o + i, o + j) = 1.0;
                    push_pair(e);
                }
        }
    }
    const auto mask = obs.mask();
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            if (mask(j, k)) continue;
            CMatrix re = CMatrix::Zero(N, N), im = CMatrix::Zero(N, N);
            re(j, n + k) = 1.0;
            re(n + k, j) = 1.0;
            im(j, n + k) = Complex(0, 1);
            im(n + k, j) = Complex(0, -1);
            basis.push_back(re);
            basis.push_back(im);
        }
    Eigen::MatrixXd design(2 * N * N, static_cast<Eigen::Index>(basis.size()));
    for (std::size_t c = 0; c < basis.size(); ++c) design.col(c) = stack_real(basis[c]);
    const Eigen::VectorXd coef = design.colPivHouseholderQr().solve(stack_real(target - offset));
    return offset + unstack_real(design * coef, N, N);
}

/// Clip a Hermitian matrix to its PSD part with Eigen's own solver.
inline CMatrix psd_part(const CMatrix& h) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    const Eigen::VectorXd d = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

inline double prox_objective(const CMatrix& m, const CMatrix& a, double rho) {
    return m.trace().real() + 0.5 * rho * (m - a).squaredNorm();
}

// ---------------------------------------------------------------------------
// Scalar ADMM for n = 1: 2x2 Hermitian iterates stored as (a, b, d) with
// matrix [[a, b], [conj(b), d]], single observation X(0,0) = x0.

struct Herm2 {
    double a = 0.0;
    Complex b{0.0, 0.0};
    double d = 0.0;

    [[nodiscard]] double fro() const { return std::sqrt(a * a + d * d + 2.0 * std::norm(b)); }
    [[nodiscard]] double trace() const { return a + d; }
    Herm2 operator+(const Herm2& o) const { return {a + o.a, b + o.b, d + o.d}; }
    Herm2 operator-(const Herm2& o) const { return {a - o.a, b - o.b, d - o.d}; }
    Herm2 operator*(double s) const { return {a * s, b * s, d * s}; }
};

/// V max(D - shift, 0) V^H in closed form.
inline Herm2 prox2(const Herm2& h, double shift) {
    const double mean = 0.5 * (h.a + h.d), half = 0.5 * (h.a - h.d);
    const double radius = std::sqrt(half * half + std::norm(h.b));
    const double l1 = mean + radius, l2 = mean - radius;
    const double c1 = std::max(l1 - shift, 0.0), c2 = std::max(l2 - shift, 0.0);
    if (radius == 0.0) return {c1, {0.0, 0.0}, c1};
    // Spectral projector onto l1: (H - l2 I) / (l1 - l2).
    const Herm2 p1{(h.a - l2) / (l1 - l2), h.b / (l1 - l2), (h.d - l2) / (l1 - l2)};
    const Herm2 p2{1.0 - p1.a, -p1.b, 1.0 - p1.d};
    return p1 * c1 + p2 * c2;
}

struct ScalarRow {
    double objective, r, s, m_norm, n_norm, rho_u_norm;
    bool stop;
};

inline std::vector<ScalarRow> scalar_admm(Complex x0, double rho, double eps_abs, double eps_rel, int iters) {
    Herm2 m, u;
    Herm2 nn{0.0, x0, 0.0};
    std::vector<ScalarRow> rows;
    for (int k = 0; k < iters; ++k) {
        const Herm2 m1 = prox2(nn - u, 1.0 / rho);
        const Herm2 w = m1 + u;
        const Herm2 n1{w.a, x0, w.d};  // 1x1 blocks are Toeplitz; X pinned
        const Herm2 u1 = u + m1 - n1;
        const double r = (m1 - n1).fro(), s = rho * (nn - n1).fro();
        const double base = 2.0 * 1 * eps_abs;
        const double tp = base + eps_rel * std::max(m1.fro(), n1.fro());
        const double td = base + eps_rel * (u1 * rho).fro();
        rows.push_back({m1.trace(), r, s, m1.fro(), n1.fro(), (u1 * rho).fro(), r <= tp && s <= td});
        m = m1;
        nn = n1;
        u = u1;
    }
    return rows;
}

}  // namespace oracle
