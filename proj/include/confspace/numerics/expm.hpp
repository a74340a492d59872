#pragma once

#include <Eigen/Eigenvalues>

#include "confspace/numerics/lanczos.hpp"

namespace confspace::numerics {

struct ExpmResult {
    Vec value;
    int substeps = 0;
    int krylov_dim = 0;
    bool happy_breakdown = false;
};

/// exp(i s A) v for Hermitian A by Krylov projection with adaptive substeps.
inline ExpmResult expm_action(const MatVec& op, std::int64_t dim, double s, const Vec& v, double tol = 1e-12,
                              int m_max = 40) {
    require(v.size() == dim, "expm_action: vector dimension mismatch");
    require(tol > 0.0, "expm_action: tolerance must be positive");
    ExpmResult out;
    out.value = v;
    const double vnorm = v.norm();
    if (vnorm == 0.0 || s == 0.0) return out;

    double remaining = s;
    Vec w = v;
    const int mcap = static_cast<int>(std::min<std::int64_t>(m_max, dim));
    while (remaining != 0.0) {
        const double wn = w.norm();
        Dense V(dim, mcap + 1);
        RealVec alpha(mcap), beta(mcap);
        V.col(0) = w / wn;
        int m = 0;
        bool breakdown = false;
        for (int j = 0; j < mcap; ++j) {
            Vec u = op(V.col(j));
            alpha[j] = V.col(j).dot(u).real();
            u -= alpha[j] * V.col(j);
            if (j > 0) u -= beta[j - 1] * V.col(j - 1);
            for (int pass = 0; pass < 2; ++pass) u -= V.leftCols(j + 1) * (V.leftCols(j + 1).adjoint() * u);
            beta[j] = u.norm();
            m = j + 1;
            if (beta[j] < 1e-13 * std::max(1.0, std::abs(alpha[j]))) {
                breakdown = true;
                break;
            }
            V.col(j + 1) = u / beta[j];
        }
        out.krylov_dim = std::max(out.krylov_dim, m);
        Eigen::SelfAdjointEigenSolver<RealDense> tri;
        RealVec sub = beta.head(std::max(m - 1, 0));
        tri.computeFromTridiagonal(alpha.head(m), sub, Eigen::ComputeEigenvectors);
        const RealDense& S = tri.eigenvectors();
        const RealVec& lam = tri.eigenvalues();

        auto coeffs = [&](double tau) {
            Vec c(m);
            for (int i = 0; i < m; ++i) c[i] = std::exp(cplx(0.0, tau * lam[i])) * S(0, i);
            return Vec(S.cast<cplx>() * c);
        };

        double tau = remaining;
        Vec c = coeffs(tau);
        if (!breakdown) {
            // error estimate: weight on the last Lanczos vector times the outgoing beta
            int halvings = 0;
            while (std::abs(beta[m - 1] * c[m - 1]) * wn > tol * vnorm && halvings < 60) {
                tau *= 0.5;
                c = coeffs(tau);
                ++halvings;
            }
        } else {
            out.happy_breakdown = true;
        }
        w = wn * (V.leftCols(m) * c);
        remaining -= tau;
        ++out.substeps;
        if (std::abs(remaining) < 1e-15 * std::abs(s)) remaining = 0.0;
    }
    out.value = w;
    return out;
}

inline ExpmResult expm_action(const SparseMatrix& a, double s, const Vec& v, double tol = 1e-12, int m_max = 40) {
    require(a.rows() == a.cols(), "expm_action: operator is not square");
    MatVec mv = [&a](const Vec& x) -> Vec { return a * x; };
    return expm_action(mv, a.rows(), s, v, tol, m_max);
}

/// Dense exp(i s A) for Hermitian A through its eigendecomposition.
inline Dense expm_hermitian_dense(const Dense& a, double s) {
    Eigen::SelfAdjointEigenSolver<Dense> es(a);
    Vec ph(a.rows());
    for (Eigen::Index i = 0; i < a.rows(); ++i) ph[i] = std::exp(cplx(0.0, s * es.eigenvalues()[i]));
    return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

} // namespace confspace::numerics
