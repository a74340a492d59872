#pragma once

#include <Eigen/Eigenvalues>

#include <functional>
#include <random>
#include <string>

#include "confspace/numerics/sparse.hpp"

namespace confspace::numerics {

using MatVec = std::function<Vec(const Vec&)>;

struct EigenResult {
    RealVec values;     // ascending
    Dense vectors;      // columns, orthonormal
    RealVec residuals;  // ||A y - theta y||
    int iterations = 0;
    bool converged = true;
    std::string message;
};

struct LanczosOptions {
    int max_krylov = 300;
    int max_runs_per_pair = 20;
    std::uint64_t seed = 0xC0FFEE;
};

namespace detail {

inline Vec random_unit(std::int64_t dim, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Vec v(dim);
    for (std::int64_t i = 0; i < dim; ++i) v[i] = cplx(g(rng), g(rng));
    return v / v.norm();
}

inline void orthogonalize(Vec& w, const Dense& basis, Eigen::Index cols) {
    for (int pass = 0; pass < 2; ++pass)
        for (Eigen::Index c = 0; c < cols; ++c) w -= basis.col(c) * basis.col(c).dot(w);
}

} // namespace detail

/// Lowest `count` eigenpairs of a Hermitian operator.
///
/// Lanczos with full reorthogonalization. Converged pairs are locked one at a time, and each new run is
/// kept orthogonal to the locked vectors, so degenerate eigenvalues come out with full multiplicity.
inline EigenResult lanczos_hermitian(const MatVec& op, std::int64_t dim, int count, double tol,
                                     const LanczosOptions& opts = {}) {
    require(count >= 0 && count <= dim, "lanczos: count must lie in [0, dim]");
    require(tol > 0.0, "lanczos: tolerance must be positive");
    EigenResult res;
    res.vectors = Dense::Zero(dim, count);
    res.values = RealVec::Zero(count);
    res.residuals = RealVec::Zero(count);
    if (count == 0) return res;

    std::mt19937_64 rng(opts.seed);
    Dense locked(dim, count);
    int nlocked = 0;
    const int kmax = static_cast<int>(std::min<std::int64_t>(opts.max_krylov, dim));

    while (nlocked < count) {
        bool locked_one = false;
        for (int run = 0; run < opts.max_runs_per_pair && !locked_one; ++run) {
            Vec v = detail::random_unit(dim, rng);
            detail::orthogonalize(v, locked, nlocked);
            double nv = v.norm();
            if (nv < 1e-10) {
                res.converged = false;
                res.message = "lanczos: start vector lies in the locked subspace";
                break;
            }
            v /= nv;
            const int room = static_cast<int>(std::min<std::int64_t>(kmax, dim - nlocked));
            Dense V(dim, room + 1);
            RealVec alpha(room), beta(room);
            V.col(0) = v;
            int m = 0;
            for (int j = 0; j < room; ++j) {
                Vec w = op(V.col(j));
                ++res.iterations;
                alpha[j] = V.col(j).dot(w).real();
                w -= alpha[j] * V.col(j);
                if (j > 0) w -= beta[j - 1] * V.col(j - 1);
                detail::orthogonalize(w, locked, nlocked);
                for (int pass = 0; pass < 2; ++pass) w -= V.leftCols(j + 1) * (V.leftCols(j + 1).adjoint() * w);
                beta[j] = w.norm();
                m = j + 1;
                const bool breakdown = beta[j] < 1e-13 * std::max(1.0, std::abs(alpha[j]));
                const bool check = breakdown || m == room || m % 5 == 0;
                if (!check) {
                    V.col(j + 1) = w / beta[j];
                    continue;
                }
                Eigen::SelfAdjointEigenSolver<RealDense> tri;
                RealVec sub = beta.head(std::max(m - 1, 0));
                tri.computeFromTridiagonal(alpha.head(m), sub, Eigen::ComputeEigenvectors);
                const double est = breakdown ? 0.0 : std::abs(beta[j] * tri.eigenvectors()(m - 1, 0));
                if ((est < 0.1 * tol && m >= std::min(room, 15)) || breakdown || m == room) {
                    Vec y = V.leftCols(m) * tri.eigenvectors().col(0).cast<cplx>();
                    detail::orthogonalize(y, locked, nlocked);
                    y /= y.norm();
                    const double th = y.dot(op(y)).real();
                    const double r = (op(y) - th * y).norm();
                    if (r <= tol) {
                        locked.col(nlocked) = y;
                        res.values[nlocked] = th;
                        res.residuals[nlocked] = r;
                        ++nlocked;
                        locked_one = true;
                        break;
                    }
                    if (breakdown || m == room) break;
                }
                V.col(j + 1) = w / beta[j];
            }
        }
        if (!locked_one) {
            res.converged = false;
            if (res.message.empty())
                res.message = "lanczos: eigenpair " + std::to_string(nlocked) + " did not converge to tolerance";
            break;
        }
    }

    // sort ascending
    std::vector<int> order(nlocked);
    for (int i = 0; i < nlocked; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return res.values[a] < res.values[b]; });
    EigenResult out;
    out.iterations = res.iterations;
    out.converged = res.converged;
    out.message = res.message;
    out.values.resize(nlocked);
    out.residuals.resize(nlocked);
    out.vectors.resize(dim, nlocked);
    for (int i = 0; i < nlocked; ++i) {
        out.values[i] = res.values[order[i]];
        out.residuals[i] = res.residuals[order[i]];
        out.vectors.col(i) = locked.col(order[i]);
    }
    return out;
}

inline EigenResult lanczos_hermitian(const SparseMatrix& a, int count, double tol, const LanczosOptions& opts = {}) {
    require(a.rows() == a.cols(), "lanczos: operator is not square");
    MatVec mv = [&a](const Vec& x) -> Vec { return a * x; };
    return lanczos_hermitian(mv, a.rows(), count, tol, opts);
}

/// Dense reference eigensolver.
inline EigenResult dense_hermitian(const Dense& a) {
    Eigen::SelfAdjointEigenSolver<Dense> es(a);
    EigenResult r;
    r.values = es.eigenvalues();
    r.vectors = es.eigenvectors();
    r.residuals = RealVec::Zero(a.rows());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        r.residuals[i] = (a * r.vectors.col(i) - r.values[i] * r.vectors.col(i)).norm();
    return r;
}

} // namespace confspace::numerics
