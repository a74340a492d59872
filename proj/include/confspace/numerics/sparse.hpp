#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "confspace/errors.hpp"

namespace confspace {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using RealVec = Eigen::VectorXd;
using Dense = Eigen::MatrixXcd;
using RealDense = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<cplx, Eigen::RowMajor, std::int64_t>;
using Triplet = Eigen::Triplet<cplx, std::int64_t>;

inline constexpr double kPruneThreshold = 1e-15;
inline constexpr std::int64_t kDefaultKronCap = std::int64_t{1} << 24;

namespace numerics {

/// Drops entries with |value| below the prune threshold and compresses storage.
inline void prune(SparseMatrix& m, double threshold = kPruneThreshold) {
    m.prune([threshold](std::int64_t, std::int64_t, const cplx& v) { return std::abs(v) >= threshold; });
    m.makeCompressed();
}

inline SparseMatrix from_triplets(std::int64_t rows, std::int64_t cols, const std::vector<Triplet>& t) {
    SparseMatrix m(rows, cols);
    m.setFromTriplets(t.begin(), t.end());
    prune(m);
    return m;
}

inline SparseMatrix identity(std::int64_t n) {
    SparseMatrix m(n, n);
    m.setIdentity();
    m.makeCompressed();
    return m;
}

inline SparseMatrix diagonal(const Vec& d) {
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(d.size()));
    for (Eigen::Index i = 0; i < d.size(); ++i) t.emplace_back(i, i, d[i]);
    return from_triplets(d.size(), d.size(), t);
}

inline SparseMatrix from_dense(const Dense& d) {
    std::vector<Triplet> t;
    for (Eigen::Index i = 0; i < d.rows(); ++i)
        for (Eigen::Index j = 0; j < d.cols(); ++j)
            if (std::abs(d(i, j)) >= kPruneThreshold) t.emplace_back(i, j, d(i, j));
    return from_triplets(d.rows(), d.cols(), t);
}

inline SparseMatrix from_real_dense(const RealDense& d) { return from_dense(d.cast<cplx>()); }

inline Dense to_dense(const SparseMatrix& m) { return Dense(m); }

/// Kronecker product a ⊗ b; the index of (i, j) is i * dim(b) + j.
inline SparseMatrix kron(const SparseMatrix& a, const SparseMatrix& b, std::int64_t cap = kDefaultKronCap) {
    const std::int64_t rows = a.rows() * b.rows();
    const std::int64_t cols = a.cols() * b.cols();
    if (rows > cap || cols > cap)
        throw ResourceError("kron: result dimension " + std::to_string(std::max(rows, cols)) + " exceeds cap " +
                            std::to_string(cap));
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(a.nonZeros() * b.nonZeros()));
    for (std::int64_t i = 0; i < a.outerSize(); ++i)
        for (SparseMatrix::InnerIterator ia(a, i); ia; ++ia)
            for (std::int64_t k = 0; k < b.outerSize(); ++k)
                for (SparseMatrix::InnerIterator ib(b, k); ib; ++ib)
                    t.emplace_back(ia.row() * b.rows() + ib.row(), ia.col() * b.cols() + ib.col(),
                                   ia.value() * ib.value());
    return from_triplets(rows, cols, t);
}

inline double max_abs(const SparseMatrix& m) {
    double r = 0.0;
    for (std::int64_t i = 0; i < m.outerSize(); ++i)
        for (SparseMatrix::InnerIterator it(m, i); it; ++it) r = std::max(r, std::abs(it.value()));
    return r;
}

inline double max_abs(const Dense& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline double max_abs_diff(const SparseMatrix& a, const SparseMatrix& b) {
    require(a.rows() == b.rows() && a.cols() == b.cols(), "max_abs_diff: shape mismatch");
    return max_abs(SparseMatrix(a - b));
}

/// max |A - A*|.
inline double hermitian_defect(const SparseMatrix& m) {
    require(m.rows() == m.cols(), "hermitian_defect: matrix is not square");
    SparseMatrix adj = m.adjoint();
    return max_abs(SparseMatrix(m - adj));
}

inline SparseMatrix anticommutator(const SparseMatrix& a, const SparseMatrix& b) {
    return SparseMatrix(a * b + b * a);
}

inline SparseMatrix commutator(const SparseMatrix& a, const SparseMatrix& b) { return SparseMatrix(a * b - b * a); }

inline SparseMatrix conj(const SparseMatrix& m) { return m.conjugate(); }

/// Keeps only the listed columns, in order.
inline Dense select_columns(const SparseMatrix& m, const std::vector<std::int64_t>& cols) {
    Dense out = Dense::Zero(m.rows(), static_cast<Eigen::Index>(cols.size()));
    SparseMatrix mt = m.transpose();  // rows of mt are columns of m
    for (std::size_t c = 0; c < cols.size(); ++c)
        for (SparseMatrix::InnerIterator it(mt, cols[c]); it; ++it) out(it.col(), static_cast<Eigen::Index>(c)) = it.value();
    return out;
}

/// Block matrix [[a, b], [c, d]] with square blocks of equal size; empty blocks may be passed as 0x0.
inline SparseMatrix block2x2(const SparseMatrix& a, const SparseMatrix& b, const SparseMatrix& c, const SparseMatrix& d,
                             std::int64_t n) {
    std::vector<Triplet> t;
    auto put = [&](const SparseMatrix& m, std::int64_t r0, std::int64_t c0) {
        if (m.rows() == 0) return;
        require(m.rows() == n && m.cols() == n, "block2x2: block size mismatch");
        for (std::int64_t i = 0; i < m.outerSize(); ++i)
            for (SparseMatrix::InnerIterator it(m, i); it; ++it) t.emplace_back(it.row() + r0, it.col() + c0, it.value());
    };
    put(a, 0, 0);
    put(b, 0, n);
    put(c, n, 0);
    put(d, n, n);
    return from_triplets(2 * n, 2 * n, t);
}

} // namespace numerics
} // namespace confspace
