#pragma once

#include <bit>
#include <cstdint>
#include <vector>

#include "confspace/numerics/sparse.hpp"

namespace confspace::fock {

/// Antilinear operator v -> L conj(v), stored by its linear part L.
struct AntilinearOperator {
    SparseMatrix linear;

    Vec apply(const Vec& v) const { return linear * v.conjugate(); }

    /// (L1 conj)(L2 conj) = L1 conj(L2), a linear operator.
    SparseMatrix compose(const AntilinearOperator& o) const { return SparseMatrix(linear * o.linear.conjugate()); }

    /// (L conj) A = L conj(A) conj.
    AntilinearOperator after(const SparseMatrix& a) const { return {SparseMatrix(linear * a.conjugate())}; }

    /// A (L conj) = (A L) conj.
    AntilinearOperator before(const SparseMatrix& a) const { return {SparseMatrix(a * linear)}; }

    /// Linear operator T(.)T for a linear X: L conj(X) conj(L).
    SparseMatrix sandwich(const SparseMatrix& x) const {
        return SparseMatrix(linear * x.conjugate() * linear.conjugate());
    }
};

/// Fermionic Fock space over M modes. Basis states are bitmasks; state S is
/// a+_{i1} ... a+_{in} |0> with i1 < ... < in.
class FockSpace {
public:
    static constexpr double kHalfRoot = 0.70710678118654752440;

    explicit FockSpace(int modes) : M_(modes) {
        require(modes >= 0 && modes <= 24, "fock space: mode count must lie in [0, 24]");
    }

    int modes() const { return M_; }
    std::int64_t dim() const { return std::int64_t{1} << M_; }

    static int particles(std::int64_t state) { return std::popcount(static_cast<std::uint64_t>(state)); }

    /// a+_i with Jordan-Wigner sign (-1)^(occupied modes below i).
    SparseMatrix creation(int i) const {
        require(i >= 0 && i < M_, "fock: mode index out of range");
        std::vector<Triplet> t;
        for (std::int64_t s = 0; s < dim(); ++s) {
            if (s & (std::int64_t{1} << i)) continue;
            const int below = particles(s & ((std::int64_t{1} << i) - 1));
            t.emplace_back(s | (std::int64_t{1} << i), s, below % 2 ? -1.0 : 1.0);
        }
        return numerics::from_triplets(dim(), dim(), t);
    }

    /// ext(psi) = sum_i psi_i a+_i for psi given by its coefficients in the mode basis.
    SparseMatrix ext(const Vec& psi) const {
        require(psi.size() == M_, "fock: coefficient vector length must equal the mode count");
        SparseMatrix out(dim(), dim());
        for (int i = 0; i < M_; ++i)
            if (psi[i] != 0.0) out += psi[i] * creation(i);
        numerics::prune(out);
        return out;
    }

    /// int(psi) = ext(psi)*.
    SparseMatrix interior(const Vec& psi) const { return SparseMatrix(ext(psi).adjoint()); }

    /// c(psi) = (ext + int) / sqrt 2, so that {c(psi_i), c(psi_j)} = delta_ij.
    SparseMatrix clifford(const Vec& psi) const { return SparseMatrix((ext(psi) + interior(psi)) * kHalfRoot); }

    /// cbar(psi) = (ext - int) / sqrt 2, so that {cbar(psi_i), cbar(psi_j)} = -delta_ij.
    SparseMatrix clifford_bar(const Vec& psi) const { return SparseMatrix((ext(psi) - interior(psi)) * kHalfRoot); }

    SparseMatrix identity() const { return numerics::identity(dim()); }

    Vec unit(int i) const {
        Vec e = Vec::Zero(M_);
        e[i] = 1.0;
        return e;
    }

    /// (-1)^n.
    SparseMatrix grading() const {
        Vec d(dim());
        for (std::int64_t s = 0; s < dim(); ++s) d[s] = particles(s) % 2 ? -1.0 : 1.0;
        return numerics::diagonal(d);
    }

    SparseMatrix number() const {
        Vec d(dim());
        for (std::int64_t s = 0; s < dim(); ++s) d[s] = particles(s);
        return numerics::diagonal(d);
    }

    Vec vacuum() const {
        Vec v = Vec::Zero(dim());
        v[0] = 1.0;
        return v;
    }

private:
    int M_;
};

/// Checks that K conj(K) = -1 and K is unitary, the conditions for C_1 on the mode space.
inline double mode_conjugation_defect(const Dense& K) {
    const auto M = K.rows();
    require(K.cols() == M, "mode conjugation: matrix is not square");
    const double sq = numerics::max_abs(Dense(K * K.conjugate() + Dense::Identity(M, M)));
    const double un = numerics::max_abs(Dense(K.adjoint() * K - Dense::Identity(M, M)));
    return std::max(sq, un);
}

/// Multiplicative extension of C_1 to the Fock space: C(psi_i1 ^ ... ^ psi_in) = C psi_i1 ^ ... ^ C psi_in.
/// C_1 acts on mode coefficients as z -> K conj(z).
inline AntilinearOperator fock_charge_conjugation(const FockSpace& fs, const Dense& K, double tol = 1e-10) {
    require(K.rows() == fs.modes() && K.cols() == fs.modes(), "fock_charge_conjugation: K must be M x M");
    const double defect = mode_conjugation_defect(K);
    if (defect > tol)
        throw DomainError("fock_charge_conjugation: C_1 is not antiunitary with C_1^2 = -1 on the mode space (defect " +
                          std::to_string(defect) + ")");
    std::vector<SparseMatrix> ext_c;
    for (int i = 0; i < fs.modes(); ++i) ext_c.push_back(fs.ext(K.col(i)));
    std::vector<Triplet> t;
    for (std::int64_t s = 0; s < fs.dim(); ++s) {
        Vec v = fs.vacuum();
        for (int i = fs.modes() - 1; i >= 0; --i)
            if (s & (std::int64_t{1} << i)) v = ext_c[static_cast<std::size_t>(i)] * v;
        for (std::int64_t r = 0; r < fs.dim(); ++r)
            if (std::abs(v[r]) >= kPruneThreshold) t.emplace_back(r, s, v[r]);
    }
    return {numerics::from_triplets(fs.dim(), fs.dim(), t)};
}

} // namespace confspace::fock
