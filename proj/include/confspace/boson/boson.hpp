#pragma once

#include <Eigen/Eigenvalues>

#include <vector>

#include "confspace/numerics/expm.hpp"
#include "confspace/numerics/polynomial.hpp"

namespace confspace::boson {

using numerics::Polynomial;

namespace single {

/// Truncated annihilation operator on levels 0..d-1.
inline RealDense ladder(int d) {
    RealDense a = RealDense::Zero(d, d);
    for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

/// x = (a + a*) / sqrt 2.
inline RealDense position(int d) {
    const RealDense a = ladder(d);
    return (a + a.transpose()) / std::sqrt(2.0);
}

/// d/dx = (a - a*) / sqrt 2.
inline RealDense derivative(int d) {
    const RealDense a = ladder(d);
    return (a - a.transpose()) / std::sqrt(2.0);
}

} // namespace single

/// Tensor product of N truncated oscillators; mode 0 varies fastest.
class BosonSpace {
public:
    BosonSpace(int modes, int cutoff, std::int64_t max_dim = kDefaultKronCap) : N_(modes), cutoff_(cutoff) {
        require(modes >= 0, "boson space: mode count must be non-negative");
        require(cutoff >= 1, "boson space: cutoff must be at least 1");
        dim_ = 1;
        for (int i = 0; i < N_; ++i) {
            dim_ *= levels();
            if (dim_ > max_dim)
                throw ResourceError("boson space: dimension exceeds cap " + std::to_string(max_dim));
        }
    }

    int modes() const { return N_; }
    int cutoff() const { return cutoff_; }
    int levels() const { return cutoff_ + 1; }
    std::int64_t dim() const { return dim_; }

    int occupation(std::int64_t index, int mode) const {
        for (int i = 0; i < mode; ++i) index /= levels();
        return static_cast<int>(index % levels());
    }

    std::int64_t index(const std::vector<int>& occ) const {
        require(static_cast<int>(occ.size()) == N_, "boson space: occupation tuple length mismatch");
        std::int64_t idx = 0, stride = 1;
        for (int i = 0; i < N_; ++i) {
            require(occ[static_cast<std::size_t>(i)] >= 0 && occ[static_cast<std::size_t>(i)] <= cutoff_,
                    "boson space: occupation out of range");
            idx += occ[static_cast<std::size_t>(i)] * stride;
            stride *= levels();
        }
        return idx;
    }

    /// Basis states with every mode occupation at most max_occ.
    std::vector<std::int64_t> low_occupation(int max_occ) const {
        std::vector<std::int64_t> out;
        for (std::int64_t s = 0; s < dim_; ++s) {
            bool ok = true;
            for (int i = 0; i < N_ && ok; ++i) ok = occupation(s, i) <= max_occ;
            if (ok) out.push_back(s);
        }
        return out;
    }

    /// Single-mode operator acting on mode i: I ⊗ op ⊗ I with mode 0 as the fastest index.
    SparseMatrix embed(const RealDense& op, int i) const {
        require(i >= 0 && i < N_, "boson space: mode index out of range");
        require(op.rows() == levels() && op.cols() == levels(), "boson space: single-mode operator has wrong size");
        std::int64_t inner = 1, outer = 1;
        for (int j = 0; j < i; ++j) inner *= levels();
        for (int j = i + 1; j < N_; ++j) outer *= levels();
        return numerics::kron(numerics::identity(outer),
                              numerics::kron(numerics::from_real_dense(op), numerics::identity(inner)));
    }

    SparseMatrix identity() const { return numerics::identity(dim_); }
    SparseMatrix position(int i) const { return embed(single::position(levels()), i); }
    SparseMatrix derivative(int i) const { return embed(single::derivative(levels()), i); }

private:
    int N_;
    int cutoff_;
    std::int64_t dim_;
};

/// Multiplication by a real polynomial of degree <= 3 in the position operators.
inline SparseMatrix polynomial_multiplication_op(const BosonSpace& space, const Polynomial& p) {
    require(p.variables() == space.modes(), "polynomial_multiplication_op: variable count must equal the mode count");
    if (p.degree() > 3) throw DomainError("polynomial_multiplication_op: degree above 3 is not supported");
    std::vector<SparseMatrix> x;
    for (int i = 0; i < space.modes(); ++i) x.push_back(space.position(i));
    SparseMatrix out(space.dim(), space.dim());
    for (const auto& t : p.terms()) {
        SparseMatrix m = space.identity();
        for (int v : t.vars) m = SparseMatrix(x[static_cast<std::size_t>(v)] * m);
        out += t.coeff * m;
    }
    numerics::prune(out);
    return out;
}

/// U = exp(i k CS(x)) on the working space by dense Hermitian eigendecomposition.
inline SparseMatrix cs_unitary(const BosonSpace& space, double k, const Polynomial& cs,
                               std::int64_t dense_threshold = 2000) {
    require(k != 0.0, "cs_unitary: k must be nonzero");
    if (space.dim() > dense_threshold)
        throw ResourceError("cs_unitary: dimension " + std::to_string(space.dim()) +
                            " exceeds the dense threshold; use the Krylov action");
    const SparseMatrix h = polynomial_multiplication_op(space, cs);
    return numerics::from_dense(numerics::expm_hermitian_dense(numerics::to_dense(h), k));
}

/// Action of exp(i k CS(x)) by Krylov projection, for spaces above the dense threshold.
class CsUnitaryAction {
public:
    CsUnitaryAction(const BosonSpace& space, double k, const Polynomial& cs, double tol = 1e-12)
        : h_(polynomial_multiplication_op(space, cs)), k_(k), tol_(tol) {
        require(k != 0.0, "cs_unitary: k must be nonzero");
    }

    Vec apply(const Vec& v) const { return numerics::expm_action(h_, k_, v, tol_).value; }
    Vec apply_adjoint(const Vec& v) const { return numerics::expm_action(h_, -k_, v, tol_).value; }

private:
    SparseMatrix h_;
    double k_;
    double tol_;
};

/// One factor of a product of single-mode operators.
struct ModeFactor {
    enum class Kind { Position, Derivative };
    Kind kind;
    int mode;
};

/// Product of single-mode factors; factors.back() acts first.
using FactorChain = std::vector<ModeFactor>;

/// Conjugation by U = exp(i s k CS(x)) carried out in a padded truncation.
///
/// Each mode is padded to L levels. There U is diagonal in the eigenbasis of the padded x (Gauss-Hermite
/// nodes), so every conjugation is evaluated in that node basis, where U is a phase. Conjugated operators are
/// compressed back onto the working levels.
class PaddedRotation {
public:
    PaddedRotation(const BosonSpace& working, int padded_levels, double k, const Polynomial& cs, double sign,
                   std::int64_t max_dim = std::int64_t{1} << 22)
        : work_(working), L_(padded_levels), k_(k), sign_(sign), cs_(cs) {
        require(k != 0.0, "padded rotation: k must be nonzero");
        require(sign == 1.0 || sign == -1.0, "padded rotation: sign must be +1 or -1");
        require(padded_levels > working.levels(), "padded rotation: padded levels must exceed the working levels");
        require(cs.variables() == working.modes(), "padded rotation: polynomial variable count mismatch");
        pdim_ = 1;
        for (int i = 0; i < work_.modes(); ++i) {
            pdim_ *= L_;
            if (pdim_ > max_dim) throw ResourceError("padded rotation: padded dimension exceeds cap");
        }
        Eigen::SelfAdjointEigenSolver<RealDense> es(single::position(L_));
        nodes_ = es.eigenvalues();
        V_ = es.eigenvectors();
        p_node_ = V_.transpose() * single::derivative(L_) * V_;
        Vw_ = V_.topRows(work_.levels());
        phase_.resize(pdim_);
        RealVec t(work_.modes());
        for (std::int64_t s = 0; s < pdim_; ++s) {
            std::int64_t r = s;
            for (int i = 0; i < work_.modes(); ++i) {
                t[i] = nodes_[r % L_];
                r /= L_;
            }
            phase_[s] = std::exp(cplx(0.0, sign_ * k_ * cs_.evaluate(t)));
        }
    }

    int padded_levels() const { return L_; }
    std::int64_t padded_dim() const { return pdim_; }

    /// P U O U* P.
    SparseMatrix conjugate(const FactorChain& op) const {
        return compress([&](Vec w) {
            w.array() *= phase_.array().conjugate();
            apply_chain(op, w);
            w.array() *= phase_.array();
            return w;
        });
    }

    /// P (O - [O, U] U*) P, the same operator formed through the commutator.
    SparseMatrix conjugate_via_commutator(const FactorChain& op) const {
        return compress([&](Vec w) {
            Vec ow = w;
            apply_chain(op, ow);  // O v
            Vec uw = w;
            uw.array() *= phase_.array().conjugate();
            Vec ouu = uw;
            ouu.array() *= phase_.array();
            apply_chain(op, ouu);  // O U U* v
            apply_chain(op, uw);
            uw.array() *= phase_.array();  // U O U* v
            return Vec(ow - ouu + uw);
        });
    }

    /// Apply U (adjoint = false) or U* (adjoint = true) to a padded vector in the level basis.
    void apply_u(Vec& v, bool adjoint) const {
        for (int i = 0; i < work_.modes(); ++i) apply_axis(V_.transpose(), v, i);
        if (adjoint)
            v.array() *= phase_.array().conjugate();
        else
            v.array() *= phase_.array();
        for (int i = 0; i < work_.modes(); ++i) apply_axis(V_, v, i);
    }

private:
    void apply_chain(const FactorChain& op, Vec& v) const {
        for (auto it = op.rbegin(); it != op.rend(); ++it) {
            if (it->kind == ModeFactor::Kind::Position)
                scale_axis(nodes_, v, it->mode);
            else
                apply_axis(p_node_, v, it->mode);
        }
    }

    void scale_axis(const RealVec& d, Vec& v, int axis) const {
        std::int64_t inner = 1;
        for (int j = 0; j < axis; ++j) inner *= L_;
        for (std::int64_t s = 0; s < pdim_; ++s) v[s] *= d[(s / inner) % L_];
    }

    /// Applies a single-mode L x L matrix along one tensor axis.
    void apply_axis(const RealDense& S, Vec& v, int axis) const {
        std::int64_t inner = 1;
        for (int j = 0; j < axis; ++j) inner *= L_;
        if (inner == 1) {
            Eigen::Map<Dense> m(v.data(), L_, pdim_ / L_);
            Dense r = S * m;
            m = r;
            return;
        }
        const std::int64_t block = inner * L_;
        for (std::int64_t base = 0; base < pdim_; base += block) {
            Eigen::Map<Dense> m(v.data() + base, inner, L_);
            Dense r = m * S.transpose();
            m = r;
        }
    }

    /// Node-basis image of a working basis state: a product of rows of V.
    Vec node_state(std::int64_t working_index) const {
        Vec w = Vec::Ones(pdim_);
        std::int64_t inner = 1;
        for (int i = 0; i < work_.modes(); ++i) {
            const int n = work_.occupation(working_index, i);
            for (std::int64_t s = 0; s < pdim_; ++s) w[s] *= V_(n, (s / inner) % L_);
            inner *= L_;
        }
        return w;
    }

    /// Level-basis coefficients on the working levels of a node-basis vector.
    Vec restrict_to_working(Vec w) const {
        const std::int64_t l = work_.levels();
        std::int64_t dim_after = pdim_;
        std::int64_t inner = 1;  // product of already contracted (working) axes
        for (int i = 0; i < work_.modes(); ++i) {
            std::int64_t outer = dim_after / (inner * L_);
            Vec out(inner * l * outer);
            for (std::int64_t o = 0; o < outer; ++o) {
                Eigen::Map<const Dense> m(w.data() + o * inner * L_, inner, L_);
                Eigen::Map<Dense> r(out.data() + o * inner * l, inner, l);
                r.noalias() = m * Vw_.transpose();
            }
            w = std::move(out);
            dim_after = inner * l * outer;
            inner *= l;
        }
        return w;
    }

    template <class F>
    SparseMatrix compress(F&& column_map) const {
        std::vector<Triplet> t;
        for (std::int64_t j = 0; j < work_.dim(); ++j) {
            const Vec col = restrict_to_working(column_map(node_state(j)));
            for (std::int64_t r = 0; r < work_.dim(); ++r)
                if (std::abs(col[r]) >= kPruneThreshold) t.emplace_back(r, j, col[r]);
        }
        return numerics::from_triplets(work_.dim(), work_.dim(), t);
    }

    BosonSpace work_;
    int L_;
    double k_;
    double sign_;
    Polynomial cs_;
    std::int64_t pdim_ = 1;
    RealDense V_, Vw_, p_node_;
    RealVec nodes_;
    Vec phase_;
};

/// Max over the conjugated derivatives of |P U d_i U* P - (d_i - i s k d_iCS(x))| on low occupations.
inline double conjugation_identity_residual(const BosonSpace& space, const PaddedRotation& rot, double k,
                                            double sign, const Polynomial& cs, int max_occ) {
    const auto low = space.low_occupation(max_occ);
    double r = 0.0;
    for (int i = 0; i < space.modes(); ++i) {
        const SparseMatrix lhs = rot.conjugate({{ModeFactor::Kind::Derivative, i}});
        const SparseMatrix rhs = space.derivative(i) - cplx(0.0, sign * k) *
                                                           polynomial_multiplication_op(space, cs.derivative(i));
        r = std::max(r, numerics::max_abs(numerics::select_columns(SparseMatrix(lhs - rhs), low)));
    }
    return r;
}

} // namespace confspace::boson
