#pragma once

#include <functional>
#include <vector>

#include "confspace/geometry/modes.hpp"
#include "confspace/numerics/sparse.hpp"

namespace confspace::spinor {

using geometry::Lattice;
using geometry::LieCochain;
using geometry::Mat2;

/// epsilon = i sigma_2, so C = epsilon o conj on each C^2 factor.
inline Mat2 epsilon() {
    Mat2 e;
    e << 0, 1, -1, 0;
    return e;
}

/// Orthonormal frame (psi_1, psi_2) of C^2 per vertex, stored as the columns of a unitary matrix.
class ReferenceFrame {
public:
    explicit ReferenceFrame(const Lattice& lat) : lat_(lat), frames_(static_cast<std::size_t>(lat.vertices()), Mat2::Identity()) {}

    static ReferenceFrame flat(const Lattice& lat) { return ReferenceFrame(lat); }

    /// psi_j -> g psi_j at every vertex.
    static ReferenceFrame constant(const Lattice& lat, const Mat2& g) {
        ReferenceFrame f(lat);
        for (auto& m : f.frames_) m = g;
        f.validate();
        return f;
    }

    static ReferenceFrame from_function(const Lattice& lat, const std::function<Mat2(std::int64_t)>& g) {
        ReferenceFrame f(lat);
        for (std::int64_t v = 0; v < lat.vertices(); ++v) f.frames_[static_cast<std::size_t>(v)] = g(v);
        f.validate();
        return f;
    }

    const Lattice& lattice() const { return lat_; }
    const Mat2& at(std::int64_t v) const { return frames_[static_cast<std::size_t>(v)]; }

    void validate(double tol = 1e-12) const {
        for (const auto& m : frames_)
            if ((m.adjoint() * m - Mat2::Identity()).cwiseAbs().maxCoeff() > tol)
                throw DomainError("reference frame: frame is not orthonormal");
    }

private:
    Lattice lat_;
    std::vector<Mat2> frames_;
};

/// S-valued 1-cochain with S = S_1 + S_2; each edge holds a 2x2 matrix whose columns are the two slots.
class SpinorOneForm {
public:
    explicit SpinorOneForm(const Lattice& lat)
        : lat_(lat), values_(static_cast<std::size_t>(lat.cells(1)), Mat2::Zero()) {}

    const Lattice& lattice() const { return lat_; }
    std::size_t edges() const { return values_.size(); }
    Mat2& operator[](std::int64_t e) { return values_[static_cast<std::size_t>(e)]; }
    const Mat2& operator[](std::int64_t e) const { return values_[static_cast<std::size_t>(e)]; }

    /// Flattened complex vector: index edge * 4 + slot * 2 + component.
    Vec to_vector() const {
        Vec out(static_cast<Eigen::Index>(4 * values_.size()));
        for (std::size_t e = 0; e < values_.size(); ++e)
            for (int s = 0; s < 2; ++s)
                for (int c = 0; c < 2; ++c) out[static_cast<Eigen::Index>(4 * e + 2 * s + c)] = values_[e](c, s);
        return out;
    }

    static SpinorOneForm from_vector(const Lattice& lat, const Vec& v) {
        SpinorOneForm f(lat);
        require(v.size() == static_cast<Eigen::Index>(4 * f.edges()), "spinor one-form: vector length mismatch");
        for (std::size_t e = 0; e < f.edges(); ++e)
            for (int s = 0; s < 2; ++s)
                for (int c = 0; c < 2; ++c) f.values_[e](c, s) = v[static_cast<Eigen::Index>(4 * e + 2 * s + c)];
        return f;
    }

private:
    Lattice lat_;
    std::vector<Mat2> values_;
};

/// <x, y> = sum over edges of Tr(x* y) h^3, conjugate-linear in x.
inline cplx inner_product(const SpinorOneForm& x, const SpinorOneForm& y) {
    require(x.lattice() == y.lattice(), "spinor inner product: lattice mismatch");
    cplx acc = 0.0;
    for (std::size_t e = 0; e < x.edges(); ++e) {
        const auto i = static_cast<std::int64_t>(e);
        acc += (x[i].adjoint() * y[i]).trace();
    }
    return acc * x.lattice().cell_volume();
}

/// Value of omega at each edge applied to (psi_1, psi_2) at the base vertex, placed in the two slots.
inline SpinorOneForm embed_mode(const LieCochain& omega, const ReferenceFrame& frame) {
    require(omega.degree() == 1, "embed_mode: expected a 1-cochain");
    require(omega.lattice() == frame.lattice(), "embed_mode: lattice mismatch");
    if (geometry::su2_defect(omega) > 1e-12) throw DomainError("embed_mode: mode is not su(2)-valued");
    SpinorOneForm out(omega.lattice());
    for (std::int64_t e = 0; e < static_cast<std::int64_t>(out.edges()); ++e) out[e] = omega[e] * frame.at(e / 3);
    return out;
}

/// Single-particle charge conjugation epsilon o conj on every C^2 factor.
inline SpinorOneForm charge_conjugation(const SpinorOneForm& x) {
    SpinorOneForm out(x.lattice());
    const Mat2 eps = epsilon();
    for (std::int64_t e = 0; e < static_cast<std::int64_t>(x.edges()); ++e) out[e] = eps * x[e].conjugate();
    return out;
}

/// (1 + Laplacian^p) applied componentwise.
inline SpinorOneForm sobolev_weight(const SpinorOneForm& x, int p) {
    require(p >= 0, "sobolev_weight: order must be non-negative");
    const Lattice& lat = x.lattice();
    const double inv_h2 = 1.0 / (lat.spacing() * lat.spacing());
    SpinorOneForm cur = x, out = x;
    for (int step = 0; step < p; ++step) {
        SpinorOneForm nxt(lat);
        for (std::int64_t v = 0; v < lat.vertices(); ++v)
            for (int mu = 0; mu < 3; ++mu) {
                Mat2 acc = 6.0 * cur[v * 3 + mu];
                for (int d = 0; d < 3; ++d) acc -= cur[lat.shift(v, d, 1) * 3 + mu] + cur[lat.shift(v, d, -1) * 3 + mu];
                nxt[v * 3 + mu] = acc * inv_h2;
            }
        cur = nxt;
    }
    if (p > 0)
        for (std::int64_t e = 0; e < static_cast<std::int64_t>(out.edges()); ++e) out[e] += cur[e];
    return out;
}

inline Dense sobolev_gram(const std::vector<SpinorOneForm>& modes, int p) {
    std::vector<SpinorOneForm> w;
    for (const auto& m : modes) w.push_back(sobolev_weight(m, p));
    const auto n = static_cast<Eigen::Index>(modes.size());
    Dense g(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            g(i, j) = inner_product(w[static_cast<std::size_t>(i)], w[static_cast<std::size_t>(j)]);
    return g;
}

/// max |G_1 - G_2| between the Sobolev Gram matrices of the modes embedded with two frames.
inline double sobolev_frame_dependence(const geometry::ModeBasis& basis, const ReferenceFrame& f1,
                                       const ReferenceFrame& f2, int p) {
    std::vector<SpinorOneForm> a, b;
    for (int i = 0; i < basis.size(); ++i) {
        a.push_back(embed_mode(basis[i], f1));
        b.push_back(embed_mode(basis[i], f2));
    }
    return numerics::max_abs(Dense(sobolev_gram(a, p) - sobolev_gram(b, p)));
}

/// Orthonormal fermionic modes psi_1..psi_M; the first N are the embedded bosonic modes.
struct FermionModes {
    std::vector<SpinorOneForm> modes;
    int embedded = 0;
    int size() const { return static_cast<int>(modes.size()); }
};

/// Completes the embedded modes to M orthonormal spinor 1-forms.
///
/// Seed family: the charge conjugates of the embedded modes in order, then unit vectors
/// (edge, slot, component) in index order, each followed by its charge conjugate. When the embedded span
/// is closed under C only after adding conjugates, the first members of the completion are those conjugates.
inline FermionModes extend_basis(const std::vector<SpinorOneForm>& embedded, int M) {
    const int N = static_cast<int>(embedded.size());
    require(M >= N, "extend_basis: M must be at least the number of embedded modes");
    FermionModes out;
    out.embedded = N;
    if (M == 0) return out;
    require(N > 0, "extend_basis: no embedded modes to take the lattice from");
    const Lattice lat = embedded[0].lattice();
    const Eigen::Index len = static_cast<Eigen::Index>(4 * lat.cells(1));
    require(M <= len, "extend_basis: M exceeds the spinor 1-form dimension");
    const double h3 = lat.cell_volume();

    std::vector<Vec> basis;
    for (const auto& e : embedded) basis.push_back(e.to_vector());
    for (std::size_t i = 0; i < basis.size(); ++i)
        for (std::size_t j = 0; j < basis.size(); ++j) {
            const cplx g = basis[i].dot(basis[j]) * h3;
            if (std::abs(g - (i == j ? 1.0 : 0.0)) > 1e-10) throw DomainError("extend_basis: embedded modes are not orthonormal");
        }

    auto try_add = [&](Vec w) {
        if (static_cast<int>(basis.size()) >= M) return false;
        const double n0 = std::sqrt(w.squaredNorm() * h3);
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& b : basis) w -= b * (b.dot(w) * h3);
        const double nrm = std::sqrt(w.squaredNorm() * h3);
        if (nrm < 1e-10 * n0) return false;
        basis.push_back(w / nrm);
        return true;
    };
    auto conj_vec = [&](const Vec& v) { return charge_conjugation(SpinorOneForm::from_vector(lat, v)).to_vector(); };

    for (int i = 0; i < N && static_cast<int>(basis.size()) < M; ++i) try_add(conj_vec(basis[static_cast<std::size_t>(i)]));
    for (Eigen::Index u = 0; u < len && static_cast<int>(basis.size()) < M; ++u) {
        Vec e = Vec::Zero(len);
        e[u] = 1.0;
        if (try_add(e)) try_add(conj_vec(basis.back()));
    }
    if (static_cast<int>(basis.size()) < M) throw InternalError("extend_basis: seed family exhausted");
    for (const auto& b : basis) out.modes.push_back(SpinorOneForm::from_vector(lat, b));
    return out;
}

/// Matrix of C restricted to the mode span: C(sum z_i psi_i) = sum_j K_ji conj(z_i) psi_j.
struct ModeConjugation {
    Dense K;
    double closure_defect = 0.0;  // max_i |C psi_i - sum_j K_ji psi_j|
};

inline ModeConjugation mode_space_conjugation(const FermionModes& fm) {
    const int M = fm.size();
    ModeConjugation out;
    out.K = Dense::Zero(M, M);
    for (int i = 0; i < M; ++i) {
        const SpinorOneForm c = charge_conjugation(fm.modes[static_cast<std::size_t>(i)]);
        Vec rest = c.to_vector();
        for (int j = 0; j < M; ++j) {
            out.K(j, i) = inner_product(fm.modes[static_cast<std::size_t>(j)], c);
            rest -= out.K(j, i) * fm.modes[static_cast<std::size_t>(j)].to_vector();
        }
        out.closure_defect = std::max(out.closure_defect, std::sqrt(rest.squaredNorm() * c.lattice().cell_volume()));
    }
    return out;
}

} // namespace confspace::spinor
