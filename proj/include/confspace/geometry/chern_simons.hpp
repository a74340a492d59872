#pragma once

#include "confspace/geometry/modes.hpp"
#include "confspace/numerics/polynomial.hpp"

namespace confspace::geometry {

using numerics::CubicForm;
using numerics::Polynomial;

/// Chern-Simons functional of A: integral of Tr(A dA + 2/3 A A A).
inline double chern_simons_value(const LieCochain& A) {
    require(A.degree() == 1, "chern_simons_value: expected a 1-cochain");
    const auto v = pairing(A, coboundary(A)) + (2.0 / 3.0) * pairing(A, wedge(A, A));
    return v.real();
}

/// Pairings of modes with F, as tensors: v_i(x) = sum_j q_ij x_j + sum_jk t_ijk x_j x_k.
struct CurvaturePairing {
    int n = 0;
    RealDense q;
    std::vector<double> t;  // index (i * n + j) * n + k

    double cubic(int i, int j, int k) const { return t[(static_cast<std::size_t>(i) * n + j) * n + k]; }

    RealVec evaluate(const RealVec& x) const {
        RealVec v = q * x;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) v[i] += cubic(i, j, k) * x[j] * x[k];
        return v;
    }

    /// v_i as a polynomial of degree <= 2.
    Polynomial component(int i) const {
        Polynomial p(n);
        for (int j = 0; j < n; ++j) p.add(q(i, j), {j});
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) p.add(cubic(i, j, k), {j, k});
        return p;
    }
};

inline CurvaturePairing curvature_pairing(const ModeBasis& b) {
    const int n = b.size();
    CurvaturePairing cp;
    cp.n = n;
    cp.q = RealDense::Zero(n, n);
    cp.t.assign(static_cast<std::size_t>(n) * n * n, 0.0);
    std::vector<LieCochain> dxi;
    for (int j = 0; j < n; ++j) dxi.push_back(coboundary(b[j]));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) cp.q(i, j) = pairing(b[i], dxi[static_cast<std::size_t>(j)]).real();
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            const LieCochain w = wedge(b[j], b[k]);
            for (int i = 0; i < n; ++i) cp.t[(static_cast<std::size_t>(i) * n + j) * n + k] = pairing(b[i], w).real();
        }
    return cp;
}

/// CS restricted to the span of the modes, as a cubic form in the mode coordinates.
inline CubicForm chern_simons_coefficients(const ModeBasis& b, const CurvaturePairing& cp) {
    CubicForm f(b.size());
    f.set_quadratic(cp.q);
    f.set_cubic([&](int i, int j, int k) { return (2.0 / 3.0) * cp.cubic(i, j, k); });
    return f;
}

inline CubicForm chern_simons_coefficients(const ModeBasis& b) {
    return chern_simons_coefficients(b, curvature_pairing(b));
}

/// F = dA + A A.
inline LieCochain field_strength(const LieCochain& A) {
    LieCochain F = coboundary(A);
    F += wedge(A, A);
    return F;
}

/// v_i = integral of Tr(xi_i F(A)) at A = sum x_i xi_i.
inline RealVec pair_modes_with_F(const ModeBasis& b, const RealVec& x) {
    const LieCochain F = field_strength(b.connection(x));
    RealVec v(b.size());
    for (int i = 0; i < b.size(); ++i) v[i] = pairing(b[i], F).real();
    return v;
}

/// Covariant derivative of a 0-cochain: d lambda + A lambda - lambda A.
inline LieCochain covariant_derivative0(const LieCochain& A, const LieCochain& lambda) {
    require(lambda.degree() == 0, "covariant_derivative0: expected a 0-cochain");
    LieCochain out = coboundary(lambda);
    out += wedge(A, lambda);
    out -= wedge(lambda, A);
    return out;
}

/// Covariant derivative of a 1-cochain: d xi + A xi + xi A.
inline LieCochain covariant_derivative1(const LieCochain& A, const LieCochain& xi) {
    require(xi.degree() == 1, "covariant_derivative1: expected a 1-cochain");
    LieCochain out = coboundary(xi);
    out += wedge(A, xi);
    out += wedge(xi, A);
    return out;
}

/// |integral of Tr(nabla_A lambda F(A))|.
inline double bianchi_residual(const LieCochain& A, const LieCochain& lambda) {
    return std::abs(pairing(covariant_derivative0(A, lambda), field_strength(A)));
}

struct CovariantDerivativeMatrix {
    RealDense matrix;          // symmetric part
    double asymmetry = 0.0;    // max |M - M^T| before symmetrization
};

/// M_ij = -integral of Tr(xi_i d_A xi_j).
inline CovariantDerivativeMatrix covariant_derivative_matrix(const ModeBasis& b, const RealVec& x) {
    const LieCochain A = b.connection(x);
    const int n = b.size();
    RealDense m(n, n);
    for (int j = 0; j < n; ++j) {
        const LieCochain dj = covariant_derivative1(A, b[j]);
        for (int i = 0; i < n; ++i) m(i, j) = -pairing(b[i], dj).real();
    }
    CovariantDerivativeMatrix out;
    out.asymmetry = n ? (m - m.transpose()).cwiseAbs().maxCoeff() : 0.0;
    out.matrix = 0.5 * (m + m.transpose());
    return out;
}

/// Trace of the covariant derivative matrix.
inline double spectral_invariant(const ModeBasis& b, const RealVec& x) {
    return covariant_derivative_matrix(b, x).matrix.trace();
}

/// Affine form s(x) = c0 + sum c_i x_i of the spectral invariant.
struct AffineForm {
    double c0 = 0.0;
    RealVec c;
    double operator()(const RealVec& x) const { return c0 + c.dot(x); }
};

inline AffineForm spectral_invariant_form(const ModeBasis& b) {
    AffineForm f;
    const int n = b.size();
    RealVec x = RealVec::Zero(n);
    f.c0 = spectral_invariant(b, x);
    f.c = RealVec::Zero(n);
    for (int i = 0; i < n; ++i) {
        x.setZero();
        x[i] = 1.0;
        f.c[i] = spectral_invariant(b, x) - f.c0;
    }
    return f;
}

} // namespace confspace::geometry
