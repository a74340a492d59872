#pragma once

#include <optional>
#include <string>
#include <vector>

#include "confspace/boson/boson.hpp"
#include "confspace/fock/fock.hpp"
#include "confspace/geometry/chern_simons.hpp"
#include "confspace/numerics/lanczos.hpp"
#include "confspace/spinor/spinor.hpp"

namespace confspace::dirac {

using boson::BosonSpace;
using boson::FactorChain;
using boson::ModeFactor;
using fock::AntilinearOperator;
using fock::FockSpace;
using numerics::CubicForm;
using numerics::Polynomial;

/// Frame regime: flat, or a frame rotating linearly in the mode coordinates.
struct FrameRegime {
    enum class Kind { Flat, LinearX };
    Kind kind = Kind::Flat;
    double strength = 0.0;

    static FrameRegime flat() { return {}; }
    static FrameRegime linear_x(double eps) { return {Kind::LinearX, eps}; }
};

/// Everything the Dirac operators need: N bosonic modes, M fermionic modes, C_1 on the mode space.
class DiracModel {
public:
    DiracModel(int N, int M, int cutoff, Dense K, FrameRegime frame = FrameRegime::flat(),
               std::int64_t max_dim = kDefaultKronCap)
        : boson_(N, cutoff, max_dim), fock_(M), K_(std::move(K)), frame_(frame) {
        require(M >= N, "dirac model: M must be at least N");
        require(K_.rows() == M && K_.cols() == M, "dirac model: K must be M x M");
        if (boson_.dim() * fock_.dim() > max_dim)
            throw ResourceError("dirac model: composite dimension exceeds cap " + std::to_string(max_dim));
    }

    /// Modes from the spinor embedding of a mode basis: extended to M, C_1 from the spinor C.
    static DiracModel from_basis(const geometry::ModeBasis& basis, const spinor::ReferenceFrame& frame, int M,
                                 int cutoff, FrameRegime regime = FrameRegime::flat(),
                                 std::int64_t max_dim = kDefaultKronCap) {
        std::vector<spinor::SpinorOneForm> emb;
        for (int i = 0; i < basis.size(); ++i) emb.push_back(spinor::embed_mode(basis[i], frame));
        const auto fm = spinor::extend_basis(emb, M);
        const auto mc = spinor::mode_space_conjugation(fm);
        if (mc.closure_defect > 1e-10)
            throw DomainError("dirac model: the span of the " + std::to_string(M) +
                              " fermionic modes is not closed under charge conjugation (defect " +
                              std::to_string(mc.closure_defect) + ")");
        return DiracModel(basis.size(), M, cutoff, mc.K, regime, max_dim);
    }

    const BosonSpace& boson() const { return boson_; }
    const FockSpace& fock() const { return fock_; }
    const Dense& conjugation_matrix() const { return K_; }
    const FrameRegime& frame() const { return frame_; }
    int N() const { return boson_.modes(); }
    int M() const { return fock_.modes(); }
    std::int64_t block_dim() const { return boson_.dim() * fock_.dim(); }

    /// Coefficients of C_1 psi for psi with coefficients z.
    Vec conjugate_mode(const Vec& z) const { return K_ * z.conjugate(); }

    /// Generator of the linear frame rotation along x_j, a real antisymmetric M x M matrix.
    RealDense frame_generator(int j) const {
        RealDense g = RealDense::Zero(M(), M());
        if (M() < 2) return g;
        const int a = j % M(), b = (j + 1) % M();
        g(a, b) = frame_.strength;
        g(b, a) = -frame_.strength;
        return g;
    }

    /// Terms of D^(+/-) as (boson factor chain, Fock operator).
    std::vector<std::pair<FactorChain, SparseMatrix>> terms(int sign) const {
        std::vector<std::pair<FactorChain, SparseMatrix>> out;
        auto coeff = [&](const Vec& z) { return sign > 0 ? z : conjugate_mode(z); };
        for (int i = 0; i < N(); ++i) {
            out.push_back({{{ModeFactor::Kind::Derivative, i}}, fock_.clifford_bar(coeff(fock_.unit(i)))});
            if (frame_.kind == FrameRegime::Kind::LinearX)
                for (int j = 0; j < N(); ++j) {
                    const Vec g = frame_generator(j).col(i).cast<cplx>();
                    out.push_back({{{ModeFactor::Kind::Position, j}, {ModeFactor::Kind::Derivative, i}},
                                   fock_.clifford_bar(coeff(g))});
                }
        }
        return out;
    }

    /// Working-space matrix of a boson factor chain.
    SparseMatrix chain_matrix(const FactorChain& c) const {
        SparseMatrix m = boson_.identity();
        for (auto it = c.rbegin(); it != c.rend(); ++it)
            m = SparseMatrix((it->kind == ModeFactor::Kind::Position ? boson_.position(it->mode)
                                                                      : boson_.derivative(it->mode)) *
                             m);
        return m;
    }

private:
    BosonSpace boson_;
    FockSpace fock_;
    Dense K_;
    FrameRegime frame_;
};

/// D+ = sum cbar(psi_i) ⊗ d_i, or D- with cbar(C psi_i); composite index is boson * 2^M + fermion.
inline SparseMatrix dirac_block(const DiracModel& m, int sign) {
    SparseMatrix out(m.block_dim(), m.block_dim());
    for (const auto& [chain, f] : m.terms(sign)) out += numerics::kron(m.chain_matrix(chain), f);
    numerics::prune(out);
    return out;
}

inline SparseMatrix dirac_plus(const DiracModel& m) { return dirac_block(m, +1); }
inline SparseMatrix dirac_minus(const DiracModel& m) { return dirac_block(m, -1); }

/// Operator on H ⊕ H given by its four blocks.
struct DoubledOperator {
    SparseMatrix b11, b12, b21, b22;
    std::int64_t block_dim = 0;

    SparseMatrix assemble() const { return numerics::block2x2(b11, b12, b21, b22, block_dim); }
};

inline DoubledOperator big_D(const DiracModel& m) {
    return {dirac_plus(m), SparseMatrix(), SparseMatrix(), dirac_minus(m), m.block_dim()};
}

/// diag(-1, +1).
inline SparseMatrix gamma(const DiracModel& m) {
    const auto n = m.block_dim();
    return numerics::block2x2(SparseMatrix(-numerics::identity(n)), SparseMatrix(), SparseMatrix(),
                              numerics::identity(n), n);
}

/// C on the composite space: complex conjugation on the boson factor, multiplicative C on the Fock factor.
inline AntilinearOperator composite_conjugation(const DiracModel& m) {
    const auto cf = fock::fock_charge_conjugation(m.fock(), m.conjugation_matrix());
    return {numerics::kron(m.boson().identity(), cf.linear)};
}

/// J = [[0, C], [C, 0]].
inline AntilinearOperator big_J(const DiracModel& m) {
    const auto c = composite_conjugation(m);
    return {numerics::block2x2(SparseMatrix(), c.linear, c.linear, SparseMatrix(), m.block_dim())};
}

/// (-1)^deg on H ⊕ H.
inline SparseMatrix parity(const DiracModel& m) {
    const auto p = numerics::kron(m.boson().identity(), m.fock().grading());
    return numerics::block2x2(p, SparseMatrix(), SparseMatrix(), p, m.block_dim());
}

struct SectorResidual {
    int particles = 0;
    double input_ordering = 0.0;   // |J D J - gamma D (-1)^deg|
    double output_ordering = 0.0;  // |J D J - (-1)^deg gamma D|
    double no_gamma = 0.0;         // |J D J - D (-1)^deg|, negative control
};

struct RealStructureReport {
    std::vector<SectorResidual> sectors;
    double input_max = 0.0, output_max = 0.0, no_gamma_min = 0.0;
    double j_squared = 0.0;           // |J^2 - (-1)^deg|
    double gamma_anticommutator = 0.0; // |gamma J + J gamma|
    double d_hermitian = 0.0;
    std::string consistent_ordering;   // "input", "output", "none" or "both"
};

inline RealStructureReport check_real_structure(const DiracModel& m, double tol = 1e-10) {
    const auto D = big_D(m).assemble();
    const auto J = big_J(m);
    const auto G = gamma(m);
    const auto P = parity(m);
    const SparseMatrix jdj = J.sandwich(D);
    const SparseMatrix r_in = jdj - SparseMatrix(G * D * P);
    const SparseMatrix r_out = jdj - SparseMatrix(P * G * D);
    const SparseMatrix r_ng = jdj - SparseMatrix(D * P);
    RealStructureReport rep;
    rep.sectors.resize(static_cast<std::size_t>(m.M() + 1));
    for (int n = 0; n <= m.M(); ++n) rep.sectors[static_cast<std::size_t>(n)].particles = n;
    auto col_norms = [](const SparseMatrix& r) {
        SparseMatrix rt = r.transpose();
        RealVec out = RealVec::Zero(r.cols());
        for (std::int64_t c = 0; c < rt.outerSize(); ++c)
            for (SparseMatrix::InnerIterator it(rt, c); it; ++it) out[c] += std::norm(it.value());
        return RealVec(out.cwiseSqrt());
    };
    const RealVec a = col_norms(r_in), b = col_norms(r_out), c = col_norms(r_ng);
    const std::int64_t fd = m.fock().dim();
    for (std::int64_t col = 0; col < D.cols(); ++col) {
        const int n = FockSpace::particles((col % m.block_dim()) % fd);
        auto& s = rep.sectors[static_cast<std::size_t>(n)];
        s.input_ordering = std::max(s.input_ordering, a[col]);
        s.output_ordering = std::max(s.output_ordering, b[col]);
        s.no_gamma = std::max(s.no_gamma, c[col]);
    }
    rep.no_gamma_min = std::numeric_limits<double>::infinity();
    for (const auto& s : rep.sectors) {
        rep.input_max = std::max(rep.input_max, s.input_ordering);
        rep.output_max = std::max(rep.output_max, s.output_ordering);
        rep.no_gamma_min = std::min(rep.no_gamma_min, s.no_gamma);
    }
    rep.j_squared = numerics::max_abs(SparseMatrix(J.compose(J) - P));
    const auto gj = J.before(G).linear;  // gamma J
    const auto jg = J.after(G).linear;   // J gamma
    rep.gamma_anticommutator = numerics::max_abs(SparseMatrix(gj + jg));
    rep.d_hermitian = numerics::hermitian_defect(D);
    const bool in_ok = rep.input_max < tol, out_ok = rep.output_max < tol;
    rep.consistent_ordering = in_ok && out_ok ? "both" : in_ok ? "input" : out_ok ? "output" : "none";
    return rep;
}

/// D^U = U D U* with U = diag(exp(ikCS), exp(-ikCS)), both routes computed.
struct RotatedDirac {
    SparseMatrix plus, minus;
    double route_agreement = 0.0;  // max |U D U* - (D - [D, U] U*)|
};

inline RotatedDirac rotate(const DiracModel& m, double k, const Polynomial& cs, int padded_levels) {
    RotatedDirac out;
    if (cs.is_zero()) {
        out.plus = dirac_plus(m);
        out.minus = dirac_minus(m);
        return out;
    }
    for (int sign : {+1, -1}) {
        const boson::PaddedRotation rot(m.boson(), padded_levels, k, cs, static_cast<double>(sign));
        SparseMatrix acc(m.block_dim(), m.block_dim());
        for (const auto& [chain, f] : m.terms(sign)) {
            const SparseMatrix direct = rot.conjugate(chain);
            const SparseMatrix via = rot.conjugate_via_commutator(chain);
            out.route_agreement = std::max(out.route_agreement, numerics::max_abs_diff(direct, via));
            acc += numerics::kron(direct, f);
        }
        numerics::prune(acc);
        (sign > 0 ? out.plus : out.minus) = acc;
    }
    return out;
}

/// Composite indices whose boson part has every occupation at most max_occ.
inline std::vector<std::int64_t> low_composite_columns(const DiracModel& m, int max_occ) {
    std::vector<std::int64_t> out;
    for (auto b : m.boson().low_occupation(max_occ))
        for (std::int64_t f = 0; f < m.fock().dim(); ++f) out.push_back(b * m.fock().dim() + f);
    return out;
}

struct BlockFit {
    std::array<cplx, 4> coeffs{};  // on {-sum d^2, k^2 sum (dCS)^2, 2ik sum dCS d, ik sum d^2CS}
    double residual = 0.0;
};

struct DecompositionReport {
    BlockFit plus, minus;
    double normalization = 0.0;          // discovered nu from the plus block
    double sign_cross_plus = 0.0, sign_cross_minus = 0.0;
    double sign_spectral_plus = 0.0, sign_spectral_minus = 0.0;
    double max_fit_residual = 0.0;
    double frame_residual = 0.0;         // linear-x frame: |(D^U)^2 - fitted flat prediction|
    int low_occupation = 0;
};

/// The four dictionary operators on the boson space.
inline std::array<SparseMatrix, 4> square_dictionary(const BosonSpace& space, double k, const Polynomial& cs) {
    SparseMatrix lap(space.dim(), space.dim()), pot(space.dim(), space.dim()), cross(space.dim(), space.dim()),
        spec(space.dim(), space.dim());
    for (int i = 0; i < space.modes(); ++i) {
        const SparseMatrix d = space.derivative(i);
        const SparseMatrix g = boson::polynomial_multiplication_op(space, cs.derivative(i));
        const SparseMatrix h = boson::polynomial_multiplication_op(space, cs.derivative(i).derivative(i));
        lap -= SparseMatrix(d * d);
        pot += k * k * SparseMatrix(g * g);
        cross += cplx(0.0, 2.0 * k) * SparseMatrix(g * d);
        spec += cplx(0.0, k) * h;
    }
    return {lap, pot, cross, spec};
}

namespace detail {

inline BlockFit fit_block(const Dense& target, const std::array<Dense, 4>& dict) {
    Eigen::Matrix4cd G;
    Eigen::Vector4cd rhs;
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) G(a, b) = dict[a].conjugate().cwiseProduct(dict[b]).sum();
        rhs[a] = dict[a].conjugate().cwiseProduct(target).sum();
    }
    const Eigen::Vector4cd c = G.colPivHouseholderQr().solve(rhs);
    BlockFit f;
    Dense r = target;
    for (int a = 0; a < 4; ++a) {
        f.coeffs[static_cast<std::size_t>(a)] = c[a];
        r -= c[a] * dict[a];
    }
    f.residual = numerics::max_abs(r);
    return f;
}

} // namespace detail

/// Squares the rotated operator blockwise and fits each block to the dictionary on low occupations.
inline DecompositionReport square_and_decompose(const DiracModel& m, const RotatedDirac& rotated, double k,
                                                const Polynomial& cs,
                                                const std::optional<RotatedDirac>& framed = std::nullopt) {
    DecompositionReport rep;
    rep.low_occupation = m.boson().cutoff() - 3;
    require(rep.low_occupation >= 0, "square_and_decompose: cutoff must be at least 3");
    const auto cols = low_composite_columns(m, rep.low_occupation);
    const auto dict_b = square_dictionary(m.boson(), k, cs);
    std::array<Dense, 4> dict;
    for (int a = 0; a < 4; ++a)
        dict[static_cast<std::size_t>(a)] =
            numerics::select_columns(numerics::kron(dict_b[static_cast<std::size_t>(a)], m.fock().identity()), cols);
    const Dense sp = numerics::select_columns(SparseMatrix(rotated.plus * rotated.plus), cols);
    const Dense sm = numerics::select_columns(SparseMatrix(rotated.minus * rotated.minus), cols);
    rep.plus = detail::fit_block(sp, dict);
    rep.minus = detail::fit_block(sm, dict);
    const cplx nu = rep.plus.coeffs[0];
    rep.normalization = nu.real();
    rep.sign_cross_plus = (rep.plus.coeffs[2] / nu).real();
    rep.sign_spectral_plus = (rep.plus.coeffs[3] / nu).real();
    const cplx nu_m = rep.minus.coeffs[0];
    rep.sign_cross_minus = (rep.minus.coeffs[2] / nu_m).real();
    rep.sign_spectral_minus = (rep.minus.coeffs[3] / nu_m).real();
    rep.max_fit_residual = std::max(rep.plus.residual, rep.minus.residual);
    if (framed) {
        const Dense fp = numerics::select_columns(SparseMatrix(framed->plus * framed->plus), cols);
        const Dense fm = numerics::select_columns(SparseMatrix(framed->minus * framed->minus), cols);
        Dense pp = Dense::Zero(fp.rows(), fp.cols()), pm = pp;
        for (int a = 0; a < 4; ++a) {
            pp += rep.plus.coeffs[static_cast<std::size_t>(a)] * dict[static_cast<std::size_t>(a)];
            pm += rep.minus.coeffs[static_cast<std::size_t>(a)] * dict[static_cast<std::size_t>(a)];
        }
        rep.frame_residual = std::max(numerics::max_abs(Dense(fp - pp)), numerics::max_abs(Dense(fm - pm)));
    }
    return rep;
}

/// Pieces of the Yang-Mills sector Hamiltonians with electric operators e_i = (i / 2k) d_i.
struct YangMillsParts {
    SparseMatrix electric;  // 4k^2 sum e_i^2 = -sum d_i^2
    SparseMatrix magnetic;  // 4k^2 sum v_i^2
    SparseMatrix cross;     // 4k^2 sum {v_i, e_i}
    SparseMatrix cross_ordered;  // 4k^2 sum 2 v_i e_i
};

inline YangMillsParts yang_mills_parts(const BosonSpace& space, double k, const std::vector<Polynomial>& v) {
    require(k != 0.0, "hamiltonian: k must be nonzero");
    require(static_cast<int>(v.size()) == space.modes(), "hamiltonian: need one polynomial per mode");
    const double s = 4.0 * k * k;
    const cplx ei(0.0, 1.0 / (2.0 * k));
    YangMillsParts p;
    const auto n = space.dim();
    p.electric = p.magnetic = p.cross = p.cross_ordered = SparseMatrix(n, n);
    for (int i = 0; i < space.modes(); ++i) {
        const SparseMatrix e = ei * space.derivative(i);
        const SparseMatrix vi = boson::polynomial_multiplication_op(space, v[static_cast<std::size_t>(i)]);
        p.electric += s * SparseMatrix(e * e);
        p.magnetic += s * SparseMatrix(vi * vi);
        p.cross += s * SparseMatrix(SparseMatrix(vi * e) + SparseMatrix(e * vi));
        p.cross_ordered += (2.0 * s) * SparseMatrix(vi * e);
    }
    for (auto* x : {&p.electric, &p.magnetic, &p.cross, &p.cross_ordered}) numerics::prune(*x);
    return p;
}

/// H(+/-) = 4k^2 (sum e_i^2 + sum v_i^2 +/- sum {v_i, e_i}).
inline SparseMatrix hamiltonian_ym(const BosonSpace& space, double k, const std::vector<Polynomial>& v, int sign) {
    const auto p = yang_mills_parts(space, k, v);
    return SparseMatrix(p.electric + p.magnetic + static_cast<double>(sign) * p.cross);
}

/// v_i = (1/2) dCS/dx_i as polynomials.
inline std::vector<Polynomial> half_gradient(const Polynomial& cs) {
    std::vector<Polynomial> v;
    for (int i = 0; i < cs.variables(); ++i) v.push_back(cs.derivative(i).scaled(0.5));
    return v;
}

/// A(m) = sum xi_i(m) x_i, E(m) = sum xi_j(m) d_j, K(m1, m2) = sum xi_i(m1) xi_i(m2).
struct FieldOperators {
    SparseMatrix A, E;
};

inline FieldOperators field_operators(const BosonSpace& space, const geometry::ModeBasis& b,
                                      const geometry::EvaluationPoint& mA, const geometry::EvaluationPoint& mE) {
    require(b.size() == space.modes(), "field_operators: mode count mismatch");
    FieldOperators f{SparseMatrix(space.dim(), space.dim()), SparseMatrix(space.dim(), space.dim())};
    for (int i = 0; i < b.size(); ++i) {
        f.A += geometry::mode_value(b, i, mA) * space.position(i);
        f.E += geometry::mode_value(b, i, mE) * space.derivative(i);
    }
    numerics::prune(f.A);
    numerics::prune(f.E);
    return f;
}

inline double kernel_value(const geometry::ModeBasis& b, const geometry::EvaluationPoint& m1,
                           const geometry::EvaluationPoint& m2) {
    double k = 0.0;
    for (int i = 0; i < b.size(); ++i) k += geometry::mode_value(b, i, m1) * geometry::mode_value(b, i, m2);
    return k;
}

/// Fraction of the kernel's squared mass away from m1: 1 - h^3 K(m1, m1) for a projection kernel.
inline double kernel_off_point_fraction(const geometry::ModeBasis& b, const geometry::EvaluationPoint& m1) {
    const double kk = kernel_value(b, m1, m1);
    if (kk <= 0.0) return 1.0;
    return 1.0 - b.lattice().cell_volume() * kk;
}

/// Multiplication operator c0 + sum c_i x_i.
inline SparseMatrix spectral_term_operator(const BosonSpace& space, const geometry::AffineForm& s) {
    require(s.c.size() == space.modes(), "spectral_term_operator: mode count mismatch");
    SparseMatrix out = s.c0 * space.identity();
    for (int i = 0; i < space.modes(); ++i) out += s.c[i] * space.position(i);
    numerics::prune(out);
    return out;
}

struct KernelReport {
    numerics::EigenResult spectrum;  // lowest eigenpairs of D*D
    int kernel_dim = 0;
    std::int64_t lower_bound = 0;      // 2 * dim(intersection of ker d_i) * 2^M
    double mechanism_residual = 0.0;   // max |D (w ⊗ Phi)| over kernel vectors w and Fock states Phi
    double vacuum_residual = 0.0;      // |D (w ⊗ |0>, w ⊗ |0>)|
};

/// Joint kernel of the truncated d_i: tensor products of single-mode kernels.
inline Dense derivative_joint_kernel(const BosonSpace& space, double tol = 1e-10) {
    const RealDense d = boson::single::derivative(space.levels());
    Eigen::SelfAdjointEigenSolver<RealDense> es(RealDense(-d * d));
    std::vector<int> idx;
    for (int i = 0; i < space.levels(); ++i)
        if (std::abs(es.eigenvalues()[i]) < tol) idx.push_back(i);
    RealDense k1(space.levels(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t c = 0; c < idx.size(); ++c) k1.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(idx[c]);
    RealDense acc = RealDense::Ones(1, 1);
    for (int i = 0; i < space.modes(); ++i) {
        // new mode is the slower index
        RealDense next(acc.rows() * k1.rows(), acc.cols() * k1.cols());
        for (Eigen::Index a = 0; a < k1.rows(); ++a)
            for (Eigen::Index b = 0; b < k1.cols(); ++b)
                next.block(a * acc.rows(), b * acc.cols(), acc.rows(), acc.cols()) = k1(a, b) * acc;
        acc = next;
    }
    return acc.cast<cplx>();
}

inline KernelReport kernel_and_degeneracy(const DiracModel& m, double tol, int extra = 4,
                                          const numerics::LanczosOptions& opts = {}) {
    KernelReport rep;
    const SparseMatrix D = big_D(m).assemble();
    const Dense w = derivative_joint_kernel(m.boson());
    rep.lower_bound = 2 * w.cols() * m.fock().dim();
    const std::int64_t want = std::min<std::int64_t>(rep.lower_bound + extra, D.rows());
    const SparseMatrix Dadj = D.adjoint();
    numerics::MatVec mv = [&](const Vec& x) -> Vec { return Dadj * (D * x); };
    rep.spectrum = numerics::lanczos_hermitian(mv, D.rows(), static_cast<int>(want), 1e-12, opts);
    for (Eigen::Index i = 0; i < rep.spectrum.values.size(); ++i)
        if (rep.spectrum.values[i] < tol) ++rep.kernel_dim;
    const SparseMatrix dp = dirac_plus(m), dm = dirac_minus(m);
    const auto fd = m.fock().dim();
    for (Eigen::Index c = 0; c < w.cols(); ++c)
        for (std::int64_t f = 0; f < fd; ++f) {
            Vec phi = Vec::Zero(fd);
            phi[f] = 1.0;
            Vec v(w.rows() * fd);
            for (Eigen::Index b = 0; b < w.rows(); ++b) v.segment(b * fd, fd) = w(b, c) * phi;
            rep.mechanism_residual = std::max({rep.mechanism_residual, (dp * v).norm(), (dm * v).norm()});
            if (f == 0) {
                Vec both(2 * v.size());
                both << v, v;
                rep.vacuum_residual = std::max(rep.vacuum_residual, (D * both).norm());
            }
        }
    return rep;
}

} // namespace confspace::dirac
