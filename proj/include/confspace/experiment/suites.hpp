#pragma once

#include <algorithm>
#include <chrono>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <string>

#include "confspace/dirac/dirac.hpp"
#include "confspace/experiment/config.hpp"
#include "confspace/experiment/report.hpp"
#include "confspace/geometry/chern_simons.hpp"
#include "confspace/numerics/finite_difference.hpp"

namespace confspace::experiment {

using numerics::Polynomial;

/// Tolerances of the verified identities.
namespace tol {
inline constexpr double car = 1e-12;
inline constexpr double fock_square = 1e-12;
inline constexpr double real_structure = 1e-10;
inline constexpr double cs_coefficients = 1e-10;
inline constexpr double cs_finite_difference = 1e-6;
inline constexpr double bianchi = 1e-9;
inline constexpr double conjugation = 1e-8;
inline constexpr double routes = 1e-10;
inline constexpr double fit = 1e-8;
inline constexpr double hamiltonian = 1e-12;
inline constexpr double free_spectrum = 1e-9;
inline constexpr double commutator = 1e-12;
inline constexpr double affine = 1e-12;
inline constexpr double eigen_sum = 1e-9;
inline constexpr double kernel = 1e-10;
} // namespace tol

/// Roots of the physicists' Hermite polynomial H_d, by Newton iteration with deflation.
inline std::vector<double> hermite_roots(int d) {
    auto eval = [d](double x) {
        double h0 = 1.0, h1 = 2.0 * x;
        if (d == 0) return std::pair{h0, 0.0};
        for (int k = 1; k < d; ++k) {
            const double h2 = 2.0 * x * h1 - 2.0 * k * h0;
            h0 = h1;
            h1 = h2;
        }
        return std::pair{h1, 2.0 * d * h0};
    };
    std::vector<double> roots;
    for (int j = 0; j < d; ++j) {
        double x = std::sqrt(2.0 * d + 1.0) * std::cos(std::numbers::pi * (4.0 * j + 3.0) / (4.0 * d + 2.0));
        for (int it = 0; it < 200; ++it) {
            auto [h, dh] = eval(x);
            double defl = 0.0;
            for (double r : roots) defl += 1.0 / (x - r);
            const double step = h / (dh - h * defl);
            x -= step;
            if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(x))) break;
        }
        roots.push_back(x);
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

namespace detail {

struct Context {
    const ExperimentConfig& cfg;
    Report& report;
    std::string suite;
    std::mt19937_64 rng;

    void check(const std::string& name, const std::string& identity, double residual, double tolerance,
               bool asserted = true, const std::string& relation = "<") {
        report.checks.push_back({suite, name, identity, residual, relation, tolerance, asserted});
    }
    void constant(const std::string& name, double value) { report.constants.push_back({suite, name, value}); }

    geometry::Lattice lattice() const { return geometry::Lattice(cfg.lattice.n, cfg.lattice.spacing); }
    geometry::InnerProduct inner_product() const {
        return cfg.modes.inner_product == "l2" ? geometry::InnerProduct::l2()
                                                : geometry::InnerProduct::sobolev(cfg.modes.sobolev_p);
    }
    geometry::ModeBasis basis(int N) const { return geometry::build_mode_basis(lattice(), N, inner_product()); }
    dirac::DiracModel model(int N, int M, int cutoff, dirac::FrameRegime regime = dirac::FrameRegime::flat()) const {
        const auto lat = lattice();
        return dirac::DiracModel::from_basis(basis(N), spinor::ReferenceFrame::flat(lat), M, cutoff, regime,
                                             cfg.limits.max_hilbert_dim);
    }
    RealVec uniform(int n) {
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        RealVec x(n);
        for (auto& t : x) t = u(rng);
        return x;
    }
};

inline std::uint64_t suite_seed(std::uint64_t seed, const std::string& suite) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : suite) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return seed ^ h;
}

inline double max_of(std::initializer_list<double> v) { return *std::max_element(v.begin(), v.end()); }

inline void car_relations(Context& ctx) {
    for (int M : ctx.cfg.suites.car_modes) {
        const fock::FockSpace fs(M);
        const std::string tag = " M=" + std::to_string(M);
        const SparseMatrix I = fs.identity();
        std::vector<SparseMatrix> ext, in, c, cb;
        for (int i = 0; i < M; ++i) {
            ext.push_back(fs.ext(fs.unit(i)));
            in.push_back(fs.interior(fs.unit(i)));
            c.push_back(fs.clifford(fs.unit(i)));
            cb.push_back(fs.clifford_bar(fs.unit(i)));
        }
        double ee = 0, ii = 0, ei = 0, cc = 0, bb = 0, cbm = 0, cadj = 0, badj = 0, gr = 0, vac = 0;
        const SparseMatrix P = fs.grading();
        for (int i = 0; i < M; ++i) {
            for (int j = 0; j < M; ++j) {
                const double d = i == j ? 1.0 : 0.0;
                ee = std::max(ee, numerics::max_abs(numerics::anticommutator(ext[i], ext[j])));
                ii = std::max(ii, numerics::max_abs(numerics::anticommutator(in[i], in[j])));
                ei = std::max(ei, numerics::max_abs_diff(numerics::anticommutator(ext[i], in[j]), SparseMatrix(d * I)));
                cc = std::max(cc, numerics::max_abs_diff(numerics::anticommutator(c[i], c[j]), SparseMatrix(d * I)));
                bb = std::max(bb, numerics::max_abs_diff(numerics::anticommutator(cb[i], cb[j]), SparseMatrix(-d * I)));
                cbm = std::max(cbm, numerics::max_abs(numerics::anticommutator(c[i], cb[j])));
            }
            cadj = std::max(cadj, numerics::max_abs_diff(SparseMatrix(c[i].adjoint()), c[i]));
            badj = std::max(badj, numerics::max_abs(SparseMatrix(SparseMatrix(cb[i].adjoint()) + cb[i])));
            gr = std::max({gr, numerics::max_abs(numerics::anticommutator(P, c[i])),
                           numerics::max_abs(numerics::anticommutator(P, cb[i]))});
            vac = std::max(vac, (in[i] * fs.vacuum()).cwiseAbs().maxCoeff());
        }
        ctx.check("ext-ext" + tag, "{ext(psi_i), ext(psi_j)} = 0", ee, tol::car);
        ctx.check("int-int" + tag, "{int(psi_i), int(psi_j)} = 0", ii, tol::car);
        ctx.check("ext-int" + tag, "{ext(psi_i), int(psi_j)} = <psi_i, psi_j>", ei, tol::car);
        ctx.check("c-c" + tag, "{c(psi_i), c(psi_j)} = delta_ij", cc, tol::car);
        ctx.check("cbar-cbar" + tag, "{cbar(psi_i), cbar(psi_j)} = -delta_ij", bb, tol::car);
        ctx.check("c-cbar" + tag, "{c(psi_i), cbar(psi_j)} = 0", cbm, tol::car);
        ctx.check("c-adjoint" + tag, "c(psi)* = c(psi)", cadj, tol::car);
        ctx.check("cbar-adjoint" + tag, "cbar(psi)* = -cbar(psi)", badj, tol::car);
        ctx.check("grading" + tag, "{(-1)^deg, c(psi)} = {(-1)^deg, cbar(psi)} = 0", gr, tol::car);
        ctx.check("int-vacuum" + tag, "int(psi)|0> = 0", vac, tol::car);
        if (M == ctx.cfg.suites.car_modes.front())
            ctx.constant("cbar_square", numerics::to_dense(SparseMatrix(cb[0] * cb[0]))(0, 0).real());
    }
}

inline void real_structure(Context& ctx) {
    const auto& cfg = ctx.cfg;
    {
        // C^2 on the Fock space over six modes closed from three embedded modes
        const auto lat = ctx.lattice();
        const auto b = ctx.basis(3);
        std::vector<spinor::SpinorOneForm> emb;
        for (int i = 0; i < 3; ++i) emb.push_back(spinor::embed_mode(b[i], spinor::ReferenceFrame::flat(lat)));
        const auto mc = spinor::mode_space_conjugation(spinor::extend_basis(emb, 6));
        ctx.check("mode-span closure M=6", "C(span psi) = span psi", mc.closure_defect, tol::fock_square);
        const fock::FockSpace fs(6);
        const auto C = fock::fock_charge_conjugation(fs, mc.K);
        ctx.check("C squared M=6", "C^2 = (-1)^deg(n)", numerics::max_abs_diff(C.compose(C), fs.grading()),
                  tol::fock_square);
        ctx.check("C antiunitary M=6", "C* C = 1",
                  numerics::max_abs_diff(SparseMatrix(C.linear.adjoint() * C.linear), fs.identity()), tol::fock_square);
        ctx.check("C fixes vacuum M=6", "C|0> = |0>", (C.apply(fs.vacuum()) - fs.vacuum()).norm(), tol::fock_square);
    }
    {
        const auto rep = dirac::check_real_structure(ctx.model(1, 2, cfg.suites.real_cutoff));
        ctx.check("ordering probe N=1 M=2 input", "J D J = gamma D (-1)^deg, sign on input sector", rep.input_max,
                  tol::real_structure, false);
        ctx.check("ordering probe N=1 M=2 output", "J D J = (-1)^deg gamma D, sign on output sector", rep.output_max,
                  tol::real_structure, false);
    }
    const int N = cfg.modes.count, M = cfg.fermion.modes;
    const std::string tag = " N=" + std::to_string(N) + " M=" + std::to_string(M);
    const auto m = ctx.model(N, M, cfg.suites.real_cutoff);
    const auto rep = dirac::check_real_structure(m);
    ctx.check("input ordering" + tag, "J D J = gamma D (-1)^deg, sign on input sector", rep.input_max,
              tol::real_structure);
    ctx.check("output ordering fails" + tag, "J D J != (-1)^deg gamma D", rep.output_max, tol::real_structure, true,
              ">");
    const int consistent = (rep.input_max < tol::real_structure) + (rep.output_max < tol::real_structure);
    ctx.check("one consistent ordering" + tag, "exactly one sign placement holds", std::abs(consistent - 1.0), 0.5);
    ctx.check("gamma required" + tag, "J D J != D (-1)^deg", rep.no_gamma_min, tol::real_structure, true, ">");
    ctx.check("J squared" + tag, "J^2 = (-1)^deg", rep.j_squared, tol::real_structure);
    ctx.check("gamma anticommutes with J" + tag, "gamma J + J gamma = 0", rep.gamma_anticommutator,
              tol::real_structure);
    ctx.check("D hermitian" + tag, "D* = D", rep.d_hermitian, tol::real_structure, false);
    for (const auto& s : rep.sectors) {
        const std::string st = tag + " n=" + std::to_string(s.particles);
        ctx.check("sector input" + st, "J D J = gamma D (-1)^deg on sector", s.input_ordering, tol::real_structure,
                  false);
        ctx.check("sector output" + st, "J D J = (-1)^deg gamma D on sector", s.output_ordering, tol::real_structure,
                  false);
    }
    {
        // on a kernel vector w (x) |0> both placements agree
        const int ck = cfg.suites.real_cutoff % 2 ? cfg.suites.real_cutoff + 1 : cfg.suites.real_cutoff;
        const auto mk = ctx.model(N, M, ck);
        const SparseMatrix D = dirac::big_D(mk).assemble();
        const auto J = dirac::big_J(mk);
        const SparseMatrix jdj = J.sandwich(D);
        const SparseMatrix G = dirac::gamma(mk), P = dirac::parity(mk);
        const Dense w = dirac::derivative_joint_kernel(mk.boson());
        const auto fd = mk.fock().dim();
        Vec v = Vec::Zero(2 * mk.block_dim());
        for (Eigen::Index bi = 0; bi < w.rows(); ++bi) {
            v[bi * fd] = w(bi, 0);
            v[mk.block_dim() + bi * fd] = w(bi, 0);
        }
        const Vec a = jdj * v;
        const double r_in = (a - G * (D * (P * v))).norm(), r_out = (a - P * (G * (D * v))).norm();
        ctx.check("vacuum kernel vector" + tag, "both placements agree on w (x) |0> in ker D", max_of({r_in, r_out}),
                  tol::real_structure);
    }
}

inline void cs_gradient(Context& ctx) {
    const auto& cfg = ctx.cfg;
    auto run = [&](int N, bool asserted, const std::string& tag) {
        const auto b = ctx.basis(N);
        const auto cp = geometry::curvature_pairing(b);
        const auto cs = geometry::chern_simons_coefficients(b, cp);
        double coeff = 0, fdr = 0, bian = 0, direct = 0;
        for (int p = 0; p < cfg.suites.cs_points; ++p) {
            const RealVec x = ctx.uniform(N);
            const RealVec g = cs.gradient(x);
            coeff = std::max(coeff, (2.0 * geometry::pair_modes_with_F(b, x) - g).cwiseAbs().maxCoeff());
            const RealVec fd = numerics::finite_difference_gradient([&](const RealVec& y) { return cs.value(y); }, x);
            fdr = std::max(fdr, (fd - g).norm() / std::max(g.norm(), 1e-300));
            const auto A = b.connection(x);
            direct = std::max(direct, std::abs(cs.value(x) - geometry::chern_simons_value(A)));
            const auto lambda = geometry::from_coefficients(b.lattice(), 0, ctx.uniform(3 * static_cast<int>(
                                                                                            b.lattice().cells(0))));
            bian = std::max(bian, geometry::bianchi_residual(A, lambda));
        }
        ctx.check("polynomial vs cochain" + tag, "CS(x) from (Q, C) = CS(A) on the lattice", direct,
                  tol::cs_coefficients, asserted);
        ctx.check("gradient identity" + tag, "dCS/dx_i = 2 int Tr(xi_i F(A))", coeff, tol::cs_coefficients, asserted);
        ctx.check("finite differences" + tag, "|grad_fd - grad| / |grad|", fdr, tol::cs_finite_difference, asserted);
        ctx.check("bianchi" + tag, "int Tr(nabla_A lambda F(A)) = 0", bian, tol::bianchi, asserted);
        ctx.check("quadratic symmetry" + tag, "q_ij = q_ji", (cp.q - cp.q.transpose()).cwiseAbs().maxCoeff(),
                  tol::cs_coefficients, asserted);
    };
    const int N = cfg.suites.cs_modes;
    run(N, N <= 9, " N=" + std::to_string(N));
    const int wide = std::min(12, 9 * cfg.lattice.n * cfg.lattice.n * cfg.lattice.n);
    if (wide > 9 && wide != N) run(wide, false, " N=" + std::to_string(wide) + " nonconstant");
}

inline Polynomial rotation_polynomial(Context& ctx, int N) {
    const auto& kind = ctx.cfg.rotation.polynomial;
    if (kind == "zero") return Polynomial(N);
    if (kind == "lattice") return geometry::chern_simons_coefficients(ctx.basis(N)).to_polynomial();
    return numerics::random_cubic_form(N, ctx.rng).to_polynomial();
}

inline void rotate_square(Context& ctx) {
    const auto& cfg = ctx.cfg;
    const int N = cfg.modes.count, M = cfg.fermion.modes, cut = cfg.rotation.cutoff;
    const double k = cfg.rotation.k;
    const int L = cfg.boson.padding;
    const std::string tag = " N=" + std::to_string(N) + " cutoff=" + std::to_string(cut);
    const auto m = ctx.model(N, M, cut);
    const Polynomial cs = rotation_polynomial(ctx, N);
    ctx.constant("polynomial_degree", cs.degree());
    for (double sign : {1.0, -1.0}) {
        const boson::PaddedRotation rot(m.boson(), L, k, cs, sign);
        ctx.check(std::string("conjugated derivative ") + (sign > 0 ? "U+" : "U-") + tag,
                  "U d_i U* = d_i - i s k d_iCS(x) on occupations <= cutoff - 3",
                  boson::conjugation_identity_residual(m.boson(), rot, k, sign, cs, cut - 3), tol::conjugation);
    }
    const auto r = dirac::rotate(m, k, cs, L);
    ctx.check("routes agree" + tag, "U D U* = D - [D, U] U*", r.route_agreement, tol::routes);
    const auto cols = dirac::low_composite_columns(m, cut - 3);
    if (cs.is_zero()) {
        const SparseMatrix dp = dirac::dirac_plus(m), dm = dirac::dirac_minus(m);
        const double d = max_of({numerics::max_abs_diff(SparseMatrix(r.plus * r.plus), SparseMatrix(dp * dp)),
                                 numerics::max_abs_diff(SparseMatrix(r.minus * r.minus), SparseMatrix(dm * dm))});
        ctx.check("zero polynomial" + tag, "(D^U)^2 = D^2 for CS = 0", d, tol::fit);
        return;
    }
    const std::optional<dirac::RotatedDirac> framed =
        cfg.frame.kind == "linear-x"
            ? std::optional(dirac::rotate(ctx.model(N, M, cut, dirac::FrameRegime::linear_x(cfg.frame.strength)), k,
                                          cs, L))
            : std::nullopt;
    const auto rep = dirac::square_and_decompose(m, r, k, cs, framed);
    ctx.check("dictionary fit" + tag, "(D^U)^2 blocks in span of the four-term dictionary", rep.max_fit_residual,
              tol::fit);
    ctx.check("fermionic normalization" + tag, "nu = |cbar^2| = 1/2", std::abs(rep.normalization - 0.5), tol::fit);
    ctx.check("cross terms opposite" + tag, "cross coefficient ratio +1 on D+, -1 on D-",
              max_of({std::abs(rep.sign_cross_plus - 1.0), std::abs(rep.sign_cross_minus + 1.0)}), tol::fit);
    ctx.check("spectral terms opposite" + tag, "spectral coefficient ratio +1 on D+, -1 on D-",
              max_of({std::abs(rep.sign_spectral_plus - 1.0), std::abs(rep.sign_spectral_minus + 1.0)}), tol::fit);
    ctx.check("potential term common" + tag, "k^2 (dCS)^2 coefficient equals nu in both blocks",
              max_of({std::abs(rep.plus.coeffs[1] - rep.plus.coeffs[0]), std::abs(rep.minus.coeffs[1] - rep.minus.coeffs[0])}),
              tol::fit);
    const char* names[] = {"laplacian", "potential", "cross", "spectral"};
    for (int a = 0; a < 4; ++a) {
        ctx.constant(std::string("plus_") + names[a], rep.plus.coeffs[static_cast<std::size_t>(a)].real());
        ctx.constant(std::string("minus_") + names[a], rep.minus.coeffs[static_cast<std::size_t>(a)].real());
    }
    ctx.constant("nu", rep.normalization);
    {
        const auto v = dirac::half_gradient(cs);
        double h = 0.0;
        for (int sign : {+1, -1}) {
            const SparseMatrix hs = numerics::kron(dirac::hamiltonian_ym(m.boson(), k, v, sign), m.fock().identity());
            const SparseMatrix& d = sign > 0 ? r.plus : r.minus;
            h = std::max(h, numerics::max_abs(numerics::select_columns(SparseMatrix(hs - 2.0 * SparseMatrix(d * d)), cols)));
        }
        ctx.check("sector hamiltonians" + tag, "H(+/-) = 2 (D^U(+/-))^2 with v = dCS/2", h, tol::fit);
    }
    {
        const double ks = k / 4.0;
        const auto rs = dirac::rotate(m, ks, cs, L);
        const auto small = dirac::square_and_decompose(m, rs, ks, cs);
        ctx.check("dictionary fit k/4" + tag, "fit residual at quarter coupling", small.max_fit_residual, tol::fit,
                  false);
        ctx.constant("nu_k_quarter", small.normalization);
    }
    if (framed) {
        ctx.check("frame residual" + tag, "(D^U)^2 with linear frame minus the flat fitted prediction",
                  rep.frame_residual, tol::fit, false, ">");
        ctx.constant("frame_strength", cfg.frame.strength);
    }
}

inline void ym_sectors(Context& ctx) {
    const auto& cfg = ctx.cfg;
    const int N = cfg.suites.ym_modes;
    const double k = cfg.rotation.k;
    const std::string tag = " N=" + std::to_string(N) + " cutoff=" + std::to_string(cfg.suites.ym_cutoff);
    const auto b = ctx.basis(N);
    const auto cp = geometry::curvature_pairing(b);
    std::vector<Polynomial> v;
    for (int i = 0; i < N; ++i) v.push_back(cp.component(i));
    const boson::BosonSpace s(N, cfg.suites.ym_cutoff, cfg.limits.max_hilbert_dim);
    const auto parts = dirac::yang_mills_parts(s, k, v);
    const SparseMatrix hp(parts.electric + parts.magnetic + parts.cross);
    const SparseMatrix hm(parts.electric + parts.magnetic - parts.cross);
    ctx.check("H+ hermitian" + tag, "H+* = H+", numerics::hermitian_defect(hp), tol::hamiltonian);
    ctx.check("H- hermitian" + tag, "H-* = H-", numerics::hermitian_defect(hm), tol::hamiltonian);
    ctx.check("sector sum" + tag, "H+ + H- = 2 * 4k^2 (sum e_i^2 + sum v_i^2)",
              numerics::max_abs_diff(SparseMatrix(hp + hm), SparseMatrix(2.0 * SparseMatrix(parts.electric + parts.magnetic))),
              tol::hamiltonian);
    ctx.check("cross term present" + tag, "max |4k^2 sum {v_i, e_i}| > 0", numerics::max_abs(parts.cross), 0.0, false,
              ">");
    ctx.constant("cross_term_max", numerics::max_abs(parts.cross));

    // free case: v = 0, two modes at the working cutoff
    const boson::BosonSpace f(2, cfg.boson.cutoff);
    const SparseMatrix h0 = dirac::hamiltonian_ym(f, k, std::vector<Polynomial>(2, Polynomial(2)), +1);
    const auto ev = numerics::dense_hermitian(numerics::to_dense(h0)).values;
    const auto roots = hermite_roots(f.levels());
    std::vector<double> oracle;
    for (double a : roots)
        for (double c : roots) oracle.push_back(a * a + c * c);
    std::sort(oracle.begin(), oracle.end());
    double worst = 0.0;
    for (std::size_t i = 0; i < oracle.size(); ++i) {
        const double d = std::abs(ev[static_cast<Eigen::Index>(i)] - oracle[i]);
        worst = std::max(worst, d);
        ctx.report.spectra.push_back({"ym-sectors free", static_cast<std::int64_t>(i), ev[static_cast<Eigen::Index>(i)], d});
    }
    ctx.check("free spectrum cutoff=" + std::to_string(cfg.boson.cutoff), "spec(-sum d_i^2) = {r_a^2 + r_b^2 : H_d(r) = 0}",
              worst, tol::free_spectrum);
    ctx.check("free positivity", "min spec(H_free) >= 0", -ev.minCoeff(), 1e-12);
}

inline void field_commutators(Context& ctx) {
    const auto& cfg = ctx.cfg;
    const auto lat = ctx.lattice();
    const int N = cfg.suites.field_modes;
    const auto b = ctx.basis(N);
    const boson::BosonSpace s(N, cfg.boson.cutoff, cfg.limits.max_hilbert_dim);
    const auto low = s.low_occupation(cfg.boson.cutoff - 1);
    const std::int64_t last = lat.cells(1) - 1;
    const std::vector<geometry::EvaluationPoint> pts{{1, 1}, {0, 0}, {4, 2}, {last, 0}};
    double worst = 0.0;
    for (const auto& ma : pts)
        for (const auto& me : pts) {
            const auto f = dirac::field_operators(s, b, ma, me);
            const SparseMatrix c = numerics::commutator(f.E, f.A);
            const SparseMatrix e = dirac::kernel_value(b, ma, me) * s.identity();
            worst = std::max(worst, numerics::max_abs(numerics::select_columns(SparseMatrix(c - e), low)));
        }
    ctx.check("canonical commutator N=" + std::to_string(N), "[E(m2), A(m1)] = K(m1, m2) on occupations < cutoff",
              worst, tol::commutator);

    const geometry::EvaluationPoint m1{1, 1};
    std::vector<double> frac;
    for (int n = N; n <= cfg.suites.field_max_modes; ++n) {
        frac.push_back(dirac::kernel_off_point_fraction(ctx.basis(n), m1));
        ctx.constant("off_point_fraction N=" + std::to_string(n), frac.back());
    }
    double rise = 0.0;
    for (std::size_t i = 1; i < frac.size(); ++i) rise = std::max(rise, frac[i] - frac[i - 1]);
    const std::string range = " N=" + std::to_string(N) + ".." + std::to_string(cfg.suites.field_max_modes);
    ctx.check("concentration non-increasing" + range, "f(N+1) <= f(N), f = 1 - h^3 K(m1, m1)", rise, 1e-12);
    ctx.check("concentration improves" + range, "f(first) - f(last) > 0", frac.front() - frac.back(), 1e-12, true,
              ">");
    const int full = 9 * lat.n() * lat.n() * lat.n();
    for (int n : {9, 18, 36, full})
        if (n > cfg.suites.field_max_modes && n <= full)
            ctx.constant("off_point_fraction N=" + std::to_string(n), dirac::kernel_off_point_fraction(ctx.basis(n), m1));

    const auto bk = ctx.basis(cfg.suites.field_max_modes);
    for (int comp = 0; comp < 3; ++comp)
        for (std::int64_t e = 0; e < lat.cells(1); ++e)
            ctx.report.kernels.push_back({m1.edge, e, comp, dirac::kernel_value(bk, {m1.edge, comp}, {e, comp})});
}

inline void spectral_invariant(Context& ctx) {
    const auto& cfg = ctx.cfg;
    const int N = cfg.suites.spectral_modes;
    // the seed modes carry one polarization each, which makes S vanish identically on their span;
    // a random orthonormal family exercises the affine structure with nonzero coefficients
    auto run = [&](const geometry::ModeBasis& b, const std::string& tag) {
        const auto form = geometry::spectral_invariant_form(b);
        double aff = 0.0, lin = 0.0, eig = 0.0, asym = 0.0;
        for (int p = 0; p < 5; ++p) {
            const RealVec x = ctx.uniform(N), y = ctx.uniform(N);
            const double t = 0.5 * (ctx.uniform(1)[0] + 1.0);
            const double sx = geometry::spectral_invariant(b, x), sy = geometry::spectral_invariant(b, y);
            const double sm = geometry::spectral_invariant(b, RealVec(t * x + (1.0 - t) * y));
            const double scale = max_of({1.0, std::abs(sx), std::abs(sy)});
            aff = std::max(aff, std::abs(sm - t * sx - (1.0 - t) * sy) / scale);
            lin = std::max(lin, std::abs(sx - form(x)) / scale);
            const auto cd = geometry::covariant_derivative_matrix(b, x);
            asym = std::max(asym, cd.asymmetry);
            Eigen::EigenSolver<RealDense> es(cd.matrix, false);
            eig = std::max(eig, std::abs(es.eigenvalues().sum() - std::complex<double>(sx, 0.0)) / scale);
        }
        ctx.check("affine" + tag, "S(t x + (1-t) y) = t S(x) + (1-t) S(y)", aff, tol::affine);
        ctx.check("affine form" + tag, "S(x) = c0 + c.x", lin, tol::affine);
        ctx.check("eigenvalue sum" + tag, "S(x) = sum of eigenvalues of i nabla^A on the mode span", eig,
                  tol::eigen_sum);
        ctx.check("covariant matrix asymmetry" + tag, "max |M - M^T|", asym, tol::affine, false);
        const boson::BosonSpace s(N, 1, cfg.limits.max_hilbert_dim);
        ctx.check("operator hermitian" + tag, "S(x)* = S(x) as a multiplication operator",
                  numerics::hermitian_defect(dirac::spectral_term_operator(s, form)), tol::affine);
        ctx.constant("c0" + tag, form.c0);
        ctx.constant("gradient_norm" + tag, form.c.norm());
        return form;
    };
    run(ctx.basis(N), " N=" + std::to_string(N));
    const auto random_form = run(geometry::random_mode_family(ctx.lattice(), N, ctx.rng), " N=" + std::to_string(N) + " random family");
    ctx.check("nontrivial N=" + std::to_string(N) + " random family", "|c0| + |c| > 0 on a mixed-polarization span",
              std::abs(random_form.c0) + random_form.c.norm(), 1e-6, true, ">");

    const auto b9 = ctx.basis(9);
    ctx.check("vanishes at A=0 N=9", "S(0) = 0 for constant modes",
              std::abs(geometry::spectral_invariant(b9, RealVec::Zero(9))), tol::affine);
    const auto f9 = geometry::spectral_invariant_form(b9);
    const auto cs = geometry::chern_simons_coefficients(b9).to_polynomial();
    Polynomial lap(9);
    for (int i = 0; i < 9; ++i) lap = lap + cs.derivative(i).derivative(i);
    double d = 0.0;
    for (int p = 0; p < 5; ++p) {
        const RealVec x = ctx.uniform(9);
        d = std::max(d, std::abs(lap.evaluate(x) + 2.0 * f9(x)));
    }
    ctx.check("laplacian of CS N=9", "sum_i d_i^2 CS = -2 S", d, tol::cs_coefficients);
}

inline void kernel_degeneracy(Context& ctx) {
    const auto& cfg = ctx.cfg;
    const int N = cfg.modes.count, M = cfg.fermion.modes;
    const std::string tag = " N=" + std::to_string(N) + " M=" + std::to_string(M) + " cutoff=" +
                            std::to_string(cfg.boson.cutoff);
    const auto m = ctx.model(N, M, cfg.boson.cutoff);
    numerics::LanczosOptions opts;
    opts.seed = ctx.rng();
    const auto rep = dirac::kernel_and_degeneracy(m, tol::kernel, 4, opts);
    ctx.check("kernel dimension" + tag, "#{eigenvalues of D*D < 1e-10} >= 2^M", rep.kernel_dim,
              static_cast<double>(std::int64_t{1} << M), true, ">=");
    ctx.check("tensor mechanism bound" + tag, "#{eigenvalues < 1e-10} >= 2 dim(ker d) 2^M", rep.kernel_dim,
              static_cast<double>(rep.lower_bound), true, ">=");
    ctx.check("tensor mechanism" + tag, "D (w (x) Phi) = 0 for w in ker d_i, any Phi", rep.mechanism_residual,
              tol::kernel);
    ctx.check("vacuum kernel state" + tag, "D (w (x) |0>, w (x) |0>) = 0", rep.vacuum_residual, tol::kernel);
    ctx.check("eigenpair residuals" + tag, "max |A y - theta y|",
              rep.spectrum.residuals.size() ? rep.spectrum.residuals.maxCoeff() : 0.0, 1e-8);
    ctx.constant("kernel_dim", rep.kernel_dim);
    ctx.constant("lower_bound", static_cast<double>(rep.lower_bound));
    for (Eigen::Index i = 0; i < rep.spectrum.values.size(); ++i)
        ctx.report.spectra.push_back({"kernel-degeneracy", i, rep.spectrum.values[i], rep.spectrum.residuals[i]});
    const std::int64_t dim = 2 * m.block_dim();
    if (dim <= cfg.limits.max_dense_dim) {
        const SparseMatrix D = dirac::big_D(m).assemble();
        const auto ev = numerics::dense_hermitian(numerics::to_dense(SparseMatrix(SparseMatrix(D.adjoint()) * D))).values;
        std::int64_t count = 0;
        for (Eigen::Index i = 0; i < ev.size(); ++i) count += ev[i] < tol::kernel;
        const std::int64_t visible = std::min<std::int64_t>(count, rep.spectrum.values.size());
        ctx.check("dense cross-check" + tag, "Lanczos kernel count = dense kernel count",
                  std::abs(static_cast<double>(visible - rep.kernel_dim)), 0.5);
        ctx.constant("dense_kernel_dim", static_cast<double>(count));
    }
}

} // namespace detail

/// Runs the named suites in order and collects every check into one report.
inline Report run_suites(const ExperimentConfig& cfg, const std::vector<std::string>& suites,
                         const std::function<void(const std::string&, double)>& on_suite_done = {}) {
    Report report;
    report.suites = suites;
    for (const auto& s : suites) check_resources(cfg, s);
    for (const auto& s : suites) {
        detail::Context ctx{cfg, report, s, std::mt19937_64(detail::suite_seed(cfg.seed, s))};
        const auto t0 = std::chrono::steady_clock::now();
        if (s == "car-relations") detail::car_relations(ctx);
        else if (s == "real-structure") detail::real_structure(ctx);
        else if (s == "cs-gradient") detail::cs_gradient(ctx);
        else if (s == "rotate-square") detail::rotate_square(ctx);
        else if (s == "ym-sectors") detail::ym_sectors(ctx);
        else if (s == "field-commutators") detail::field_commutators(ctx);
        else if (s == "spectral-invariant") detail::spectral_invariant(ctx);
        else if (s == "kernel-degeneracy") detail::kernel_degeneracy(ctx);
        else throw ConfigurationError("unknown suite '" + s + "'");
        if (on_suite_done)
            on_suite_done(s, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return report;
}

} // namespace confspace::experiment
