#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "confspace/dirac/dirac.hpp"

using namespace confspace;
using dirac::DiracModel;
using geometry::Lattice;
using numerics::Polynomial;

namespace {

const double kDefaultK = 1.0 / (4.0 * std::numbers::pi);

DiracModel model(int N, int M, int cutoff, dirac::FrameRegime regime = dirac::FrameRegime::flat()) {
    const Lattice lat(2, 0.5);
    const auto b = geometry::build_mode_basis(lat, N);
    return DiracModel::from_basis(b, spinor::ReferenceFrame::flat(lat), M, cutoff, regime);
}

Polynomial random_cubic(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return numerics::random_cubic_form(n, rng).to_polynomial();
}

// Roots of the physicists' Hermite polynomial H_d by Newton iteration on the three-term recurrence.
std::vector<double> hermite_roots(int d) {
    auto eval = [d](double x) {
        double h0 = 1.0, h1 = 2.0 * x;
        if (d == 0) return std::pair{h0, 0.0};
        for (int k = 1; k < d; ++k) {
            const double h2 = 2.0 * x * h1 - 2.0 * k * h0;
            h0 = h1;
            h1 = h2;
        }
        return std::pair{h1, 2.0 * d * h0};  // H_d, H_d' = 2d H_{d-1}
    };
    std::vector<double> roots;
    for (int j = 0; j < d; ++j) {
        // asymptotic initial guess, then deflated Newton
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

} // namespace

TEST(Dirac, HermiteOracleMatchesTruncatedPosition) {
    const RealDense x = boson::single::position(7);
    Eigen::SelfAdjointEigenSolver<RealDense> es(x);
    const auto r = hermite_roots(7);
    for (int i = 0; i < 7; ++i) EXPECT_NEAR(es.eigenvalues()[i], r[static_cast<std::size_t>(i)], 1e-12);
}

TEST(Dirac, VacuumImageMatchesHandConstruction) {
    const auto m = model(2, 4, 4);
    const SparseMatrix dp = dirac::dirac_plus(m);
    Vec v = Vec::Zero(m.block_dim());
    v[0] = 1.0;
    const Vec out = dp * v;
    Vec expect = Vec::Zero(m.block_dim());
    for (int i = 0; i < 2; ++i) {
        std::vector<int> occ{0, 0};
        occ[static_cast<std::size_t>(i)] = 1;
        // d|0> = -|1>/sqrt 2 and cbar(psi_i)|0> = |e_i>/sqrt 2
        expect[m.boson().index(occ) * m.fock().dim() + (std::int64_t{1} << i)] = -0.5;
    }
    EXPECT_LT((out - expect).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Dirac, BlocksAreHermitianAndOddInFermionParity) {
    const auto m = model(2, 4, 4);
    for (const auto& d : {dirac::dirac_plus(m), dirac::dirac_minus(m)}) {
        EXPECT_LT(numerics::hermitian_defect(d), 1e-15);
        const SparseMatrix P = numerics::kron(m.boson().identity(), m.fock().grading());
        EXPECT_LT(numerics::max_abs(numerics::anticommutator(P, d)), 1e-15);
    }
}

TEST(Dirac, RealStructureHoldsWithInputSectorSign) {
    const auto rep = dirac::check_real_structure(model(2, 4, 3));
    EXPECT_EQ(rep.consistent_ordering, "input");
    EXPECT_LT(rep.input_max, 1e-10);
    EXPECT_GT(rep.output_max, 0.1);
    EXPECT_GT(rep.no_gamma_min, 0.1);
    EXPECT_LT(rep.j_squared, 1e-12);
    EXPECT_LT(rep.gamma_anticommutator, 1e-12);
    EXPECT_EQ(rep.sectors.size(), 5u);
}

TEST(Dirac, ModelRejectsUnclosedModeSpan) {
    EXPECT_THROW(model(2, 2, 3), DomainError);
}

TEST(Dirac, RotationWithZeroPolynomialIsIdentity) {
    const auto m = model(2, 4, 4);
    const auto r = dirac::rotate(m, kDefaultK, Polynomial(2), 40);
    EXPECT_EQ(numerics::max_abs_diff(r.plus, dirac::dirac_plus(m)), 0.0);
    EXPECT_EQ(numerics::max_abs_diff(r.minus, dirac::dirac_minus(m)), 0.0);
}

TEST(Dirac, SquareDecomposesWithHalfNormalization) {
    const auto m = model(2, 4, 8);
    const Polynomial cs = random_cubic(2, 21);
    const auto r = dirac::rotate(m, kDefaultK, cs, 96);
    EXPECT_LT(r.route_agreement, 1e-10);
    const auto rep = dirac::square_and_decompose(m, r, kDefaultK, cs);
    EXPECT_LT(rep.max_fit_residual, 1e-8);
    EXPECT_NEAR(rep.normalization, 0.5, 1e-8);
    EXPECT_NEAR(rep.sign_cross_plus, 1.0, 1e-8);
    EXPECT_NEAR(rep.sign_cross_minus, -1.0, 1e-8);
    EXPECT_NEAR(rep.sign_spectral_plus, 1.0, 1e-8);
    EXPECT_NEAR(rep.sign_spectral_minus, -1.0, 1e-8);
    EXPECT_NEAR(std::abs(rep.minus.coeffs[0] - rep.plus.coeffs[0]), 0.0, 1e-8);
}

TEST(Dirac, LinearFrameLeavesResidual) {
    const Polynomial cs = random_cubic(2, 22);
    const auto flat = model(2, 4, 6);
    const auto framed = model(2, 4, 6, dirac::FrameRegime::linear_x(0.1));
    const auto rf = dirac::rotate(flat, kDefaultK, cs, 64);
    const auto rx = dirac::rotate(framed, kDefaultK, cs, 64);
    const auto none = dirac::square_and_decompose(flat, rf, kDefaultK, cs, rf);
    const auto some = dirac::square_and_decompose(flat, rf, kDefaultK, cs, rx);
    EXPECT_LT(none.frame_residual, 1e-8);
    EXPECT_GT(some.frame_residual, 1e-3);
}

TEST(Dirac, HamiltonianIsTwiceSquaredRotatedBlock) {
    const auto m = model(2, 4, 8);
    const Polynomial cs = random_cubic(2, 23);
    const auto r = dirac::rotate(m, kDefaultK, cs, 96);
    const auto cols = dirac::low_composite_columns(m, 5);
    const auto v = dirac::half_gradient(cs);
    for (int sign : {+1, -1}) {
        const SparseMatrix h = numerics::kron(dirac::hamiltonian_ym(m.boson(), kDefaultK, v, sign), m.fock().identity());
        const SparseMatrix& d = sign > 0 ? r.plus : r.minus;
        const SparseMatrix diff = h - 2.0 * SparseMatrix(d * d);
        EXPECT_LT(numerics::max_abs(numerics::select_columns(diff, cols)), 1e-8) << "sign " << sign;
    }
}

TEST(Dirac, HamiltonianSectorsHermitianAndSum) {
    const Lattice lat(2, 0.5);
    // tau_3 first enters at the seventh constant mode, so the curvature couples from N = 7 on
    const auto b = geometry::build_mode_basis(lat, 7);
    const auto cp = geometry::curvature_pairing(b);
    std::vector<Polynomial> v;
    for (int i = 0; i < 7; ++i) v.push_back(cp.component(i));
    const boson::BosonSpace s(7, 2);
    const SparseMatrix hp = dirac::hamiltonian_ym(s, kDefaultK, v, +1);
    const SparseMatrix hm = dirac::hamiltonian_ym(s, kDefaultK, v, -1);
    EXPECT_LT(numerics::hermitian_defect(hp), 1e-12);
    EXPECT_LT(numerics::hermitian_defect(hm), 1e-12);
    const auto parts = dirac::yang_mills_parts(s, kDefaultK, v);
    EXPECT_LT(numerics::max_abs_diff(SparseMatrix(hp + hm), SparseMatrix(2.0 * (parts.electric + parts.magnetic))),
              1e-12);
    EXPECT_GT(numerics::max_abs(parts.cross), 1e-6);
}

TEST(Dirac, FreeHamiltonianSpectrumFromHermiteRoots) {
    const boson::BosonSpace s(2, 5);
    const std::vector<Polynomial> v(2, Polynomial(2));
    const SparseMatrix h = dirac::hamiltonian_ym(s, kDefaultK, v, +1);
    const auto ev = numerics::dense_hermitian(numerics::to_dense(h)).values;
    const auto r = hermite_roots(6);
    std::vector<double> expect;
    for (double a : r)
        for (double c : r) expect.push_back(a * a + c * c);
    std::sort(expect.begin(), expect.end());
    ASSERT_EQ(static_cast<std::size_t>(ev.size()), expect.size());
    for (std::size_t i = 0; i < expect.size(); ++i) EXPECT_NEAR(ev[static_cast<Eigen::Index>(i)], expect[i], 1e-9);
    EXPECT_GE(ev.minCoeff(), -1e-12);
}

TEST(Dirac, FieldCommutatorIsModeKernel) {
    const Lattice lat(2, 0.5);
    const auto b = geometry::build_mode_basis(lat, 3);
    const boson::BosonSpace s(3, 4);
    const auto low = s.low_occupation(3);
    for (auto [e1, e2] : {std::pair{1, 1}, std::pair{1, 4}, std::pair{7, 2}}) {
        const geometry::EvaluationPoint m1{e1, 0}, m2{e2, 0};
        const auto f = dirac::field_operators(s, b, m1, m2);
        const SparseMatrix c = numerics::commutator(f.E, f.A);
        const SparseMatrix expect = dirac::kernel_value(b, m1, m2) * s.identity();
        EXPECT_LT(numerics::max_abs(numerics::select_columns(SparseMatrix(c - expect), low)), 1e-12);
    }
}

TEST(Dirac, KernelConcentratesAsModesGrow) {
    const Lattice lat(2, 0.5);
    const geometry::EvaluationPoint m1{1, 1};
    double prev = 2.0;
    for (int N = 3; N <= 24; ++N) {
        const double f = dirac::kernel_off_point_fraction(geometry::build_mode_basis(lat, N), m1);
        EXPECT_LE(f, prev + 1e-12) << "N=" << N;
        prev = f;
    }
    EXPECT_LT(prev, 1.0 - 1e-3);
    // full basis: K is the identity kernel over h^3
    EXPECT_NEAR(dirac::kernel_off_point_fraction(geometry::build_mode_basis(lat, 72), m1), 0.0, 1e-12);
}

TEST(Dirac, SpectralTermOperator) {
    const Lattice lat(2, 0.5);
    const auto b = geometry::build_mode_basis(lat, 9);
    const auto form = geometry::spectral_invariant_form(b);
    const boson::BosonSpace s(9, 1);
    const SparseMatrix op = dirac::spectral_term_operator(s, form);
    EXPECT_LT(numerics::hermitian_defect(op), 1e-15);
    // on constant modes the Laplacian of CS equals -2 times the invariant
    const auto cs = geometry::chern_simons_coefficients(b).to_polynomial();
    Polynomial lap(9);
    for (int i = 0; i < 9; ++i) lap = lap + cs.derivative(i).derivative(i);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    RealVec x(9);
    for (auto& t : x) t = g(rng);
    EXPECT_NEAR(lap.evaluate(x), -2.0 * form(x), 1e-10);
}

TEST(Dirac, KernelContainsTensorMechanism) {
    const auto m = model(2, 4, 4);
    const auto rep = dirac::kernel_and_degeneracy(m, 1e-10);
    EXPECT_EQ(rep.lower_bound, 32);
    EXPECT_GE(rep.kernel_dim, 32);
    EXPECT_LT(rep.mechanism_residual, 1e-12);
    EXPECT_LT(rep.vacuum_residual, 1e-12);
    EXPECT_TRUE(rep.spectrum.converged);
}

TEST(Dirac, EvenCutoffHasNoDerivativeKernel) {
    const boson::BosonSpace s(1, 3);
    EXPECT_EQ(dirac::derivative_joint_kernel(s).cols(), 0);
}

TEST(Dirac, CompositeCap) {
    const Lattice lat(2, 0.5);
    const auto b = geometry::build_mode_basis(lat, 2);
    EXPECT_THROW(DiracModel::from_basis(b, spinor::ReferenceFrame::flat(lat), 4, 8, dirac::FrameRegime::flat(), 500),
                 ResourceError);
}
