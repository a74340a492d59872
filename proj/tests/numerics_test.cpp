#include <gtest/gtest.h>

#include <random>

#include "confspace/numerics/expm.hpp"
#include "confspace/numerics/finite_difference.hpp"
#include "confspace/numerics/polynomial.hpp"

using namespace confspace;
using namespace confspace::numerics;

namespace {

Dense random_hermitian(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Dense a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = cplx(g(rng), g(rng));
    return 0.5 * (a + a.adjoint());
}

SparseMatrix pauli_x() {
    Dense d(2, 2);
    d << 0, 1, 1, 0;
    return from_dense(d);
}

} // namespace

TEST(Kron, MatchesDenseOracle) {
    std::mt19937_64 rng(1);
    const Dense a = random_hermitian(3, rng), b = random_hermitian(4, rng);
    const Dense k = to_dense(kron(from_dense(a), from_dense(b)));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int r = 0; r < 4; ++r)
                for (int c = 0; c < 4; ++c) EXPECT_NEAR(std::abs(k(i * 4 + r, j * 4 + c) - a(i, j) * b(r, c)), 0.0, 1e-14);
}

TEST(Kron, IdentityAndPauli) {
    EXPECT_EQ(max_abs_diff(kron(identity(2), identity(3)), identity(6)), 0.0);
    const Dense k = to_dense(kron(pauli_x(), pauli_x()));
    Dense expect = Dense::Zero(4, 4);
    expect(0, 3) = expect(1, 2) = expect(2, 1) = expect(3, 0) = 1.0;
    EXPECT_EQ(max_abs(Dense(k - expect)), 0.0);
}

TEST(Kron, MixedProductProperty) {
    std::mt19937_64 rng(2);
    const auto a = from_dense(random_hermitian(3, rng)), b = from_dense(random_hermitian(2, rng));
    const auto c = from_dense(random_hermitian(3, rng)), d = from_dense(random_hermitian(2, rng));
    EXPECT_LT(max_abs_diff(SparseMatrix(kron(a, b) * kron(c, d)), kron(SparseMatrix(a * c), SparseMatrix(b * d))), 1e-12);
}

TEST(Kron, CapEnforced) {
    EXPECT_THROW(kron(identity(1 << 13), identity(1 << 12)), ResourceError);
}

TEST(Sparse, PruneDropsTinyEntries) {
    std::vector<Triplet> t{{0, 0, 1e-17}, {1, 1, 1.0}, {0, 1, 2e-16}};
    EXPECT_EQ(from_triplets(2, 2, t).nonZeros(), 1);
}

TEST(Lanczos, MatchesDenseSolver) {
    std::mt19937_64 rng(3);
    const Dense a = random_hermitian(200, rng);
    const auto dense = dense_hermitian(a);
    const auto lz = lanczos_hermitian(from_dense(a), 5, 1e-10);
    ASSERT_TRUE(lz.converged) << lz.message;
    ASSERT_EQ(lz.values.size(), 5);
    for (int i = 0; i < 5; ++i) EXPECT_NEAR(lz.values[i], dense.values[i], 1e-9);
    EXPECT_LT(max_abs(Dense(lz.vectors.adjoint() * lz.vectors - Dense::Identity(5, 5))), 1e-8);
    for (int i = 0; i < 5; ++i) EXPECT_LT(lz.residuals[i], 1e-10);
}

TEST(Lanczos, ResolvesDegenerateEigenvalues) {
    // diag(0, 0, 0, 1, 2, ...) in a random unitary frame
    std::mt19937_64 rng(4);
    const int n = 60;
    RealVec d(n);
    for (int i = 0; i < n; ++i) d[i] = i < 3 ? 0.0 : static_cast<double>(i - 2);
    Eigen::HouseholderQR<Dense> qr(random_hermitian(n, rng) + Dense::Identity(n, n) * cplx(0, 1));
    const Dense Q = qr.householderQ();
    const Dense a = Q * d.cast<cplx>().asDiagonal() * Q.adjoint();
    const auto lz = lanczos_hermitian(from_dense(a), 4, 1e-10);
    ASSERT_TRUE(lz.converged);
    EXPECT_NEAR(lz.values[0], 0.0, 1e-10);
    EXPECT_NEAR(lz.values[2], 0.0, 1e-10);
    EXPECT_NEAR(lz.values[3], 1.0, 1e-9);
}

TEST(Lanczos, OneDimensional) {
    Dense a(1, 1);
    a(0, 0) = 3.5;
    const auto lz = lanczos_hermitian(from_dense(a), 1, 1e-12);
    EXPECT_EQ(lz.values[0], 3.5);
}

TEST(Lanczos, ZeroCountAndBadCount) {
    EXPECT_EQ(lanczos_hermitian(identity(4), 0, 1e-10).values.size(), 0);
    EXPECT_THROW(lanczos_hermitian(identity(4), 5, 1e-10), DomainError);
}

TEST(Expm, MatchesDenseExponential) {
    std::mt19937_64 rng(5);
    const Dense a = random_hermitian(80, rng);
    Vec v = Vec::Random(80);
    for (double s : {0.1, 1.0, 3.0}) {
        const auto r = expm_action(from_dense(a), s, v, 1e-13);
        const Vec exact = expm_hermitian_dense(a, s) * v;
        EXPECT_LT((r.value - exact).norm() / v.norm(), 1e-11);
        EXPECT_NEAR(r.value.norm(), v.norm(), 1e-10 * v.norm());
    }
}

TEST(Expm, ZeroTimeAndZeroOperator) {
    Vec v = Vec::Random(6);
    EXPECT_EQ((expm_action(identity(6), 0.0, v).value - v).norm(), 0.0);
    SparseMatrix z(6, 6);
    EXPECT_LT((expm_action(z, 2.0, v).value - v).norm(), 1e-15);
}

TEST(Expm, ScalarPhase) {
    Vec v = Vec::Ones(4);
    const auto r = expm_action(SparseMatrix(2.0 * identity(4)), 0.3, v);
    EXPECT_LT((r.value - std::exp(cplx(0, 0.6)) * v).norm(), 1e-14);
    EXPECT_TRUE(r.happy_breakdown);
}

TEST(FiniteDifference, PolynomialGradient) {
    std::mt19937_64 rng(6);
    const auto f = random_cubic_form(4, rng);
    RealVec x = RealVec::Random(4);
    const RealVec fd = finite_difference_gradient([&](const RealVec& y) { return f.value(y); }, x);
    EXPECT_LT((fd - f.gradient(x)).norm() / f.gradient(x).norm(), 1e-8);
}

TEST(Polynomial, DerivativeAndEvaluate) {
    Polynomial p(2);
    p.add(2.0, {0, 0, 1}).add(-1.0, {1}).add(0.5, {});
    EXPECT_EQ(p.degree(), 3);
    RealVec x(2);
    x << 1.5, -2.0;
    EXPECT_DOUBLE_EQ(p.evaluate(x), 2.0 * 2.25 * -2.0 + 2.0 + 0.5);
    EXPECT_DOUBLE_EQ(p.derivative(0).evaluate(x), 4.0 * 1.5 * -2.0);
    EXPECT_DOUBLE_EQ(p.derivative(0).derivative(0).evaluate(x), -8.0);
    EXPECT_THROW(p.add(1.0, {2}), DomainError);
}

TEST(CubicForm, SymmetrizationPreservesValue) {
    std::mt19937_64 rng(7);
    const auto f = random_cubic_form(3, rng);
    EXPECT_NEAR(f.cubic(0, 1, 2), f.cubic(2, 0, 1), 1e-16);
    RealVec x = RealVec::Random(3);
    EXPECT_NEAR(f.to_polynomial().evaluate(x), f.value(x), 1e-14);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(f.partial(i).evaluate(x), f.gradient(x)[i], 1e-14);
}
