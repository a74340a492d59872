#include <gtest/gtest.h>

#include "confspace/fock/fock.hpp"
#include "confspace/spinor/spinor.hpp"

using namespace confspace;
using geometry::Lattice;
using geometry::Mat2;

namespace {

Lattice lat2() { return Lattice(2, 0.5); }

std::vector<spinor::SpinorOneForm> embedded(const geometry::ModeBasis& b, const spinor::ReferenceFrame& f) {
    std::vector<spinor::SpinorOneForm> out;
    for (int i = 0; i < b.size(); ++i) out.push_back(spinor::embed_mode(b[i], f));
    return out;
}

Mat2 rotation(double t) {
    Mat2 g;
    g << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
    return g;
}

} // namespace

TEST(Spinor, ChargeConjugationSquaresToMinusOne) {
    const auto lat = lat2();
    const auto b = geometry::build_mode_basis(lat, 3);
    const auto x = spinor::embed_mode(b[1], spinor::ReferenceFrame::flat(lat));
    const auto cc = spinor::charge_conjugation(spinor::charge_conjugation(x));
    EXPECT_LT((cc.to_vector() + x.to_vector()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Spinor, EmbeddingIsIsometric) {
    const auto lat = lat2();
    const auto b = geometry::build_mode_basis(lat, 9);
    const auto e = embedded(b, spinor::ReferenceFrame::flat(lat));
    for (int i = 0; i < 9; ++i)
        for (int j = 0; j < 9; ++j)
            EXPECT_NEAR(std::abs(spinor::inner_product(e[i], e[j]) - (i == j ? 1.0 : 0.0)), 0.0, 1e-12);
}

TEST(Spinor, ConjugateOfTau1IsMinusTau3) {
    const auto lat = lat2();
    const auto b = geometry::build_mode_basis(lat, 9);
    const auto f = spinor::ReferenceFrame::flat(lat);
    // constant modes are tau_a dx^mu with mu fastest
    const auto c = spinor::charge_conjugation(spinor::embed_mode(b[0], f));
    const auto t3 = spinor::embed_mode(b[6], f);
    EXPECT_LT((c.to_vector() + t3.to_vector()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Spinor, ExtendBasisClosesUnderConjugation) {
    const auto lat = lat2();
    const auto b = geometry::build_mode_basis(lat, 2);
    const auto f = spinor::ReferenceFrame::flat(lat);
    const auto fm = spinor::extend_basis(embedded(b, f), 4);
    ASSERT_EQ(fm.size(), 4);
    const auto mc = spinor::mode_space_conjugation(fm);
    EXPECT_LT(mc.closure_defect, 1e-12);
    EXPECT_LT(fock::mode_conjugation_defect(mc.K), 1e-12);
    // the first N modes are the embedded ones
    for (int i = 0; i < 2; ++i)
        EXPECT_LT((fm.modes[i].to_vector() - spinor::embed_mode(b[i], f).to_vector()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Spinor, EqualModeCountIsNotClosed) {
    const auto lat = lat2();
    const auto b = geometry::build_mode_basis(lat, 2);
    const auto fm = spinor::extend_basis(embedded(b, spinor::ReferenceFrame::flat(lat)), 2);
    EXPECT_GT(spinor::mode_space_conjugation(fm).closure_defect, 0.5);
}

TEST(Spinor, ThreeTau1ModesCloseAtSix) {
    const auto lat = lat2();
    const auto b = geometry::build_mode_basis(lat, 9);
    const auto f = spinor::ReferenceFrame::flat(lat);
    std::vector<spinor::SpinorOneForm> e{spinor::embed_mode(b[0], f), spinor::embed_mode(b[1], f),
                                         spinor::embed_mode(b[2], f)};
    const auto fm = spinor::extend_basis(e, 6);
    EXPECT_LT(spinor::mode_space_conjugation(fm).closure_defect, 1e-12);
}

TEST(Spinor, ExtendBasisRejectsBadCounts) {
    const auto lat = lat2();
    const auto b = geometry::build_mode_basis(lat, 2);
    const auto e = embedded(b, spinor::ReferenceFrame::flat(lat));
    EXPECT_THROW(spinor::extend_basis(e, 1), DomainError);
    EXPECT_THROW(spinor::extend_basis({}, 2), DomainError);
    EXPECT_THROW(spinor::extend_basis(e, 4 * 3 * 8 + 1), DomainError);
}

TEST(Spinor, SobolevGramIndependentOfConstantFrame) {
    const auto lat = lat2();
    const auto b = geometry::build_mode_basis(lat, 12);
    const auto flat = spinor::ReferenceFrame::flat(lat);
    const auto rot = spinor::ReferenceFrame::constant(lat, rotation(0.7));
    EXPECT_LT(spinor::sobolev_frame_dependence(b, flat, rot, 1), 1e-12);
    std::vector<spinor::SpinorOneForm> e;
    for (int i = 0; i < b.size(); ++i) e.push_back(spinor::embed_mode(b[i], flat));
    const double scale = numerics::max_abs(spinor::sobolev_gram(e, 2));
    EXPECT_LT(spinor::sobolev_frame_dependence(b, flat, rot, 2), 1e-13 * scale);
}

TEST(Spinor, SobolevGramDependsOnVaryingFrame) {
    const auto lat = lat2();
    const auto b = geometry::build_mode_basis(lat, 12);
    const auto flat = spinor::ReferenceFrame::flat(lat);
    const auto vary = spinor::ReferenceFrame::from_function(lat, [&](std::int64_t v) {
        return rotation(0.9 * static_cast<double>(lat.coords(v)[0]));
    });
    EXPECT_GT(spinor::sobolev_frame_dependence(b, flat, vary, 1), 1e-3);
    // L2 is frame independent regardless
    EXPECT_LT(spinor::sobolev_frame_dependence(b, flat, vary, 0), 1e-12);
}

TEST(Spinor, RejectsNonOrthonormalFrame) {
    const auto lat = lat2();
    EXPECT_THROW(spinor::ReferenceFrame::constant(lat, 2.0 * Mat2::Identity()), DomainError);
}

TEST(Spinor, VectorRoundTrip) {
    const auto lat = lat2();
    const auto b = geometry::build_mode_basis(lat, 5);
    const auto x = spinor::embed_mode(b[4], spinor::ReferenceFrame::flat(lat));
    const auto y = spinor::SpinorOneForm::from_vector(lat, x.to_vector());
    EXPECT_EQ((x.to_vector() - y.to_vector()).cwiseAbs().maxCoeff(), 0.0);
}
