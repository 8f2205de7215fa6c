#include <kspin/suites.hpp>

#include "support.hpp"

using namespace kspin;

namespace {

template <class T>
class FiberTyped : public ::testing::Test {};
using ScalarTypes = ::testing::Types<GaussRat, Complex>;
TYPED_TEST_SUITE(FiberTyped, ScalarTypes);

}  // namespace

TEST(Fiber, RejectsOutOfRangeDimension)
{
    EXPECT_THROW(FiberContext<GaussRat>(0), size_error);
    EXPECT_THROW(FiberContext<GaussRat>(9), size_error);
}

TEST(Fiber, GradeDimensionsAreBinomial)
{
    const FiberContext<GaussRat> ctx(5);
    const std::vector<int> expected{1, 5, 10, 10, 5, 1};
    EXPECT_EQ(ctx.grade_dims(), expected);
    EXPECT_EQ(ctx.dim(), 32u);
}

TEST(Fiber, BasisGeneratorsSquareToMinusOne)
{
    for (int m = 1; m <= 3; ++m) {
        const FiberContext<GaussRat> ctx(m);
        const auto id = Matrix<GaussRat>::identity(ctx.dim());
        for (int a = 0; a < ctx.n(); ++a) {
            EXPECT_EQ(ctx.gamma_matrix(a) * ctx.gamma_matrix(a), GaussRat(-1) * id) << "m=" << m << " a=" << a;
            for (int b = a + 1; b < ctx.n(); ++b)
                EXPECT_TRUE((ctx.gamma_matrix(a) * ctx.gamma_matrix(b) + ctx.gamma_matrix(b) * ctx.gamma_matrix(a)).is_zero());
        }
    }
}

TEST(Fiber, KahlerFormActsByGradeEigenvalue)
{
    const FiberContext<GaussRat> ctx(4);
    for (Mask s = 0; s < ctx.dim(); ++s) {
        const auto phi = ctx.basis_spinor(s);
        const GaussRat ev(Rational(0), rat(2 * grade_of(s) - 4));
        EXPECT_EQ(omega_action(ctx, phi), ev * phi) << "s=" << s;
    }
}

TEST(Fiber, HolomorphicPartRaisesGrade)
{
    const FiberContext<GaussRat> ctx(3);
    for (int a = 0; a < ctx.n(); ++a)
        for (Mask s = 0; s < ctx.dim(); ++s) {
            const int r = grade_of(s);
            const auto up = ctx.clifford(ctx.e_plus(a), ctx.basis_spinor(s));
            const auto down = ctx.clifford(ctx.e_minus(a), ctx.basis_spinor(s));
            EXPECT_TRUE(up.is_zero() || up.in_grade(r + 1));
            EXPECT_TRUE(down.is_zero() || down.in_grade(r - 1));
        }
}

TEST(Fiber, OneFormActsAsCliffordMultiplication)
{
    const FiberContext<GaussRat> ctx(2);
    Rng rng(4);
    const auto x = random_tangent(ctx, rng);
    const auto phi = random_spinor(ctx, rng);
    EXPECT_EQ(form_action(ctx, Form<GaussRat>::one_form(x), phi), clifford_mul(ctx, x, phi));
}

TEST(Fiber, JSquareSignMatchesDimension)
{
    Rng rng(2);
    for (int m = 1; m <= 6; ++m) {
        const FiberContext<GaussRat> ctx(m);
        const GaussRat sign((m * (m + 1) / 2) % 2 == 0 ? 1 : -1);
        const auto phi = random_spinor(ctx, rng);
        EXPECT_EQ(j_map(ctx, j_map(ctx, phi)), sign * phi) << "m=" << m;
    }
}

TEST(Fiber, JIsConjugateLinear)
{
    const FiberContext<GaussRat> ctx(3);
    Rng rng(8);
    const auto phi = random_spinor(ctx, rng);
    const auto i = imag_unit<GaussRat>();
    EXPECT_EQ(j_map(ctx, i * phi), (-i) * j_map(ctx, phi));
}

TEST(Fiber, VolumeFormIsGradeParity)
{
    const FiberContext<GaussRat> ctx(3);
    for (Mask s = 0; s < ctx.dim(); ++s) {
        const auto phi = ctx.basis_spinor(s);
        const auto v = volume_form_action(ctx, phi);
        EXPECT_TRUE(v == phi || v == GaussRat(-1) * phi);
        EXPECT_EQ(volume_form_action(ctx, v), phi);
    }
}

TEST(Fiber, EmbeddingRejectsWrongGrade)
{
    const FiberContext<GaussRat> ctx(3);
    Rng rng(1);
    const auto phi = random_spinor(ctx, rng, 1);
    EXPECT_THROW(iota_plus(ctx, phi, 1), grade_error);
    EXPECT_NO_THROW(iota_plus(ctx, phi, 0));
}

TEST(Fiber, OperatorAnnotationsCompose)
{
    const FiberContext<GaussRat> ctx(2);
    const FiberOperator<GaussRat> up(ctx.clifford_matrix(ctx.e_plus(0)), 0, 1);
    const FiberOperator<GaussRat> down(ctx.clifford_matrix(ctx.e_minus(0)), 1, 0);
    const auto both = down * up;
    EXPECT_EQ(both.domain(), 0);
    EXPECT_EQ(both.codomain(), 0);
    EXPECT_EQ(up.adjoint().domain(), 1);
    EXPECT_TRUE(up(ctx.basis_spinor(3)).is_zero());
}

TEST(FiberSuite, ExactPassesForSmallDimensions)
{
    Rng rng(1);
    for (int m = 1; m <= 4; ++m) EXPECT_TRUE(AllPass(fiber_suite(FiberContext<GaussRat>(m), rng))) << "m=" << m;
}

TYPED_TEST(FiberTyped, SuitePassesAtDimensionThree)
{
    Rng rng(3);
    EXPECT_TRUE(AllPass(fiber_suite(FiberContext<TypeParam>(3), rng)));
}

TYPED_TEST(FiberTyped, ContractionsRestrictToEachGrade)
{
    Rng rng(6);
    const FiberContext<TypeParam> ctx(3);
    for (int r = 0; r <= 3; ++r) EXPECT_TRUE(AllPass(contraction_suite(ctx, r, rng))) << "r=" << r;
}

TEST(FiberSuite, ChecksCarryEquationTags)
{
    Rng rng(1);
    const auto rep = fiber_suite(FiberContext<GaussRat>(2), rng);
    for (const auto& c : rep.checks()) {
        EXPECT_FALSE(c.eq_tag.empty()) << c.id;
        EXPECT_TRUE(c.exact) << c.id;
        EXPECT_EQ(c.residual, 0.0) << c.id;
    }
}
