#include <kspin/suites.hpp>

#include "support.hpp"

using namespace kspin;

namespace {

template <class T>
class TorusTyped : public ::testing::Test {};
using ScalarTypes = ::testing::Types<GaussRat, Complex>;
TYPED_TEST_SUITE(TorusTyped, ScalarTypes);

}  // namespace

TEST(Torus, ModeOutsideBandIsRejected)
{
    const FiberContext<GaussRat> ctx(1);
    FourierSpinorField<GaussRat> f(1, 1);
    EXPECT_THROW(f.add({2, 0}, ctx.basis_spinor(0)), band_error);
    EXPECT_THROW(f.add({1}, ctx.basis_spinor(0)), context_mismatch);
    EXPECT_THROW(FourierSpinorField<GaussRat>(1, -1), band_error);
}

TEST(Torus, CancellingModesAreDropped)
{
    const FiberContext<GaussRat> ctx(1);
    FourierSpinorField<GaussRat> f(1, 1);
    f.add({1, 0}, ctx.basis_spinor(1));
    f.add({1, 0}, GaussRat(-1) * ctx.basis_spinor(1));
    EXPECT_TRUE(f.is_zero());
}

TEST(Torus, DiracSquaredIsWavevectorNorm)
{
    const FiberContext<GaussRat> ctx(2);
    Rng rng(9);
    for (const Wavevector& k : {Wavevector{1, 0, 0, 0}, Wavevector{1, -1, 0, 1}, Wavevector{0, 2, -1, 0}}) {
        int k2 = 0;
        for (int c : k) k2 += c * c;
        const auto phi = single_mode(ctx, k, random_spinor(ctx, rng));
        EXPECT_TRUE(same(apply_D(ctx, apply_D(ctx, phi).with_band(4)), GaussRat(k2) * phi.with_band(4)));
    }
}

TEST(Torus, ConstantFieldsAreHarmonic)
{
    const FiberContext<GaussRat> ctx(2);
    Rng rng(1);
    const auto phi = single_mode(ctx, Wavevector(4, 0), random_spinor(ctx, rng));
    EXPECT_TRUE(apply_D(ctx, phi).is_zero());
    EXPECT_TRUE(apply_Dplus(ctx, phi).is_zero());
    EXPECT_TRUE(apply_Dminus(ctx, phi).is_zero());
}

TEST(Torus, HolomorphicDiracRaisesGrade)
{
    const FiberContext<GaussRat> ctx(3);
    Rng rng(2);
    const auto phi = random_field(ctx, 1, 2, 1, 3, rng);
    EXPECT_TRUE(apply_Dplus(ctx, phi).in_grade(2));
    EXPECT_TRUE(apply_Dminus(ctx, phi).in_grade(0));
}

TYPED_TEST(TorusTyped, SuitePassesForSmallDimensions)
{
    Rng rng(5);
    for (int m = 1; m <= 2; ++m) EXPECT_TRUE(AllPass(torus_suite(FiberContext<TypeParam>(m), 1, 6, rng))) << "m=" << m;
}

TEST(Torus, CommutatorIdentitiesHoldOnRandomData)
{
    const FiberContext<GaussRat> ctx(2);
    Rng rng(12);
    const auto x = random_vector_field(ctx, 1, 2, rng);
    const auto phi = random_field(ctx, 1, 3, -1, 3, rng);
    EXPECT_TRUE(AllPass(commutator_suite(ctx, x, phi, random_ricci(2, rng))));
}

TEST(Product, FirstGradeOfSurfaceTimesSurfaceHasDimensionTwo)
{
    const ProductContext<GaussRat> pc(1, 1);
    std::size_t dim = 0;
    for (int k = 0; k <= 1; ++k) dim += pc.summand_basis(k, 1).size();
    EXPECT_EQ(dim, 2u);
    EXPECT_EQ(pc.total().grade_dim(1), 2);
}

TEST(Product, TensorOfBasisSpinorsIsJoinedBasisSpinor)
{
    const ProductContext<GaussRat> pc(2, 1);
    EXPECT_EQ(pc.tensor(pc.first().basis_spinor(2), pc.second().basis_spinor(1)), pc.total().basis_spinor(2 | (1 << 2)));
}

TYPED_TEST(TorusTyped, ProductRelationsHold)
{
    Rng rng(4);
    for (auto [m1, m2] : {std::pair{1, 1}, std::pair{1, 2}, std::pair{2, 1}})
        EXPECT_TRUE(AllPass(product_suite<TypeParam>(m1, m2, rng, 2))) << m1 << "x" << m2;
}

TEST(Product, KernelSplitsOverFactors)
{
    EXPECT_TRUE(AllPass(product_kernel_suite<GaussRat>(1, 1, 1)));
    EXPECT_TRUE(AllPass(product_kernel_suite<GaussRat>(1, 2, 1)));
}
