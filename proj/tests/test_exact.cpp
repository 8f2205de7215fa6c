#include <kspin/exact.hpp>
#include <kspin/matrix.hpp>

#include <gtest/gtest.h>

#include <cstdint>
#include <limits>

using namespace kspin;

TEST(Rational, ArithmeticIsExact)
{
    EXPECT_EQ(rat(1, 3) + rat(1, 6), rat(1, 2));
    EXPECT_EQ(rat(2, 4), rat(1, 2));
    EXPECT_EQ(to_string(rat(-3, 6)), "-1/2");
    EXPECT_EQ(to_string(rat(4)), "4");
    EXPECT_DOUBLE_EQ(to_double(rat(1, 4)), 0.25);
}

TEST(Rational, OverflowThrowsInsteadOfWrapping)
{
    const Rational big = rat(std::numeric_limits<std::int64_t>::max());
    EXPECT_ANY_THROW((void)(big + rat(1)));
    EXPECT_ANY_THROW((void)(big * rat(2)));
}

TEST(GaussRat, FieldOperations)
{
    const GaussRat a(rat(1), rat(2));
    const GaussRat b(rat(3), rat(-1));
    EXPECT_EQ(a * b, GaussRat(rat(5), rat(5)));
    EXPECT_EQ(a * a.conj(), GaussRat(rat(5)));
    EXPECT_EQ((a / b) * b, a);
    EXPECT_EQ(imag_unit<GaussRat>() * imag_unit<GaussRat>(), GaussRat(-1));
    EXPECT_TRUE((a - a).is_zero());
    EXPECT_EQ(a.norm(), rat(5));
}

TEST(Scalars, TraitsAgreeAcrossModes)
{
    EXPECT_TRUE(scalar_traits<GaussRat>::exact);
    EXPECT_FALSE(scalar_traits<Complex>::exact);
    EXPECT_EQ(scalar<Complex>(1, 4), Complex(0.25, 0.0));
    EXPECT_EQ(scalar<GaussRat>(rat(1, 2), rat(3)), GaussRat(rat(1, 2), rat(3)));
    EXPECT_DOUBLE_EQ(magnitude(GaussRat(rat(3), rat(4))), 5.0);
}

TEST(Random, CoefficientsStayInSmallRange)
{
    Rng rng(11);
    for (int i = 0; i < 500; ++i) {
        const Rational q = random_rational(rng);
        EXPECT_LE(std::abs(raw(q.numerator())), 9);
        EXPECT_GE(raw(q.denominator()), 1);
        EXPECT_LE(raw(q.denominator()), 9);
    }
}

TEST(Random, SeedDeterminesStream)
{
    Rng a(5), b(5);
    for (int i = 0; i < 50; ++i) EXPECT_EQ(random_scalar<GaussRat>(a), random_scalar<GaussRat>(b));
}

TEST(Nullspace, ExactRankOneMatrix)
{
    Matrix<GaussRat> a(2, 2);
    a(0, 0) = GaussRat(1);
    a(0, 1) = imag_unit<GaussRat>();
    a(1, 0) = imag_unit<GaussRat>();
    a(1, 1) = GaussRat(-1);
    EXPECT_EQ(rank(a), 1u);
    const auto ns = nullspace(a);
    ASSERT_EQ(ns.size(), 1u);
    for (std::size_t i = 0; i < 2; ++i) {
        GaussRat s{};
        for (std::size_t j = 0; j < 2; ++j) s += a(i, j) * ns[0][j];
        EXPECT_TRUE(s.is_zero());
    }
}

TEST(Nullspace, FloatAgreesWithExact)
{
    Matrix<GaussRat> e(3, 4);
    Matrix<Complex> f(3, 4);
    Rng rng(3);
    for (std::size_t j = 0; j < 4; ++j) {
        e(0, j) = random_scalar<GaussRat>(rng);
        e(1, j) = random_scalar<GaussRat>(rng);
        e(2, j) = e(0, j) + e(1, j);
    }
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 4; ++j) f(i, j) = Complex(to_double(e(i, j).re()), to_double(e(i, j).im()));
    EXPECT_EQ(nullspace(e).size(), 2u);
    EXPECT_EQ(nullspace(f, 1e-10).size(), 2u);
    EXPECT_EQ(rank(f, 1e-10), 2u);
}

TEST(Nullspace, IdentityHasTrivialKernel)
{
    EXPECT_TRUE(nullspace(Matrix<GaussRat>::identity(5)).empty());
}
