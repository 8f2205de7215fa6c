#include <kspin/suites.hpp>

#include "support.hpp"

#include <cmath>

using namespace kspin;
using namespace kspin::sphere;

TEST(Quadrature, GaussLegendreIsExactForLowDegree)
{
    const auto g = gauss_legendre(6);
    double s0 = 0.0, s2 = 0.0, s10 = 0.0;
    for (std::size_t i = 0; i < g.x.size(); ++i) {
        s0 += g.w[i];
        s2 += g.w[i] * g.x[i] * g.x[i];
        s10 += g.w[i] * std::pow(g.x[i], 10);
    }
    EXPECT_NEAR(s0, 2.0, 1e-14);
    EXPECT_NEAR(s2, 2.0 / 3.0, 1e-14);
    EXPECT_NEAR(s10, 2.0 / 11.0, 1e-13);
}

TEST(Sphere, SmallestSquaredEigenvalueIsOne)
{
    const auto sp = dirac_spectrum(16);
    EXPECT_NEAR(sp.min_square(), 1.0, 1e-8);
    EXPECT_LT(sp.hermiticity_defect, 1e-10);
    EXPECT_LT(sp.chirality_defect, 1e-10);
}

TEST(Sphere, LowLevelsAreIntegersWithGrowingMultiplicity)
{
    const auto sp = dirac_spectrum(12);
    int seen = 0;
    for (const auto& l : sp.interior()) {
        if (l.value <= 0.0 || l.rounded > 3) continue;
        EXPECT_NEAR(l.value, static_cast<double>(l.rounded), 1e-9);
        EXPECT_EQ(l.multiplicity, 2 * l.rounded) << l.rounded;
        ++seen;
    }
    EXPECT_EQ(seen, 3);
}

TEST(Sphere, RefinementLeavesLowLevelsUnchanged)
{
    const auto a = dirac_spectrum(8);
    const auto b = dirac_spectrum(12);
    for (int k = 1; k <= 3; ++k) {
        double va = 0.0, vb = 0.0;
        for (const auto& l : a.levels)
            if (l.rounded == k) va = l.value;
        for (const auto& l : b.levels)
            if (l.rounded == k) vb = l.value;
        EXPECT_LT(std::abs(va - vb), 1e-9) << k;
    }
}

TEST(Sphere, KillingSpaceIsTwoDimensional)
{
    const auto basis = build_sphere(10);
    const auto sp = dirac_spectrum(basis);
    const auto k = killing_spinor_space(basis, sp);
    EXPECT_EQ(k.dimension, 2);
    EXPECT_LT(k.residual, 1e-6);
    EXPECT_GT(k.opposite_residual, 1e-3);
}

TEST(Sphere, CollocationMatchesGalerkin)
{
    const auto col = collocation_spectrum(12);
    ASSERT_FALSE(col.empty());
    double best = 1e9;
    for (double v : col) best = std::min(best, v * v);
    EXPECT_NEAR(best, 1.0, 1e-8);
}

TEST(SphereSuite, PassesAtOrderSixteen)
{
    json summary;
    EXPECT_TRUE(AllPass(sphere_suite(16, 1e-8, &summary)));
    EXPECT_EQ(summary["killing_dimension"], 2);
    EXPECT_TRUE(summary["kirchberg_equality"].get<bool>());
    EXPECT_NEAR(summary["min_lambda_squared"].get<double>(), 1.0, 1e-8);
}
