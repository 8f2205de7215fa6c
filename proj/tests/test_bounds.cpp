#include <kspin/suites.hpp>

#include "support.hpp"

using namespace kspin;

TEST(Bounds, ClosedFormValues)
{
    EXPECT_EQ(friedrich_bound(2, rat(2)), rat(1));
    EXPECT_EQ(friedrich_bound(6, rat(2)), rat(3, 5));
    EXPECT_EQ(kirchberg_bound(1, rat(2)), rat(1));
    EXPECT_EQ(kirchberg_bound(3, rat(2)), rat(2, 3));
    EXPECT_EQ(kirchberg_bound(2, rat(2)), rat(1));
    EXPECT_EQ(kirchberg_bound(4, rat(2)), rat(2, 3));
    EXPECT_EQ(sigma_r_bound(7, 3, rat(2)), rat(4, 7));
    EXPECT_EQ(lemma26_bound(rat(2), rat(4)), rat(2));
}

TEST(Bounds, SigmaBoundMeetsKirchbergAtNearMiddleGrade)
{
    for (int m = 1; m <= 15; m += 2) {
        const int r = (m - 1) / 2;
        EXPECT_EQ(sigma_r_bound(m, r, rat(3)), kirchberg_bound(m, rat(3))) << m;
        EXPECT_EQ(sigma_r_bound(m, m - r, rat(3)), kirchberg_bound(m, rat(3))) << m;
        for (int q = 0; q <= m; ++q)
            if (q != r && q != m - r) {
                EXPECT_GT(sigma_r_bound(m, q, rat(3)), kirchberg_bound(m, rat(3))) << m << "," << q;
            }
    }
}

TEST(Bounds, RejectsInvalidArguments)
{
    EXPECT_THROW(friedrich_bound(1, rat(1)), domain_error);
    EXPECT_THROW(kirchberg_bound(3, rat(0)), error);
    EXPECT_THROW(sigma_r_bound(3, 4, rat(1)), error);
    EXPECT_THROW(evaluate(BoundQuery{4, {}, rat(1), BoundVariant::kirchberg_odd}), domain_error);
    EXPECT_THROW(weitzenboeck_inversion(4, 2), domain_error);
    EXPECT_THROW(middle_eigenvalue(3, rat(1)), domain_error);
}

TEST(Inversion, FourfoldGradeOne)
{
    const auto inv = weitzenboeck_inversion(4, 1);
    EXPECT_EQ(inv.dplus_dminus.d2, rat(-6));
    EXPECT_EQ(inv.dplus_dminus.s, rat(2));
    EXPECT_EQ(inv.dminus_dplus.d2, rat(7));
    EXPECT_EQ(inv.dminus_dplus.s, rat(-2));
}

TEST(Inversion, SolverMatchesClosedFormsAndCrossRelations)
{
    for (int m = 1; m <= 12; ++m)
        for (int r = 0; r <= m; ++r) {
            if (2 * r == m) continue;
            const auto inv = weitzenboeck_inversion(m, r);
            EXPECT_EQ(inv.dminus_dplus, printed_inversion(m, r).dminus_dplus) << m << "," << r;
            EXPECT_EQ(inv.dplus_dminus, printed_inversion(m, r).dplus_dminus) << m << "," << r;
            EXPECT_TRUE(cross_relations_hold(m, r, inv)) << m << "," << r;
        }
}

TEST(KahlerEinstein, EigenvalueDerivationIsConsistent)
{
    for (int m = 1; m <= 10; ++m)
        for (int r = 0; r <= m; ++r) EXPECT_TRUE(ke_eigenvalue(m, r, rat(5)).consistent) << m << "," << r;
    EXPECT_EQ(ke_eigenvalue(3, 1, rat(2)).value, rat(2, 3));
}

TEST(KahlerEinstein, AdmissibleGrades)
{
    EXPECT_EQ(ke_admissible_r(5), (std::vector<int>{0, 2}));
    EXPECT_EQ(ke_admissible_r(4), (std::vector<int>{0, 2}));
    EXPECT_EQ(ke_nonextremal_r(7), 3);
    EXPECT_FALSE(ke_nonextremal_r(6).has_value());
}

TEST(Middle, EigenvalueBelowKirchbergForEvenDimensions)
{
    for (int m = 2; m <= 12; m += 2) {
        const auto v = middle_eigenvalue(m, rat(2));
        EXPECT_TRUE(v.below_kirchberg) << m;
        EXPECT_EQ(v.verdict, "trivial-only");
    }
    EXPECT_EQ(middle_eigenvalue(4, rat(0)).verdict, "parallel");
}

TEST(Eigendata, RicciSpectrumOfSpecialSpinors)
{
    const auto e = ricci_eigendata(5, 1, rat(6), SpinorKind::anti_holomorphic);
    EXPECT_EQ(e.multiplicity_of(rat(1)), 6);
    EXPECT_EQ(e.multiplicity_of(rat(0)), 4);
    EXPECT_EQ(e.total_multiplicity(), 10);
    EXPECT_EQ(e.trace, rat(6));
    EXPECT_THROW(ricci_eigendata(4, 2, rat(1), SpinorKind::anti_holomorphic), domain_error);
    EXPECT_THROW(ricci_eigendata(4, 1, rat(1), SpinorKind::holomorphic), domain_error);
}

TEST(Eigendata, NewtonRecoveryRoundTrips)
{
    for (int m = 2; m <= 6; ++m)
        for (int r = 1; 2 * r <= m - 1; ++r) {
            const auto e = ricci_eigendata(m, r, rat(2), SpinorKind::anti_holomorphic);
            const auto back = newton_recover(power_sums(e, 2 * m));
            EXPECT_EQ(back.eigenvalues, e.eigenvalues) << m << "," << r;
        }
}

TEST(Eigendata, NewtonRejectsOddLength)
{
    EXPECT_THROW(newton_recover({rat(1), rat(1), rat(1)}), domain_error);
}

TEST(Classification, SevenfoldGradeTwoSplitsAsFivePlusTwo)
{
    const auto c = classify(7, 2, SpinorKind::anti_holomorphic);
    EXPECT_EQ(c.ke_dim, 5);
    EXPECT_EQ(c.flat_dim, 2);
    EXPECT_EQ(c.ke_scalar_ratio, rat(1, 10));
    const auto h = classify(7, 5, SpinorKind::holomorphic);
    EXPECT_EQ(h.ke_dim, 5);
    EXPECT_EQ(h.flat_dim, 2);
}

TEST(Classification, KillingDimensions)
{
    EXPECT_EQ(killing_dim(1), 2);
    EXPECT_EQ(killing_dim(3), 6);
    EXPECT_EQ(killing_dim(5), 20);
    EXPECT_THROW(killing_dim(2), domain_error);
}

TEST(DimensionBound, SumOfNeighbouringBinomials)
{
    EXPECT_EQ(dim_bound(4, 1), 11);
    EXPECT_EQ(dim_bound(3, 0), 4);
    EXPECT_EQ(dim_bound(2, 1), 4);
}

TEST(BoundsSuite, GridUpToFifteenPasses)
{
    json table;
    const auto rep = bounds_suite(15, rat(2), &table);
    EXPECT_TRUE(AllPass(rep));
    ASSERT_EQ(table.size(), 15u);
    for (const auto& row : table)
        if (row["m"].get<int>() % 2 == 1) {
            EXPECT_TRUE(row["equality"].get<bool>()) << row.dump();
        }
}
