#include <kspin/suites.hpp>

#include "support.hpp"

using namespace kspin;

TEST(TwistorKernel, ThreefoldGradeOneHasDimensionThree)
{
    const FiberContext<GaussRat> ctx(3);
    const auto ker = twistor_kernel(ctx, 1, 1);
    EXPECT_EQ(ker.total_dimension, 3u);
    EXPECT_TRUE(ker.all_constant());
    const auto conn = build_connection(ctx, TwistorParams::flat(3, 1), ConnectionVariant::full);
    EXPECT_EQ(parallel_sections(ctx, conn, 1).total_dimension, 3u);
}

TEST(TwistorKernel, MiddleDimensionSurfaceHasDimensionTwo)
{
    const FiberContext<GaussRat> ctx(2);
    const auto ker = twistor_kernel(ctx, 1, 2);
    EXPECT_EQ(ker.total_dimension, 2u);
    EXPECT_EQ(ker.nonzero_mode_dimension(), 0u);
}

TEST(TwistorKernel, FourfoldGradeOneIsBelowDimensionBound)
{
    const FiberContext<GaussRat> ctx(4);
    const auto ker = twistor_kernel(ctx, 1, 1);
    EXPECT_EQ(ker.total_dimension, 4u);
    EXPECT_EQ(dim_bound(4, 1), 11);
    EXPECT_LE(static_cast<std::int64_t>(ker.total_dimension), dim_bound(4, 1));
}

TEST(TwistorKernel, FlatKernelsAreConstantSectionsOfEachGrade)
{
    for (int m = 1; m <= 3; ++m) {
        const FiberContext<GaussRat> ctx(m);
        for (int r = 0; r <= m; ++r) {
            const auto ker = twistor_kernel(ctx, r, 1);
            EXPECT_EQ(static_cast<std::int64_t>(ker.total_dimension), binomial(m, r)) << "m=" << m << " r=" << r;
            EXPECT_TRUE(ker.all_constant());
        }
    }
}

TEST(TwistorKernel, FloatModeAgreesWithExact)
{
    const auto exact = twistor_kernel(FiberContext<GaussRat>(2), 1, 1);
    const auto approx = twistor_kernel(FiberContext<Complex>(2), 1, 1, 1e-9);
    EXPECT_EQ(exact.total_dimension, approx.total_dimension);
    EXPECT_EQ(exact.nullity, approx.nullity);
}

TEST(TwistorKernel, KernelSerializesDimensions)
{
    const auto j = to_json(twistor_kernel(FiberContext<GaussRat>(1), 0, 1));
    EXPECT_EQ(j["total_dimension"], 1);
    EXPECT_EQ(j["m"], 1);
}

TEST(Connections, MiddleGradeIsRejected)
{
    EXPECT_THROW(check_connection_params(2, 1), parameter_error);
    EXPECT_THROW(check_connection_params(4, 2), parameter_error);
    EXPECT_THROW(check_connection_params(3, 0), parameter_error);
    EXPECT_NO_THROW(check_connection_params(3, 1));
    EXPECT_FALSE(connection_admissible(2, 1));
    EXPECT_TRUE(connection_admissible(4, 1));
}

TEST(Connections, ParallelSectionsMatchKernelForAdmissibleGrades)
{
    for (auto [m, r] : {std::pair{3, 1}, std::pair{3, 2}}) {
        const FiberContext<GaussRat> ctx(m);
        const auto ker = twistor_kernel(ctx, r, 1);
        for (auto v : {ConnectionVariant::full, ConnectionVariant::reduced}) {
            const auto conn = build_connection(ctx, TwistorParams::flat(m, r), v);
            EXPECT_EQ(parallel_sections(ctx, conn, 1).total_dimension, ker.total_dimension) << to_string(v);
        }
    }
}

TEST(Connections, LiftOfKernelElementIsParallel)
{
    const FiberContext<GaussRat> ctx(3);
    const auto ker = twistor_kernel(ctx, 1, 1);
    const auto conn = build_connection(ctx, TwistorParams::flat(3, 1), ConnectionVariant::full);
    for (const auto& v : ker.zero_mode_basis) {
        SpinorVector<GaussRat> phi(3);
        const auto basis = ctx.grade_basis(1);
        for (std::size_t i = 0; i < basis.size(); ++i) phi[basis[i]] = v[i];
        EXPECT_TRUE(is_parallel(ctx, conn, lift_spinor(ctx, single_mode(ctx, Wavevector(6, 0), phi), 1)));
    }
}

TEST(TwistorSuite, SurfaceMiddleGrade)
{
    Rng rng(7);
    json summary;
    const auto rep = twistor_suite(FiberContext<GaussRat>(2), 1, TwistorSuiteOptions{}, rng, &summary);
    EXPECT_TRUE(AllPass(rep));
    EXPECT_FALSE(summary.empty());
}

TEST(TwistorSuite, ConnectionsRequestedAtMiddleGradeThrow)
{
    Rng rng(7);
    TwistorSuiteOptions opt;
    opt.connections = true;
    EXPECT_THROW(twistor_suite(FiberContext<GaussRat>(2), 1, opt, rng), parameter_error);
}

TEST(TwistorSuite, ThreefoldWithConnections)
{
    Rng rng(3);
    TwistorSuiteOptions opt;
    opt.connections = true;
    for (int r = 1; r <= 2; ++r) EXPECT_TRUE(AllPass(twistor_suite(FiberContext<GaussRat>(3), r, opt, rng))) << "r=" << r;
}

TEST(TwistorSuite, FloatModeWithConnections)
{
    Rng rng(3);
    TwistorSuiteOptions opt;
    opt.connections = true;
    EXPECT_TRUE(AllPass(twistor_suite(FiberContext<Complex>(3), 1, opt, rng)));
}

TEST(CurvatureAction, TorusIdentitiesHold)
{
    for (int m = 2; m <= 3; ++m)
        for (int r = 1; r < m; ++r) EXPECT_TRUE(AllPass(prop43_torus_suite(FiberContext<GaussRat>(m), r))) << m << "," << r;
}

TEST(Weitzenboeck, HoldsOnRandomFields)
{
    const FiberContext<GaussRat> ctx(3);
    Rng rng(10);
    for (int r = 0; r <= 3; ++r) EXPECT_TRUE(AllPass(weitzenboeck_check(ctx, random_field(ctx, 1, 2, r, 3, rng), r))) << r;
}
