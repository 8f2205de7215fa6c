#include <kspin/report.hpp>

#include <gtest/gtest.h>

using namespace kspin;

namespace {

ReportEnvelope sample_envelope()
{
    Report rep;
    rep.add_exact("zeta-check", "2.7", true, json{{"dimension", 3}});
    rep.add_float("alpha-check", "1.12", 1e-12, 1e-9);
    rep.add_exact("mid-check", "S2.2", true);
    return {"verify-identities", json{{"m", 2}, {"seed", 7}}, rep, json{{"note", "x"}}};
}

}  // namespace

TEST(Report, VerdictIsConjunctionOfChecks)
{
    Report rep;
    rep.add_exact("a", "1.1", true);
    EXPECT_TRUE(rep.all_pass());
    rep.add_float("b", "1.1", 2e-9, 1e-9);
    EXPECT_FALSE(rep.all_pass());
    ASSERT_EQ(rep.failures().size(), 1u);
    EXPECT_EQ(rep.failures()[0].id, "b");
}

TEST(Report, TemplatedAddMarksExactness)
{
    Report rep;
    rep.add<GaussRat>("e", "1.1", 0.0, 1e-9);
    rep.add<Complex>("f", "1.1", 1e-12, 1e-9);
    EXPECT_TRUE(rep.checks()[0].exact);
    EXPECT_FALSE(rep.checks()[1].exact);
    EXPECT_TRUE(rep.all_pass());
    rep.add<GaussRat>("g", "1.1", 1e-30, 1.0);
    EXPECT_FALSE(rep.all_pass());
}

TEST(Report, PrefixAndMerge)
{
    Report a, b;
    a.add_exact("x", "1.1", true);
    b.add_exact("y", "1.1", true);
    a.merge(b);
    a.prefix("p-");
    EXPECT_EQ(a.size(), 2u);
    EXPECT_EQ(a.checks()[1].id, "p-y");
}

TEST(Envelope, JsonSchema)
{
    const json j = to_json(sample_envelope());
    EXPECT_EQ(j["tool"], "kspin");
    EXPECT_EQ(j["version"], tool_version);
    EXPECT_EQ(j["subcommand"], "verify-identities");
    EXPECT_EQ(j["verdict"], "pass");
    EXPECT_EQ(j["check_count"], 3);
    EXPECT_EQ(j["config"]["seed"], 7);
    const auto& checks = j["checks"];
    ASSERT_EQ(checks.size(), 3u);
    EXPECT_EQ(checks[0]["id"], "alpha-check");
    EXPECT_EQ(checks[2]["id"], "zeta-check");
    for (const auto& c : checks)
        for (const char* key : {"id", "eq_tag", "mode", "status", "residual", "payload"}) EXPECT_TRUE(c.contains(key)) << key;
    EXPECT_EQ(checks[2]["mode"], "exact");
    EXPECT_EQ(checks[2]["residual"], "0");
    EXPECT_EQ(checks[2]["eq_tag"], "2.7");
}

TEST(Envelope, RenderingIsDeterministicAndNewlineTerminated)
{
    const std::string a = render_json(sample_envelope());
    const std::string b = render_json(sample_envelope());
    EXPECT_EQ(a, b);
    ASSERT_FALSE(a.empty());
    EXPECT_EQ(a.back(), '\n');
    EXPECT_EQ(json::parse(a), to_json(sample_envelope()));
}

TEST(Envelope, FailingCheckFlipsVerdict)
{
    auto env = sample_envelope();
    env.report.add_float("beta", "3.19", 1.0, 1e-9);
    EXPECT_FALSE(env.pass());
    EXPECT_EQ(to_json(env)["verdict"], "fail");
}

TEST(Envelope, TableListsChecksAndVerdict)
{
    const std::string t = render_table(sample_envelope());
    EXPECT_NE(t.find("alpha-check"), std::string::npos);
    EXPECT_NE(t.find("(exact)"), std::string::npos);
    EXPECT_NE(t.find("verdict: pass (3 checks)"), std::string::npos);
    EXPECT_LT(t.find("alpha-check"), t.find("zeta-check"));
}
