#include <kspin/kspin.hpp>

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

using kspin::json;

struct RunConfig {
    std::string subcommand;
    int m = 2;
    std::optional<int> r;
    int band = 1;
    int order = 16;
    std::string scalar_curvature = "2";
    std::uint64_t seed = 1;
    std::string mode = "exact";
    std::optional<double> tol;
    std::string format = "table";
    std::string out;
    bool connections = false;

    double tolerance() const { return tol.value_or(mode == "exact" ? 0.0 : 1e-9); }

    json to_json() const
    {
        json j{{"m", m}, {"band", band}, {"seed", seed}, {"mode", mode}, {"tolerance", tolerance()}, {"format", format}};
        if (r) j["r"] = *r;
        if (subcommand == "sphere") j = json{{"order", order}, {"tolerance", tol.value_or(1e-8)}, {"format", format}};
        if (subcommand == "bounds") j = json{{"m", m}, {"scalar_curvature", scalar_curvature}, {"format", format}};
        if (subcommand == "verify-identities" || subcommand == "twistor-kernel") j["connections"] = connections;
        return j;
    }
};

kspin::Rational parse_rational(const std::string& s)
{
    const auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return kspin::rat(std::stoll(s));
        return kspin::rat(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
    } catch (const std::exception&) {
        throw kspin::parameter_error("--scalar-curvature expects an integer or a fraction p/q, got '" + s + "'");
    }
}

void validate(const RunConfig& c)
{
    if (c.m < 1 || c.m > 8) throw kspin::size_error("m must satisfy 1 <= m <= 8, got " + std::to_string(c.m));
    if (c.r && (*c.r < 0 || *c.r > c.m)) throw kspin::domain_error("r must satisfy 0 <= r <= m");
    if (c.band < 0 || c.band > 3) throw kspin::band_error("band must satisfy 0 <= band <= 3");
    if (c.tol && !(*c.tol > 0.0)) throw kspin::parameter_error("--tol must be positive");
    if (c.connections) {
        if (!c.r) throw kspin::parameter_error("--connections needs --r");
        kspin::check_connection_params(c.m, *c.r);
    }
}

template <kspin::Scalar T>
kspin::Report verify_identities(const RunConfig& c, json& summary)
{
    kspin::Rng rng(c.seed);
    const double tol = c.tolerance();
    const kspin::FiberContext<T> ctx(c.m);
    kspin::Report rep = kspin::fiber_suite(ctx, rng, 3, tol);
    rep.merge(kspin::torus_suite(ctx, c.band, 2 * (c.m + 1), rng, tol));
    const int r = c.r.value_or(c.m / 2);
    kspin::TwistorSuiteOptions opt{c.band, c.band, c.connections, tol};
    rep.merge(kspin::twistor_suite(ctx, r, opt, rng, &summary));
    if (r > 0 && r < c.m) rep.merge(kspin::prop43_torus_suite(ctx, r, tol));
    if (c.m <= 4)
        for (int m1 = 1; m1 < c.m; ++m1) rep.merge(kspin::product_suite<T>(m1, c.m - m1, rng, 2, tol));
    return rep;
}

template <kspin::Scalar T>
kspin::Report twistor_kernel(const RunConfig& c, json& summary)
{
    const kspin::FiberContext<T> ctx(c.m);
    const int r = c.r.value_or(0);
    const double tol = c.tolerance();
    kspin::Report rep;
    const auto ker = kspin::twistor_kernel(ctx, r, c.band, tol);
    const auto bound = kspin::dim_bound(c.m, r);
    const std::string p = "kernel-m" + std::to_string(c.m) + "-r" + std::to_string(r) + "-";
    summary["kernel"] = kspin::to_json(ker);
    summary["kernel_dimension"] = ker.total_dimension;
    summary["dimension_bound"] = bound;
    rep.add_exact(p + "dimension-bound", "C4.1", static_cast<std::int64_t>(ker.total_dimension) <= bound,
                  json{{"dimension", ker.total_dimension}, {"bound", bound}});
    rep.add_exact(p + "flat-kernel-constant", "R5.2", ker.all_constant() && ker.total_dimension == static_cast<std::size_t>(kspin::binomial(c.m, r)),
                  json{{"dimension", ker.total_dimension}});
    if (2 * r == c.m) summary["note"] = "middle dimension: parallel only";
    if (kspin::connection_admissible(c.m, r)) {
        for (auto variant : {kspin::ConnectionVariant::full, kspin::ConnectionVariant::reduced}) {
            const auto conn = kspin::build_connection(ctx, kspin::TwistorParams::flat(c.m, r), variant);
            const auto par = kspin::parallel_sections(ctx, conn, c.band, tol);
            const std::string name = kspin::to_string(variant);
            summary[std::string("parallel_dimension_") + name] = par.total_dimension;
            rep.add_exact(p + "parallel-" + name + "-bijection", variant == kspin::ConnectionVariant::full ? "3.19" : "4.5",
                          par.total_dimension == ker.total_dimension, json{{"parallel", par.total_dimension}, {"kernel", ker.total_dimension}});
        }
    }
    return rep;
}

kspin::Report bounds(const RunConfig& c, json& summary)
{
    const kspin::Rational s = parse_rational(c.scalar_curvature);
    json table;
    kspin::Report rep = kspin::bounds_suite(c.m, s, &table);
    summary["table"] = std::move(table);
    json rows = json::array();
    for (int r = 1; r < c.m; ++r) {
        if (2 * r == c.m || (c.r && *c.r != r)) continue;
        const auto kind = 2 * r < c.m ? kspin::SpinorKind::anti_holomorphic : kspin::SpinorKind::holomorphic;
        rows.push_back(kspin::to_json(kspin::classify(c.m, r, kind)));
    }
    summary["classification"] = std::move(rows);
    return rep;
}

int run(RunConfig& c)
{
    json summary = json::object();
    kspin::Report rep;
    const bool exact = c.mode == "exact";
    if (c.subcommand == "verify-identities")
        rep = exact ? verify_identities<kspin::GaussRat>(c, summary) : verify_identities<kspin::Complex>(c, summary);
    else if (c.subcommand == "twistor-kernel")
        rep = exact ? twistor_kernel<kspin::GaussRat>(c, summary) : twistor_kernel<kspin::Complex>(c, summary);
    else if (c.subcommand == "bounds")
        rep = bounds(c, summary);
    else
        rep = kspin::sphere_suite(c.order, c.tol.value_or(1e-8), &summary);

    kspin::ReportEnvelope env{c.subcommand, c.to_json(), std::move(rep), std::move(summary)};
    const std::string text = c.format == "json" ? kspin::render_json(env) : kspin::render_table(env);
    if (c.out.empty())
        std::cout << text;
    else {
        std::ofstream f(c.out, std::ios::binary);
        if (!f) throw kspin::parameter_error("cannot open output file " + c.out);
        f << text;
    }
    return env.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Kählerian twistor spinor verification toolkit"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--seed", cfg.seed, "random seed");
        sub->add_option("--mode", cfg.mode, "arithmetic mode")->check(CLI::IsMember({"exact", "float"}));
        sub->add_option("--tol", cfg.tol, "tolerance for floating checks");
        sub->add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"table", "json"}));
        sub->add_option("--out", cfg.out, "output path");
    };
    auto* verify = app.add_subcommand("verify-identities", "run the exact identity suites");
    auto* kernel = app.add_subcommand("twistor-kernel", "twistor kernel and parallel sections");
    auto* bnd = app.add_subcommand("bounds", "eigenvalue bounds and classification tables");
    auto* sph = app.add_subcommand("sphere", "round sphere spectrum and Killing spinors");
    for (auto* sub : {verify, kernel}) {
        sub->add_option("--m", cfg.m, "complex dimension");
        sub->add_option("--r", cfg.r, "grade");
        sub->add_option("--band", cfg.band, "Fourier band");
        sub->add_flag("--connections", cfg.connections, "also check the twistor connections");
        common(sub);
    }
    bnd->add_option("--m", cfg.m, "largest complex dimension of the grid");
    bnd->add_option("--r", cfg.r, "grade for the classification row");
    bnd->add_option("--scalar-curvature", cfg.scalar_curvature, "scalar curvature (integer or p/q)");
    common(bnd);
    sph->add_option("--order", cfg.order, "truncation order L")->check(CLI::Range(2, 64));
    common(sph);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    cfg.subcommand = app.get_subcommands().front()->get_name();
    if (cfg.subcommand == "bounds" && bnd->count("--m") == 0) cfg.m = 7;
    try {
        if (cfg.subcommand == "bounds") {
            if (cfg.m < 1 || cfg.m > 15) throw kspin::size_error("bounds grid needs 1 <= m <= 15");
            if (!(parse_rational(cfg.scalar_curvature) > kspin::Rational(0))) throw kspin::domain_error("scalar curvature must be positive");
        } else if (cfg.subcommand != "sphere")
            validate(cfg);
        return run(cfg);
    } catch (const kspin::error& e) {
        std::cerr << "kspin: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "kspin: internal error: " << e.what() << "\n";
        return 2;
    }
}
