#include <kspin/kspin.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace kspin;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int number;
    std::string title;
    double budget_s;  // 0 = none
    std::function<Outcome()> run;
};

Outcome from_report(const Report& rep, std::string extra = {})
{
    Outcome o{rep.all_pass(), std::to_string(rep.size()) + " checks"};
    if (!extra.empty()) o.detail += ", " + extra;
    for (const auto& f : rep.failures()) o.detail += "; failed " + f.id;
    return o;
}

Outcome fiber_criterion()
{
    Rng rng(1);
    Report rep;
    for (int m = 1; m <= 6; ++m) rep.merge(fiber_suite(FiberContext<GaussRat>(m), rng, 2));
    return from_report(rep);
}

Outcome torus_criterion()
{
    Rng rng(2);
    Report rep;
    const int fields[] = {34, 33, 33};
    for (int m = 1; m <= 3; ++m) rep.merge(torus_suite(FiberContext<GaussRat>(m), 2, fields[m - 1], rng));
    return from_report(rep, "100 fields, band 2");
}

Outcome kernel_criterion()
{
    Report rep;
    for (int m = 1; m <= 4; ++m) {
        const FiberContext<GaussRat> ctx(m);
        for (int r = 0; r <= m; ++r) {
            const auto ker = twistor_kernel(ctx, r, 2);
            const std::string id = "kernel-m" + std::to_string(m) + "-r" + std::to_string(r);
            rep.add_exact(id + "-dimension", "R5.2", static_cast<std::int64_t>(ker.total_dimension) == binomial(m, r));
            rep.add_exact(id + "-constant", "S2.2", ker.all_constant() && ker.nonzero_mode_dimension() == 0);
        }
    }
    return from_report(rep, "band 2");
}

Outcome connection_criterion()
{
    Report rep;
    for (int m = 1; m <= 4; ++m) {
        const FiberContext<GaussRat> ctx(m);
        const int band = m == 4 ? 1 : 2;
        for (int r = 0; r <= m; ++r) {
            if (!connection_admissible(m, r)) continue;
            const auto ker = twistor_kernel(ctx, r, band);
            for (auto v : {ConnectionVariant::full, ConnectionVariant::reduced}) {
                const auto par = parallel_sections(ctx, build_connection(ctx, TwistorParams::flat(m, r), v), band);
                rep.add_exact("parallel-m" + std::to_string(m) + "-r" + std::to_string(r) + "-" + to_string(v),
                              v == ConnectionVariant::full ? "3.19" : "4.5", par.total_dimension == ker.total_dimension);
            }
        }
    }
    return from_report(rep);
}

Outcome coefficient_criterion()
{
    Report rep = bounds_suite(15, rat(2), nullptr, 0);
    const auto inv = weitzenboeck_inversion(4, 1);
    rep.add_exact("inversion-m4-r1-printed", "3.10", inv.dplus_dminus.d2 == rat(-6) && inv.dplus_dminus.s == rat(2));
    for (int m = 1; m <= 15; m += 2)
        rep.add_exact("sigma-kirchberg-m" + std::to_string(m), "2.14",
                      sigma_r_bound(m, (m - 1) / 2, rat(2)) == kirchberg_bound(m, rat(2)));
    return from_report(rep, "m <= 15");
}

Outcome eigendata_criterion()
{
    Report rep;
    for (int m = 2; m <= 6; ++m)
        for (int r = 1; r < m; ++r) {
            if (2 * r == m) {
                bool rejected = false;
                try {
                    (void)ricci_eigendata(m, r, rat(2), SpinorKind::anti_holomorphic);
                } catch (const domain_error&) {
                    rejected = true;
                }
                rep.add_exact("reject-m" + std::to_string(m) + "-r" + std::to_string(r), "C5.4", rejected);
                continue;
            }
            const auto kind = 2 * r < m ? SpinorKind::anti_holomorphic : SpinorKind::holomorphic;
            const auto e = ricci_eigendata(m, r, rat(2), kind);
            const std::string id = "eigendata-m" + std::to_string(m) + "-r" + std::to_string(r);
            rep.add_exact(id + "-trace", "5.3", e.trace == rat(2));
            rep.add_exact(id + "-newton", "5.3", newton_recover(power_sums(e, 2 * m)).eigenvalues == e.eigenvalues);
        }
    return from_report(rep, "m <= 6");
}

Outcome sphere_criterion()
{
    json summary;
    const auto rep = sphere_suite(16, 1e-8, &summary);
    std::ostringstream extra;
    extra.precision(12);
    extra << "min lambda^2 = " << summary.value("min_lambda_squared", 0.0) << ", Killing dim " << summary.value("killing_dimension", 0);
    return from_report(rep, extra.str());
}

Outcome middle_criterion()
{
    Report rep;
    for (int m = 2; m <= 12; m += 2)
        for (const auto& s : {rat(1, 3), rat(2), rat(7)}) {
            const auto v = middle_eigenvalue(m, s);
            rep.add_exact("middle-m" + std::to_string(m) + "-S" + to_string(s), "S2.2", v.eigenvalue < kirchberg_bound(m, s));
        }
    return from_report(rep);
}

Outcome product_criterion()
{
    Rng rng(9);
    Report rep;
    for (int m1 = 1; m1 <= 3; ++m1)
        for (int m2 = 1; m1 + m2 <= 4; ++m2) {
            rep.merge(product_suite<GaussRat>(m1, m2, rng, 2));
            rep.merge(product_kernel_suite<GaussRat>(m1, m2, 1));
        }
    return from_report(rep, "m1 + m2 <= 4");
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

Outcome determinism_criterion(const std::string& cli)
{
    Report rep;
    auto twice = [&](const std::string& id, const std::function<ReportEnvelope()>& make) {
        rep.add_exact(id, "", render_json(make()) == render_json(make()));
    };
    twice("in-process-verify", [] {
        Rng rng(7);
        Report r = fiber_suite(FiberContext<GaussRat>(2), rng);
        r.merge(torus_suite(FiberContext<GaussRat>(2), 1, 6, rng));
        return ReportEnvelope{"verify-identities", json{{"m", 2}, {"seed", 7}}, r, json::object()};
    });
    twice("in-process-bounds", [] {
        json table;
        Report r = bounds_suite(7, rat(2), &table);
        return ReportEnvelope{"bounds", json{{"m", 7}}, r, json{{"table", table}}};
    });
    if (!cli.empty()) {
        const auto dir = std::filesystem::temp_directory_path() / "kspin_acceptance";
        std::filesystem::create_directories(dir);
        const std::vector<std::pair<std::string, std::string>> runs{
            {"verify", "verify-identities --m 2 --r 1 --band 1 --seed 7"},
            {"kernel", "twistor-kernel --m 3 --r 1 --band 1"},
            {"bounds", "bounds"},
            {"sphere", "sphere --order 8"},
        };
        for (const auto& [name, args] : runs) {
            std::string out[2];
            bool ok = true;
            for (int k = 0; k < 2; ++k) {
                const auto file = dir / (name + std::to_string(k) + ".json");
                const std::string cmd = "\"" + cli + "\" " + args + " --format json --out \"" + file.string() + "\"";
                ok = ok && std::system(cmd.c_str()) == 0;
                out[k] = slurp(file);
            }
            rep.add_exact("cli-" + name, "", ok && !out[0].empty() && out[0] == out[1]);
        }
    }
    return from_report(rep, cli.empty() ? "in-process only" : "in-process and CLI");
}

}  // namespace

int main(int argc, char** argv)
{
    const std::string cli = argc > 1 ? argv[1] : "";
    const std::vector<Criterion> criteria{
        {1, "fiber algebra identities, m = 1..6, exact", 30, fiber_criterion},
        {2, "torus operator identities, m <= 3, exact", 120, torus_criterion},
        {3, "twistor kernel equals parallel spinors, m <= 4", 120, kernel_criterion},
        {4, "parallel sections of both connections match the kernel", 120, connection_criterion},
        {5, "Weitzenboeck inversion, KE eigenvalue, sigma_r = Kirchberg", 0, coefficient_criterion},
        {6, "Ricci eigendata trace and Newton recovery", 0, eigendata_criterion},
        {7, "round sphere spectrum and Killing spinors at L = 16", 60, sphere_criterion},
        {8, "middle-dimension eigenvalue below Kirchberg bound", 0, middle_criterion},
        {9, "product decomposition and operator relations", 60, product_criterion},
        {10, "byte-identical JSON under re-run", 0, [&] { return determinism_criterion(cli); }},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.budget_s > 0 && secs > c.budget_s) {
            o.pass = false;
            o.detail += "; over runtime budget";
        }
        if (!o.pass) ++failed;
        std::printf("criterion %2d: %s  %s (%s, %.2f s)\n", c.number, o.pass ? "PASS" : "FAIL", c.title.c_str(), o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
