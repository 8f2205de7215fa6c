#pragma once

#include "bounds.hpp"
#include "curvature.hpp"
#include "error.hpp"
#include "fiber.hpp"
#include "product.hpp"
#include "report.hpp"
#include "sphere.hpp"
#include "torus.hpp"
#include "twistor.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <vector>

namespace kspin {

// Folds repeated samples of the same check into one record: pass iff every sample passed, worst residual.
class CheckAccumulator {
public:
    template <Scalar T>
    void add(const std::string& id, const std::string& tag, double residual, double tol)
    {
        Report r;
        r.add<T>(id, tag, residual, tol);
        fold(r.checks().front());
    }

    void add_exact(const std::string& id, const std::string& tag, bool pass)
    {
        Report r;
        r.add_exact(id, tag, pass);
        fold(r.checks().front());
    }

    void fold(const CheckRecord& c)
    {
        auto it = index_.find(c.id);
        if (it == index_.end()) {
            index_.emplace(c.id, records_.size());
            records_.push_back(c);
            records_.back().payload = json{{"samples", 1}};
            return;
        }
        CheckRecord& acc = records_[it->second];
        acc.pass = acc.pass && c.pass;
        acc.residual = std::max(acc.residual, c.residual);
        acc.payload["samples"] = acc.payload["samples"].get<int>() + 1;
    }

    void fold(const Report& r)
    {
        for (const auto& c : r.checks()) fold(c);
    }

    Report report() const
    {
        Report out;
        for (const auto& c : records_) {
            if (c.exact)
                out.add_exact(c.id, c.eq_tag, c.pass, c.payload);
            else
                out.add_float(c.id, c.eq_tag, c.residual, c.tolerance, c.payload);
        }
        return out;
    }

private:
    std::vector<CheckRecord> records_;
    std::map<std::string, std::size_t> index_;
};

namespace detail {

template <Scalar T>
double diff(const SpinorVector<T>& a, const SpinorVector<T>& b)
{
    return (a - b).max_abs();
}

template <Scalar T>
double diff(const Matrix<T>& a, const Matrix<T>& b)
{
    return (a - b).max_abs();
}

template <Scalar T>
double diff(const T& a, const T& b)
{
    return magnitude(a - b);
}

template <Scalar T>
SpinorVector<T> apply(const Matrix<T>& a, const SpinorVector<T>& v)
{
    return SpinorVector<T>(v.m(), a.apply(v.coeffs()));
}

template <Scalar T>
double tensor_diff(const TensorSpinor<T>& a, const TensorSpinor<T>& b)
{
    double w = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) w = std::max(w, diff(a[i], b[i]));
    return w;
}

// Spinor supported on masks inside `allowed` with the given grade.
template <Scalar T>
SpinorVector<T> random_spinor_on(const FiberContext<T>& ctx, Rng& rng, int grade, Mask allowed)
{
    SpinorVector<T> v = ctx.zero_spinor();
    for (Mask s = 0; s < ctx.dim(); ++s)
        if (grade_of(s) == grade && (s & ~allowed) == 0) v[s] = random_scalar<T>(rng);
    return v;
}

}  // namespace detail

// Pointwise ι and c on a field, mode by mode.
template <Scalar T>
TangentSpinorField<T> field_iota(const FiberContext<T>& ctx, const FourierSpinorField<T>& psi, int r, bool plus)
{
    TangentSpinorField<T> out(ctx.n(), FourierSpinorField<T>(ctx.m(), psi.band()));
    for (const auto& [k, v] : psi.modes()) {
        const auto t = plus ? iota_plus(ctx, v, r) : iota_minus(ctx, v, r);
        for (int a = 0; a < ctx.n(); ++a) out[a].add(k, t[a]);
    }
    return out;
}

template <Scalar T>
FourierSpinorField<T> field_c(const FiberContext<T>& ctx, const TangentSpinorField<T>& psi, bool plus)
{
    FourierSpinorField<T> out(ctx.m(), psi.front().band());
    for (int a = 0; a < ctx.n(); ++a) out += clifford_const(ctx, plus ? ctx.e_plus(a) : ctx.e_minus(a), psi[a]);
    return out;
}

// (jφ)^_k = j(φ̂_{-k}).
template <Scalar T>
FourierSpinorField<T> field_j(const FiberContext<T>& ctx, const FourierSpinorField<T>& phi)
{
    FourierSpinorField<T> out(ctx.m(), phi.band());
    for (const auto& [k, v] : phi.modes()) out.add(negate(k), j_map(ctx, v));
    return out;
}

template <Scalar T>
TangentSpinorField<T> operator+(TangentSpinorField<T> a, const TangentSpinorField<T>& b)
{
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    return a;
}

template <Scalar T>
TangentSpinorField<T> operator-(TangentSpinorField<T> a, const TangentSpinorField<T>& b)
{
    for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
    return a;
}

template <Scalar T>
Report fiber_suite(const FiberContext<T>& ctx, Rng& rng, int samples = 3, double tol = 1e-10)
{
    using detail::diff;
    Report rep;
    const int m = ctx.m(), n = ctx.n();
    const T i = imag_unit<T>();
    const std::string p = "fiber-m" + std::to_string(m) + "-";
    const auto id = Matrix<T>::identity(ctx.dim());

    double cliff = 0.0;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            const auto ga = ctx.gamma_matrix(a), gb = ctx.gamma_matrix(b);
            cliff = std::max(cliff, diff(ga * gb + gb * ga, T(a == b ? -2 : 0) * id));
        }
    rep.add<T>(p + "clifford-relation", "S1.1", cliff, tol);

    // Ω through its 2-form expansion against the grade-diagonal form i(2r-m).
    const Matrix<T> omega = form_matrix(ctx, kahler_form(ctx));
    double spec = diff(omega, omega_matrix(ctx));
    json spectrum = json::array();
    std::vector<int> mult(m + 1, 0);
    for (Mask s = 0; s < ctx.dim(); ++s) {
        for (Mask t = 0; t < ctx.dim(); ++t)
            if (s != t) spec = std::max(spec, magnitude(omega(t, s)));
        const int r = grade_of(s);
        spec = std::max(spec, diff(omega(s, s), scalar<T>(Rational(0), rat(2 * r - m))));
        ++mult[r];
    }
    bool mult_ok = true;
    for (int r = 0; r <= m; ++r) {
        mult_ok = mult_ok && mult[r] == binomial(m, r);
        spectrum.push_back(json{{"r", r}, {"eigenvalue", "i(" + std::to_string(2 * r - m) + ")"}, {"multiplicity", mult[r]}});
    }
    rep.add<T>(p + "kahler-form-spectrum", "1.3", spec, tol, json{{"spectrum", spectrum}});
    rep.add_exact(p + "eigenbundle-ranks", "1.3", mult_ok);

    double vol = 0.0;
    const auto v = volume_matrix(ctx);
    for (Mask s = 0; s < ctx.dim(); ++s) vol = std::max(vol, diff(v(s, s), T(grade_of(s) % 2 == 0 ? 1 : -1)));
    vol = std::max(vol, diff(v * v, id));
    rep.add<T>(p + "volume-form-parity", "1.1", vol, tol);

    bool shifts = true;
    for (int a = 0; a < n; ++a)
        for (Mask s = 0; s < ctx.dim(); ++s) {
            const int r = grade_of(s);
            shifts = shifts && ctx.clifford(ctx.e_plus(a), ctx.basis_spinor(s)).in_grade(r + 1) &&
                     ctx.clifford(ctx.e_minus(a), ctx.basis_spinor(s)).in_grade(r - 1);
        }
    rep.add_exact(p + "grade-shifts", "1.8", shifts);

    // ι/c duality, norm factors and adjointness.
    double dual = 0.0, cross = 0.0, norms = 0.0, adj = 0.0, proj = 0.0;
    for (int r = 0; r <= m; ++r)
        for (int t = 0; t < samples; ++t) {
            TensorSpinor<T> psi;
            for (int a = 0; a < n; ++a) psi.push_back(random_spinor(ctx, rng, r));
            if (r < m) {
                const auto up = random_spinor(ctx, rng, r + 1);
                const auto iu = iota_plus(ctx, up, r);
                dual = std::max(dual, diff(c_plus(ctx, iu, r), up));
                if (r > 0) cross = std::max(cross, c_minus(ctx, iu, r).max_abs());
                norms = std::max(norms, diff(norm2(iu), scalar<T>(1, 2 * (r + 1)) * norm2(up)));
                T lhs{};
                for (int a = 0; a < n; ++a) lhs += inner(iu[a], psi[a]);
                adj = std::max(adj, diff(lhs, scalar<T>(1, 2 * (r + 1)) * inner(up, c_plus(ctx, psi, r))));
            }
            if (r > 0) {
                const auto dn = random_spinor(ctx, rng, r - 1);
                const auto id_ = iota_minus(ctx, dn, r);
                dual = std::max(dual, diff(c_minus(ctx, id_, r), dn));
                if (r < m) cross = std::max(cross, c_plus(ctx, id_, r).max_abs());
                norms = std::max(norms, diff(norm2(id_), scalar<T>(1, 2 * (m - r + 1)) * norm2(dn)));
                T lhs{};
                for (int a = 0; a < n; ++a) lhs += inner(id_[a], psi[a]);
                adj = std::max(adj, diff(lhs, scalar<T>(1, 2 * (m - r + 1)) * inner(dn, c_minus(ctx, psi, r))));
            }
            // The Cartan projection kills both contractions and is idempotent.
            const auto pr = twistor_project_fiber(ctx, psi, r);
            if (r < m) proj = std::max(proj, c_plus(ctx, pr, r).max_abs());
            if (r > 0) proj = std::max(proj, c_minus(ctx, pr, r).max_abs());
            proj = std::max(proj, detail::tensor_diff(twistor_project_fiber(ctx, pr, r), pr));
        }
    rep.add<T>(p + "iota-c-duality", "L2.5", dual, tol);
    rep.add<T>(p + "iota-c-cross-vanish", "L2.5", cross, tol);
    rep.add<T>(p + "iota-norm-factors", "L2.5", norms, tol);
    rep.add<T>(p + "iota-c-adjoint", "L2.5", adj, tol);
    rep.add<T>(p + "cartan-projection", "2.3", proj, tol);

    bool cartan_rank = true;
    json ranks = json::array();
    for (int r = 0; r <= m; ++r) {
        const std::int64_t expect = n * binomial(m, r) - binomial(m, r + 1) - (r > 0 ? binomial(m, r - 1) : 0);
        const T tr = twistor_projector_matrix(ctx, r).trace();
        cartan_rank = cartan_rank && diff(tr, T(expect)) <= (scalar_traits<T>::exact ? 0.0 : tol);
        ranks.push_back(json{{"r", r}, {"cartan_rank", expect}});
    }
    rep.add_exact(p + "cartan-summand-rank", "2.3", cartan_rank, json{{"ranks", ranks}});

    double jsq = 0.0, jz = 0.0, janti = 0.0;
    bool jgrade = true;
    const T jsign((m * (m + 1) / 2) % 2 == 0 ? 1 : -1);
    for (int t = 0; t < samples; ++t) {
        const auto phi = random_spinor(ctx, rng);
        const auto psi = random_spinor(ctx, rng);
        const T z = random_scalar<T>(rng);
        jsq = std::max(jsq, diff(j_map(ctx, j_map(ctx, phi)), jsign * phi));
        janti = std::max(janti, diff(j_map(ctx, z * phi + psi), conj(z) * j_map(ctx, phi) + j_map(ctx, psi)));
        auto zv = random_tangent(ctx, rng, false);
        auto zb = zv;
        for (auto& c : zb) c = conj(c);
        jz = std::max(jz, diff(j_map(ctx, ctx.clifford(zv, phi)), ctx.clifford(zb, j_map(ctx, phi))));
        for (int r = 0; r <= m; ++r) jgrade = jgrade && j_map(ctx, random_spinor(ctx, rng, r)).in_grade(m - r);
    }
    rep.add<T>(p + "j-square", "S1.1", jsq, tol, json{{"sign", (m * (m + 1) / 2) % 2 == 0 ? 1 : -1}});
    rep.add<T>(p + "j-antilinear", "S1.1", janti, tol);
    rep.add<T>(p + "j-clifford-conjugate", "S1.1", jz, tol);
    rep.add_exact(p + "j-grade-reversal", "S1.1", jgrade);

    // Contractions on each Σ_r.
    double c41 = 0.0;
    for (int r = 0; r <= m; ++r) {
        Matrix<T> pp(ctx.dim(), ctx.dim()), mm(ctx.dim(), ctx.dim());
        for (int a = 0; a < n; ++a) {
            pp += ctx.clifford_matrix(ctx.e_plus(a)) * ctx.clifford_matrix(ctx.e_minus(a));
            mm += ctx.clifford_matrix(ctx.e_minus(a)) * ctx.clifford_matrix(ctx.e_plus(a));
        }
        const auto pr = ctx.grade_projector(r);
        c41 = std::max({c41, diff(pp * pr, T(-2 * r) * pr), diff(mm * pr, T(-2 * (m - r)) * pr)});
    }
    rep.add<T>(p + "contraction-plus-minus", "4.1", c41, tol);

    double c42a = 0.0, c42b = 0.0, c43a = 0.0, c43b = 0.0;
    for (int t = 0; t < std::max(1, samples - 1); ++t) {
        const KahlerCurvature curv = random_curvature<T>(m, rng);
        const RicciModel ric = curv.ricci();
        const Matrix<T> rho = form_matrix(ctx, ricci_form(ctx, ric));
        const auto y = random_tangent(ctx, rng, false);
        const auto ry = ctx.clifford_matrix(ric.apply<T>(y));
        const auto jry = ctx.clifford_matrix(ctx.J(ric.apply<T>(y)));
        c42a = std::max(c42a, diff(curvature_contraction(ctx, curv, y), scalar<T>(1, 2) * ry));
        c42b = std::max(c42b, diff(curvature_contraction_minus(ctx, curv, y), scalar<T>(1, 4) * (ry + i * jry)));
        Matrix<T> s1(ctx.dim(), ctx.dim()), s2(ctx.dim(), ctx.dim());
        for (int a = 0; a < n; ++a) {
            s1 += ctx.gamma_matrix(a) * ctx.clifford_matrix(ric.apply<T>(ctx.basis_vector(a)));
            s2 += ctx.clifford_matrix(ctx.e_minus(a)) * ctx.clifford_matrix(ric.apply<T>(ctx.e_plus(a)));
        }
        const T s = scalar<T>(ric.scalar_curvature());
        c43a = std::max(c43a, diff(s1, -s * id));
        c43b = std::max(c43b, diff(s2, -(scalar<T>(1, 2) * s) * id - i * rho));
    }
    rep.add<T>(p + "curvature-contraction", "4.2", c42a, tol);
    rep.add<T>(p + "curvature-contraction-minus", "4.2", c42b, tol, json{{"rho_of_Y", "J Ric(Y)"}});
    rep.add<T>(p + "ricci-contraction", "4.3", c43a, tol);
    rep.add<T>(p + "ricci-contraction-minus", "4.3", c43b, tol);

    // Powers of the Ricci form on a block Ricci tensor with eigenvalue K on 2(2r+1) directions.
    for (int r = 0; 2 * r + 1 <= m; ++r) {
        const Rational k = rat(3, 2 * (2 * r + 1));
        const RicciModel ric = RicciModel::from_blocks(m, {{k, 2 * (2 * r + 1)}, {Rational(0), 2 * (m - 2 * r - 1)}});
        const Mask block = static_cast<Mask>((Mask{1} << (2 * r + 1)) - 1);
        double tr = 0.0, bs = 0.0, cs = 0.0;
        Rational ks(1);
        for (int s = 1; s <= 4; ++s) {
            ks *= k;
            tr = std::max(tr, to_double(ric.power(s).scalar_curvature() - Rational(2 * (2 * r + 1)) * ks) != 0.0 ? 1.0 : 0.0);
            const auto rho_s = build_rho_s(ctx, ric, s);
            const auto phi = detail::random_spinor_on(ctx, rng, r, block);
            const auto phip = detail::random_spinor_on(ctx, rng, r + 1, block);
            bs = std::max(bs, diff(i * detail::apply(rho_s, phi), scalar<T>(ks) * phi));
            cs = std::max(cs, diff(i * detail::apply(rho_s, phip), -scalar<T>(ks) * phip));
        }
        const auto phi = detail::random_spinor_on(ctx, rng, r, block);
        const bool s0 = diff(i * detail::apply(build_rho_s(ctx, ric, 0), phi), T(m - 2 * r) * phi) <= (scalar_traits<T>::exact ? 0.0 : tol);
        const std::string q = p + "r" + std::to_string(r) + "-";
        rep.add_exact(q + "ricci-power-trace", "L5.7", tr == 0.0, json{{"K", to_string(k)}, {"powers", "1..4"}});
        rep.add<T>(q + "ricci-form-power-action", "L5.7", bs, tol);
        rep.add<T>(q + "ricci-form-power-action-plus", "L5.7", cs, tol);
        rep.add_exact(q + "ricci-form-power-zero", "L5.7", s0, json{{"i_rho_0", std::to_string(m - 2 * r)}, {"note", "rho_0 is the Kaehler form"}});
    }
    return rep;
}

// Contractions restricted to Σ_r for one random Kähler curvature tensor.
template <Scalar T>
Report contraction_suite(const FiberContext<T>& ctx, int r, Rng& rng, double tol = 1e-10)
{
    using detail::diff;
    ctx.check_grade(r);
    Report rep;
    const int m = ctx.m(), n = ctx.n();
    const T i = imag_unit<T>();
    const std::string p = "contraction-m" + std::to_string(m) + "-r" + std::to_string(r) + "-";
    const auto pr = ctx.grade_projector(r);
    Matrix<T> pp(ctx.dim(), ctx.dim()), mm(ctx.dim(), ctx.dim()), s1(ctx.dim(), ctx.dim()), s2(ctx.dim(), ctx.dim());
    const KahlerCurvature curv = random_curvature<T>(m, rng);
    const RicciModel ric = curv.ricci();
    for (int a = 0; a < n; ++a) {
        pp += ctx.clifford_matrix(ctx.e_plus(a)) * ctx.clifford_matrix(ctx.e_minus(a));
        mm += ctx.clifford_matrix(ctx.e_minus(a)) * ctx.clifford_matrix(ctx.e_plus(a));
        s1 += ctx.gamma_matrix(a) * ctx.clifford_matrix(ric.apply<T>(ctx.basis_vector(a)));
        s2 += ctx.clifford_matrix(ctx.e_minus(a)) * ctx.clifford_matrix(ric.apply<T>(ctx.e_plus(a)));
    }
    rep.add<T>(p + "plus-minus", "4.1", std::max(diff(pp * pr, T(-2 * r) * pr), diff(mm * pr, T(-2 * (m - r)) * pr)), tol);
    const auto y = random_tangent(ctx, rng, false);
    const auto ry = ctx.clifford_matrix(ric.apply<T>(y));
    const auto jry = ctx.clifford_matrix(ctx.J(ric.apply<T>(y)));
    rep.add<T>(p + "curvature", "4.2",
               std::max(diff(curvature_contraction(ctx, curv, y) * pr, scalar<T>(1, 2) * ry * pr),
                        diff(curvature_contraction_minus(ctx, curv, y) * pr, scalar<T>(1, 4) * (ry + i * jry) * pr)),
               tol);
    const T s = scalar<T>(ric.scalar_curvature());
    const Matrix<T> rho = form_matrix(ctx, ricci_form(ctx, ric));
    rep.add<T>(p + "ricci", "4.3", std::max(diff(s1 * pr, -s * pr), diff(s2 * pr, (-(scalar<T>(1, 2) * s)) * pr - i * rho * pr)), tol);
    return rep;
}

template <Scalar T>
Report weitzenboeck_check(const FiberContext<T>& ctx, const FourierSpinorField<T>& phi, int r, double tol = 1e-9)
{
    Report rep;
    rep.add<T>("weitzenboeck-m" + std::to_string(ctx.m()) + "-r" + std::to_string(r), "2.7", weitzenboeck_residual(ctx, phi, r).max_abs(), tol);
    return rep;
}

// Operator identities on random torus fields of every grade.
template <Scalar T>
Report torus_suite(const FiberContext<T>& ctx, int band, int fields, Rng& rng, double tol = 1e-9)
{
    CheckAccumulator acc;
    const int m = ctx.m(), n = ctx.n();
    const T i = imag_unit<T>();
    const std::string p = "torus-m" + std::to_string(m) + "-";
    auto res = [](const FourierSpinorField<T>& f) { return f.max_abs(); };
    auto tres = [](const TangentSpinorField<T>& f) { return max_abs(f); };
    for (int t = 0; t < fields; ++t) {
        const int r = t % (m + 1);
        const int cap = band + 2;
        const auto phi = random_field(ctx, band, cap, r, 3, rng);
        const auto psi = random_field(ctx, band, cap, r, 3, rng);
        const auto any = random_field(ctx, band, cap, -1, 3, rng);
        const auto d = apply_D(ctx, phi), dc = apply_Dc(ctx, phi), dp = apply_Dplus(ctx, phi), dm = apply_Dminus(ctx, phi);

        acc.add<T>(p + "dirac-split", "1.7", res(d - dp - dm), tol);
        acc.add<T>(p + "dplus-square", "1.7", res(apply_Dplus(ctx, dp)), tol);
        acc.add<T>(p + "dminus-square", "1.7", res(apply_Dminus(ctx, dm)), tol);
        acc.add<T>(p + "dirac-square-split", "1.7", res(apply_Dplus(ctx, dm) + apply_Dminus(ctx, dp) - apply_D(ctx, d)), tol);
        acc.add<T>(p + "dplus-dminus-from-dc", "1.6", res(T(2) * dp - d + i * dc) + res(T(2) * dm - d - i * dc), tol);
        acc.add<T>(p + "dc-square", "S1.2", res(apply_Dc(ctx, apply_Dc(ctx, any)) - apply_D(ctx, apply_D(ctx, any))), tol);
        acc.add<T>(p + "dc-anticommute", "S1.2", res(apply_D(ctx, apply_Dc(ctx, any)) + apply_Dc(ctx, apply_D(ctx, any))), tol);
        acc.add<T>(p + "lichnerowicz", "1.9", res(apply_D(ctx, apply_D(ctx, any)) - rough_laplacian(ctx, any)), tol);

        // Independent oracle: D² acts on the k-th mode by |k|².
        const auto d2 = apply_D(ctx, apply_D(ctx, any));
        double sym = 0.0;
        for (const auto& [k, v] : any.modes()) {
            std::int64_t k2 = 0;
            for (int c : k) k2 += static_cast<std::int64_t>(c) * c;
            sym = std::max(sym, detail::diff(d2.coefficient(k), T(k2) * v));
        }
        acc.add<T>(p + "dirac-square-symbol", "1.9", sym, tol);

        acc.add<T>(p + "dirac-self-adjoint", "1.5", magnitude(inner(apply_D(ctx, any), psi) - inner(any, apply_D(ctx, psi))), tol);
        acc.add<T>(p + "dc-self-adjoint", "S1.2", magnitude(inner(apply_Dc(ctx, any), psi) - inner(any, apply_Dc(ctx, psi))), tol);
        acc.add<T>(p + "dplus-dminus-adjoint", "1.6", magnitude(inner(apply_Dplus(ctx, any), psi) - inner(any, apply_Dminus(ctx, psi))), tol);

        bool shifts = dp.in_grade(r + 1) && dm.in_grade(r - 1);
        if (r == m) shifts = shifts && dp.is_zero();
        if (r == 0) shifts = shifts && dm.is_zero();
        acc.add_exact(p + "dirac-grade-shift", "1.8", shifts);

        // Decomposition of ∇φ, its norm identity, and the Weitzenböck formula.
        const auto grad = gradient(ctx, phi);
        const auto tw = kahlerian_twistor(ctx, phi, r);
        TangentSpinorField<T> recon = tw;
        if (r < m) recon = recon + field_iota(ctx, dp, r, true);
        if (r > 0) recon = recon + field_iota(ctx, dm, r, false);
        acc.add<T>(p + "gradient-decomposition", "2.3", tres(grad - recon), tol);
        double cres = 0.0;
        if (r < m) cres = std::max(cres, res(field_c(ctx, tw, true)));
        if (r > 0) cres = std::max(cres, res(field_c(ctx, tw, false)));
        acc.add<T>(p + "twistor-in-cartan-summand", "2.4", cres, tol);
        const T lhs = inner(grad, grad);
        const T rhs = scalar<T>(1, 2 * (r + 1)) * inner(dp, dp) + scalar<T>(1, 2 * (m - r + 1)) * inner(dm, dm) + inner(tw, tw);
        acc.add<T>(p + "gradient-norm-identity", "L2.5", magnitude(lhs - rhs), tol);
        acc.add<T>(p + "weitzenboeck", "2.7", res(weitzenboeck_residual(ctx, phi, r)), tol);
        acc.add<T>(p + "riemannian-twistor-traceless", "2.1", res(contraction(ctx, riemannian_twistor(ctx, any))), tol);

        // j exchanges grades r and m - r and intertwines D^+ with D^-.
        const auto jphi = field_j(ctx, phi);
        acc.add<T>(p + "j-dirac-exchange", "2.6", res(field_j(ctx, dm) - apply_Dplus(ctx, jphi)) + res(field_j(ctx, dp) - apply_Dminus(ctx, jphi)), tol);
        const auto tj = kahlerian_twistor(ctx, jphi, m - r);
        double jt = 0.0;
        for (int a = 0; a < n; ++a) jt = std::max(jt, res(tj[a] - field_j(ctx, tw[a])));
        acc.add<T>(p + "j-twistor-equivariance", "2.6", jt, tol);

        // Commutator rules with a trigonometric vector field.
        const auto x = random_vector_field(ctx, 1, 2, rng);
        acc.fold(commutator_suite(ctx, x, any, random_ricci(m, rng), tol));
    }
    Report out;
    const Report folded = acc.report();
    for (const auto& c : folded.checks()) {
        CheckRecord rec = c;
        if (rec.id.rfind(p, 0) != 0) rec.id = p + rec.id;
        if (rec.exact)
            out.add_exact(rec.id, rec.eq_tag, rec.pass, rec.payload);
        else
            out.add_float(rec.id, rec.eq_tag, rec.residual, rec.tolerance, rec.payload);
    }
    return out;
}

struct TwistorSuiteOptions {
    int band = 1;
    int connection_band = 1;
    bool connections = false;
    double tol = 1e-9;
};

template <Scalar T>
Report twistor_suite(const FiberContext<T>& ctx, int r, const TwistorSuiteOptions& opt, Rng& rng, json* summary = nullptr)
{
    ctx.check_grade(r);
    if (opt.connections) check_connection_params(ctx.m(), r);
    Report rep;
    const int m = ctx.m();
    const double tol = opt.tol;
    const std::string p = "twistor-m" + std::to_string(m) + "-r" + std::to_string(r) + "-";
    const auto ker = twistor_kernel(ctx, r, opt.band, tol);
    const auto expect = static_cast<std::size_t>(binomial(m, r));
    rep.add_exact(p + "kernel-dimension", "R5.2", ker.total_dimension == expect,
                  json{{"dimension", ker.total_dimension}, {"expected", expect}, {"band", opt.band}});
    rep.add_exact(p + "kernel-constant", "R5.2", ker.all_constant(), json{{"nonconstant_dimension", ker.nonzero_mode_dimension()}});
    const auto bound = dim_bound(m, r);
    rep.add_exact(p + "dimension-bound", "C4.1", static_cast<std::int64_t>(ker.total_dimension) <= bound,
                  json{{"dimension", ker.total_dimension}, {"bound", bound}});

    // Constant kernel elements are killed by T_r and lift to parallel sections.
    const auto basis = ctx.grade_basis(r);
    std::vector<FourierSpinorField<T>> kernel_fields;
    for (const auto& v : ker.zero_mode_basis) {
        SpinorVector<T> s = ctx.zero_spinor();
        for (std::size_t q = 0; q < basis.size(); ++q) s[basis[q]] = v[q];
        kernel_fields.push_back(single_mode(ctx, Wavevector(ctx.n(), 0), s));
    }
    double kres = 0.0;
    for (const auto& f : kernel_fields) kres = std::max(kres, max_abs(kahlerian_twistor(ctx, f, r)));
    rep.add<T>(p + "kernel-basis-annihilated", "2.5", kres, tol);

    const auto probe = random_field(ctx, 1, 1, r, 2, rng);
    bool nonconstant_rejected = probe.modes().size() == 1 && band_of(probe.modes().begin()->first) == 0;
    if (!nonconstant_rejected) {
        try {
            (void)lift_spinor(ctx, probe, r, true, tol);
        } catch (const precondition_error&) {
            nonconstant_rejected = true;
        }
    }
    rep.add_exact(p + "lift-rejects-non-twistor", "P3.2", nonconstant_rejected);

    if (summary) {
        (*summary)[p + "kernel"] = to_json(ker);
        if (2 * r == m) (*summary)[p + "middle-dimension"] = "middle dimension: parallel only";
    }

    if (!opt.connections || !connection_admissible(m, r)) return rep;

    const auto flat = TwistorParams::flat(m, r);
    const auto full = build_connection(ctx, flat, ConnectionVariant::full);
    const auto reduced = build_connection(ctx, flat, ConnectionVariant::reduced);
    const auto par_full = parallel_sections(ctx, full, opt.connection_band, tol);
    const auto par_red = parallel_sections(ctx, reduced, opt.connection_band, tol);
    rep.add_exact(p + "parallel-full-matches-kernel", "3.19", par_full.total_dimension == ker.total_dimension && par_full.all_constant(),
                  json{{"parallel_dimension", par_full.total_dimension}, {"kernel_dimension", ker.total_dimension},
                       {"band", opt.connection_band}});
    rep.add_exact(p + "parallel-reduced-matches-kernel", "4.5", par_red.total_dimension == ker.total_dimension && par_red.all_constant(),
                  json{{"parallel_dimension", par_red.total_dimension}, {"kernel_dimension", ker.total_dimension},
                       {"band", opt.connection_band}});

    double lift_res = 0.0;
    auto parallel_defect = [&](const BlockConnection<T>& conn, const StackedField<T>& psi) {
        double w = 0.0;
        for (const auto& dir : apply_connection(ctx, conn, psi))
            for (const auto& f : dir) w = std::max(w, f.max_abs());
        return w;
    };
    for (const auto& f : kernel_fields)
        lift_res = std::max({lift_res, parallel_defect(full, lift_spinor(ctx, f, r, true, tol)),
                             parallel_defect(reduced, lift_spinor(ctx, f, r, false, tol))});
    rep.add<T>(p + "lift-is-parallel", "P3.2", lift_res, tol, json{{"lifted", kernel_fields.size()}});

    // Kähler-Einstein specialization against the full connection with Ric = S/(2m).
    TwistorParams ke{m, r, Rational(2 * m), RicciModel::einstein(m, Rational(2 * m)), {}, {}};
    const auto ke_conn = build_connection(ctx, ke, ConnectionVariant::kahler_einstein);
    const auto ke_full = build_connection(ctx, ke, ConnectionVariant::full);
    double ke_res = 0.0;
    for (int a = 0; a < ctx.n(); ++a) ke_res = std::max(ke_res, detail::diff(ke_conn.coupling(a), ke_full.coupling(a)));
    rep.add<T>(p + "kahler-einstein-specialization", "3.20", ke_res, tol, json{{"scalar_curvature", to_string(ke.scalar_curvature)}});

    // Eliminating the fourth component with the D² identity reproduces the reduced connection.
    TwistorParams gen{m, r, Rational(0), random_ricci(m, rng), {}, {}};
    gen.scalar_curvature = gen.ricci.scalar_curvature();
    const auto gen_full = build_connection(ctx, gen, ConnectionVariant::full);
    const auto gen_red = build_connection(ctx, gen, ConnectionVariant::reduced);
    const auto derived = eliminate_eta(ctx, gen_full, gen);
    double red_res = 0.0;
    for (int a = 0; a < ctx.n(); ++a) red_res = std::max(red_res, detail::diff(derived.coupling(a), gen_red.coupling(a)));
    rep.add<T>(p + "reduced-from-eta-elimination", "4.4", red_res, tol, json{{"scalar_curvature", to_string(gen.scalar_curvature)}});

    if (summary) {
        (*summary)[p + "parallel-full"] = par_full.total_dimension;
        (*summary)[p + "parallel-reduced"] = par_red.total_dimension;
    }
    return rep;
}

// Anti-holomorphic identities on the constant kernel elements of the flat torus.
template <Scalar T>
Report prop43_torus_suite(const FiberContext<T>& ctx, int r, double tol = 1e-9)
{
    Report rep;
    const std::string p = "prop43-m" + std::to_string(ctx.m()) + "-r" + std::to_string(r) + "-";
    const auto ker = twistor_kernel(ctx, r, 0, tol);
    const auto basis = ctx.grade_basis(r);
    Prop43Residuals<T> res;
    for (const auto& v : ker.zero_mode_basis) {
        SpinorVector<T> s = ctx.zero_spinor();
        for (std::size_t q = 0; q < basis.size(); ++q) s[basis[q]] = v[q];
        const auto r43 = prop43_residuals(ctx, single_mode(ctx, Wavevector(ctx.n(), 0), s), r, CurvatureData{}, tol);
        for (const auto& [tag, val] : r43.entries) res.bump(tag, val);
    }
    for (const auto& [tag, val] : res.entries) rep.add<T>(p + "eq" + tag, tag, val, tol);
    return rep;
}

template <Scalar T>
Report product_suite(int m1, int m2, Rng& rng, int samples = 3, double tol = 1e-10)
{
    const ProductContext<T> pc(m1, m2);
    Report rep = product_operator_suite(pc, rng, samples, tol);
    rep.prefix("product-");
    return rep;
}

// Kernel bookkeeping on a flat product: ker T_r(M₁ × M₂) splits as Σ_k ker T_k(M₁) ⊗ ker T_{r-k}(M₂).
template <Scalar T>
Report product_kernel_suite(int m1, int m2, int band, double tol = 1e-10)
{
    Report rep;
    const ProductContext<T> pc(m1, m2);
    const std::string p = "product-m" + std::to_string(m1) + "x" + std::to_string(m2) + "-";
    for (int r = 0; r <= m1 + m2; ++r) {
        const auto total = twistor_kernel(pc.total(), r, band, tol).total_dimension;
        std::size_t split = 0;
        json parts = json::array();
        for (int k = std::max(0, r - m2); k <= std::min(r, m1); ++k) {
            const auto a = twistor_kernel(pc.first(), k, band, tol).total_dimension;
            const auto b = twistor_kernel(pc.second(), r - k, band, tol).total_dimension;
            split += a * b;
            parts.push_back(json{{"k", k}, {"first", a}, {"second", b}});
        }
        rep.add_exact(p + "r" + std::to_string(r) + "-kernel-splitting", "T5.12", total == split,
                      json{{"total", total}, {"summands", parts}, {"band", band}});
    }
    return rep;
}

// Closed-form bounds, eigenvalues, inversions and classification rows over a grid of m.
inline Report bounds_suite(int m_max, const Rational& s, json* table = nullptr, int newton_max = 6)
{
    Report rep;
    const std::string sstr = to_string(s);
    json rows = json::array();
    for (int m = 1; m <= m_max; ++m) {
        const std::string p = "bounds-m" + std::to_string(m) + "-";
        const Rational kb = kirchberg_bound(m, s);
        const Rational fb = m >= 1 ? friedrich_bound(2 * m, s) : Rational(0);
        json row{{"m", m}, {"S", sstr}, {"friedrich", to_string(fb)}, {"kirchberg", to_string(kb)}};
        rep.add_exact(p + "kirchberg-improves-friedrich", m == 1 ? "1.12" : (m % 2 ? "1.12" : "1.13"), m == 1 ? kb == fb : kb > fb,
                      json{{"friedrich", to_string(fb)}, {"kirchberg", to_string(kb)}});
        json sig = json::array();
        bool symmetric = true, ratio = true;
        for (int r = 0; r <= m; ++r) {
            const Rational b = sigma_r_bound(m, r, s);
            sig.push_back(to_string(b));
            symmetric = symmetric && b == sigma_r_bound(m, m - r, s);
            const int k = 2 * r <= m ? 2 * (r + 1) : 2 * (m - r + 1);
            ratio = ratio && b == lemma26_bound(Rational(k), s);
        }
        row["sigma_r"] = sig;
        rep.add_exact(p + "sigma-r-symmetric", "2.11", symmetric);
        rep.add_exact(p + "sigma-r-from-ratio-bound", "L2.6", ratio);
        if (m % 2 == 1) {
            const int r = (m - 1) / 2;
            const bool eq = sigma_r_bound(m, r, s) == kb;
            row["equality_r"] = r;
            row["equality"] = eq;
            rep.add_exact(p + "sigma-r-kirchberg-equality", "2.10", eq, json{{"r", r}, {"value", to_string(kb)}});
            bool strict = true;
            for (int q = 0; q <= m; ++q)
                if (q != r && q != m - r) strict = strict && sigma_r_bound(m, q, s) > kb;
            rep.add_exact(p + "sigma-r-strict-elsewhere", "2.10", strict);
        } else {
            const auto mv = middle_eigenvalue(m, s);
            row["middle_eigenvalue"] = to_string(mv.eigenvalue);
            row["middle_verdict"] = mv.verdict;
            if (m >= 2)
                rep.add_exact(p + "middle-below-kirchberg", "S2.2", mv.below_kirchberg && mv.verdict == "trivial-only",
                              json{{"eigenvalue", to_string(mv.eigenvalue)}, {"kirchberg", to_string(mv.kirchberg)}});
        }
        // Special twistor eigenvalues coincide with the Σ_r bounds below the middle.
        bool special = true;
        for (int r = 0; 2 * r < m; ++r)
            special = special && special_eigenvalue(m, r, s, SpinorKind::anti_holomorphic) == sigma_r_bound(m, r, s) &&
                      special_eigenvalue(m, m - r, s, SpinorKind::holomorphic) == sigma_r_bound(m, m - r, s);
        rep.add_exact(p + "special-eigenvalue-attains-bound", "2.14", special);

        // Inversion of the two Weitzenböck relations.
        bool inv_ok = true, cross = true;
        json inv = json::array();
        for (int r = 0; r <= m; ++r) {
            if (2 * r == m) continue;
            const auto w = weitzenboeck_inversion(m, r);
            inv_ok = inv_ok && w.dminus_dplus == printed_inversion(m, r).dminus_dplus && w.dplus_dminus == printed_inversion(m, r).dplus_dminus;
            cross = cross && cross_relations_hold(m, r, w);
            inv.push_back(json{{"r", r},
                               {"dminus_dplus", {to_string(w.dminus_dplus.d2), to_string(w.dminus_dplus.s)}},
                               {"dplus_dminus", {to_string(w.dplus_dminus.d2), to_string(w.dplus_dminus.s)}}});
        }
        if (!inv.empty()) {
            rep.add_exact(p + "weitzenboeck-inversion", "3.10", inv_ok, json{{"rows", inv}});
            rep.add_exact(p + "weitzenboeck-cross-relations", "3.12", cross);
        }

        bool ke = true;
        for (int r = 0; r <= m; ++r) ke = ke && ke_eigenvalue(m, r, s).consistent;
        rep.add_exact(p + "ke-eigenvalue-derivation", "4.4", ke);
        std::vector<int> closed;
        closed.push_back(0);
        if (m % 2 == 1 && m >= 3) closed.push_back((m - 1) / 2);
        if (m % 2 == 0) closed.push_back(m / 2);
        std::sort(closed.begin(), closed.end());
        closed.erase(std::unique(closed.begin(), closed.end()), closed.end());
        const auto adm = ke_admissible_r(m);
        rep.add_exact(p + "ke-admissible-grades", "P5.8", adm == closed, json{{"r", adm}});

        // Ricci eigendata, trace, and recovery from power sums.
        for (int r = 1; r < m; ++r) {
            const SpinorKind kind = 2 * r < m ? SpinorKind::anti_holomorphic : SpinorKind::holomorphic;
            const bool allowed = kind == SpinorKind::anti_holomorphic ? 2 * r <= m - 1 : 2 * r >= m + 1;
            const std::string q = p + "r" + std::to_string(r) + "-";
            if (!allowed) {
                bool rejected = false;
                try {
                    (void)ricci_eigendata(m, r, s, SpinorKind::anti_holomorphic);
                } catch (const domain_error&) {
                    rejected = true;
                }
                rep.add_exact(q + "eigendata-range-rejected", "C5.4", rejected);
                continue;
            }
            const auto e = ricci_eigendata(m, r, s, kind);
            rep.add_exact(q + "eigendata-trace", "5.3", e.trace == s && e.total_multiplicity() == 2 * m, to_json(e));
            if (m <= newton_max) {
                const auto back = newton_recover(power_sums(e, 2 * m));
                rep.add_exact(q + "newton-recovery", "5.3", back.eigenvalues == e.eigenvalues, to_json(back));
            }
            rep.merge(classification_report(m, r, kind));
            const Rational w = wbf_coefficient(m, r);
            rep.add_exact(q + "weakly-bochner-flat-coefficient", "P5.18", !is_zero(w) && wbf_difference(m, r) == Rational(2) * w,
                          json{{"printed", to_string(w)}, {"derived", to_string(wbf_difference(m, r))}});
        }
        rows.push_back(std::move(row));
    }
    if (table) *table = std::move(rows);
    return rep;
}

// Round-sphere spectrum, Killing spinors and the D² identity at truncation order L.
inline Report sphere_suite(int order, double tol = 1e-8, json* summary = nullptr)
{
    Report rep;
    const std::string p = "sphere-L" + std::to_string(order) + "-";
    const auto basis = sphere::build_sphere(order);
    const auto sp = sphere::dirac_spectrum(basis);
    rep.add_float(p + "dirac-hermitian", "1.5", sp.hermiticity_defect, tol);
    rep.add_float(p + "basis-orthonormal", "S1.1", sp.gram_defect, tol);
    rep.add_float(p + "dirac-chirality", "1.1", sp.chirality_defect, tol);
    rep.add_float(p + "kahler-form-spectrum", "1.3", sp.omega_defect, tol);

    const double kb = to_double(kirchberg_bound(1, Rational(2)));
    const double sb = to_double(sigma_r_bound(1, 0, Rational(2)));
    const double lam2 = sp.min_square();
    rep.add_float(p + "min-eigenvalue-kirchberg", "1.12", std::max(std::abs(lam2 - kb), std::abs(lam2 - sb)), tol,
                  json{{"min_lambda_squared", lam2}, {"kirchberg", kb}, {"sigma_0", sb}, {"equality", std::abs(lam2 - kb) <= tol}});

    // Levels ±1, ±2, ±3 with multiplicities 2, 4, 6.
    double lv = 0.0;
    bool mult = true;
    json levels = json::array();
    for (int q = 1; q <= 3; ++q)
        for (int sign : {-1, 1}) {
            const double target = sign * q;
            const auto it = std::find_if(sp.levels.begin(), sp.levels.end(), [&](const sphere::SpectralLevel& l) { return std::abs(l.value - target) < 0.5; });
            if (it == sp.levels.end()) {
                mult = false;
                lv = 1.0;
                continue;
            }
            lv = std::max(lv, std::abs(it->value - target));
            mult = mult && it->multiplicity == 2 * q;
            levels.push_back(json{{"value", it->value}, {"multiplicity", it->multiplicity}});
        }
    rep.add_float(p + "low-levels", "E5.10", lv, tol, json{{"levels", levels}});
    rep.add_exact(p + "low-level-multiplicities", "E5.10", mult);

    const auto col = sphere::collocation_spectrum(order);
    double cdiff = col.size() == sp.pairs.size() ? 0.0 : 1.0;
    for (std::size_t k = 0; k < std::min(col.size(), sp.pairs.size()); ++k)
        if (std::abs(sp.pairs[k].value) <= 0.8 * order) cdiff = std::max(cdiff, std::abs(col[k] - sp.pairs[k].value));
    rep.add_float(p + "collocation-agreement", "E5.10", cdiff, tol);

    const auto refined = sphere::dirac_spectrum(order + 4);
    double drift = 0.0;
    const auto a = sp.interior(), b = refined.interior();
    for (const auto& l : a) {
        const auto it = std::find_if(b.begin(), b.end(), [&](const sphere::SpectralLevel& x) { return std::abs(x.value - l.value) < 0.5; });
        drift = std::max(drift, it == b.end() || it->multiplicity != l.multiplicity ? 1.0 : std::abs(it->value - l.value));
    }
    rep.add_float(p + "refinement-drift", "E5.10", drift, 1e-9, json{{"refined_order", order + 4}});

    const auto grid = sphere::default_grid();
    const auto k = sphere::killing_spinor_space(basis, sp, grid);
    rep.add_float(p + "killing-residual", "1.14", k.residual, 1e-6, json{{"lambda", k.lambda}, {"opposite_residual", k.opposite_residual}});
    rep.add_exact(p + "killing-dimension", "C5.11", k.dimension == killing_dim(1) && k.dimension == killing_dim_nonprojective,
                  json{{"dimension", k.dimension}});
    double e44 = 0.0, p43 = 0.0;
    for (const auto& v : k.basis) {
        e44 = std::max({e44, sphere::eq44_residual(basis, sp, v, 0, grid), sphere::eq44_residual(basis, sp, v, 1, grid)});
        p43 = std::max(p43, sphere::prop43_sphere(basis, sp, v, grid, 1e-6).max());
    }
    rep.add_float(p + "dirac-square-identity", "4.4", e44, 1e-6);
    rep.add_float(p + "anti-holomorphic-identities", "P4.3", p43, 1e-6);
    if (summary) {
        (*summary)["min_lambda_squared"] = lam2;
        (*summary)["killing_dimension"] = k.dimension;
        (*summary)["kirchberg_equality"] = std::abs(lam2 - kb) <= tol;
        (*summary)["refinement_drift"] = drift;
    }
    return rep;
}

}  // namespace kspin
