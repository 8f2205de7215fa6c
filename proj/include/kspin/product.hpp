#pragma once

#include "error.hpp"
#include "fiber.hpp"
#include "report.hpp"
#include "torus.hpp"

#include <set>
#include <utility>
#include <vector>

// Σ(M₁ × M₂) ≅ ΣM₁ ⊗ ΣM₂ realized on masks s₁ | (s₂ << m₁); tangent indices of M₁ come first.
namespace kspin {

template <Scalar T>
class ProductContext {
public:
    ProductContext(int m1, int m2) : first_(m1), second_(m2), total_(m1 + m2) {}

    const FiberContext<T>& first() const { return first_; }
    const FiberContext<T>& second() const { return second_; }
    const FiberContext<T>& total() const { return total_; }
    int m1() const { return first_.m(); }
    int m2() const { return second_.m(); }

    Mask join(Mask s1, Mask s2) const { return s1 | (s2 << m1()); }

    SpinorVector<T> tensor(const SpinorVector<T>& a, const SpinorVector<T>& b) const
    {
        first_.check_spinor(a);
        second_.check_spinor(b);
        SpinorVector<T> out(total_.m());
        for (Mask s1 = 0; s1 < first_.dim(); ++s1) {
            if (is_zero(a[s1])) continue;
            for (Mask s2 = 0; s2 < second_.dim(); ++s2)
                if (!is_zero(b[s2])) out[join(s1, s2)] = a[s1] * b[s2];
        }
        return out;
    }

    TangentVector<T> embed_first(const TangentVector<T>& x) const
    {
        first_.check_tangent(x);
        TangentVector<T> out(total_.n(), T{});
        std::copy(x.begin(), x.end(), out.begin());
        return out;
    }

    TangentVector<T> embed_second(const TangentVector<T>& x) const
    {
        second_.check_tangent(x);
        TangentVector<T> out(total_.n(), T{});
        std::copy(x.begin(), x.end(), out.begin() + first_.n());
        return out;
    }

    Wavevector join(const Wavevector& k1, const Wavevector& k2) const
    {
        Wavevector k = k1;
        k.insert(k.end(), k2.begin(), k2.end());
        return k;
    }

    // A ⊗ id and id ⊗ B on the joined basis.
    Matrix<T> lift_first(const Matrix<T>& a) const
    {
        Matrix<T> out(total_.dim(), total_.dim());
        for (Mask s2 = 0; s2 < second_.dim(); ++s2)
            for (Mask i = 0; i < first_.dim(); ++i)
                for (Mask j = 0; j < first_.dim(); ++j) out(join(i, s2), join(j, s2)) = a(i, j);
        return out;
    }

    Matrix<T> lift_second(const Matrix<T>& b) const
    {
        Matrix<T> out(total_.dim(), total_.dim());
        for (Mask s1 = 0; s1 < first_.dim(); ++s1)
            for (Mask i = 0; i < second_.dim(); ++i)
                for (Mask j = 0; j < second_.dim(); ++j) out(join(s1, i), join(s1, j)) = b(i, j);
        return out;
    }

    // Basis spinors of Σ_k M₁ ⊗ Σ_{r-k} M₂.
    std::vector<Mask> summand_basis(int k, int r) const
    {
        std::vector<Mask> out;
        if (k < 0 || k > m1() || r - k < 0 || r - k > m2()) return out;
        for (Mask s1 : first_.grade_basis(k))
            for (Mask s2 : second_.grade_basis(r - k)) out.push_back(join(s1, s2));
        return out;
    }

private:
    FiberContext<T> first_;
    FiberContext<T> second_;
    FiberContext<T> total_;
};

template <Scalar T>
FourierSpinorField<T> product_field(const ProductContext<T>& pc, const FourierSpinorField<T>& a, const FourierSpinorField<T>& b)
{
    if (a.m() != pc.m1() || b.m() != pc.m2()) throw context_mismatch("product factors do not match the product context");
    FourierSpinorField<T> out(pc.total().m(), std::max(a.band(), b.band()));
    for (const auto& [k1, v1] : a.modes())
        for (const auto& [k2, v2] : b.modes()) out.add(pc.join(k1, k2), pc.tensor(v1, v2));
    return out;
}

template <Scalar T>
FourierSpinorField<T> apply_factor(const ProductContext<T>& pc, const FourierSpinorField<T>& phi, DiracKind kind, int factor)
{
    const int split = pc.first().n();
    return factor == 1 ? apply_dirac(pc.total(), phi, kind, 0, split) : apply_dirac(pc.total(), phi, kind, split, pc.total().n());
}

template <Scalar T>
Report product_operator_suite(const ProductContext<T>& pc, Rng& rng, int samples = 3, double tol = 1e-10)
{
    Report rep;
    const auto& ctx = pc.total();
    const std::string tag = "m" + std::to_string(pc.m1()) + "x" + std::to_string(pc.m2()) + "-";
    auto ok = [&](const FourierSpinorField<T>& f) {
        if constexpr (scalar_traits<T>::exact)
            return f.is_zero() ? 0.0 : 1.0;
        else
            return f.max_abs();
    };

    // Decomposition of each Σ_r into tensor summands.
    bool dims = true, omega_ok = true;
    const Matrix<T> omega = pc.lift_first(omega_matrix(pc.first())) + pc.lift_second(omega_matrix(pc.second()));
    const Matrix<T> omega_total = omega_matrix(ctx);
    omega_ok = omega == omega_total;
    json table = json::array();
    for (int r = 0; r <= ctx.m(); ++r) {
        std::size_t sum = 0;
        json parts = json::array();
        std::set<Mask> seen;
        for (int k = 0; k <= r; ++k) {
            const auto basis = pc.summand_basis(k, r);
            sum += basis.size();
            parts.push_back(basis.size());
            for (Mask s : basis) {
                seen.insert(s);
                if (grade_of(s) != r) dims = false;
                if (!(omega(s, s) == scalar<T>(Rational(0), rat(2 * r - ctx.m())))) omega_ok = false;
            }
        }
        if (static_cast<std::int64_t>(sum) != ctx.grade_dim(r) || seen.size() != sum) dims = false;
        table.push_back(json{{"r", r}, {"summands", parts}, {"total", sum}, {"expected", ctx.grade_dim(r)}});
    }
    rep.add_exact(tag + "decomposition-dimensions", "5.10", dims, json{{"table", table}});
    rep.add_exact(tag + "kahler-form-sum", "5.10", omega_ok);

    // (X₁ + X₂)·(ψ₁⊗ψ₂) = X₁·ψ₁⊗ψ₂ + ψ̄₁⊗X₂·ψ₂ and cross-factor anticommutation.
    double rule = 0.0, anti = 0.0;
    for (int t = 0; t < samples; ++t) {
        const auto p1 = random_spinor(pc.first(), rng);
        const auto p2 = random_spinor(pc.second(), rng);
        const auto x1 = random_tangent(pc.first(), rng);
        const auto x2 = random_tangent(pc.second(), rng);
        TangentVector<T> x = pc.embed_first(x1);
        const auto x2e = pc.embed_second(x2);
        for (int a = 0; a < ctx.n(); ++a) x[a] += x2e[a];
        const auto prod = pc.tensor(p1, p2);
        const auto lhs = ctx.clifford(x, prod);
        const auto rhs = pc.tensor(pc.first().clifford(x1, p1), p2) +
                         pc.tensor(volume_form_action(pc.first(), p1), pc.second().clifford(x2, p2));
        rule = std::max(rule, (lhs - rhs).max_abs());
        const auto ac = ctx.clifford(pc.embed_first(x1), ctx.clifford(x2e, prod)) + ctx.clifford(x2e, ctx.clifford(pc.embed_first(x1), prod));
        anti = std::max(anti, ac.max_abs());
    }
    rep.add<T>(tag + "product-clifford-rule", "5.10", rule, tol);
    rep.add<T>(tag + "cross-factor-anticommute", "5.10", anti, tol);

    // Operator relations on random fields and on product fields.
    double split = 0.0, squares = 0.0;
    double mixed[4] = {0.0, 0.0, 0.0, 0.0};
    for (int t = 0; t < samples; ++t) {
        FourierSpinorField<T> phi = t % 2 == 0 ? random_field(ctx, 1, 1, -1, 3, rng)
                                               : product_field(pc, random_field(pc.first(), 1, 1, -1, 2, rng),
                                                               random_field(pc.second(), 1, 1, -1, 2, rng));
        auto d = [&](DiracKind k, int f, const FourierSpinorField<T>& x) { return apply_factor(pc, x, k, f); };
        const auto P = DiracKind::plus, M = DiracKind::minus;
        split = std::max({split, ok(apply_Dplus(ctx, phi) - d(P, 1, phi) - d(P, 2, phi)),
                          ok(apply_Dminus(ctx, phi) - d(M, 1, phi) - d(M, 2, phi))});
        for (int f = 1; f <= 2; ++f) squares = std::max({squares, ok(d(P, f, d(P, f, phi))), ok(d(M, f, d(M, f, phi)))});
        mixed[0] = std::max(mixed[0], ok(d(P, 1, d(P, 2, phi)) + d(P, 2, d(P, 1, phi))));
        mixed[1] = std::max(mixed[1], ok(d(M, 1, d(M, 2, phi)) + d(M, 2, d(M, 1, phi))));
        mixed[2] = std::max(mixed[2], ok(d(P, 1, d(M, 2, phi)) + d(M, 2, d(P, 1, phi))));
        mixed[3] = std::max(mixed[3], ok(d(M, 1, d(P, 2, phi)) + d(P, 2, d(M, 1, phi))));
    }
    rep.add<T>(tag + "dirac-split", "5.10", split, tol);
    rep.add<T>(tag + "factor-squares", "5.10", squares, tol);
    rep.add<T>(tag + "anticommute-plus-plus", "5.10", mixed[0], tol);
    rep.add<T>(tag + "anticommute-minus-minus", "5.10", mixed[1], tol);
    rep.add<T>(tag + "anticommute-plus-minus", "5.10", mixed[2], tol);
    rep.add<T>(tag + "anticommute-minus-plus", "5.10", mixed[3], tol);
    return rep;
}

}  // namespace kspin
