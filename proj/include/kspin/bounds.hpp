#pragma once

#include "error.hpp"
#include "exact.hpp"
#include "report.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace kspin {

enum class SpinorKind { anti_holomorphic, holomorphic };

inline const char* to_string(SpinorKind k) { return k == SpinorKind::anti_holomorphic ? "anti-holomorphic" : "holomorphic"; }

namespace detail {

inline void require_positive(const Rational& s, const char* what)
{
    if (!(s > Rational(0))) throw domain_error(std::string(what) + ": inf S must be positive");
}

inline void require_grade_range(int m, int r, const char* what)
{
    if (m < 1) throw domain_error(std::string(what) + ": m must be positive");
    if (r < 0 || r > m) throw domain_error(std::string(what) + ": r must satisfy 0 <= r <= m");
}

inline void require_interior(int m, int r, const char* what)
{
    if (r <= 0 || r >= m) throw domain_error(std::string(what) + ": r must satisfy 0 < r < m");
}

}  // namespace detail

// λ² ≥ n inf S / (4(n-1)).
inline Rational friedrich_bound(int n, const Rational& inf_s)
{
    if (n < 2) throw domain_error("friedrich_bound: n must be at least 2");
    detail::require_positive(inf_s, "friedrich_bound");
    return rat(n, 4 * (n - 1)) * inf_s;
}

inline Rational kirchberg_bound(int m, const Rational& inf_s)
{
    if (m < 1) throw domain_error("kirchberg_bound: m must be positive");
    detail::require_positive(inf_s, "kirchberg_bound");
    if (m % 2 == 1) return rat(m + 1, 4 * m) * inf_s;
    return rat(m, 4 * (m - 1)) * inf_s;
}

inline Rational sigma_r_bound(int m, int r, const Rational& inf_s)
{
    detail::require_grade_range(m, r, "sigma_r_bound");
    detail::require_positive(inf_s, "sigma_r_bound");
    if (2 * r <= m) return rat(2 * (r + 1), 4 * (2 * r + 1)) * inf_s;
    return rat(2 * (m - r + 1), 4 * (2 * m - 2 * r + 1)) * inf_s;
}

// k/(k-1) · inf S / 4.
inline Rational lemma26_bound(const Rational& k, const Rational& inf_s)
{
    if (!(k > Rational(1))) throw domain_error("lemma26_bound: k must exceed 1");
    detail::require_positive(inf_s, "lemma26_bound");
    return k / (k - Rational(1)) * inf_s / Rational(4);
}

enum class BoundVariant { friedrich, kirchberg_odd, kirchberg_even, sigma_r };

struct BoundQuery {
    int m = 1;
    std::optional<int> r;
    Rational inf_s{1};
    BoundVariant variant = BoundVariant::friedrich;
};

inline Rational evaluate(const BoundQuery& q)
{
    switch (q.variant) {
    case BoundVariant::friedrich: return friedrich_bound(2 * q.m, q.inf_s);
    case BoundVariant::kirchberg_odd:
        if (q.m % 2 == 0) throw domain_error("odd Kirchberg bound needs odd m");
        return kirchberg_bound(q.m, q.inf_s);
    case BoundVariant::kirchberg_even:
        if (q.m % 2 == 1) throw domain_error("even Kirchberg bound needs even m");
        return kirchberg_bound(q.m, q.inf_s);
    case BoundVariant::sigma_r:
        if (!q.r) throw domain_error("sigma_r bound needs r");
        return sigma_r_bound(q.m, *q.r, q.inf_s);
    }
    throw domain_error("unknown bound variant");
}

// Eigenvalue of D² on a special Kählerian twistor spinor with constant S.
inline Rational special_eigenvalue(int m, int r, const Rational& s, SpinorKind kind)
{
    detail::require_grade_range(m, r, "special_eigenvalue");
    if (kind == SpinorKind::anti_holomorphic) return rat(r + 1, 2 * (2 * r + 1)) * s;
    return rat(m - r + 1, 2 * (2 * m - 2 * r + 1)) * s;
}

struct MiddleVerdict {
    Rational eigenvalue;
    Rational kirchberg;
    bool below_kirchberg = false;
    std::string verdict;
};

inline MiddleVerdict middle_eigenvalue(int m, const Rational& s)
{
    if (m < 2 || m % 2 == 1) throw domain_error("middle_eigenvalue: m must be even and at least 2");
    if (s < Rational(0)) throw domain_error("middle_eigenvalue: S must be non-negative");
    MiddleVerdict v;
    v.eigenvalue = rat(m + 2, 4 * (m + 1)) * s;
    if (is_zero(s)) {
        v.kirchberg = Rational(0);
        v.verdict = "parallel";
        return v;
    }
    v.kirchberg = kirchberg_bound(m, s);
    v.below_kirchberg = v.eigenvalue < v.kirchberg;
    v.verdict = v.below_kirchberg ? "trivial-only" : "undecided";
    return v;
}

// c_d D² + c_s S.
struct LinearCombo {
    Rational d2{0};
    Rational s{0};

    friend bool operator==(const LinearCombo& a, const LinearCombo& b) { return a.d2 == b.d2 && a.s == b.s; }
};

struct Inversion {
    LinearCombo dminus_dplus;  // D^-D^+
    LinearCombo dplus_dminus;  // D^+D^-
};

// Solves a + b = D², a/(2(r+1)) + b/(2(m-r+1)) = D² - S/4 with a = D^-D^+, b = D^+D^-.
inline Inversion weitzenboeck_inversion(int m, int r)
{
    detail::require_grade_range(m, r, "weitzenboeck_inversion");
    if (2 * r == m) throw domain_error("weitzenboeck_inversion: the system is singular at r = m/2");
    const Rational p = rat(1, 2 * (r + 1));
    const Rational q = rat(1, 2 * (m - r + 1));
    const Rational det = q - p;
    const Rational one(1);
    // Cramer on [[1,1],[p,q]] (a,b) = (rhs0, rhs1), both right-hand sides linear in (D², S).
    auto solve = [&](const LinearCombo& rhs0, const LinearCombo& rhs1) {
        LinearCombo a{(q * rhs0.d2 - rhs1.d2) / det, (q * rhs0.s - rhs1.s) / det};
        LinearCombo b{(rhs1.d2 - p * rhs0.d2) / det, (rhs1.s - p * rhs0.s) / det};
        return std::pair{a, b};
    };
    auto [a, b] = solve({one, Rational(0)}, {one, rat(-1, 4)});
    return {a, b};
}

// Printed closed forms of the inversion.
inline Inversion printed_inversion(int m, int r)
{
    const int d = m - 2 * r;
    return {{rat((2 * m - 2 * r + 1) * (r + 1), d), rat(-(r + 1) * (m - r + 1), 2 * d)},
            {rat(-(2 * r + 1) * (m - r + 1), d), rat((r + 1) * (m - r + 1), 2 * d)}};
}

// D^+D^- = α D^-D^+ + β S and D^-D^+ = α' D^+D^- + β' S evaluated on an inversion.
inline bool cross_relations_hold(int m, int r, const Inversion& inv)
{
    const Rational alpha = rat(-(2 * r + 1) * (m - r + 1), (2 * m - 2 * r + 1) * (r + 1));
    const Rational beta = rat(m - r + 1, 2 * (2 * m - 2 * r + 1));
    const Rational alpha2 = rat(-(2 * m - 2 * r + 1) * (r + 1), (2 * r + 1) * (m - r + 1));
    const Rational beta2 = rat(r + 1, 2 * (2 * r + 1));
    const auto& a = inv.dminus_dplus;
    const auto& b = inv.dplus_dminus;
    const bool first = b.d2 == alpha * a.d2 && b.s == alpha * a.s + beta;
    const bool second = a.d2 == alpha2 * b.d2 && a.s == alpha2 * b.s + beta2;
    return first && second;
}

struct KeEigenvalue {
    Rational value;
    Rational derived;
    bool consistent = false;
};

// Closed form together with its re-derivation: (m+2)S/(4(m+1)) + (m-2r)/(2(m+1)) · iρ eigenvalue.
inline KeEigenvalue ke_eigenvalue(int m, int r, const Rational& s)
{
    detail::require_grade_range(m, r, "ke_eigenvalue");
    KeEigenvalue out;
    out.value = rat(m * m + m - 2 * m * r + 2 * r * r, 2 * m * (m + 1)) * s;
    const Rational irho = rat(m - 2 * r, 2 * m) * s;
    out.derived = rat(m + 2, 4 * (m + 1)) * s + rat(m - 2 * r, 2 * (m + 1)) * irho;
    out.consistent = out.value == out.derived;
    return out;
}

// Integer roots of r(m-2r)(m-2r-1) = 0 in 0 <= r <= m/2.
inline std::vector<int> ke_admissible_r(int m)
{
    if (m < 1) throw domain_error("ke_admissible_r: m must be positive");
    std::vector<int> out;
    for (int r = 0; 2 * r <= m; ++r)
        if (r * (m - 2 * r) * (m - 2 * r - 1) == 0) out.push_back(r);
    return out;
}

inline std::optional<int> ke_nonextremal_r(int m)
{
    if (m % 2 == 1 && m >= 3) return (m - 1) / 2;
    return std::nullopt;
}

struct Eigenvalue {
    Rational value;
    int multiplicity = 0;

    friend bool operator==(const Eigenvalue& a, const Eigenvalue& b)
    {
        return a.value == b.value && a.multiplicity == b.multiplicity;
    }
};

struct EigendataReport {
    int m = 0;
    std::vector<Eigenvalue> eigenvalues;  // descending, positive multiplicities
    Rational trace{0};
    std::string source = "5.3";

    int multiplicity_of(const Rational& v) const
    {
        for (const auto& e : eigenvalues)
            if (e.value == v) return e.multiplicity;
        return 0;
    }

    int total_multiplicity() const
    {
        int s = 0;
        for (const auto& e : eigenvalues) s += e.multiplicity;
        return s;
    }
};

inline json to_json(const EigendataReport& e)
{
    json list = json::array();
    for (const auto& v : e.eigenvalues) list.push_back(json{{"value", to_string(v.value)}, {"multiplicity", v.multiplicity}});
    return json{{"m", e.m}, {"eigenvalues", list}, {"trace", to_string(e.trace)}, {"source", e.source}};
}

namespace detail {

inline EigendataReport make_eigendata(int m, std::vector<Eigenvalue> ev)
{
    EigendataReport rep;
    rep.m = m;
    std::erase_if(ev, [](const Eigenvalue& e) { return e.multiplicity == 0; });
    std::sort(ev.begin(), ev.end(), [](const Eigenvalue& a, const Eigenvalue& b) { return a.value > b.value; });
    for (const auto& e : ev) rep.trace += e.value * Rational(e.multiplicity);
    rep.eigenvalues = std::move(ev);
    return rep;
}

}  // namespace detail

inline EigendataReport ricci_eigendata(int m, int r, const Rational& s, SpinorKind kind)
{
    detail::require_interior(m, r, "ricci_eigendata");
    detail::require_positive(s, "ricci_eigendata");
    if (kind == SpinorKind::anti_holomorphic) {
        if (2 * r > m - 1)
            throw domain_error("ricci_eigendata: anti-holomorphic Kählerian twistor spinors need r <= (m-1)/2");
        return detail::make_eigendata(m, {{s / Rational(2 * (2 * r + 1)), 2 * (2 * r + 1)}, {Rational(0), 2 * (m - 2 * r - 1)}});
    }
    if (2 * r < m + 1) throw domain_error("ricci_eigendata: holomorphic Kählerian twistor spinors need r >= (m+1)/2");
    return detail::make_eigendata(m, {{s / Rational(2 * (2 * m - 2 * r + 1)), 2 * (2 * m - 2 * r + 1)}, {Rational(0), 2 * (2 * r - m - 1)}});
}

// tr(Ric^s) for s = 1..count.
inline std::vector<Rational> power_sums(const EigendataReport& e, int count)
{
    std::vector<Rational> p(count, Rational(0));
    for (const auto& v : e.eigenvalues) {
        Rational pw(1);
        for (int s = 0; s < count; ++s) {
            pw *= v.value;
            p[s] += pw * Rational(v.multiplicity);
        }
    }
    return p;
}

// Dense polynomial over Q, coefficients by ascending degree, no trailing zeros.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<Rational> c) : c_(std::move(c)) { trim(); }

    static Polynomial constant(const Rational& a) { return Polynomial({a}); }
    static Polynomial linear_root(const Rational& root) { return Polynomial({-root, Rational(1)}); }

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    const std::vector<Rational>& coeffs() const { return c_; }
    Rational operator[](std::size_t i) const { return i < c_.size() ? c_[i] : Rational(0); }
    Rational lead() const { return c_.back(); }

    Rational operator()(const Rational& x) const
    {
        Rational acc(0);
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
        return acc;
    }

    Polynomial derivative() const
    {
        std::vector<Rational> d;
        for (std::size_t i = 1; i < c_.size(); ++i) d.push_back(c_[i] * Rational(static_cast<std::int64_t>(i)));
        return Polynomial(std::move(d));
    }

    Polynomial monic() const
    {
        if (is_zero()) return *this;
        std::vector<Rational> d = c_;
        const Rational l = lead();
        for (auto& x : d) x /= l;
        return Polynomial(std::move(d));
    }

    friend Polynomial operator-(const Polynomial& a, const Polynomial& b)
    {
        std::vector<Rational> d(std::max(a.c_.size(), b.c_.size()), Rational(0));
        for (std::size_t i = 0; i < d.size(); ++i) d[i] = a[i] - b[i];
        return Polynomial(std::move(d));
    }

    // Quotient and remainder.
    friend std::pair<Polynomial, Polynomial> divmod(const Polynomial& a, const Polynomial& b)
    {
        if (b.is_zero()) throw domain_error("polynomial division by zero");
        std::vector<Rational> rem = a.c_;
        const int db = b.degree();
        std::vector<Rational> quo(std::max(0, a.degree() - db + 1), Rational(0));
        for (int i = a.degree(); i >= db; --i) {
            const Rational f = rem[i] / b.lead();
            if (kspin::is_zero(f)) continue;
            quo[i - db] = f;
            for (int j = 0; j <= db; ++j) rem[i - db + j] -= f * b.c_[j];
        }
        return {Polynomial(std::move(quo)), Polynomial(std::move(rem))};
    }

    friend Polynomial gcd(Polynomial a, Polynomial b)
    {
        while (!b.is_zero()) {
            auto r = divmod(a, b).second;
            a = std::move(b);
            b = std::move(r);
        }
        return a.monic();
    }

private:
    void trim()
    {
        while (!c_.empty() && kspin::is_zero(c_.back())) c_.pop_back();
    }

    std::vector<Rational> c_;
};

namespace detail {

// Square-free decomposition: result[i] has the roots of multiplicity i+1.
inline std::vector<Polynomial> yun(const Polynomial& f)
{
    std::vector<Polynomial> out;
    const Polynomial fp = f.derivative();
    Polynomial a = gcd(f, fp);
    Polynomial b = divmod(f, a).first;
    Polynomial c = divmod(fp, a).first;
    Polynomial d = c - b.derivative();
    while (b.degree() > 0) {
        a = gcd(b, d);
        out.push_back(a);
        b = divmod(b, a).first;
        c = divmod(d, a).first;
        d = c - b.derivative();
    }
    return out;
}

// Best rational approximation with bounded denominator by continued fractions.
inline Rational snap(double x, std::int64_t max_den = 1000000)
{
    std::int64_t h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    double v = x;
    for (int it = 0; it < 40; ++it) {
        const double fl = std::floor(v);
        if (std::abs(fl) > 1e12) break;
        const auto a = static_cast<std::int64_t>(fl);
        const std::int64_t h2 = a * h1 + h0, k2 = a * k1 + k0;
        if (k2 > max_den) break;
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        if (std::abs(x - static_cast<double>(h1) / static_cast<double>(k1)) < 1e-12 * std::max(1.0, std::abs(x))) break;
        const double frac = v - fl;
        if (frac < 1e-15) break;
        v = 1.0 / frac;
    }
    return rat(h1, k1);
}

// Exact rational roots of a square-free polynomial; throws if any root is not real rational.
inline std::vector<Rational> rational_roots(const Polynomial& p)
{
    std::vector<Rational> roots;
    Polynomial rest = p.monic();
    while (rest.degree() > 0) {
        if (rest.degree() == 1) {
            roots.push_back(-rest[0]);
            break;
        }
        const int d = rest.degree();
        Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(d, d);
        for (int i = 1; i < d; ++i) comp(i, i - 1) = 1.0;
        for (int i = 0; i < d; ++i) comp(i, d - 1) = -to_double(rest[i]);
        const Eigen::VectorXcd ev = comp.eigenvalues();
        bool found = false;
        for (int i = 0; i < d && !found; ++i) {
            if (std::abs(ev[i].imag()) > 1e-6 * std::max(1.0, std::abs(ev[i]))) continue;
            const Rational q = snap(ev[i].real());
            if (kspin::is_zero(rest(q))) {
                roots.push_back(q);
                rest = divmod(rest, Polynomial::linear_root(q)).first;
                found = true;
            }
        }
        if (!found) throw convergence_error("power sums are not generated by real rational eigenvalues");
    }
    return roots;
}

}  // namespace detail

// Eigenvalue multiset from tr(Ric^s), s = 1..N, via Newton's identities and exact root extraction.
inline EigendataReport newton_recover(const std::vector<Rational>& p)
{
    const int n = static_cast<int>(p.size());
    if (n < 2 || n % 2 == 1) throw domain_error("newton_recover: expects 2m power sums");
    std::vector<Rational> e(n + 1, Rational(0));
    e[0] = Rational(1);
    for (int k = 1; k <= n; ++k) {
        Rational acc(0);
        for (int i = 1; i <= k; ++i) {
            const Rational t = e[k - i] * p[i - 1];
            acc += i % 2 == 1 ? t : -t;
        }
        e[k] = acc / Rational(k);
    }
    // x^n - e1 x^{n-1} + e2 x^{n-2} - ...
    std::vector<Rational> c(n + 1, Rational(0));
    for (int k = 0; k <= n; ++k) c[n - k] = k % 2 == 0 ? e[k] : -e[k];
    Polynomial f(c);
    int zero_mult = 0;
    while (f.degree() > 0 && kspin::is_zero(f[0])) {
        f = divmod(f, Polynomial({Rational(0), Rational(1)})).first;
        ++zero_mult;
    }
    std::vector<Eigenvalue> ev;
    if (zero_mult > 0) ev.push_back({Rational(0), zero_mult});
    if (f.degree() > 0) {
        const auto parts = detail::yun(f);
        for (std::size_t i = 0; i < parts.size(); ++i)
            for (const auto& q : detail::rational_roots(parts[i])) ev.push_back({q, static_cast<int>(i + 1)});
    }
    auto rep = detail::make_eigendata(n / 2, std::move(ev));
    if (rep.total_multiplicity() != n) throw convergence_error("newton_recover: root multiplicities do not sum to 2m");
    rep.source = "newton";
    return rep;
}

inline std::int64_t binomial_coeff(int n, int k)
{
    if (k < 0 || k > n) return 0;
    std::int64_t b = 1;
    for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
    return b;
}

inline std::int64_t dim_bound(int m, int r)
{
    detail::require_grade_range(m, r, "dim_bound");
    return binomial_coeff(m, r) + binomial_coeff(m, r + 1) + binomial_coeff(m, r - 1);
}

// Dimension of Kählerian Killing spinors on CP^{2k-1}.
inline std::int64_t killing_dim(int mprime)
{
    if (mprime < 1 || mprime % 2 == 0) throw domain_error("killing_dim: complex dimension must be odd");
    const int k = (mprime + 1) / 2;
    return binomial_coeff(2 * k, k);
}

inline constexpr int killing_dim_nonprojective = 2;

struct KeModel {
    std::string name;
    std::int64_t killing_dim = 0;
};

struct Classification {
    int m = 0;
    int r = 0;
    SpinorKind kind = SpinorKind::anti_holomorphic;
    int ke_dim = 0;
    int flat_dim = 0;
    Rational ke_scalar_ratio;  // S(M_2)/S
    std::string spinor_shape;
    std::vector<KeModel> alternatives;
};

inline Classification classify(int m, int r, SpinorKind kind)
{
    detail::require_interior(m, r, "classification_report");
    Classification c;
    c.m = m;
    c.r = r;
    c.kind = kind;
    if (kind == SpinorKind::anti_holomorphic) {
        if (2 * r > m - 1) throw domain_error("classification_report: anti-holomorphic case needs r <= (m-1)/2");
        c.ke_dim = 2 * r + 1;
        c.ke_scalar_ratio = rat(1, 2 * (2 * r + 1));
        c.spinor_shape = "xi_0 (x) phi_" + std::to_string(r);
    } else {
        if (2 * r < m + 1) throw domain_error("classification_report: holomorphic case needs r >= (m+1)/2");
        c.ke_dim = 2 * (m - r) + 1;
        c.ke_scalar_ratio = rat(1, 2 * (2 * m - 2 * r + 1));
        c.spinor_shape = "xi_" + std::to_string(2 * r - m - 1) + " (x) phi_" + std::to_string(m - r + 1);
    }
    c.flat_dim = m - c.ke_dim;
    if (c.ke_dim % 4 == 1)
        c.alternatives.push_back({"complex projective space CP^" + std::to_string(c.ke_dim), killing_dim(c.ke_dim)});
    else {
        c.alternatives.push_back({"twistor space over a positive quaternionic Kaehler manifold", killing_dim_nonprojective});
        c.alternatives.push_back({"CP^" + std::to_string(c.ke_dim) + " as twistor space over HP^" + std::to_string((c.ke_dim - 3) / 4),
                                  killing_dim(c.ke_dim)});
    }
    return c;
}

inline json to_json(const Classification& c)
{
    json alts = json::array();
    for (const auto& a : c.alternatives) alts.push_back(json{{"model", a.name}, {"killing_dim", a.killing_dim}});
    return json{{"m", c.m},
                {"r", c.r},
                {"kind", to_string(c.kind)},
                {"kahler_einstein_dim", c.ke_dim},
                {"ricci_flat_dim", c.flat_dim},
                {"kahler_einstein_scalar_ratio", to_string(c.ke_scalar_ratio)},
                {"spinor_shape", c.spinor_shape},
                {"alternatives", alts}};
}

inline Report classification_report(int m, int r, SpinorKind kind)
{
    const Classification c = classify(m, r, kind);
    Report rep;
    const std::string id = "classification-m" + std::to_string(m) + "-r" + std::to_string(r) + "-" + to_string(kind);
    rep.add_exact(id, "5.15", c.ke_dim + c.flat_dim == m && c.flat_dim >= 0, to_json(c));
    return rep;
}

// Coefficient forcing X^+(S) = 0, as printed.
inline Rational wbf_coefficient(int m, int r)
{
    detail::require_interior(m, r, "wbf_coefficient");
    return rat(r * (m - 2 * r), 2 * (m + 1) * (2 * r + 1));
}

// Difference of the two expressions for i∇_{X^+}ρ·φ computed directly.
inline Rational wbf_difference(int m, int r)
{
    detail::require_interior(m, r, "wbf_difference");
    return rat(m - 2 * r + 1, 2 * (m + 1)) - rat(1, 2 * (2 * r + 1));
}

inline Rational normalized_ricci_coefficient(int m) { return rat(1, 2 * (m + 1)); }
inline Rational hamiltonian_coefficient(int m) { return rat(1, 4 * (m + 1)); }

}  // namespace kspin
