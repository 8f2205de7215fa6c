#pragma once

#include "error.hpp"
#include "fiber.hpp"
#include "report.hpp"

#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace kspin {

// Integer wavevector on T^{2m} = R^{2m} / (2πZ)^{2m}; map keys order modes lexicographically.
using Wavevector = std::vector<int>;

inline int band_of(const Wavevector& k)
{
    int b = 0;
    for (int x : k) b = std::max(b, std::abs(x));
    return b;
}

inline Wavevector operator+(const Wavevector& a, const Wavevector& b)
{
    Wavevector c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] + b[i];
    return c;
}

inline Wavevector negate(const Wavevector& a)
{
    Wavevector c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = -a[i];
    return c;
}

// k(Y) = Σ_a k_a Y_a for a complex direction Y.
template <Scalar T>
T pairing(const Wavevector& k, const TangentVector<T>& y)
{
    T s{};
    for (std::size_t a = 0; a < k.size(); ++a)
        if (k[a] != 0 && !is_zero(y[a])) s += T(k[a]) * y[a];
    return s;
}

// Visits every wavevector of the box |k_a| <= band in lexicographic order.
inline void for_each_wavevector(int n, int band, const std::function<void(const Wavevector&)>& f)
{
    Wavevector k(n, -band);
    while (true) {
        f(k);
        int a = n - 1;
        while (a >= 0 && k[a] == band) k[a--] = -band;
        if (a < 0) return;
        ++k[a];
    }
}

template <Scalar T>
class FourierSpinorField {
public:
    FourierSpinorField(int m, int band) : m_(m), band_(band)
    {
        if (band < 0) throw band_error("band must be non-negative");
    }

    int m() const { return m_; }
    int band() const { return band_; }
    const std::map<Wavevector, SpinorVector<T>>& modes() const { return modes_; }

    void add(const Wavevector& k, const SpinorVector<T>& v)
    {
        if (k.size() != static_cast<std::size_t>(2 * m_)) throw context_mismatch("wavevector dimension must be 2m");
        if (v.m() != m_) throw context_mismatch("mode coefficient from a different fiber");
        if (v.is_zero()) return;
        if (band_of(k) > band_)
            throw band_error("mode outside band capacity " + std::to_string(band_) + " (needs " + std::to_string(band_of(k)) + ")");
        auto it = modes_.find(k);
        if (it == modes_.end())
            modes_.emplace(k, v);
        else {
            it->second += v;
            if (it->second.is_zero()) modes_.erase(it);
        }
    }

    SpinorVector<T> coefficient(const Wavevector& k) const
    {
        auto it = modes_.find(k);
        return it == modes_.end() ? SpinorVector<T>(m_) : it->second;
    }

    bool is_zero() const { return modes_.empty(); }

    bool in_grade(int r) const
    {
        for (const auto& [k, v] : modes_)
            if (!v.in_grade(r)) return false;
        return true;
    }

    double max_abs() const
    {
        double best = 0.0;
        for (const auto& [k, v] : modes_) best = std::max(best, v.max_abs());
        return best;
    }

    FourierSpinorField with_band(int band) const
    {
        FourierSpinorField f(m_, band);
        for (const auto& [k, v] : modes_) f.add(k, v);
        return f;
    }

    FourierSpinorField& operator+=(const FourierSpinorField& o)
    {
        if (o.m_ != m_) throw context_mismatch("fields on different tori");
        for (const auto& [k, v] : o.modes_) add(k, v);
        return *this;
    }
    FourierSpinorField& operator-=(const FourierSpinorField& o)
    {
        if (o.m_ != m_) throw context_mismatch("fields on different tori");
        for (const auto& [k, v] : o.modes_) add(k, T(-1) * v);
        return *this;
    }
    FourierSpinorField& operator*=(const T& s)
    {
        if (kspin::is_zero(s)) {
            modes_.clear();
            return *this;
        }
        for (auto& [k, v] : modes_) v *= s;
        return *this;
    }

    friend FourierSpinorField operator+(FourierSpinorField a, const FourierSpinorField& b) { return a += b; }
    friend FourierSpinorField operator-(FourierSpinorField a, const FourierSpinorField& b) { return a -= b; }
    friend FourierSpinorField operator*(const T& s, FourierSpinorField a) { return a *= s; }

private:
    int m_;
    int band_;
    std::map<Wavevector, SpinorVector<T>> modes_;
};

template <Scalar T>
FourierSpinorField<T> map_modes(const FourierSpinorField<T>& phi,
                                const std::function<SpinorVector<T>(const Wavevector&, const SpinorVector<T>&)>& f)
{
    FourierSpinorField<T> out(phi.m(), phi.band());
    for (const auto& [k, v] : phi.modes()) out.add(k, f(k, v));
    return out;
}

// L² pairing with unit volume: Σ_k ⟨φ̂_k, ψ̂_k⟩.
template <Scalar T>
T inner(const FourierSpinorField<T>& phi, const FourierSpinorField<T>& psi)
{
    T s{};
    for (const auto& [k, v] : phi.modes()) {
        auto it = psi.modes().find(k);
        if (it != psi.modes().end()) s += inner(v, it->second);
    }
    return s;
}

template <Scalar T>
FourierSpinorField<T> project_grade(const FiberContext<T>& ctx, const FourierSpinorField<T>& phi, int r)
{
    return map_modes<T>(phi, [&](const Wavevector&, const SpinorVector<T>& v) { return project_grade(ctx, v, r); });
}

// Tangent-indexed spinor field: one component field per frame direction.
template <Scalar T>
using TangentSpinorField = std::vector<FourierSpinorField<T>>;

template <Scalar T>
T inner(const TangentSpinorField<T>& a, const TangentSpinorField<T>& b)
{
    T s{};
    for (std::size_t i = 0; i < a.size(); ++i) s += inner(a[i], b[i]);
    return s;
}

template <Scalar T>
bool is_zero(const TangentSpinorField<T>& a)
{
    for (const auto& f : a)
        if (!f.is_zero()) return false;
    return true;
}

template <Scalar T>
double max_abs(const TangentSpinorField<T>& a)
{
    double best = 0.0;
    for (const auto& f : a) best = std::max(best, f.max_abs());
    return best;
}

template <Scalar T>
class FourierVectorField {
public:
    FourierVectorField(int m, int band) : m_(m), band_(band) {}

    int m() const { return m_; }
    int band() const { return band_; }
    const std::map<Wavevector, TangentVector<T>>& modes() const { return modes_; }

    void add(const Wavevector& q, const TangentVector<T>& x)
    {
        if (q.size() != static_cast<std::size_t>(2 * m_) || x.size() != static_cast<std::size_t>(2 * m_))
            throw context_mismatch("vector field mode dimension must be 2m");
        if (vector_is_zero(x)) return;
        if (band_of(q) > band_) throw band_error("vector field mode outside band capacity");
        auto [it, fresh] = modes_.emplace(q, x);
        if (!fresh) {
            for (std::size_t a = 0; a < x.size(); ++a) it->second[a] += x[a];
            if (vector_is_zero(it->second)) modes_.erase(it);
        }
    }

    static FourierVectorField constant(int m, const TangentVector<T>& x)
    {
        FourierVectorField f(m, 0);
        f.add(Wavevector(2 * m, 0), x);
        return f;
    }

    bool is_real() const
    {
        for (const auto& [q, x] : modes_) {
            auto it = modes_.find(negate(q));
            if (it == modes_.end()) return false;
            for (std::size_t a = 0; a < x.size(); ++a)
                if (it->second[a] != conj(x[a])) return false;
        }
        return true;
    }

private:
    int m_;
    int band_;
    std::map<Wavevector, TangentVector<T>> modes_;
};

template <Scalar T>
FourierVectorField<T> map_vector_modes(const FourierVectorField<T>& x,
                                       const std::function<TangentVector<T>(const Wavevector&, const TangentVector<T>&)>& f)
{
    FourierVectorField<T> out(x.m(), x.band());
    for (const auto& [q, v] : x.modes()) out.add(q, f(q, v));
    return out;
}

// ∇_Y X for a constant complex direction Y.
template <Scalar T>
FourierVectorField<T> derivative(const FourierVectorField<T>& x, const TangentVector<T>& y)
{
    const T i = imag_unit<T>();
    return map_vector_modes<T>(x, [&](const Wavevector& q, const TangentVector<T>& v) {
        T f = i * pairing(q, y);
        TangentVector<T> w(v.size(), T{});
        for (std::size_t a = 0; a < v.size(); ++a) w[a] = f * v[a];
        return w;
    });
}

template <Scalar T>
FourierVectorField<T> plus_part(const FiberContext<T>& ctx, const FourierVectorField<T>& x)
{
    return map_vector_modes<T>(x, [&](const Wavevector&, const TangentVector<T>& v) { return ctx.plus(v); });
}

template <Scalar T>
FourierVectorField<T> minus_part(const FiberContext<T>& ctx, const FourierVectorField<T>& x)
{
    return map_vector_modes<T>(x, [&](const Wavevector&, const TangentVector<T>& v) { return ctx.minus(v); });
}

template <Scalar T>
FourierVectorField<T> apply_ricci(const RicciModel& ric, const FourierVectorField<T>& x)
{
    return map_vector_modes<T>(x, [&](const Wavevector&, const TangentVector<T>& v) { return ric.template apply<T>(v); });
}

// Multiplicative endomorphism field Σ_q e^{iqx} E_q acting on the fiber.
template <Scalar T>
class EndomorphismField {
public:
    explicit EndomorphismField(int m) : m_(m) {}

    int m() const { return m_; }
    const std::map<Wavevector, Matrix<T>>& modes() const { return modes_; }

    void add(const Wavevector& q, const Matrix<T>& e)
    {
        if (e.is_zero()) return;
        auto [it, fresh] = modes_.emplace(q, e);
        if (!fresh) it->second += e;
    }

    // Convolution; the result keeps φ's band and overflow is an error.
    FourierSpinorField<T> apply(const FourierSpinorField<T>& phi) const
    {
        FourierSpinorField<T> out(phi.m(), phi.band());
        for (const auto& [q, e] : modes_)
            for (const auto& [k, v] : phi.modes()) out.add(k + q, SpinorVector<T>(phi.m(), e.apply(v.coeffs())));
        return out;
    }

private:
    int m_;
    std::map<Wavevector, Matrix<T>> modes_;
};

// Frame-sum operators Σ_a c(C_a) ∇_{Y_a} over a range of frame directions.
enum class DiracKind { full, complex_conjugate, plus, minus };

template <Scalar T>
struct FrameTerm {
    TangentVector<T> clifford;
    TangentVector<T> direction;
};

template <Scalar T>
std::vector<FrameTerm<T>> frame_terms(const FiberContext<T>& ctx, DiracKind kind, int lo, int hi)
{
    std::vector<FrameTerm<T>> terms;
    for (int a = lo; a < hi; ++a) {
        const TangentVector<T> e = ctx.basis_vector(a);
        switch (kind) {
        case DiracKind::full: terms.push_back({e, e}); break;
        case DiracKind::complex_conjugate: terms.push_back({ctx.J(e), e}); break;
        case DiracKind::plus: terms.push_back({ctx.plus(e), ctx.minus(e)}); break;
        case DiracKind::minus: terms.push_back({ctx.minus(e), ctx.plus(e)}); break;
        }
    }
    return terms;
}

template <Scalar T>
FourierSpinorField<T> apply_dirac(const FiberContext<T>& ctx, const FourierSpinorField<T>& phi, DiracKind kind, int lo = 0,
                                  int hi = -1)
{
    if (phi.m() != ctx.m()) throw context_mismatch("field and fiber differ");
    if (hi < 0) hi = ctx.n();
    const auto terms = frame_terms(ctx, kind, lo, hi);
    const T i = imag_unit<T>();
    return map_modes<T>(phi, [&](const Wavevector& k, const SpinorVector<T>& v) {
        SpinorVector<T> out = ctx.zero_spinor();
        for (const auto& t : terms) {
            T f = pairing(k, t.direction);
            if (is_zero(f)) continue;
            out += (i * f) * ctx.clifford(t.clifford, v);
        }
        return out;
    });
}

template <Scalar T>
FourierSpinorField<T> apply_D(const FiberContext<T>& ctx, const FourierSpinorField<T>& phi)
{
    return apply_dirac(ctx, phi, DiracKind::full);
}

template <Scalar T>
FourierSpinorField<T> apply_Dc(const FiberContext<T>& ctx, const FourierSpinorField<T>& phi)
{
    return apply_dirac(ctx, phi, DiracKind::complex_conjugate);
}

template <Scalar T>
FourierSpinorField<T> apply_Dplus(const FiberContext<T>& ctx, const FourierSpinorField<T>& phi)
{
    return apply_dirac(ctx, phi, DiracKind::plus);
}

template <Scalar T>
FourierSpinorField<T> apply_Dminus(const FiberContext<T>& ctx, const FourierSpinorField<T>& phi)
{
    return apply_dirac(ctx, phi, DiracKind::minus);
}

// ∇_Y φ for a constant complex direction Y.
template <Scalar T>
FourierSpinorField<T> covariant_derivative(const FiberContext<T>& ctx, const TangentVector<T>& y, const FourierSpinorField<T>& phi)
{
    ctx.check_tangent(y);
    const T i = imag_unit<T>();
    return map_modes<T>(phi, [&](const Wavevector& k, const SpinorVector<T>& v) { return (i * pairing(k, y)) * v; });
}

// ∇_X φ for a trigonometric vector field X; the result keeps φ's band.
template <Scalar T>
FourierSpinorField<T> covariant_derivative(const FiberContext<T>& ctx, const FourierVectorField<T>& x, const FourierSpinorField<T>& phi)
{
    if (x.m() != ctx.m() || phi.m() != ctx.m()) throw context_mismatch("field and fiber differ");
    const T i = imag_unit<T>();
    FourierSpinorField<T> out(phi.m(), phi.band());
    for (const auto& [q, xq] : x.modes())
        for (const auto& [k, v] : phi.modes()) {
            T f = pairing(k, xq);
            if (!is_zero(f)) out.add(k + q, (i * f) * v);
        }
    return out;
}

template <Scalar T>
TangentSpinorField<T> gradient(const FiberContext<T>& ctx, const FourierSpinorField<T>& phi)
{
    TangentSpinorField<T> g;
    for (int a = 0; a < ctx.n(); ++a) g.push_back(covariant_derivative(ctx, ctx.basis_vector(a), phi));
    return g;
}

// Clifford multiplication by a trigonometric vector field.
template <Scalar T>
FourierSpinorField<T> clifford_field(const FiberContext<T>& ctx, const FourierVectorField<T>& x, const FourierSpinorField<T>& phi)
{
    if (x.m() != ctx.m() || phi.m() != ctx.m()) throw context_mismatch("field and fiber differ");
    FourierSpinorField<T> out(phi.m(), phi.band());
    for (const auto& [q, xq] : x.modes())
        for (const auto& [k, v] : phi.modes()) out.add(k + q, ctx.clifford(xq, v));
    return out;
}

template <Scalar T>
FourierSpinorField<T> clifford_const(const FiberContext<T>& ctx, const TangentVector<T>& x, const FourierSpinorField<T>& phi)
{
    return map_modes<T>(phi, [&](const Wavevector&, const SpinorVector<T>& v) { return ctx.clifford(x, v); });
}

// ∇*∇ = -Σ_a ∇_{e_a} ∇_{e_a} on the flat torus.
template <Scalar T>
FourierSpinorField<T> rough_laplacian(const FiberContext<T>& ctx, const FourierSpinorField<T>& phi)
{
    FourierSpinorField<T> out(phi.m(), phi.band());
    for (int a = 0; a < ctx.n(); ++a) {
        const TangentVector<T> e = ctx.basis_vector(a);
        out -= covariant_derivative(ctx, e, covariant_derivative(ctx, e, phi));
    }
    return out;
}

// D(X)· = Σ_a e_a · (∇_{e_a} X) ·.
template <Scalar T>
EndomorphismField<T> dirac_of_vector_field(const FiberContext<T>& ctx, const FourierVectorField<T>& x, DiracKind kind = DiracKind::full,
                                           int lo = 0, int hi = -1)
{
    if (hi < 0) hi = ctx.n();
    EndomorphismField<T> e(ctx.m());
    for (const auto& t : frame_terms(ctx, kind, lo, hi)) {
        const Matrix<T> c = ctx.clifford_matrix(t.clifford);
        const auto dx = derivative(x, t.direction);
        for (const auto& [q, xq] : dx.modes()) e.add(q, c * ctx.clifford_matrix(xq));
    }
    return e;
}

// D²(X)· = Σ_{a,b} e_b · e_a · (∇_{e_b} ∇_{e_a} X) ·.
template <Scalar T>
EndomorphismField<T> dirac_squared_of_vector_field(const FiberContext<T>& ctx, const FourierVectorField<T>& x)
{
    EndomorphismField<T> e(ctx.m());
    for (int a = 0; a < ctx.n(); ++a)
        for (int b = 0; b < ctx.n(); ++b) {
            const Matrix<T> cc = ctx.gamma_matrix(b) * ctx.gamma_matrix(a);
            auto w = derivative(derivative(x, ctx.basis_vector(a)), ctx.basis_vector(b));
            for (const auto& [q, xq] : w.modes()) e.add(q, cc * ctx.clifford_matrix(xq));
        }
    return e;
}

template <Scalar T>
FourierSpinorField<T> random_field(const FiberContext<T>& ctx, int band, int capacity, int grade, int modes, Rng& rng)
{
    FourierSpinorField<T> f(ctx.m(), capacity);
    std::uniform_int_distribution<int> coord(-band, band);
    for (int t = 0; t < modes; ++t) {
        Wavevector k(ctx.n());
        for (int& x : k) x = coord(rng);
        f.add(k, random_spinor(ctx, rng, grade));
    }
    return f;
}

// Real trigonometric vector field: modes ±q with conjugate coefficients.
template <Scalar T>
FourierVectorField<T> random_vector_field(const FiberContext<T>& ctx, int band, int pairs, Rng& rng)
{
    FourierVectorField<T> x(ctx.m(), band);
    std::uniform_int_distribution<int> coord(-band, band);
    for (int t = 0; t < pairs; ++t) {
        Wavevector q(ctx.n());
        for (int& c : q) c = coord(rng);
        TangentVector<T> v = random_tangent(ctx, rng, false);
        if (band_of(q) == 0) {
            for (auto& z : v) z = z + conj(z);
            x.add(q, v);
            continue;
        }
        TangentVector<T> w(v.size());
        for (std::size_t a = 0; a < v.size(); ++a) w[a] = conj(v[a]);
        x.add(q, v);
        x.add(negate(q), w);
    }
    return x;
}

template <Scalar T>
bool same(const FourierSpinorField<T>& a, const FourierSpinorField<T>& b)
{
    return (a - b).is_zero();
}

template <Scalar T>
double residual(const FourierSpinorField<T>& a, const FourierSpinorField<T>& b)
{
    return (a - b).max_abs();
}

// Commutator identities on the flat torus; ric enters only through the algebraic rule for Ric(X).
template <Scalar T>
Report commutator_suite(const FiberContext<T>& ctx, const FourierVectorField<T>& x, const FourierSpinorField<T>& phi,
                        const RicciModel& ric, double tol = 0.0)
{
    Report rep;
    const int n = ctx.n();
    const T two(2);
    auto D = [&](const FourierSpinorField<T>& f) { return apply_D(ctx, f); };
    auto Dp = [&](const FourierSpinorField<T>& f) { return apply_Dplus(ctx, f); };
    auto Dm = [&](const FourierSpinorField<T>& f) { return apply_Dminus(ctx, f); };
    auto mul = [&](const FourierVectorField<T>& v, const FourierSpinorField<T>& f) { return clifford_field(ctx, v, f); };
    auto nab = [&](const FourierVectorField<T>& v, const FourierSpinorField<T>& f) { return covariant_derivative(ctx, v, f); };
    const auto xp = plus_part(ctx, x);
    const auto xm = minus_part(ctx, x);
    const FourierSpinorField<T> dphi = D(phi);

    {
        auto lhs = D(mul(x, phi)) + mul(x, dphi);
        auto rhs = dirac_of_vector_field(ctx, x).apply(phi) - two * nab(x, phi);
        rep.add<T>("dirac-clifford-anticommutator", "3.1", residual(lhs, rhs), tol);
    }
    {
        auto lhs = Dp(mul(xp, phi)) + mul(xp, Dp(phi));
        auto rhs = dirac_of_vector_field(ctx, xp, DiracKind::plus).apply(phi);
        rep.add<T>("dplus-xplus-anticommutator", "3.2", residual(lhs, rhs), tol);
        lhs = Dp(mul(xm, phi)) + mul(xm, Dp(phi));
        rhs = dirac_of_vector_field(ctx, xm, DiracKind::plus).apply(phi) - two * nab(xm, phi);
        rep.add<T>("dplus-xminus-anticommutator", "3.2", residual(lhs, rhs), tol);
    }
    {
        auto lhs = Dm(mul(xm, phi)) + mul(xm, Dm(phi));
        auto rhs = dirac_of_vector_field(ctx, xm, DiracKind::minus).apply(phi);
        rep.add<T>("dminus-xminus-anticommutator", "3.3", residual(lhs, rhs), tol);
        lhs = Dm(mul(xp, phi)) + mul(xp, Dm(phi));
        rhs = dirac_of_vector_field(ctx, xp, DiracKind::minus).apply(phi) - two * nab(xp, phi);
        rep.add<T>("dminus-xplus-anticommutator", "3.3", residual(lhs, rhs), tol);
    }
    // Σ_a c(C_a) ∇_{∇_{Y_a} V} φ over a frame family.
    auto frame_shift = [&](DiracKind kind, const FourierVectorField<T>& v, const FourierSpinorField<T>& f) {
        FourierSpinorField<T> out(f.m(), f.band());
        for (const auto& t : frame_terms(ctx, kind, 0, n)) out += clifford_const(ctx, t.clifford, nab(derivative(v, t.direction), f));
        return out;
    };
    {
        auto lhs = nab(x, dphi) - D(nab(x, phi));
        auto rhs = T(-1) * frame_shift(DiracKind::full, x, phi);
        rep.add<T>("nabla-dirac-commutator", "3.4", residual(lhs, rhs), tol);
    }
    {
        auto lhs = nab(xp, Dp(phi)) - Dp(nab(xp, phi));
        auto rhs = T(-1) * frame_shift(DiracKind::plus, xp, phi);
        rep.add<T>("nabla-plus-dplus-commutator", "3.5", residual(lhs, rhs), tol);
        lhs = nab(xm, Dp(phi)) - Dp(nab(xm, phi));
        rhs = T(-1) * frame_shift(DiracKind::plus, xm, phi);
        rep.add<T>("nabla-minus-dplus-commutator", "3.5", residual(lhs, rhs), tol);
    }
    {
        auto lhs = nab(xm, Dm(phi)) - Dm(nab(xm, phi));
        auto rhs = T(-1) * frame_shift(DiracKind::minus, xm, phi);
        rep.add<T>("nabla-minus-dminus-commutator", "3.6", residual(lhs, rhs), tol);
        lhs = nab(xp, Dm(phi)) - Dm(nab(xp, phi));
        rhs = T(-1) * frame_shift(DiracKind::minus, xp, phi);
        rep.add<T>("nabla-plus-dminus-commutator", "3.6", residual(lhs, rhs), tol);
    }
    {
        auto lhs = D(D(mul(x, phi))) - mul(x, D(dphi));
        auto rhs = dirac_squared_of_vector_field(ctx, x).apply(phi);
        for (int a = 0; a < n; ++a) {
            const TangentVector<T> e = ctx.basis_vector(a);
            rhs -= two * mul(derivative(x, e), covariant_derivative(ctx, e, phi));
        }
        rep.add<T>("dirac-squared-clifford-commutator", "3.7", residual(lhs, rhs), tol);
    }
    {
        const auto rx = apply_ricci(ric, x);
        auto lhs = D(mul(rx, phi)) + mul(rx, dphi);
        auto rhs = dirac_of_vector_field(ctx, rx).apply(phi) - two * nab(rx, phi);
        rep.add<T>("dirac-ricci-anticommutator", "3.8", residual(lhs, rhs), tol);
    }
    {
        auto lhs = nab(x, D(dphi)) - D(D(nab(x, phi)));
        FourierSpinorField<T> rhs(phi.m(), phi.band());
        for (int a = 0; a < n; ++a) {
            const TangentVector<T> ea = ctx.basis_vector(a);
            const auto dx = derivative(x, ea);
            for (int b = 0; b < n; ++b) {
                const TangentVector<T> eb = ctx.basis_vector(b);
                auto term = nab(dx, covariant_derivative(ctx, eb, phi)) + nab(derivative(dx, eb), phi);
                rhs -= clifford_const(ctx, eb, clifford_const(ctx, ea, term));
            }
            rhs -= clifford_const(ctx, ea, nab(dx, dphi));
        }
        rep.add<T>("nabla-dirac-squared-commutator", "3.9", residual(lhs, rhs), tol);
    }
    return rep;
}

}  // namespace kspin
