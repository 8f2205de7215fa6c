#pragma once

#include "error.hpp"
#include "exact.hpp"
#include "matrix.hpp"

#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace kspin {

// Multi-index: bit l set means the exterior generator l (0-based) is present.
using Mask = std::uint32_t;

inline int grade_of(Mask s) { return std::popcount(s); }

inline std::int64_t binomial(int n, int k)
{
    if (k < 0 || k > n || n < 0) return 0;
    std::int64_t b = 1;
    for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
    return b;
}

// Complex components over e_1..e_{2m}; index a is 0-based.
template <Scalar T>
using TangentVector = Vector<T>;

template <Scalar T>
class SpinorVector {
public:
    SpinorVector() = default;
    explicit SpinorVector(int m) : m_(m), c_(std::size_t{1} << m, T{}) {}
    SpinorVector(int m, Vector<T> coeffs) : m_(m), c_(std::move(coeffs))
    {
        if (c_.size() != (std::size_t{1} << m)) throw size_error("spinor coefficient count must be 2^m");
    }

    int m() const { return m_; }
    std::size_t dim() const { return c_.size(); }
    T& operator[](Mask s) { return c_[s]; }
    const T& operator[](Mask s) const { return c_[s]; }
    const Vector<T>& coeffs() const { return c_; }

    bool is_zero() const { return vector_is_zero(c_); }

    bool in_grade(int r) const
    {
        for (Mask s = 0; s < c_.size(); ++s)
            if (!kspin::is_zero(c_[s]) && grade_of(s) != r) return false;
        return true;
    }

    double max_abs() const { return vector_max_abs(c_); }

    SpinorVector& operator+=(const SpinorVector& o)
    {
        check(o);
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
        return *this;
    }
    SpinorVector& operator-=(const SpinorVector& o)
    {
        check(o);
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
        return *this;
    }
    SpinorVector& operator*=(const T& s)
    {
        for (T& z : c_)
            if (!kspin::is_zero(z)) z *= s;
        return *this;
    }

    friend SpinorVector operator+(SpinorVector a, const SpinorVector& b) { return a += b; }
    friend SpinorVector operator-(SpinorVector a, const SpinorVector& b) { return a -= b; }
    friend SpinorVector operator*(const T& s, SpinorVector a) { return a *= s; }
    friend SpinorVector operator*(SpinorVector a, const T& s) { return a *= s; }
    friend bool operator==(const SpinorVector& a, const SpinorVector& b) { return a.m_ == b.m_ && a.c_ == b.c_; }

private:
    void check(const SpinorVector& o) const
    {
        if (o.m_ != m_) throw context_mismatch("spinors from different fibers");
    }

    int m_ = 0;
    Vector<T> c_;
};

template <Scalar T>
T inner(const SpinorVector<T>& a, const SpinorVector<T>& b)
{
    if (a.m() != b.m()) throw context_mismatch("spinors from different fibers");
    T s{};
    for (Mask i = 0; i < a.dim(); ++i)
        if (!is_zero(a[i]) && !is_zero(b[i])) s += conj(a[i]) * b[i];
    return s;
}

template <Scalar T>
T norm2(const SpinorVector<T>& a)
{
    return inner(a, a);
}

// Element of T ⊗ Σ: one spinor per frame direction e_a.
template <Scalar T>
using TensorSpinor = std::vector<SpinorVector<T>>;

template <Scalar T>
T norm2(const TensorSpinor<T>& psi)
{
    T s{};
    for (const auto& p : psi) s += norm2(p);
    return s;
}

template <Scalar T>
bool is_zero(const TensorSpinor<T>& psi)
{
    for (const auto& p : psi)
        if (!p.is_zero()) return false;
    return true;
}

// Linear map on the fiber with an optional grading annotation r -> r'.
template <Scalar T>
class FiberOperator {
public:
    FiberOperator() = default;
    explicit FiberOperator(Matrix<T> mat, std::optional<int> domain = {}, std::optional<int> codomain = {})
        : mat_(std::move(mat)), domain_(domain), codomain_(codomain)
    {
    }

    const Matrix<T>& matrix() const { return mat_; }
    std::optional<int> domain() const { return domain_; }
    std::optional<int> codomain() const { return codomain_; }

    SpinorVector<T> operator()(const SpinorVector<T>& phi) const
    {
        if (phi.dim() != mat_.cols()) throw context_mismatch("operator and spinor from different fibers");
        Vector<T> in = phi.coeffs();
        if (domain_)
            for (Mask s = 0; s < in.size(); ++s)
                if (grade_of(s) != *domain_) in[s] = T{};
        return SpinorVector<T>(phi.m(), mat_.apply(in));
    }

    FiberOperator adjoint() const { return FiberOperator(mat_.adjoint(), codomain_, domain_); }

    friend FiberOperator operator*(const FiberOperator& a, const FiberOperator& b)
    {
        return FiberOperator(a.mat_ * b.mat_, b.domain_, a.codomain_);
    }

private:
    Matrix<T> mat_;
    std::optional<int> domain_;
    std::optional<int> codomain_;
};

// Symmetric J-commuting endomorphism of the tangent model with rational entries.
class RicciModel {
public:
    RicciModel() = default;
    RicciModel(int m, std::vector<Rational> entries) : m_(m), a_(std::move(entries))
    {
        const int n = 2 * m_;
        if (a_.size() != static_cast<std::size_t>(n * n)) throw size_error("Ricci model needs (2m)^2 entries");
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if ((*this)(i, j) != (*this)(j, i)) throw domain_error("Ricci model must be symmetric");
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (jr(i, j) != rj(i, j)) throw domain_error("Ricci model must commute with J");
    }

    static RicciModel zero(int m) { return RicciModel(m, std::vector<Rational>(4 * m * m, Rational(0))); }

    static RicciModel scalar(int m, const Rational& lambda)
    {
        std::vector<Rational> a(4 * m * m, Rational(0));
        for (int i = 0; i < 2 * m; ++i) a[i * 2 * m + i] = lambda;
        return RicciModel(m, std::move(a));
    }

    static RicciModel einstein(int m, const Rational& s) { return scalar(m, s / Rational(2 * m)); }

    // Eigenvalues in order on consecutive J-invariant blocks; each multiplicity must be even.
    static RicciModel from_blocks(int m, const std::vector<std::pair<Rational, int>>& blocks)
    {
        std::vector<Rational> a(4 * m * m, Rational(0));
        int pos = 0;
        for (const auto& [lambda, mult] : blocks) {
            if (mult < 0 || mult % 2 != 0) throw domain_error("Ricci eigenvalue multiplicity must be even");
            for (int k = 0; k < mult; ++k, ++pos) {
                if (pos >= 2 * m) throw domain_error("Ricci multiplicities exceed 2m");
                a[pos * 2 * m + pos] = lambda;
            }
        }
        if (pos != 2 * m) throw domain_error("Ricci multiplicities must sum to 2m");
        return RicciModel(m, std::move(a));
    }

    // Real form of a Hermitian m x m matrix acting on complex coordinates z_l = x_{2l} + i x_{2l+1}.
    static RicciModel from_hermitian(int m, const Matrix<GaussRat>& h)
    {
        if (h.rows() != static_cast<std::size_t>(m) || h.cols() != static_cast<std::size_t>(m))
            throw size_error("Hermitian matrix must be m x m");
        const int n = 2 * m;
        std::vector<Rational> a(n * n, Rational(0));
        for (int l = 0; l < m; ++l)
            for (int k = 0; k < m; ++k) {
                const GaussRat& z = h(l, k);
                a[(2 * l) * n + 2 * k] = z.re();
                a[(2 * l) * n + 2 * k + 1] = -z.im();
                a[(2 * l + 1) * n + 2 * k] = z.im();
                a[(2 * l + 1) * n + 2 * k + 1] = z.re();
            }
        return RicciModel(m, std::move(a));
    }

    int m() const { return m_; }
    const Rational& operator()(int i, int j) const { return a_[i * 2 * m_ + j]; }

    Rational scalar_curvature() const
    {
        Rational s(0);
        for (int i = 0; i < 2 * m_; ++i) s += (*this)(i, i);
        return s;
    }

    RicciModel power(int s) const
    {
        const int n = 2 * m_;
        std::vector<Rational> p(n * n, Rational(0));
        for (int i = 0; i < n; ++i) p[i * n + i] = 1;
        for (int step = 0; step < s; ++step) {
            std::vector<Rational> q(n * n, Rational(0));
            for (int i = 0; i < n; ++i)
                for (int k = 0; k < n; ++k) {
                    if (is_zero(p[i * n + k])) continue;
                    for (int j = 0; j < n; ++j)
                        if (!is_zero((*this)(k, j))) q[i * n + j] += p[i * n + k] * (*this)(k, j);
                }
            p = std::move(q);
        }
        return RicciModel(m_, std::move(p));
    }

    template <Scalar T>
    TangentVector<T> apply(const TangentVector<T>& x) const
    {
        const int n = 2 * m_;
        if (x.size() != static_cast<std::size_t>(n)) throw context_mismatch("tangent vector dimension differs");
        TangentVector<T> y(n, T{});
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (!is_zero((*this)(i, j)) && !is_zero(x[j])) y[i] += kspin::scalar<T>((*this)(i, j)) * x[j];
        return y;
    }

private:
    // (J A)_{ij} and (A J)_{ij} with J e_{2l} = e_{2l+1}, J e_{2l+1} = -e_{2l}.
    Rational jr(int i, int j) const { return i % 2 == 0 ? -(*this)(i + 1, j) : (*this)(i - 1, j); }
    Rational rj(int i, int j) const { return j % 2 == 0 ? (*this)(i, j + 1) : -(*this)(i, j - 1); }

    int m_ = 0;
    std::vector<Rational> a_;
};

// Clifford module of Spin(2m) on Λ(C^m) with fermionic creation/annihilation generators.
template <Scalar T>
class FiberContext {
public:
    explicit FiberContext(int m) : m_(m)
    {
        if (m < 1 || m > 8) throw size_error("fiber dimension m must satisfy 1 <= m <= 8, got " + std::to_string(m));
        const Mask dim = Mask{1} << m;
        const T one(1);
        const T i = imag_unit<T>();
        for (int a = 0; a < 2 * m; ++a) {
            const int l = a / 2;
            const Mask bit = Mask{1} << l;
            Generator g{std::vector<Mask>(dim), std::vector<T>(dim)};
            for (Mask s = 0; s < dim; ++s) {
                const bool odd = std::popcount(s & (bit - 1)) % 2 != 0;
                const T sign = odd ? -one : one;
                g.target[s] = s ^ bit;
                if (a % 2 == 0)
                    g.coeff[s] = (s & bit) ? -sign : sign;  // a_l^† - a_l
                else
                    g.coeff[s] = i * sign;  // i (a_l^† + a_l)
            }
            gens_.push_back(std::move(g));
        }
        j_sign_.assign(dim, 0);
        const Mask full = dim - 1;
        j_sign_[0] = 1;
        for (Mask s = 1; s < dim; ++s) {
            const Mask low = s & (~s + 1);
            const Mask prev = s ^ low;
            const Mask u = full ^ prev;
            const bool odd = std::popcount(u & (low - 1)) % 2 != 0;
            j_sign_[s] = -j_sign_[prev] * (odd ? -1 : 1);
        }
    }

    int m() const { return m_; }
    int n() const { return 2 * m_; }
    std::size_t dim() const { return std::size_t{1} << m_; }
    std::int64_t grade_dim(int r) const { return binomial(m_, r); }
    static std::string basis_convention() { return "e_{2j-1}, e_{2j} = J e_{2j-1}, j = 1..m; fiber basis: subsets of {1..m}"; }

    std::vector<int> grade_dims() const
    {
        std::vector<int> d;
        for (int r = 0; r <= m_; ++r) d.push_back(static_cast<int>(binomial(m_, r)));
        return d;
    }

    std::vector<Mask> grade_basis(int r) const
    {
        std::vector<Mask> b;
        for (Mask s = 0; s < dim(); ++s)
            if (grade_of(s) == r) b.push_back(s);
        return b;
    }

    SpinorVector<T> zero_spinor() const { return SpinorVector<T>(m_); }

    SpinorVector<T> basis_spinor(Mask s) const
    {
        SpinorVector<T> v(m_);
        v[s] = T(1);
        return v;
    }

    TangentVector<T> basis_vector(int a) const
    {
        TangentVector<T> v(n(), T{});
        v.at(a) = T(1);
        return v;
    }

    TangentVector<T> J(const TangentVector<T>& x) const
    {
        check_tangent(x);
        TangentVector<T> y(n(), T{});
        for (int l = 0; l < m_; ++l) {
            y[2 * l + 1] = x[2 * l];
            y[2 * l] = -x[2 * l + 1];
        }
        return y;
    }

    TangentVector<T> plus(const TangentVector<T>& x) const { return half_combination(x, -imag_unit<T>()); }
    TangentVector<T> minus(const TangentVector<T>& x) const { return half_combination(x, imag_unit<T>()); }
    TangentVector<T> e_plus(int a) const { return plus(basis_vector(a)); }
    TangentVector<T> e_minus(int a) const { return minus(basis_vector(a)); }

    // c(e_a) φ for a single frame vector.
    SpinorVector<T> gamma(int a, const SpinorVector<T>& phi) const
    {
        check_spinor(phi);
        const Generator& g = gens_.at(a);
        SpinorVector<T> out(m_);
        for (Mask s = 0; s < dim(); ++s)
            if (!is_zero(phi[s])) out[g.target[s]] += g.coeff[s] * phi[s];
        return out;
    }

    // c(Z) φ for a complex tangent vector Z.
    SpinorVector<T> clifford(const TangentVector<T>& z, const SpinorVector<T>& phi) const
    {
        check_tangent(z);
        check_spinor(phi);
        SpinorVector<T> out(m_);
        for (int a = 0; a < n(); ++a) {
            if (is_zero(z[a])) continue;
            const Generator& g = gens_[a];
            for (Mask s = 0; s < dim(); ++s)
                if (!is_zero(phi[s])) out[g.target[s]] += z[a] * g.coeff[s] * phi[s];
        }
        return out;
    }

    Matrix<T> gamma_matrix(int a) const
    {
        const Generator& g = gens_.at(a);
        Matrix<T> c(dim(), dim());
        for (Mask s = 0; s < dim(); ++s) c(g.target[s], s) = g.coeff[s];
        return c;
    }

    Matrix<T> clifford_matrix(const TangentVector<T>& z) const
    {
        check_tangent(z);
        Matrix<T> c(dim(), dim());
        for (int a = 0; a < n(); ++a) {
            if (is_zero(z[a])) continue;
            const Generator& g = gens_[a];
            for (Mask s = 0; s < dim(); ++s) c(g.target[s], s) += z[a] * g.coeff[s];
        }
        return c;
    }

    Matrix<T> grade_projector(int r) const
    {
        Matrix<T> p(dim(), dim());
        for (Mask s = 0; s < dim(); ++s)
            if (grade_of(s) == r) p(s, s) = T(1);
        return p;
    }

    int j_sign(Mask s) const { return j_sign_[s]; }

    void check_spinor(const SpinorVector<T>& phi) const
    {
        if (phi.m() != m_) throw context_mismatch("spinor does not belong to this fiber");
    }

    void check_tangent(const TangentVector<T>& x) const
    {
        if (x.size() != static_cast<std::size_t>(n())) throw context_mismatch("tangent vector does not belong to this fiber");
    }

    void check_grade(int r) const
    {
        if (r < 0 || r > m_) throw domain_error("grade r must satisfy 0 <= r <= m");
    }

private:
    struct Generator {
        std::vector<Mask> target;
        std::vector<T> coeff;
    };

    TangentVector<T> half_combination(const TangentVector<T>& x, const T& w) const
    {
        TangentVector<T> jx = J(x);
        TangentVector<T> y(n(), T{});
        const T half = scalar<T>(1, 2);
        for (int a = 0; a < n(); ++a) y[a] = half * (x[a] + w * jx[a]);
        return y;
    }

    int m_;
    std::vector<Generator> gens_;
    std::vector<int> j_sign_;
};

template <Scalar T>
FiberContext<T> build_fiber(int m)
{
    return FiberContext<T>(m);
}

template <Scalar T>
SpinorVector<T> clifford_mul(const FiberContext<T>& ctx, const TangentVector<T>& x, const SpinorVector<T>& phi)
{
    return ctx.clifford(x, phi);
}

// k-form with coefficients on strictly increasing 0-based index tuples.
template <Scalar T>
struct Form {
    int degree = 0;
    std::map<std::vector<int>, T> coeffs;

    static Form one_form(const TangentVector<T>& v)
    {
        Form f{1, {}};
        for (int a = 0; a < static_cast<int>(v.size()); ++a)
            if (!is_zero(v[a])) f.coeffs[{a}] = v[a];
        return f;
    }

    // From the antisymmetric matrix A(i, j) = α(e_i, e_j).
    static Form two_form(const Matrix<T>& a)
    {
        Form f{2, {}};
        for (std::size_t i = 0; i < a.rows(); ++i)
            for (std::size_t j = i + 1; j < a.cols(); ++j)
                if (!is_zero(a(i, j))) f.coeffs[{static_cast<int>(i), static_cast<int>(j)}] = a(i, j);
        return f;
    }
};

template <Scalar T>
void check_form(const FiberContext<T>& ctx, const Form<T>& alpha)
{
    if (alpha.degree < 0 || alpha.degree > ctx.n()) throw domain_error("form degree must satisfy 0 <= k <= 2m");
    for (const auto& [idx, c] : alpha.coeffs) {
        if (static_cast<int>(idx.size()) != alpha.degree) throw domain_error("form index tuple has wrong length");
        for (std::size_t t = 0; t < idx.size(); ++t) {
            if (idx[t] < 0 || idx[t] >= ctx.n()) throw domain_error("form index out of range");
            if (t > 0 && idx[t] <= idx[t - 1]) throw domain_error("form indices must be strictly increasing");
        }
    }
}

template <Scalar T>
SpinorVector<T> form_action(const FiberContext<T>& ctx, const Form<T>& alpha, const SpinorVector<T>& phi)
{
    check_form(ctx, alpha);
    SpinorVector<T> out = ctx.zero_spinor();
    for (const auto& [idx, c] : alpha.coeffs) {
        SpinorVector<T> v = phi;
        for (auto it = idx.rbegin(); it != idx.rend(); ++it) v = ctx.gamma(*it, v);
        out += c * v;
    }
    return out;
}

template <Scalar T>
Matrix<T> operator_matrix(const FiberContext<T>& ctx, const auto& op)
{
    Matrix<T> mat(ctx.dim(), ctx.dim());
    for (Mask s = 0; s < ctx.dim(); ++s) {
        SpinorVector<T> col = op(ctx.basis_spinor(s));
        for (Mask t = 0; t < ctx.dim(); ++t) mat(t, s) = col[t];
    }
    return mat;
}

template <Scalar T>
Matrix<T> form_matrix(const FiberContext<T>& ctx, const Form<T>& alpha)
{
    return operator_matrix(ctx, [&](const SpinorVector<T>& v) { return form_action(ctx, alpha, v); });
}

// Ω(X, Y) = g(JX, Y).
template <Scalar T>
Form<T> kahler_form(const FiberContext<T>& ctx)
{
    Matrix<T> a(ctx.n(), ctx.n());
    for (int i = 0; i < ctx.n(); ++i) {
        TangentVector<T> ji = ctx.J(ctx.basis_vector(i));
        for (int j = 0; j < ctx.n(); ++j) a(i, j) = ji[j];
    }
    return Form<T>::two_form(a);
}

// ρ_s(X, Y) = g(J Ric^s X, Y); s = 1 gives the Ricci form Ric(JX, Y).
template <Scalar T>
Form<T> ricci_form(const FiberContext<T>& ctx, const RicciModel& ric, int s = 1)
{
    RicciModel p = ric.power(s);
    Matrix<T> a(ctx.n(), ctx.n());
    for (int i = 0; i < ctx.n(); ++i) {
        TangentVector<T> v = ctx.J(p.apply(ctx.basis_vector(i)));
        for (int j = 0; j < ctx.n(); ++j) a(i, j) = v[j];
    }
    return Form<T>::two_form(a);
}

// ½ Σ_a e_a · J e_a · φ.
template <Scalar T>
SpinorVector<T> omega_action(const FiberContext<T>& ctx, const SpinorVector<T>& phi)
{
    SpinorVector<T> out = ctx.zero_spinor();
    for (int a = 0; a < ctx.n(); ++a) out += ctx.gamma(a, ctx.clifford(ctx.J(ctx.basis_vector(a)), phi));
    return scalar<T>(1, 2) * out;
}

template <Scalar T>
Matrix<T> omega_matrix(const FiberContext<T>& ctx)
{
    return operator_matrix(ctx, [&](const SpinorVector<T>& v) { return omega_action(ctx, v); });
}

// i^m e_1·Je_1 ⋯ e_m·Je_m with the complex orientation.
template <Scalar T>
SpinorVector<T> volume_form_action(const FiberContext<T>& ctx, const SpinorVector<T>& phi)
{
    SpinorVector<T> v = phi;
    for (int l = ctx.m() - 1; l >= 0; --l) v = ctx.gamma(2 * l, ctx.gamma(2 * l + 1, v));
    T phase(1);
    for (int l = 0; l < ctx.m(); ++l) phase *= imag_unit<T>();
    return phase * v;
}

template <Scalar T>
Matrix<T> volume_matrix(const FiberContext<T>& ctx)
{
    return operator_matrix(ctx, [&](const SpinorVector<T>& v) { return volume_form_action(ctx, v); });
}

template <Scalar T>
SpinorVector<T> project_grade(const FiberContext<T>& ctx, const SpinorVector<T>& phi, int r)
{
    ctx.check_grade(r);
    ctx.check_spinor(phi);
    SpinorVector<T> out = ctx.zero_spinor();
    for (Mask s = 0; s < ctx.dim(); ++s)
        if (grade_of(s) == r) out[s] = phi[s];
    return out;
}

// ½ Σ_a e_a · J Ric^s(e_a).
template <Scalar T>
Matrix<T> build_rho_s(const FiberContext<T>& ctx, const RicciModel& ric, int s)
{
    if (s < 0 || s > 6) throw domain_error("rho_s requires 0 <= s <= 6");
    if (ric.m() != ctx.m()) throw context_mismatch("Ricci model dimension differs from fiber");
    RicciModel p = ric.power(s);
    return operator_matrix(ctx, [&](const SpinorVector<T>& v) {
        SpinorVector<T> out = ctx.zero_spinor();
        for (int a = 0; a < ctx.n(); ++a) out += ctx.gamma(a, ctx.clifford(ctx.J(p.apply(ctx.basis_vector(a))), v));
        return scalar<T>(1, 2) * out;
    });
}

template <Scalar T>
void require_grade(const SpinorVector<T>& psi, int r, const char* what)
{
    if (!psi.in_grade(r)) throw grade_error(std::string(what) + ": spinor is not of grade " + std::to_string(r));
}

template <Scalar T>
void require_grade(const TensorSpinor<T>& psi, int r, const char* what)
{
    for (const auto& p : psi) require_grade(p, r, what);
}

// ι_r^+ : Σ_{r+1} -> T ⊗ Σ_r, ψ ↦ (-e_a^- ψ / (2(r+1)))_a.
template <Scalar T>
TensorSpinor<T> iota_plus(const FiberContext<T>& ctx, const SpinorVector<T>& psi, int r)
{
    ctx.check_grade(r);
    require_grade(psi, r + 1, "iota_plus");
    const T f = scalar<T>(-1, 2 * (r + 1));
    TensorSpinor<T> out;
    for (int a = 0; a < ctx.n(); ++a) out.push_back(f * ctx.clifford(ctx.e_minus(a), psi));
    return out;
}

// ι_r^- : Σ_{r-1} -> T ⊗ Σ_r, ψ ↦ (-e_a^+ ψ / (2(m-r+1)))_a.
template <Scalar T>
TensorSpinor<T> iota_minus(const FiberContext<T>& ctx, const SpinorVector<T>& psi, int r)
{
    ctx.check_grade(r);
    require_grade(psi, r - 1, "iota_minus");
    const T f = scalar<T>(-1, 2 * (ctx.m() - r + 1));
    TensorSpinor<T> out;
    for (int a = 0; a < ctx.n(); ++a) out.push_back(f * ctx.clifford(ctx.e_plus(a), psi));
    return out;
}

template <Scalar T>
void check_tensor(const FiberContext<T>& ctx, const TensorSpinor<T>& psi)
{
    if (psi.size() != static_cast<std::size_t>(ctx.n())) throw context_mismatch("tensor spinor needs 2m components");
    for (const auto& p : psi) ctx.check_spinor(p);
}

// c_r^± Ψ = Σ_a e_a^± Ψ_a.
template <Scalar T>
SpinorVector<T> c_plus(const FiberContext<T>& ctx, const TensorSpinor<T>& psi, int r)
{
    ctx.check_grade(r);
    check_tensor(ctx, psi);
    require_grade(psi, r, "c_plus");
    SpinorVector<T> out = ctx.zero_spinor();
    for (int a = 0; a < ctx.n(); ++a) out += ctx.clifford(ctx.e_plus(a), psi[a]);
    return out;
}

template <Scalar T>
SpinorVector<T> c_minus(const FiberContext<T>& ctx, const TensorSpinor<T>& psi, int r)
{
    ctx.check_grade(r);
    check_tensor(ctx, psi);
    require_grade(psi, r, "c_minus");
    SpinorVector<T> out = ctx.zero_spinor();
    for (int a = 0; a < ctx.n(); ++a) out += ctx.clifford(ctx.e_minus(a), psi[a]);
    return out;
}

template <Scalar T>
TensorSpinor<T> twistor_project_fiber(const FiberContext<T>& ctx, const TensorSpinor<T>& psi, int r)
{
    TensorSpinor<T> out = psi;
    if (r < ctx.m()) {
        TensorSpinor<T> p = iota_plus(ctx, c_plus(ctx, psi, r), r);
        for (int a = 0; a < ctx.n(); ++a) out[a] -= p[a];
    }
    if (r > 0) {
        TensorSpinor<T> q = iota_minus(ctx, c_minus(ctx, psi, r), r);
        for (int a = 0; a < ctx.n(); ++a) out[a] -= q[a];
    }
    return out;
}

// Matrix of the twistor projector on the basis (a, S), |S| = r, ordered by a then S.
template <Scalar T>
Matrix<T> twistor_projector_matrix(const FiberContext<T>& ctx, int r)
{
    ctx.check_grade(r);
    const std::vector<Mask> basis = ctx.grade_basis(r);
    const std::size_t g = basis.size();
    const std::size_t total = ctx.n() * g;
    Matrix<T> p(total, total);
    for (int a = 0; a < ctx.n(); ++a)
        for (std::size_t k = 0; k < g; ++k) {
            TensorSpinor<T> e(ctx.n(), ctx.zero_spinor());
            e[a][basis[k]] = T(1);
            TensorSpinor<T> img = twistor_project_fiber(ctx, e, r);
            for (int b = 0; b < ctx.n(); ++b)
                for (std::size_t l = 0; l < g; ++l) p(b * g + l, a * g + k) = img[b][basis[l]];
        }
    return p;
}

// Conjugate-linear structure: complement the multi-index, apply a sign, conjugate.
template <Scalar T>
SpinorVector<T> j_map(const FiberContext<T>& ctx, const SpinorVector<T>& phi)
{
    ctx.check_spinor(phi);
    const Mask full = static_cast<Mask>(ctx.dim() - 1);
    SpinorVector<T> out = ctx.zero_spinor();
    for (Mask s = 0; s < ctx.dim(); ++s) {
        if (is_zero(phi[s])) continue;
        T c = conj(phi[s]);
        out[full ^ s] = ctx.j_sign(s) < 0 ? -c : c;
    }
    return out;
}

template <Scalar T>
SpinorVector<T> random_spinor(const FiberContext<T>& ctx, Rng& rng, int grade = -1)
{
    SpinorVector<T> v = ctx.zero_spinor();
    for (Mask s = 0; s < ctx.dim(); ++s)
        if (grade < 0 || grade_of(s) == grade) v[s] = random_scalar<T>(rng);
    return v;
}

template <Scalar T>
TangentVector<T> random_tangent(const FiberContext<T>& ctx, Rng& rng, bool real = true)
{
    TangentVector<T> v(ctx.n(), T{});
    for (auto& x : v) x = real ? scalar<T>(random_rational(rng)) : random_scalar<T>(rng);
    return v;
}

inline RicciModel random_ricci(int m, Rng& rng)
{
    Matrix<GaussRat> h(m, m);
    for (int l = 0; l < m; ++l) {
        h(l, l) = GaussRat(random_rational(rng));
        for (int k = l + 1; k < m; ++k) {
            h(l, k) = random_scalar<GaussRat>(rng);
            h(k, l) = h(l, k).conj();
        }
    }
    return RicciModel::from_hermitian(m, h);
}

}  // namespace kspin
