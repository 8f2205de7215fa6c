#pragma once

#include "error.hpp"
#include "fiber.hpp"
#include "matrix.hpp"
#include "report.hpp"
#include "torus.hpp"

#include <functional>
#include <map>
#include <set>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace kspin {

// T_X φ = ∇_X φ + X·Dφ / n.
template <Scalar T>
TangentSpinorField<T> riemannian_twistor(const FiberContext<T>& ctx, const FourierSpinorField<T>& phi)
{
    const auto dphi = apply_D(ctx, phi);
    const T inv_n = scalar<T>(1, ctx.n());
    TangentSpinorField<T> out;
    for (int a = 0; a < ctx.n(); ++a) {
        const auto e = ctx.basis_vector(a);
        out.push_back(covariant_derivative(ctx, e, phi) + inv_n * clifford_const(ctx, e, dphi));
    }
    return out;
}

// (T_r)_X φ = ∇_X φ + X^+·D^-φ / (2(m-r+1)) + X^-·D^+φ / (2(r+1)).
template <Scalar T>
TangentSpinorField<T> kahlerian_twistor(const FiberContext<T>& ctx, const FourierSpinorField<T>& phi, int r)
{
    ctx.check_grade(r);
    if (!phi.in_grade(r)) throw grade_error("kahlerian_twistor: field is not of grade " + std::to_string(r));
    const auto dp = apply_Dplus(ctx, phi);
    const auto dm = apply_Dminus(ctx, phi);
    const T cm = scalar<T>(1, 2 * (ctx.m() - r + 1));
    const T cp = scalar<T>(1, 2 * (r + 1));
    TangentSpinorField<T> out;
    for (int a = 0; a < ctx.n(); ++a) {
        auto t = covariant_derivative(ctx, ctx.basis_vector(a), phi);
        t += cm * clifford_const(ctx, ctx.e_plus(a), dm);
        t += cp * clifford_const(ctx, ctx.e_minus(a), dp);
        out.push_back(std::move(t));
    }
    return out;
}

template <Scalar T>
FourierSpinorField<T> contraction(const FiberContext<T>& ctx, const TangentSpinorField<T>& psi)
{
    FourierSpinorField<T> out(ctx.m(), psi.front().band());
    for (int a = 0; a < ctx.n(); ++a) out += clifford_const(ctx, ctx.basis_vector(a), psi[a]);
    return out;
}

template <Scalar T>
FourierSpinorField<T> single_mode(const FiberContext<T>& ctx, const Wavevector& k, const SpinorVector<T>& v)
{
    FourierSpinorField<T> f(ctx.m(), band_of(k));
    f.add(k, v);
    return f;
}

// Mode symbol of T_r at wavevector k on the graded bases: rows (a, S), columns S, |S| = r.
template <Scalar T>
Matrix<T> kahlerian_twistor_symbol(const FiberContext<T>& ctx, int r, const Wavevector& k)
{
    const auto basis = ctx.grade_basis(r);
    const std::size_t g = basis.size();
    Matrix<T> sym(ctx.n() * g, g);
    for (std::size_t j = 0; j < g; ++j) {
        auto t = kahlerian_twistor(ctx, single_mode(ctx, k, ctx.basis_spinor(basis[j])), r);
        for (int a = 0; a < ctx.n(); ++a) {
            const auto v = t[a].coefficient(k);
            for (std::size_t i = 0; i < g; ++i) sym(a * g + i, j) = v[basis[i]];
        }
    }
    return sym;
}

template <Scalar T>
Matrix<T> riemannian_twistor_symbol(const FiberContext<T>& ctx, const Wavevector& k)
{
    const std::size_t d = ctx.dim();
    Matrix<T> sym(ctx.n() * d, d);
    for (Mask s = 0; s < d; ++s) {
        auto t = riemannian_twistor(ctx, single_mode(ctx, k, ctx.basis_spinor(s)));
        for (int a = 0; a < ctx.n(); ++a) {
            const auto v = t[a].coefficient(k);
            for (Mask i = 0; i < d; ++i) sym(a * d + i, s) = v[i];
        }
    }
    return sym;
}

// T_r^* T_r computed from the exact mode-block adjoint.
template <Scalar T>
FourierSpinorField<T> twistor_adjoint_square(const FiberContext<T>& ctx, const FourierSpinorField<T>& phi, int r)
{
    const auto basis = ctx.grade_basis(r);
    return map_modes<T>(phi, [&](const Wavevector& k, const SpinorVector<T>& v) {
        const Matrix<T> sym = kahlerian_twistor_symbol(ctx, r, k);
        Vector<T> in(basis.size());
        for (std::size_t i = 0; i < basis.size(); ++i) in[i] = v[basis[i]];
        const Vector<T> out = (sym.adjoint() * sym).apply(in);
        SpinorVector<T> w = ctx.zero_spinor();
        for (std::size_t i = 0; i < basis.size(); ++i) w[basis[i]] = out[i];
        return w;
    });
}

// Weitzenböck identity ∇*∇ = D^-D^+/(2(r+1)) + D^+D^-/(2(m-r+1)) + T_r^*T_r; returns the residual field.
template <Scalar T>
FourierSpinorField<T> weitzenboeck_residual(const FiberContext<T>& ctx, const FourierSpinorField<T>& phi, int r)
{
    const T cp = scalar<T>(1, 2 * (r + 1));
    const T cm = scalar<T>(1, 2 * (ctx.m() - r + 1));
    auto rhs = cp * apply_Dminus(ctx, apply_Dplus(ctx, phi)) + cm * apply_Dplus(ctx, apply_Dminus(ctx, phi)) +
               twistor_adjoint_square(ctx, phi, r);
    return rough_laplacian(ctx, phi) - rhs;
}

// Per-mode kernel dimensions of an operator pencil over the wavevector box.
template <Scalar T>
struct KernelReport {
    std::string operator_name;
    int m = 0;
    int r = 0;
    int band = 0;
    std::size_t domain_dim = 0;
    std::size_t modes_checked = 0;
    std::map<Wavevector, std::size_t> nullity;  // nonzero entries only
    std::size_t total_dimension = 0;
    std::vector<Vector<T>> zero_mode_basis;

    std::size_t nonzero_mode_dimension() const
    {
        std::size_t s = 0;
        for (const auto& [k, d] : nullity)
            if (band_of(k) > 0) s += d;
        return s;
    }

    bool all_constant() const { return nonzero_mode_dimension() == 0; }
};

template <Scalar T>
json to_json(const KernelReport<T>& rep)
{
    json j;
    j["operator"] = rep.operator_name;
    j["m"] = rep.m;
    j["r"] = rep.r;
    j["band"] = rep.band;
    j["domain_dim"] = rep.domain_dim;
    j["modes_checked"] = rep.modes_checked;
    j["total_dimension"] = rep.total_dimension;
    j["nonconstant_dimension"] = rep.nonzero_mode_dimension();
    json table = json::array();
    for (const auto& [k, d] : rep.nullity) table.push_back(json{{"k", k}, {"nullity", d}});
    j["nullity_table"] = std::move(table);
    json basis = json::array();
    for (const auto& v : rep.zero_mode_basis) {
        json col = json::array();
        for (const auto& z : v) {
            if constexpr (scalar_traits<T>::exact)
                col.push_back(to_string(z));
            else
                col.push_back(json::array({z.real(), z.imag()}));
        }
        basis.push_back(std::move(col));
    }
    j["zero_mode_basis"] = std::move(basis);
    return j;
}

// M(k) = B + Σ_l k_l M_l, a matrix affine in the wavevector.
template <Scalar T>
struct AffinePencil {
    Matrix<T> base;
    std::vector<Matrix<T>> linear;

    Matrix<T> at(const Wavevector& k) const
    {
        Matrix<T> m = base;
        for (std::size_t l = 0; l < linear.size(); ++l)
            if (k[l] != 0) m += linear[l] * T(k[l]);
        return m;
    }
};

namespace detail {

struct SparseIntTerm {
    std::size_t index;
    GaussInt value;
};

inline std::vector<SparseIntTerm> sparse_terms(const std::vector<GaussInt>& dense)
{
    std::vector<SparseIntTerm> t;
    for (std::size_t i = 0; i < dense.size(); ++i)
        if (!dense[i].is_zero()) t.push_back({i, dense[i]});
    return t;
}

}  // namespace detail

template <Scalar T>
KernelReport<T> pencil_kernel(const AffinePencil<T>& pencil, int band, double tol, std::string name, int m, int r)
{
    KernelReport<T> rep;
    rep.operator_name = std::move(name);
    rep.m = m;
    rep.r = r;
    rep.band = band;
    const std::size_t rows = pencil.base.rows();
    const std::size_t cols = pencil.base.cols();
    rep.domain_dim = cols;
    const int n = static_cast<int>(pencil.linear.size());
    const Wavevector zero(n, 0);

    if constexpr (scalar_traits<T>::exact)
        rep.zero_mode_basis = nullspace(pencil.at(zero));
    else
        rep.zero_mode_basis = nullspace(pencil.at(zero), tol);

    if constexpr (scalar_traits<T>::exact) {
        Integer scale = common_denominator(pencil.base);
        for (const auto& l : pencil.linear) scale = lcm_int(scale, common_denominator(l));
        const auto base = detail::sparse_terms(to_gauss_int(pencil.base, scale));
        std::vector<std::vector<detail::SparseIntTerm>> lin;
        for (const auto& l : pencil.linear) lin.push_back(detail::sparse_terms(to_gauss_int(l, scale)));
        std::vector<GaussInt> work(rows * cols);
        for_each_wavevector(n, band, [&](const Wavevector& k) {
            ++rep.modes_checked;
            std::size_t nul;
            if (k == zero)
                nul = rep.zero_mode_basis.size();
            else {
                std::fill(work.begin(), work.end(), GaussInt{});
                for (const auto& t : base) work[t.index] = t.value;
                for (int l = 0; l < n; ++l) {
                    if (k[l] == 0) continue;
                    const __int128 c = k[l];
                    for (const auto& t : lin[l]) {
                        work[t.index].re += c * t.value.re;
                        work[t.index].im += c * t.value.im;
                    }
                }
                nul = cols - gauss_int_rank(work, rows, cols);
            }
            if (nul > 0) rep.nullity[k] = nul;
            rep.total_dimension += nul;
        });
    } else {
        for_each_wavevector(n, band, [&](const Wavevector& k) {
            ++rep.modes_checked;
            const std::size_t nul = k == zero ? rep.zero_mode_basis.size() : cols - rank(pencil.at(k), tol);
            if (nul > 0) rep.nullity[k] = nul;
            rep.total_dimension += nul;
        });
    }
    return rep;
}

template <Scalar T>
AffinePencil<T> pencil_from_symbols(const FiberContext<T>& ctx, const std::function<Matrix<T>(const Wavevector&)>& symbol)
{
    const Wavevector zero(ctx.n(), 0);
    AffinePencil<T> p{symbol(zero), {}};
    for (int l = 0; l < ctx.n(); ++l) {
        Wavevector e = zero;
        e[l] = 1;
        p.linear.push_back(symbol(e) - p.base);
    }
    return p;
}

template <Scalar T>
KernelReport<T> twistor_kernel(const FiberContext<T>& ctx, int r, int band, double tol = 1e-10)
{
    ctx.check_grade(r);
    auto pencil = pencil_from_symbols<T>(ctx, [&](const Wavevector& k) { return kahlerian_twistor_symbol(ctx, r, k); });
    return pencil_kernel(pencil, band, tol, "kahlerian-twistor", ctx.m(), r);
}

template <Scalar T>
KernelReport<T> riemannian_twistor_kernel(const FiberContext<T>& ctx, int band, double tol = 1e-10)
{
    auto pencil = pencil_from_symbols<T>(ctx, [&](const Wavevector& k) { return riemannian_twistor_symbol(ctx, k); });
    return pencil_kernel(pencil, band, tol, "riemannian-twistor", ctx.m(), -1);
}

enum class ConnectionVariant { full, kahler_einstein, reduced };

inline const char* to_string(ConnectionVariant v)
{
    switch (v) {
    case ConnectionVariant::full: return "full";
    case ConnectionVariant::kahler_einstein: return "kahler-einstein";
    case ConnectionVariant::reduced: return "reduced";
    }
    return "?";
}

// Parameters of the block connection; gradient data default to zero (constant S, parallel Ric).
struct TwistorParams {
    int m = 0;
    int r = 0;
    Rational scalar_curvature{0};
    RicciModel ricci;
    std::vector<Rational> grad_s;
    std::vector<RicciModel> nabla_ricci;

    static TwistorParams flat(int m, int r) { return {m, r, Rational(0), RicciModel::zero(m), {}, {}}; }
};

inline void check_connection_params(int m, int r)
{
    if (r <= 0 || r >= m || 2 * r == m)
        throw parameter_error("twistor connections require 0 < r < m and r != m/2, got m=" + std::to_string(m) +
                              ", r=" + std::to_string(r));
}

inline bool connection_admissible(int m, int r) { return r > 0 && r < m && 2 * r != m; }

// Stacked graded space with per-direction block operators of ∇̂_{e_a} - ∇_{e_a}.
template <Scalar T>
class BlockConnection {
public:
    BlockConnection(const FiberContext<T>& ctx, ConnectionVariant variant, std::vector<int> grades)
        : m_(ctx.m()), variant_(variant), grades_(std::move(grades))
    {
        std::size_t off = 0;
        for (int g : grades_) {
            bases_.push_back(g < 0 || g > m_ ? std::vector<Mask>{} : ctx.grade_basis(g));
            offsets_.push_back(off);
            off += bases_.back().size();
        }
        dim_ = off;
        for (int a = 0; a < ctx.n(); ++a) coupling_.emplace_back(dim_, dim_);
    }

    int m() const { return m_; }
    ConnectionVariant variant() const { return variant_; }
    const std::vector<int>& grades() const { return grades_; }
    std::size_t blocks() const { return grades_.size(); }
    std::size_t dim() const { return dim_; }
    std::size_t offset(std::size_t b) const { return offsets_[b]; }
    const std::vector<Mask>& basis(std::size_t b) const { return bases_[b]; }
    const Matrix<T>& coupling(int a) const { return coupling_[a]; }
    void set_entry(int a, std::size_t i, std::size_t j, const T& v) { coupling_[a](i, j) = v; }

    // Restriction of a fiber operator to the (row, col) block grades.
    void set_block(int a, std::size_t row, std::size_t col, const Matrix<T>& op)
    {
        const auto& rb = bases_[row];
        const auto& cb = bases_[col];
        for (std::size_t i = 0; i < rb.size(); ++i)
            for (std::size_t j = 0; j < cb.size(); ++j) coupling_[a](offsets_[row] + i, offsets_[col] + j) = op(rb[i], cb[j]);
    }

    Matrix<T> block(int a, std::size_t row, std::size_t col) const
    {
        Matrix<T> out(bases_[row].size(), bases_[col].size());
        for (std::size_t i = 0; i < out.rows(); ++i)
            for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) = coupling_[a](offsets_[row] + i, offsets_[col] + j);
        return out;
    }

    Vector<T> pack(const std::vector<SpinorVector<T>>& comps) const
    {
        if (comps.size() != grades_.size()) throw size_error("stacked section has wrong number of components");
        Vector<T> v(dim_, T{});
        for (std::size_t b = 0; b < grades_.size(); ++b) {
            if (!bases_[b].empty()) require_grade(comps[b], grades_[b], "stacked section");
            for (std::size_t i = 0; i < bases_[b].size(); ++i) v[offsets_[b] + i] = comps[b][bases_[b][i]];
        }
        return v;
    }

    std::vector<SpinorVector<T>> unpack(const Vector<T>& v) const
    {
        std::vector<SpinorVector<T>> comps;
        for (std::size_t b = 0; b < grades_.size(); ++b) {
            SpinorVector<T> s(m_);
            for (std::size_t i = 0; i < bases_[b].size(); ++i) s[bases_[b][i]] = v[offsets_[b] + i];
            comps.push_back(std::move(s));
        }
        return comps;
    }

private:
    int m_;
    ConnectionVariant variant_;
    std::vector<int> grades_;
    std::vector<std::vector<Mask>> bases_;
    std::vector<std::size_t> offsets_;
    std::size_t dim_ = 0;
    std::vector<Matrix<T>> coupling_;
};

template <Scalar T>
Matrix<T> vector_action(const FiberContext<T>& ctx, const std::vector<Rational>& v)
{
    TangentVector<T> t(ctx.n(), T{});
    for (int a = 0; a < ctx.n(); ++a) t[a] = scalar<T>(v[a]);
    return ctx.clifford_matrix(t);
}

template <Scalar T>
T directional(const std::vector<Rational>& grad, const TangentVector<T>& x)
{
    T s{};
    for (std::size_t a = 0; a < grad.size(); ++a)
        if (!is_zero(grad[a])) s += scalar<T>(grad[a]) * x[a];
    return s;
}

// A(X): ½D(Ric)(X) - (dS)^-·X^+/(4(2m-2r+1)) - (dS)^+·X^-/(4(2r+1)) - X^+(S)/(2(2m-2r+1)) - X^-(S)/(2(2r+1)).
template <Scalar T>
Matrix<T> connection_a_term(const FiberContext<T>& ctx, const TwistorParams& p, int a)
{
    const int m = p.m, r = p.r;
    Matrix<T> out(ctx.dim(), ctx.dim());
    const auto xp = ctx.e_plus(a);
    const auto xm = ctx.e_minus(a);
    if (!p.nabla_ricci.empty()) {
        Matrix<T> dric(ctx.dim(), ctx.dim());
        for (int b = 0; b < ctx.n(); ++b)
            dric += ctx.gamma_matrix(b) * ctx.clifford_matrix(p.nabla_ricci.at(b).template apply<T>(ctx.basis_vector(a)));
        out += scalar<T>(1, 2) * dric;
    }
    if (!p.grad_s.empty()) {
        TangentVector<T> g(ctx.n(), T{});
        for (int b = 0; b < ctx.n(); ++b) g[b] = scalar<T>(p.grad_s.at(b));
        const Matrix<T> id = Matrix<T>::identity(ctx.dim());
        out -= scalar<T>(1, 4 * (2 * m - 2 * r + 1)) * (ctx.clifford_matrix(ctx.minus(g)) * ctx.clifford_matrix(xp));
        out -= scalar<T>(1, 4 * (2 * r + 1)) * (ctx.clifford_matrix(ctx.plus(g)) * ctx.clifford_matrix(xm));
        out -= (scalar<T>(1, 2 * (2 * m - 2 * r + 1)) * directional(p.grad_s, xp)) * id;
        out -= (scalar<T>(1, 2 * (2 * r + 1)) * directional(p.grad_s, xm)) * id;
    }
    return out;
}

template <Scalar T>
BlockConnection<T> build_connection(const FiberContext<T>& ctx, const TwistorParams& p, ConnectionVariant variant)
{
    if (p.m != ctx.m()) throw context_mismatch("twistor parameters and fiber differ in m");
    check_connection_params(p.m, p.r);
    const int m = p.m, r = p.r;
    const T s = scalar<T>(p.scalar_curvature);
    const RicciModel ric = p.ricci.m() == m ? p.ricci : RicciModel::zero(m);
    const bool reduced = variant == ConnectionVariant::reduced;
    BlockConnection<T> conn(ctx, variant, reduced ? std::vector<int>{r, r + 1, r - 1} : std::vector<int>{r, r + 1, r - 1, r});
    const Matrix<T> rho = form_matrix(ctx, ricci_form(ctx, ric));
    const T i = imag_unit<T>();
    for (int a = 0; a < ctx.n(); ++a) {
        const auto ep = ctx.e_plus(a);
        const auto em = ctx.e_minus(a);
        const Matrix<T> xp = ctx.clifford_matrix(ep);
        const Matrix<T> xm = ctx.clifford_matrix(em);
        const Matrix<T> ric_p = ctx.clifford_matrix(ric.template apply<T>(ep));
        const Matrix<T> ric_m = ctx.clifford_matrix(ric.template apply<T>(em));
        const T half = scalar<T>(1, 2);
        conn.set_block(a, 0, 1, scalar<T>(1, 2 * (r + 1)) * xm);
        conn.set_block(a, 0, 2, scalar<T>(1, 2 * (m - r + 1)) * xp);
        switch (variant) {
        case ConnectionVariant::full:
            conn.set_block(a, 1, 0, (scalar<T>(-(r + 1), 4 * (m - 2 * r)) * s) * xp + half * ric_p);
            conn.set_block(a, 2, 0, (scalar<T>(m - r + 1, 4 * (m - 2 * r)) * s) * xm + half * ric_m);
            break;
        case ConnectionVariant::kahler_einstein:
            conn.set_block(a, 1, 0, (scalar<T>(-r * (m + 2), 4 * m * (m - 2 * r)) * s) * xp);
            conn.set_block(a, 2, 0, (scalar<T>((m - r) * (m + 2), 4 * m * (m - 2 * r)) * s) * xm);
            break;
        case ConnectionVariant::reduced:
            conn.set_block(a, 1, 0,
                           (scalar<T>(-1, 8 * (m + 1)) * s) * xp + half * ric_p + (scalar<T>(2 * r + 1, 4 * (m + 1)) * i) * (xp * rho));
            conn.set_block(a, 2, 0,
                           (scalar<T>(-1, 8 * (m + 1)) * s) * xm + half * ric_m -
                               (scalar<T>(2 * m - 2 * r + 1, 4 * (m + 1)) * i) * (xm * rho));
            break;
        }
        if (reduced) continue;
        conn.set_block(a, 1, 3, scalar<T>(2 * r + 1, 2 * (m - 2 * r)) * xp);
        conn.set_block(a, 2, 3, scalar<T>(-(2 * m - 2 * r + 1), 2 * (m - 2 * r)) * xm);
        if (variant == ConnectionVariant::full) conn.set_block(a, 3, 0, connection_a_term(ctx, p, a));
        conn.set_block(a, 3, 1, (scalar<T>(1, 4 * (2 * r + 1)) * s) * xm);
        conn.set_block(a, 3, 2, (scalar<T>(1, 4 * (2 * m - 2 * r + 1)) * s) * xp);
    }
    return conn;
}

// The η-eliminating operator (m+2)S/(4(m+1)) + (m-2r)/(2(m+1)) iρ restricted to Σ_r.
template <Scalar T>
Matrix<T> eta_reduction(const FiberContext<T>& ctx, const TwistorParams& p)
{
    const int m = p.m, r = p.r;
    const Matrix<T> rho = form_matrix(ctx, ricci_form(ctx, p.ricci.m() == m ? p.ricci : RicciModel::zero(m)));
    return (scalar<T>(m + 2, 4 * (m + 1)) * scalar<T>(p.scalar_curvature)) * Matrix<T>::identity(ctx.dim()) +
           (scalar<T>(m - 2 * r, 2 * (m + 1)) * imag_unit<T>()) * rho;
}

// Substitutes η = eta_reduction·φ into the first three rows of the four-block connection.
template <Scalar T>
BlockConnection<T> eliminate_eta(const FiberContext<T>& ctx, const BlockConnection<T>& full, const TwistorParams& p)
{
    if (full.blocks() != 4) throw parameter_error("eta elimination needs a four-block connection");
    BlockConnection<T> out(ctx, ConnectionVariant::reduced, {p.r, p.r + 1, p.r - 1});
    const auto basis_r = ctx.grade_basis(p.r);
    const Matrix<T> red = eta_reduction(ctx, p);
    Matrix<T> red_r(basis_r.size(), basis_r.size());
    for (std::size_t i = 0; i < basis_r.size(); ++i)
        for (std::size_t j = 0; j < basis_r.size(); ++j) red_r(i, j) = red(basis_r[i], basis_r[j]);
    for (int a = 0; a < ctx.n(); ++a) {
        Matrix<T> c(out.dim(), out.dim());
        for (std::size_t row = 0; row < 3; ++row)
            for (std::size_t col = 0; col < 3; ++col) {
                Matrix<T> b = full.block(a, row, col);
                if (col == 0) b += full.block(a, row, 3) * red_r;
                for (std::size_t i = 0; i < b.rows(); ++i)
                    for (std::size_t j = 0; j < b.cols(); ++j) c(out.offset(row) + i, out.offset(col) + j) = b(i, j);
            }
        for (std::size_t i = 0; i < c.rows(); ++i)
            for (std::size_t j = 0; j < c.cols(); ++j) out.set_entry(a, i, j, c(i, j));
    }
    return out;
}

// Parallel sections: per mode, (i k_a + C(e_a)) Ψ = 0 for every direction a.
template <Scalar T>
KernelReport<T> parallel_sections(const FiberContext<T>& ctx, const BlockConnection<T>& conn, int band, double tol = 1e-10)
{
    const std::size_t d = conn.dim();
    const int n = ctx.n();
    AffinePencil<T> p{Matrix<T>(n * d, d), {}};
    for (int a = 0; a < n; ++a)
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) p.base(a * d + i, j) = conn.coupling(a)(i, j);
    for (int l = 0; l < n; ++l) {
        Matrix<T> lin(n * d, d);
        for (std::size_t i = 0; i < d; ++i) lin(l * d + i, i) = imag_unit<T>();
        p.linear.push_back(std::move(lin));
    }
    const int r = conn.grades().front();
    return pencil_kernel(p, band, tol, std::string("parallel-") + to_string(conn.variant()), ctx.m(), r);
}

template <Scalar T>
using StackedField = std::vector<FourierSpinorField<T>>;

// φ ↦ (φ, D^+φ, D^-φ, D²φ); rejects fields outside ker T_r.
template <Scalar T>
StackedField<T> lift_spinor(const FiberContext<T>& ctx, const FourierSpinorField<T>& phi, int r, bool four_block = true,
                            double tol = 1e-9)
{
    const auto t = kahlerian_twistor(ctx, phi, r);
    if (scalar_traits<T>::exact ? !is_zero(t) : max_abs(t) > tol) throw precondition_error("lift_spinor: field is not in the kernel of T_r");
    StackedField<T> out{phi, apply_Dplus(ctx, phi), apply_Dminus(ctx, phi)};
    if (four_block) out.push_back(apply_D(ctx, apply_D(ctx, phi)));
    return out;
}

// ∇̂_{e_a} Ψ for every direction, mode by mode.
template <Scalar T>
std::vector<StackedField<T>> apply_connection(const FiberContext<T>& ctx, const BlockConnection<T>& conn, const StackedField<T>& psi)
{
    if (psi.size() != conn.blocks()) throw size_error("stacked field has wrong number of components");
    std::set<Wavevector> ks;
    int band = 0;
    for (const auto& f : psi) {
        band = std::max(band, f.band());
        for (const auto& [k, v] : f.modes()) ks.insert(k);
    }
    const T i = imag_unit<T>();
    std::vector<StackedField<T>> out;
    for (int a = 0; a < ctx.n(); ++a) {
        StackedField<T> res(conn.blocks(), FourierSpinorField<T>(ctx.m(), band));
        for (const auto& k : ks) {
            std::vector<SpinorVector<T>> comps;
            for (const auto& f : psi) comps.push_back(f.coefficient(k));
            Vector<T> v = conn.pack(comps);
            Vector<T> w = conn.coupling(a).apply(v);
            const T f = i * T(k[a]);
            for (std::size_t j = 0; j < v.size(); ++j) w[j] += f * v[j];
            auto parts = conn.unpack(w);
            for (std::size_t b = 0; b < parts.size(); ++b) res[b].add(k, parts[b]);
        }
        out.push_back(std::move(res));
    }
    return out;
}

template <Scalar T>
bool is_parallel(const FiberContext<T>& ctx, const BlockConnection<T>& conn, const StackedField<T>& psi)
{
    for (const auto& dir : apply_connection(ctx, conn, psi))
        for (const auto& f : dir)
            if (!f.is_zero()) return false;
    return true;
}

// Pointwise data for the anti-holomorphic identities; derivative data default to zero.
struct CurvatureData {
    RicciModel ricci;
    Rational scalar_curvature{0};
    std::vector<Rational> grad_s;
    std::vector<std::vector<Rational>> nabla_rho;     // per direction, 2-form entries (2m)^2 row-major
    std::vector<std::vector<Rational>> nabla_grad_s;  // per direction, ∇_{e_a} grad S
};

template <Scalar T>
struct Prop43Point {
    SpinorVector<T> phi;
    SpinorVector<T> phi_plus;
    SpinorVector<T> phi_minus;
    SpinorVector<T> d2phi;
    TensorSpinor<T> grad_phi_plus;
};

template <Scalar T>
struct Prop43Residuals {
    std::vector<std::pair<std::string, double>> entries;  // eq tag -> sup residual

    void bump(const std::string& tag, double v)
    {
        for (auto& [t, r] : entries)
            if (t == tag) {
                r = std::max(r, v);
                return;
            }
        entries.emplace_back(tag, v);
    }

    double max() const
    {
        double b = 0.0;
        for (const auto& [t, r] : entries) b = std::max(b, r);
        return b;
    }
};

template <Scalar T>
void prop43_accumulate(const FiberContext<T>& ctx, int r, const CurvatureData& data, const Prop43Point<T>& pt, Prop43Residuals<T>& out,
                       double tol)
{
    const int n = ctx.n();
    if (pt.phi_minus.max_abs() > tol) throw precondition_error("anti-holomorphic identities need D^-φ = 0");
    const T k = scalar<T>(1, 2 * (2 * r + 1));
    const T s = scalar<T>(data.scalar_curvature);
    const T i = imag_unit<T>();
    const T two_k_r1 = T(2) * k * T(r + 1);
    const RicciModel ric = data.ricci.m() == ctx.m() ? data.ricci : RicciModel::zero(ctx.m());
    std::vector<Rational> gs = data.grad_s.empty() ? std::vector<Rational>(n, Rational(0)) : data.grad_s;
    TangentVector<T> g(n, T{});
    for (int a = 0; a < n; ++a) g[a] = scalar<T>(gs[a]);
    const Matrix<T> rho = form_matrix(ctx, ricci_form(ctx, ric));
    auto apply = [](const Matrix<T>& mat, const SpinorVector<T>& v) { return SpinorVector<T>(v.m(), mat.apply(v.coeffs())); };
    auto form_op = [&](const std::vector<Rational>& entries) {
        Matrix<T> a(n, n);
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y) a(x, y) = scalar<T>(entries[x * n + y]);
        return form_matrix(ctx, Form<T>::two_form(a));
    };
    // Directional derivatives along complex X of ρ and of grad S.
    auto nabla_rho = [&](const TangentVector<T>& x) {
        Matrix<T> out(ctx.dim(), ctx.dim());
        if (data.nabla_rho.empty()) return out;
        for (int a = 0; a < n; ++a)
            if (!is_zero(x[a])) out += x[a] * form_op(data.nabla_rho[a]);
        return out;
    };
    auto nabla_grad = [&](const TangentVector<T>& x) {
        TangentVector<T> out(n, T{});
        if (data.nabla_grad_s.empty()) return out;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) out[b] += x[a] * scalar<T>(data.nabla_grad_s[a][b]);
        return out;
    };
    const auto& phi = pt.phi;
    const auto& phip = pt.phi_plus;
    out.bump("4.13", ctx.clifford(ctx.minus(g), phi).max_abs());
    out.bump("4.14", (pt.d2phi - (k * T(r + 1) * s) * phi).max_abs());
    out.bump("4.17", (i * apply(rho, phi) - (k * s) * phi).max_abs());
    out.bump("4.19", (i * apply(rho, phip) + (k * s) * phip + two_k_r1 * ctx.clifford(ctx.plus(g), phi)).max_abs());
    for (int a = 0; a < n; ++a) {
        const auto xp = ctx.e_plus(a);
        const auto xm = ctx.e_minus(a);
        const auto ric_xp = ric.template apply<T>(xp);
        const auto ric_xm = ric.template apply<T>(xm);
        const T xp_s = directional(gs, xp);
        const T xm_s = directional(gs, xm);
        out.bump("4.15", (pt.grad_phi_plus.at(a) + scalar<T>(1, 2) * ctx.clifford(ric_xp, phi)).max_abs());
        out.bump("4.16", (ctx.clifford(ric_xm, phi) - (k * s) * ctx.clifford(xm, phi)).max_abs());
        out.bump("4.18", (i * apply(nabla_rho(xp), phi) - (k * xp_s) * phi).max_abs());
        out.bump("4.20", (ctx.clifford(ric_xm, phip) - (k * s) * ctx.clifford(xm, phip) + (two_k_r1 * xm_s) * phi).max_abs());
        const auto ric2_xp = ric.template apply<T>(ric_xp);
        auto r21 = i * apply(nabla_rho(xp), phip) + ctx.clifford(ric2_xp, phi) - (k * s) * ctx.clifford(ric_xp, phi) +
                   two_k_r1 * ctx.clifford(ctx.plus(nabla_grad(xp)), phi) + (k * xp_s) * phip;
        out.bump("4.21", r21.max_abs());
        auto r22 = i * apply(nabla_rho(xm), phip) + two_k_r1 * ctx.clifford(ctx.plus(nabla_grad(xm)), phi) +
                   (T(3) * k * xm_s) * phip + k * ctx.clifford(xm, ctx.clifford(ctx.plus(g), phip));
        out.bump("4.22", r22.max_abs());
    }
}

// Residuals of the anti-holomorphic identities for a torus field, evaluated mode by mode.
template <Scalar T>
Prop43Residuals<T> prop43_residuals(const FiberContext<T>& ctx, const FourierSpinorField<T>& phi, int r, const CurvatureData& data,
                                    double tol = 0.0)
{
    const auto dm = apply_Dminus(ctx, phi);
    if (!(scalar_traits<T>::exact ? dm.is_zero() : dm.max_abs() <= tol))
        throw precondition_error("anti-holomorphic identities need D^-φ = 0");
    const auto dp = apply_Dplus(ctx, phi);
    const auto d2 = apply_D(ctx, apply_D(ctx, phi));
    const auto grad_p = gradient(ctx, dp);
    std::set<Wavevector> ks;
    for (const auto* f : {&phi, &dp, &d2})
        for (const auto& [k, v] : f->modes()) ks.insert(k);
    Prop43Residuals<T> res;
    for (const auto& tag : {"4.13", "4.14", "4.15", "4.16", "4.17", "4.18", "4.19", "4.20", "4.21", "4.22"}) res.bump(tag, 0.0);
    for (const auto& k : ks) {
        Prop43Point<T> pt{phi.coefficient(k), dp.coefficient(k), dm.coefficient(k), d2.coefficient(k), {}};
        for (const auto& g : grad_p) pt.grad_phi_plus.push_back(g.coefficient(k));
        prop43_accumulate(ctx, r, data, pt, res, tol);
    }
    return res;
}

}  // namespace kspin
