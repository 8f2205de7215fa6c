#pragma once

#include "error.hpp"
#include "exact.hpp"
#include "fiber.hpp"
#include "matrix.hpp"

#include <set>
#include <utility>
#include <vector>

namespace kspin {

// Algebraic Kähler curvature tensor R_{abcd} = <R(e_a, e_b) e_c, e_d>.
class KahlerCurvature {
public:
    explicit KahlerCurvature(int m) : m_(m), r_(static_cast<std::size_t>(16 * m * m * m * m), Rational(0)) {}

    int m() const { return m_; }
    int n() const { return 2 * m_; }

    const Rational& operator()(int a, int b, int c, int d) const { return r_[index(a, b, c, d)]; }

    // Constant holomorphic sectional curvature 4c on the complex coordinate lines in `modes`.
    static KahlerCurvature holomorphic_block(int m, const std::set<int>& modes, const Rational& c)
    {
        KahlerCurvature k(m);
        k.add_block(modes, c);
        return k;
    }

    // Orthogonal sum of such blocks.
    static KahlerCurvature block_sum(int m, const std::vector<std::pair<std::set<int>, Rational>>& blocks)
    {
        KahlerCurvature k(m);
        for (const auto& [modes, c] : blocks) k.add_block(modes, c);
        return k;
    }

    RicciModel ricci() const
    {
        std::vector<Rational> e(static_cast<std::size_t>(n() * n()), Rational(0));
        for (int b = 0; b < n(); ++b)
            for (int c = 0; c < n(); ++c) {
                Rational s(0);
                for (int i = 0; i < n(); ++i) s += (*this)(i, b, c, i);
                e[b * n() + c] = s;
            }
        return RicciModel(m_, std::move(e));
    }

    // R_{X,Y} on spinors: ¼ Σ_{c,d} <R(X,Y)e_c, e_d> e_c · e_d.
    template <Scalar T>
    Matrix<T> spinor_action(const FiberContext<T>& ctx, const TangentVector<T>& x, const TangentVector<T>& y) const
    {
        Matrix<T> out(ctx.dim(), ctx.dim());
        const T quarter = scalar<T>(1, 4);
        for (int c = 0; c < n(); ++c)
            for (int d = 0; d < n(); ++d) {
                if (c == d) continue;
                T coef{};
                for (int a = 0; a < n(); ++a) {
                    if (is_zero(x[a])) continue;
                    for (int b = 0; b < n(); ++b)
                        if (!is_zero(y[b]) && !kspin::is_zero((*this)(a, b, c, d))) coef += x[a] * y[b] * scalar<T>((*this)(a, b, c, d));
                }
                if (!is_zero(coef)) out += (quarter * coef) * (ctx.gamma_matrix(c) * ctx.gamma_matrix(d));
            }
        return out;
    }

private:
    std::size_t index(int a, int b, int c, int d) const
    {
        const std::size_t nn = static_cast<std::size_t>(n());
        return ((static_cast<std::size_t>(a) * nn + b) * nn + c) * nn + d;
    }

    static int jmat(int row, int col)
    {
        if (row / 2 != col / 2) return 0;
        if (row % 2 == 1 && col % 2 == 0) return 1;
        if (row % 2 == 0 && col % 2 == 1) return -1;
        return 0;
    }

    void add_block(const std::set<int>& modes, const Rational& c)
    {
        std::vector<int> idx;
        for (int l : modes) {
            if (l < 0 || l >= m_) throw size_error("curvature block mode out of range");
            idx.push_back(2 * l);
            idx.push_back(2 * l + 1);
        }
        // c [g(Y,Z)X - g(X,Z)Y + g(JY,Z)JX - g(JX,Z)JY + 2 g(X,JY)JZ] with X = e_a, Y = e_b, Z = e_c, paired with e_d.
        for (int a : idx)
            for (int b : idx)
                for (int cc : idx)
                    for (int d : idx) {
                        const int v = (b == cc) * (a == d) - (a == cc) * (b == d) + jmat(cc, b) * jmat(d, a) - jmat(cc, a) * jmat(d, b) +
                                      2 * jmat(a, b) * jmat(d, cc);
                        if (v != 0) r_[index(a, b, cc, d)] += c * rat(v);
                    }
    }

    int m_;
    std::vector<Rational> r_;
};

// Σ_i e_i · R_{e_i, Y}.
template <Scalar T>
Matrix<T> curvature_contraction(const FiberContext<T>& ctx, const KahlerCurvature& r, const TangentVector<T>& y)
{
    Matrix<T> out(ctx.dim(), ctx.dim());
    for (int i = 0; i < ctx.n(); ++i) out += ctx.gamma_matrix(i) * r.spinor_action(ctx, ctx.basis_vector(i), y);
    return out;
}

// Σ_i e_i^- · R_{e_i^+, Y}.
template <Scalar T>
Matrix<T> curvature_contraction_minus(const FiberContext<T>& ctx, const KahlerCurvature& r, const TangentVector<T>& y)
{
    Matrix<T> out(ctx.dim(), ctx.dim());
    for (int i = 0; i < ctx.n(); ++i) out += ctx.clifford_matrix(ctx.e_minus(i)) * r.spinor_action(ctx, ctx.e_plus(i), y);
    return out;
}

template <Scalar T>
KahlerCurvature random_curvature(int m, Rng& rng)
{
    std::uniform_int_distribution<int> cut(1, m);
    const int split = cut(rng);
    std::set<int> first, second;
    for (int l = 0; l < m; ++l) (l < split ? first : second).insert(l);
    std::vector<std::pair<std::set<int>, Rational>> blocks{{first, random_rational(rng)}};
    if (!second.empty()) blocks.emplace_back(second, random_rational(rng));
    return KahlerCurvature::block_sum(m, blocks);
}

}  // namespace kspin
