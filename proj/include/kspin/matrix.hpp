#pragma once

#include "error.hpp"
#include "exact.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <vector>

namespace kspin {

template <Scalar T>
using Vector = std::vector<T>;

// Dense row-major matrix; products skip zero entries since most fiber operators are monomial.
template <Scalar T>
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, T{}) {}

    static Matrix identity(std::size_t n)
    {
        Matrix id(n, n);
        for (std::size_t i = 0; i < n; ++i) id(i, i) = T(1);
        return id;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    bool is_zero() const
    {
        return std::all_of(data_.begin(), data_.end(), [](const T& z) { return kspin::is_zero(z); });
    }

    double max_abs() const
    {
        double best = 0.0;
        for (const T& z : data_) best = std::max(best, magnitude(z));
        return best;
    }

    Matrix adjoint() const
    {
        Matrix a(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) a(j, i) = conj((*this)(i, j));
        return a;
    }

    T trace() const
    {
        T t{};
        for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
        return t;
    }

    Vector<T> apply(const Vector<T>& v) const
    {
        if (v.size() != cols_) throw size_error("matrix-vector size mismatch");
        Vector<T> out(rows_, T{});
        for (std::size_t i = 0; i < rows_; ++i) {
            const T* row = &data_[i * cols_];
            for (std::size_t j = 0; j < cols_; ++j)
                if (!kspin::is_zero(row[j]) && !kspin::is_zero(v[j])) out[i] += row[j] * v[j];
        }
        return out;
    }

    Matrix& operator+=(const Matrix& o)
    {
        check_same(o);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }
    Matrix& operator-=(const Matrix& o)
    {
        check_same(o);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
        return *this;
    }
    Matrix& operator*=(const T& s)
    {
        if (kspin::is_zero(s)) {
            std::fill(data_.begin(), data_.end(), T{});
            return *this;
        }
        for (T& z : data_)
            if (!kspin::is_zero(z)) z *= s;
        return *this;
    }

    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator-(Matrix a)
    {
        for (T& z : a.data_) z = -z;
        return a;
    }
    friend Matrix operator*(Matrix a, const T& s) { return a *= s; }
    friend Matrix operator*(const T& s, Matrix a) { return a *= s; }

    friend Matrix operator*(const Matrix& a, const Matrix& b)
    {
        if (a.cols_ != b.rows_) throw size_error("matrix product size mismatch");
        Matrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const T& aik = a(i, k);
                if (kspin::is_zero(aik)) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) {
                    const T& bkj = b(k, j);
                    if (!kspin::is_zero(bkj)) c(i, j) += aik * bkj;
                }
            }
        return c;
    }

    friend bool operator==(const Matrix& a, const Matrix& b)
    {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    void check_same(const Matrix& o) const
    {
        if (rows_ != o.rows_ || cols_ != o.cols_) throw size_error("matrix sum size mismatch");
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

template <Scalar T>
bool vector_is_zero(const Vector<T>& v)
{
    return std::all_of(v.begin(), v.end(), [](const T& z) { return is_zero(z); });
}

template <Scalar T>
double vector_max_abs(const Vector<T>& v)
{
    double best = 0.0;
    for (const T& z : v) best = std::max(best, magnitude(z));
    return best;
}

inline Eigen::MatrixXcd to_eigen(const Matrix<Complex>& a)
{
    Eigen::MatrixXcd e(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) e(i, j) = a(i, j);
    return e;
}

// Exact reduced row echelon form over Q(i); returns pivot columns.
inline std::vector<std::size_t> rref(Matrix<GaussRat>& a)
{
    std::vector<std::size_t> pivots;
    std::size_t row = 0;
    for (std::size_t col = 0; col < a.cols() && row < a.rows(); ++col) {
        std::size_t p = row;
        while (p < a.rows() && a(p, col).is_zero()) ++p;
        if (p == a.rows()) continue;
        if (p != row)
            for (std::size_t j = 0; j < a.cols(); ++j) std::swap(a(p, j), a(row, j));
        GaussRat inv = GaussRat(1) / a(row, col);
        for (std::size_t j = col; j < a.cols(); ++j)
            if (!a(row, j).is_zero()) a(row, j) *= inv;
        for (std::size_t i = 0; i < a.rows(); ++i) {
            if (i == row || a(i, col).is_zero()) continue;
            GaussRat f = a(i, col);
            for (std::size_t j = col; j < a.cols(); ++j)
                if (!a(row, j).is_zero()) a(i, j) -= f * a(row, j);
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

inline std::vector<Vector<GaussRat>> nullspace(Matrix<GaussRat> a)
{
    std::vector<std::size_t> pivots = rref(a);
    std::vector<bool> is_pivot(a.cols(), false);
    for (std::size_t c : pivots) is_pivot[c] = true;
    std::vector<Vector<GaussRat>> basis;
    for (std::size_t free = 0; free < a.cols(); ++free) {
        if (is_pivot[free]) continue;
        Vector<GaussRat> v(a.cols(), GaussRat{});
        v[free] = GaussRat(1);
        for (std::size_t k = 0; k < pivots.size(); ++k) v[pivots[k]] = -a(k, free);
        basis.push_back(std::move(v));
    }
    return basis;
}

inline std::size_t rank(Matrix<GaussRat> a) { return rref(a).size(); }

// Floating nullspace: right singular vectors whose singular value falls below tol.
inline std::vector<Vector<Complex>> nullspace(const Matrix<Complex>& a, double tol)
{
    std::vector<Vector<Complex>> basis;
    if (a.cols() == 0) return basis;
    Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(std::max(a.rows(), a.cols()), a.cols());
    e.topRows(a.rows()) = to_eigen(a);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(e, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    for (Eigen::Index k = 0; k < s.size(); ++k) {
        if (s(k) >= tol) continue;
        Vector<Complex> v(a.cols());
        for (std::size_t j = 0; j < a.cols(); ++j) v[j] = svd.matrixV()(static_cast<Eigen::Index>(j), k);
        basis.push_back(std::move(v));
    }
    return basis;
}

inline std::size_t rank(const Matrix<Complex>& a, double tol)
{
    return a.cols() - nullspace(a, tol).size();
}

// Gaussian integer with 128-bit overflow-checked parts, for fraction-free elimination.
struct GaussInt {
    __int128 re = 0;
    __int128 im = 0;

    bool is_zero() const { return re == 0 && im == 0; }
};

namespace detail {

inline __int128 checked_mul(__int128 a, __int128 b)
{
    __int128 r;
    if (__builtin_mul_overflow(a, b, &r)) throw error("Gaussian integer overflow in elimination");
    return r;
}

inline __int128 checked_add(__int128 a, __int128 b)
{
    __int128 r;
    if (__builtin_add_overflow(a, b, &r)) throw error("Gaussian integer overflow in elimination");
    return r;
}

inline __int128 checked_sub(__int128 a, __int128 b)
{
    __int128 r;
    if (__builtin_sub_overflow(a, b, &r)) throw error("Gaussian integer overflow in elimination");
    return r;
}

inline GaussInt mul(const GaussInt& a, const GaussInt& b)
{
    return {checked_sub(checked_mul(a.re, b.re), checked_mul(a.im, b.im)),
            checked_add(checked_mul(a.re, b.im), checked_mul(a.im, b.re))};
}

inline GaussInt sub(const GaussInt& a, const GaussInt& b)
{
    return {checked_sub(a.re, b.re), checked_sub(a.im, b.im)};
}

inline GaussInt exact_div(const GaussInt& a, const GaussInt& b)
{
    if (b.im == 0) {
        if (a.re % b.re != 0 || a.im % b.re != 0) throw error("inexact division in fraction-free elimination");
        return {a.re / b.re, a.im / b.re};
    }
    __int128 n = checked_add(checked_mul(b.re, b.re), checked_mul(b.im, b.im));
    GaussInt p = mul(a, GaussInt{b.re, -b.im});
    if (p.re % n != 0 || p.im % n != 0) throw error("inexact division in fraction-free elimination");
    return {p.re / n, p.im / n};
}

}  // namespace detail

// Rank of a rows x cols Gaussian-integer matrix (row-major) by Bareiss elimination.
inline std::size_t gauss_int_rank(std::vector<GaussInt> a, std::size_t rows, std::size_t cols)
{
    GaussInt prev{1, 0};
    std::size_t row = 0;
    for (std::size_t col = 0; col < cols && row < rows; ++col) {
        std::size_t p = row;
        while (p < rows && a[p * cols + col].is_zero()) ++p;
        if (p == rows) continue;
        if (p != row)
            for (std::size_t j = 0; j < cols; ++j) std::swap(a[p * cols + j], a[row * cols + j]);
        const GaussInt piv = a[row * cols + col];
        for (std::size_t i = row + 1; i < rows; ++i) {
            const GaussInt f = a[i * cols + col];
            for (std::size_t j = col + 1; j < cols; ++j) {
                GaussInt& x = a[i * cols + j];
                const GaussInt& y = a[row * cols + j];
                GaussInt t = detail::mul(piv, x);
                if (!f.is_zero() && !y.is_zero()) t = detail::sub(t, detail::mul(f, y));
                x = t.is_zero() ? t : detail::exact_div(t, prev);
            }
            a[i * cols + col] = GaussInt{};
        }
        prev = piv;
        ++row;
    }
    return row;
}

inline Integer lcm_int(const Integer& a, const Integer& b) { return a / boost::integer::gcd(a, b) * b; }

// Scales an exact matrix to Gaussian integers by the least common denominator; returns the scale.
inline Integer common_denominator(const Matrix<GaussRat>& a)
{
    Integer l = 1;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            l = lcm_int(l, a(i, j).re().denominator());
            l = lcm_int(l, a(i, j).im().denominator());
        }
    return l;
}

inline std::vector<GaussInt> to_gauss_int(const Matrix<GaussRat>& a, const Integer& scale)
{
    std::vector<GaussInt> out(a.rows() * a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            Rational re = a(i, j).re() * Rational(scale);
            Rational im = a(i, j).im() * Rational(scale);
            if (re.denominator() != 1 || im.denominator() != 1) throw error("scale does not clear denominators");
            out[i * a.cols() + j] = GaussInt{raw(re.numerator()), raw(im.numerator())};
        }
    return out;
}

}  // namespace kspin
