#pragma once

#include <boost/rational.hpp>
#include <boost/safe_numerics/safe_integer.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <string>

namespace kspin {

// Overflow-checked 64-bit integers: any overflow throws instead of wrapping.
using Integer = boost::safe_numerics::safe<std::int64_t>;
using Rational = boost::rational<Integer>;
using Complex = std::complex<double>;

inline Rational rat(std::int64_t num, std::int64_t den = 1) { return Rational(Integer(num), Integer(den)); }

inline std::int64_t raw(const Integer& n) { return static_cast<std::int64_t>(n); }

inline bool is_zero(const Rational& q) { return q.numerator() == 0; }

inline double to_double(const Rational& q)
{
    return static_cast<double>(raw(q.numerator())) / static_cast<double>(raw(q.denominator()));
}

inline std::string to_string(const Rational& q)
{
    std::string s = std::to_string(raw(q.numerator()));
    if (q.denominator() != 1) s += "/" + std::to_string(raw(q.denominator()));
    return s;
}

// Exact element of Q(i).
class GaussRat {
public:
    GaussRat() = default;
    GaussRat(int n) : re_(rat(n)) {}
    GaussRat(Rational re, Rational im = Rational(0)) : re_(std::move(re)), im_(std::move(im)) {}

    const Rational& re() const { return re_; }
    const Rational& im() const { return im_; }

    bool is_zero() const { return kspin::is_zero(re_) && kspin::is_zero(im_); }
    GaussRat conj() const { return {re_, -im_}; }
    Rational norm() const { return re_ * re_ + im_ * im_; }

    GaussRat operator-() const { return {-re_, -im_}; }
    GaussRat& operator+=(const GaussRat& o)
    {
        re_ += o.re_;
        im_ += o.im_;
        return *this;
    }
    GaussRat& operator-=(const GaussRat& o)
    {
        re_ -= o.re_;
        im_ -= o.im_;
        return *this;
    }
    GaussRat& operator*=(const GaussRat& o)
    {
        if (kspin::is_zero(o.im_)) {
            re_ *= o.re_;
            im_ *= o.re_;
            return *this;
        }
        Rational r = re_ * o.re_ - im_ * o.im_;
        im_ = re_ * o.im_ + im_ * o.re_;
        re_ = r;
        return *this;
    }
    GaussRat& operator/=(const GaussRat& o)
    {
        Rational n = o.norm();
        *this *= o.conj();
        re_ /= n;
        im_ /= n;
        return *this;
    }

    friend GaussRat operator+(GaussRat a, const GaussRat& b) { return a += b; }
    friend GaussRat operator-(GaussRat a, const GaussRat& b) { return a -= b; }
    friend GaussRat operator*(GaussRat a, const GaussRat& b) { return a *= b; }
    friend GaussRat operator/(GaussRat a, const GaussRat& b) { return a /= b; }
    friend bool operator==(const GaussRat& a, const GaussRat& b) { return a.re_ == b.re_ && a.im_ == b.im_; }
    friend bool operator!=(const GaussRat& a, const GaussRat& b) { return !(a == b); }

private:
    Rational re_{0};
    Rational im_{0};
};

inline std::string to_string(const GaussRat& z)
{
    if (is_zero(z.im())) return to_string(z.re());
    if (is_zero(z.re())) return to_string(z.im()) + "i";
    std::string im = to_string(z.im());
    if (im.front() != '-') im = "+" + im;
    return to_string(z.re()) + im + "i";
}

template <class T>
struct scalar_traits;

template <>
struct scalar_traits<GaussRat> {
    static constexpr bool exact = true;
    static constexpr const char* mode = "exact";
    static GaussRat make(const Rational& re, const Rational& im = Rational(0)) { return {re, im}; }
    static GaussRat conj(const GaussRat& z) { return z.conj(); }
    static bool is_zero(const GaussRat& z) { return z.is_zero(); }
    static double abs(const GaussRat& z) { return std::sqrt(to_double(z.norm())); }
    static Complex to_complex(const GaussRat& z) { return {to_double(z.re()), to_double(z.im())}; }
};

template <>
struct scalar_traits<Complex> {
    static constexpr bool exact = false;
    static constexpr const char* mode = "float";
    static Complex make(const Rational& re, const Rational& im = Rational(0)) { return {to_double(re), to_double(im)}; }
    static Complex conj(const Complex& z) { return std::conj(z); }
    static bool is_zero(const Complex& z) { return z == Complex(0.0, 0.0); }
    static double abs(const Complex& z) { return std::abs(z); }
    static Complex to_complex(const Complex& z) { return z; }
};

template <class T>
concept Scalar = requires { scalar_traits<T>::exact; };

template <Scalar T>
T scalar(const Rational& re, const Rational& im = Rational(0))
{
    return scalar_traits<T>::make(re, im);
}

template <Scalar T>
T scalar(std::int64_t num, std::int64_t den = 1)
{
    return scalar_traits<T>::make(rat(num, den));
}

template <Scalar T>
T imag_unit()
{
    return scalar_traits<T>::make(Rational(0), Rational(1));
}

template <Scalar T>
T conj(const T& z)
{
    return scalar_traits<T>::conj(z);
}

template <Scalar T>
bool is_zero(const T& z)
{
    return scalar_traits<T>::is_zero(z);
}

template <Scalar T>
double magnitude(const T& z)
{
    return scalar_traits<T>::abs(z);
}

using Rng = std::mt19937_64;

// Numerator in [-9, 9], denominator in [1, 9].
inline Rational random_rational(Rng& rng)
{
    std::uniform_int_distribution<int> num(-9, 9);
    std::uniform_int_distribution<int> den(1, 9);
    int n = num(rng);
    int d = den(rng);
    return rat(n, d);
}

template <Scalar T>
T random_scalar(Rng& rng)
{
    Rational re = random_rational(rng);
    Rational im = random_rational(rng);
    return scalar<T>(re, im);
}

}  // namespace kspin
