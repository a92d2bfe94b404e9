#pragma once

// Scalar layer: the working real type, a small complex type over it, working
// precision control and the coefficient tolerance used by every zero test.

#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <complex>
#include <cstdlib>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>

namespace dulac {

using mp_real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                              boost::multiprecision::et_off>;

/// Fixed 50-digit type with inline limb storage; avoids heap traffic in the
/// randomized suites.  Same semantics as mp_real at 50 digits.
using mp50 = boost::multiprecision::number<
    boost::multiprecision::mpfr_float_backend<50, boost::multiprecision::allocate_stack>,
    boost::multiprecision::et_off>;

inline constexpr int default_digits = 50;

template <class R>
struct real_traits;

template <>
struct real_traits<double> {
  static int digits() { return 15; }
};

template <>
struct real_traits<mp50> {
  static int digits() { return 50; }
};

template <>
struct real_traits<mp_real> {
  static int digits() { return static_cast<int>(mp_real::default_precision()); }
};

/// Sets the working precision (decimal digits) of mp_real for the lifetime of
/// the guard.  Values created inside the scope carry that precision.
class ScopedPrecision {
 public:
  explicit ScopedPrecision(int digits) : saved_(static_cast<int>(mp_real::default_precision())) {
    if (digits < 20 || digits > 2000) throw std::invalid_argument("precision must lie in [20, 2000] digits");
    mp_real::default_precision(static_cast<unsigned>(digits));
  }
  ~ScopedPrecision() { mp_real::default_precision(static_cast<unsigned>(saved_)); }
  ScopedPrecision(const ScopedPrecision&) = delete;
  ScopedPrecision& operator=(const ScopedPrecision&) = delete;

 private:
  int saved_;
};

/// Digits requested through DULAC_PRECISION, or the library default.
inline int precision_from_env() {
  if (const char* s = std::getenv("DULAC_PRECISION")) {
    char* end = nullptr;
    long v = std::strtol(s, &end, 10);
    if (end != s && *end == '\0' && v >= 20 && v <= 2000) return static_cast<int>(v);
  }
  return default_digits;
}

// ---------------------------------------------------------------------------
// complex numbers over R

template <class R>
struct Complex {
  R re{0};
  R im{0};

  Complex() = default;
  Complex(const R& r) : re(r), im(0) {}  // NOLINT(implicit)
  Complex(const R& r, const R& i) : re(r), im(i) {}
  template <class T>
    requires(std::is_arithmetic_v<T> && !std::is_same_v<T, R>)
  Complex(T r) : re(r), im(0) {}  // NOLINT(implicit)
  template <class T>
    requires(std::is_arithmetic_v<T> && !std::is_same_v<T, R>)
  Complex(T r, T i) : re(r), im(i) {}

  Complex& operator+=(const Complex& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  Complex& operator-=(const Complex& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  Complex& operator*=(const R& s) {
    re *= s;
    im *= s;
    return *this;
  }
  Complex& operator*=(const Complex& o) {
    R r = re * o.re - im * o.im;
    im = re * o.im + im * o.re;
    re = std::move(r);
    return *this;
  }
  Complex& operator/=(const Complex& o) {
    R d = o.re * o.re + o.im * o.im;
    R r = (re * o.re + im * o.im) / d;
    im = (im * o.re - re * o.im) / d;
    re = std::move(r);
    return *this;
  }
  Complex& operator/=(const R& s) {
    re /= s;
    im /= s;
    return *this;
  }
  Complex operator-() const { return Complex(-re, -im); }
};

template <class R>
Complex<R> operator+(Complex<R> a, const Complex<R>& b) { return a += b; }
template <class R>
Complex<R> operator-(Complex<R> a, const Complex<R>& b) { return a -= b; }
template <class R>
Complex<R> operator*(Complex<R> a, const Complex<R>& b) { return a *= b; }
template <class R>
Complex<R> operator/(Complex<R> a, const Complex<R>& b) { return a /= b; }
template <class R>
Complex<R> operator*(Complex<R> a, const R& s) { return a *= s; }
template <class R>
Complex<R> operator*(const R& s, Complex<R> a) { return a *= s; }
template <class R>
Complex<R> operator/(Complex<R> a, const R& s) { return a /= s; }

template <class R>
Complex<R> conj(const Complex<R>& z) { return {z.re, -z.im}; }
template <class R>
R norm(const Complex<R>& z) { return z.re * z.re + z.im * z.im; }
template <class R>
R abs(const Complex<R>& z) {
  using std::sqrt;
  return sqrt(norm(z));
}
template <class R>
R arg(const Complex<R>& z) {
  using std::atan2;
  return atan2(z.im, z.re);
}
template <class R>
Complex<R> exp(const Complex<R>& z) {
  using std::cos;
  using std::exp;
  using std::sin;
  R m = exp(z.re);
  return {m * cos(z.im), m * sin(z.im)};
}
/// Principal logarithm, imaginary part in (-pi, pi].
template <class R>
Complex<R> log(const Complex<R>& z) {
  using std::log;
  return {log(abs(z)), arg(z)};
}
template <class R>
Complex<R> pow(Complex<R> z, long n) {
  if (n < 0) return pow(Complex<R>(R(1)) / z, -n);
  Complex<R> r(R(1));
  while (n) {
    if (n & 1) r *= z;
    n >>= 1;
    if (n) z *= z;
  }
  return r;
}
template <class R>
Complex<R> sqrt(const Complex<R>& z) {
  using std::sqrt;
  R m = sqrt(abs(z));
  R h = arg(z) / 2;
  using std::cos;
  using std::sin;
  return {m * cos(h), m * sin(h)};
}

/// acc += x*y without allocating temporaries (t is scratch).
template <class R>
inline void mul_add(Complex<R>& acc, const Complex<R>& x, const Complex<R>& y, R& t) {
  t = x.re;
  t *= y.re;
  acc.re += t;
  t = x.im;
  t *= y.im;
  acc.re -= t;
  t = x.re;
  t *= y.im;
  acc.im += t;
  t = x.im;
  t *= y.re;
  acc.im += t;
}

template <class R>
std::complex<double> to_std(const Complex<R>& z) {
  return {static_cast<double>(z.re), static_cast<double>(z.im)};
}
template <class R>
Complex<R> from_std(const std::complex<double>& z) {
  return {R(z.real()), R(z.imag())};
}

// ---------------------------------------------------------------------------
// constants and tolerances, materialized once per precision

template <class R>
const R& pi() {
  thread_local std::map<int, R> cache;
  int d = real_traits<R>::digits();
  auto it = cache.find(d);
  if (it == cache.end()) {
    R v;
    if constexpr (requires { mpfr_const_pi(v.backend().data(), MPFR_RNDN); }) {
      mpfr_const_pi(v.backend().data(), MPFR_RNDN);
    } else {
      v = R(3.14159265358979323846264338327950288);
    }
    it = cache.emplace(d, v).first;
  }
  return it->second;
}

template <class R>
Complex<R> two_pi_i() { return {R(0), 2 * pi<R>()}; }

/// e^{2 pi i lambda}
template <class R>
Complex<R> unit_root(const R& lambda) {
  using std::cos;
  using std::sin;
  R t = 2 * pi<R>() * lambda;
  return {cos(t), sin(t)};
}

/// Zero threshold epsilon_coeff = 10^{-(p-10)}.
template <class R>
const R& eps_coeff() {
  thread_local std::map<int, R> cache;
  int d = real_traits<R>::digits();
  auto it = cache.find(d);
  if (it == cache.end()) {
    using std::pow;
    R v = std::is_same_v<R, double> ? R(1e-10) : pow(R(10), -(d - 10));
    it = cache.emplace(d, v).first;
  }
  return it->second;
}

/// Looser threshold for identities that chain many operations (about five
/// digits of headroom over eps_coeff).
template <class R>
R check_tol() {
  return eps_coeff<R>() * R(100000);
}

template <class R>
bool is_zero(const Complex<R>& z, const R& tol) { return abs(z) <= tol; }

template <class R>
bool near(const Complex<R>& u, const Complex<R>& v, const R& tol) {
  using std::max;
  R m = max(R(1), max(abs(u), abs(v)));
  return abs(u - v) <= tol * m;
}

template <class R>
bool near(const R& u, const R& v, const R& tol) {
  using std::abs;
  using std::max;
  R m = max(R(1), max(abs(u), abs(v)));
  return abs(u - v) <= tol * m;
}

template <class R>
R factorial(int n) {
  R r(1);
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

/// Parses a decimal literal at full working precision.
template <class R>
R parse_real(const std::string& s) {
  if constexpr (std::is_same_v<R, double>) {
    return std::stod(s);
  } else {
    return R(s);
  }
}

template <class R>
std::string format_real(const R& x, int digits = real_traits<R>::digits()) {
  std::ostringstream os;
  os.precision(digits);
  os << x;
  return os.str();
}

}  // namespace dulac
