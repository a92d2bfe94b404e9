#pragma once

// Dense polynomials in z with complex coefficients, ascending degree.

#include <algorithm>
#include <vector>

#include "dulac/scalar.hpp"

namespace dulac {

template <class R>
using Poly = std::vector<Complex<R>>;

template <class R>
void strip(Poly<R>& p, const R& tol) {
  while (!p.empty() && abs(p.back()) <= tol) p.pop_back();
}

/// Degree of p; -1 stands for the zero polynomial.
template <class R>
int degree(const Poly<R>& p) {
  return static_cast<int>(p.size()) - 1;
}

template <class R>
void add_to(Poly<R>& p, const Poly<R>& q) {
  if (p.size() < q.size()) p.resize(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) p[i] += q[i];
}

template <class R>
void axpy(Poly<R>& p, const Complex<R>& c, const Poly<R>& q) {
  if (p.size() < q.size()) p.resize(q.size());
  R t;
  for (std::size_t i = 0; i < q.size(); ++i) mul_add(p[i], c, q[i], t);
}

/// out += p*q
template <class R>
void mul_acc(Poly<R>& out, const Poly<R>& p, const Poly<R>& q, R& t) {
  if (p.empty() || q.empty()) return;
  if (out.size() < p.size() + q.size() - 1) out.resize(p.size() + q.size() - 1);
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j) mul_add(out[i + j], p[i], q[j], t);
}

template <class R>
Poly<R> mul(const Poly<R>& p, const Poly<R>& q) {
  Poly<R> out;
  R t;
  mul_acc(out, p, q, t);
  return out;
}

template <class R>
Poly<R> scaled(Poly<R> p, const Complex<R>& c) {
  for (auto& v : p) v *= c;
  return p;
}

template <class R>
Poly<R> scaled(Poly<R> p, const R& c) {
  for (auto& v : p) v *= c;
  return p;
}

template <class R>
Poly<R> deriv(const Poly<R>& p) {
  Poly<R> d;
  for (std::size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * R(static_cast<long>(i)));
  return d;
}

template <class R>
Complex<R> eval(const Poly<R>& p, const Complex<R>& z) {
  Complex<R> r;
  for (std::size_t i = p.size(); i-- > 0;) {
    r *= z;
    r += p[i];
  }
  return r;
}

/// p(a*z + b)
template <class R>
Poly<R> affine(const Poly<R>& p, const Complex<R>& a, const Complex<R>& b) {
  Poly<R> r;
  if (p.empty()) return r;
  R t;
  for (std::size_t i = p.size(); i-- > 0;) {
    // r <- r*(a z + b) + p[i]
    Poly<R> n(r.size() + 1);
    for (std::size_t k = 0; k < r.size(); ++k) {
      mul_add(n[k + 1], r[k], a, t);
      mul_add(n[k], r[k], b, t);
    }
    n[0] += p[i];
    r = std::move(n);
  }
  return r;
}

template <class R>
Poly<R> shifted(const Poly<R>& p, const Complex<R>& c) {
  return affine(p, Complex<R>(R(1)), c);
}

template <class R>
R max_abs(const Poly<R>& p) {
  R m(0);
  for (const auto& c : p) m = std::max(m, abs(c));
  return m;
}

template <class R>
R max_abs_diff(const Poly<R>& p, const Poly<R>& q) {
  R m(0);
  std::size_t n = std::max(p.size(), q.size());
  for (std::size_t i = 0; i < n; ++i) {
    Complex<R> a = i < p.size() ? p[i] : Complex<R>();
    Complex<R> b = i < q.size() ? q[i] : Complex<R>();
    m = std::max(m, abs(a - b));
  }
  return m;
}

}  // namespace dulac
