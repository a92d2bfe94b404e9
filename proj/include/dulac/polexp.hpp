#pragma once

// Finite sums  sum_k P_k(z) e^{-lambda_k z}  over a sorted set of keys
// lambda_k >= 0.  This is the common carrier of Dulac series tails and of
// derivation coefficients.

#include <algorithm>
#include <functional>
#include <vector>

#include "dulac/poly.hpp"

namespace dulac {

template <class R>
struct Term {
  R lambda;
  Poly<R> p;
};

template <class R>
bool same_key(const R& a, const R& b) {
  using std::abs;
  using std::max;
  return abs(a - b) <= eps_coeff<R>() * max(R(1), abs(a));
}

template <class R>
class PolExp {
 public:
  std::vector<Term<R>> terms;

  bool empty() const { return terms.empty(); }
  std::size_t size() const { return terms.size(); }

  const R* min_key() const { return terms.empty() ? nullptr : &terms.front().lambda; }

  /// Index of the key lambda, or -1.
  int find(const R& lambda) const {
    auto it = std::lower_bound(terms.begin(), terms.end(), lambda, [](const Term<R>& t, const R& l) {
      return t.lambda < l && !same_key(t.lambda, l);
    });
    if (it != terms.end() && same_key(it->lambda, lambda)) return static_cast<int>(it - terms.begin());
    return -1;
  }

  const Poly<R>* at(const R& lambda) const {
    int i = find(lambda);
    return i < 0 ? nullptr : &terms[static_cast<std::size_t>(i)].p;
  }

  Poly<R>& slot(const R& lambda) {
    auto it = std::lower_bound(terms.begin(), terms.end(), lambda, [](const Term<R>& t, const R& l) {
      return t.lambda < l && !same_key(t.lambda, l);
    });
    if (it != terms.end() && same_key(it->lambda, lambda)) return it->p;
    return terms.insert(it, Term<R>{lambda, {}})->p;
  }

  void add(const R& lambda, const Poly<R>& p) {
    if (p.empty()) return;
    add_to(slot(lambda), p);
  }

  void add_scaled(const PolExp& o, const Complex<R>& c) {
    for (const auto& t : o.terms) axpy(slot(t.lambda), c, t.p);
  }

  PolExp& operator+=(const PolExp& o) {
    for (const auto& t : o.terms) add(t.lambda, t.p);
    return *this;
  }
  PolExp& operator-=(const PolExp& o) {
    add_scaled(o, Complex<R>(R(-1)));
    return *this;
  }
  PolExp& operator*=(const Complex<R>& c) {
    for (auto& t : terms)
      for (auto& v : t.p) v *= c;
    return *this;
  }

  void truncate(const R& cut) {
    while (!terms.empty() && terms.back().lambda > cut && !same_key(terms.back().lambda, cut)) terms.pop_back();
  }

  /// Strips coefficients below tol and drops empty terms.
  void normalize(const R& tol = eps_coeff<R>()) {
    std::vector<Term<R>> kept;
    kept.reserve(terms.size());
    for (auto& t : terms) {
      strip(t.p, tol);
      if (!t.p.empty()) kept.push_back(std::move(t));
    }
    terms = std::move(kept);
  }

  Complex<R> eval(const Complex<R>& z) const {
    Complex<R> s;
    for (const auto& t : terms) s += dulac::eval(t.p, z) * exp(Complex<R>(-t.lambda * z.re, -t.lambda * z.im));
    return s;
  }
};

template <class R>
PolExp<R> operator+(PolExp<R> a, const PolExp<R>& b) { return a += b; }
template <class R>
PolExp<R> operator-(PolExp<R> a, const PolExp<R>& b) { return a -= b; }
template <class R>
PolExp<R> operator*(PolExp<R> a, const Complex<R>& c) { return a *= c; }

template <class R>
PolExp<R> constant_polexp(const Poly<R>& p) {
  PolExp<R> r;
  if (!p.empty()) r.terms.push_back({R(0), p});
  return r;
}

/// Product truncated to keys <= cut.
template <class R>
PolExp<R> mul(const PolExp<R>& A, const PolExp<R>& B, const R& cut) {
  struct Pair {
    R key;
    std::size_t i, j;
  };
  std::vector<Pair> pairs;
  for (std::size_t i = 0; i < A.terms.size(); ++i) {
    for (std::size_t j = 0; j < B.terms.size(); ++j) {
      R s = A.terms[i].lambda + B.terms[j].lambda;
      if (s > cut && !same_key(s, cut)) break;
      pairs.push_back({std::move(s), i, j});
    }
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.key < b.key; });
  PolExp<R> out;
  R t;
  for (std::size_t g = 0; g < pairs.size();) {
    std::size_t h = g;
    Poly<R> acc;
    while (h < pairs.size() && same_key(pairs[h].key, pairs[g].key)) {
      mul_acc(acc, A.terms[pairs[h].i].p, B.terms[pairs[h].j].p, t);
      ++h;
    }
    out.terms.push_back({pairs[g].key, std::move(acc)});
    g = h;
  }
  return out;
}

template <class R>
PolExp<R> mul_poly(const PolExp<R>& A, const Poly<R>& q) {
  PolExp<R> out;
  if (q.empty()) return out;
  for (const auto& t : A.terms) out.terms.push_back({t.lambda, mul(t.p, q)});
  return out;
}

/// d/dz of sum P e^{-lambda z}: (P' - lambda P) e^{-lambda z}.
template <class R>
PolExp<R> deriv(const PolExp<R>& A) {
  PolExp<R> out;
  for (const auto& t : A.terms) {
    Poly<R> d = deriv(t.p);
    axpy(d, Complex<R>(-t.lambda), t.p);
    out.terms.push_back({t.lambda, std::move(d)});
  }
  return out;
}

/// A(z + c)
template <class R>
PolExp<R> shift_arg(const PolExp<R>& A, const Complex<R>& c) {
  PolExp<R> out;
  for (const auto& t : A.terms) {
    Complex<R> f = exp(Complex<R>(-t.lambda * c.re, -t.lambda * c.im));
    out.terms.push_back({t.lambda, scaled(shifted(t.p, c), f)});
  }
  return out;
}

/// A(a z), a > 0 real.
template <class R>
PolExp<R> scale_arg(const PolExp<R>& A, const R& a) {
  PolExp<R> out;
  for (const auto& t : A.terms) out.terms.push_back({t.lambda * a, affine(t.p, Complex<R>(a), Complex<R>())});
  return out;
}

/// Largest coefficient difference over keys <= cut.
template <class R>
R max_abs_diff(const PolExp<R>& A, const PolExp<R>& B, const R& cut) {
  R m(0);
  for (const auto& t : A.terms) {
    if (t.lambda > cut && !same_key(t.lambda, cut)) break;
    const Poly<R>* q = B.at(t.lambda);
    m = std::max(m, q ? max_abs_diff(t.p, *q) : max_abs(t.p));
  }
  for (const auto& t : B.terms) {
    if (t.lambda > cut && !same_key(t.lambda, cut)) break;
    if (!A.at(t.lambda)) m = std::max(m, max_abs(t.p));
  }
  return m;
}

template <class R>
R max_abs(const PolExp<R>& A) {
  R m(0);
  for (const auto& t : A.terms) m = std::max(m, max_abs(t.p));
  return m;
}

}  // namespace dulac
