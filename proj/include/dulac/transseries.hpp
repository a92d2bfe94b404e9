#pragma once

// Truncated formal Dulac series  f(z) = a z + b + sum_{lambda>0} P_lambda(z) e^{-lambda z},
// trusted modulo o(e^{-Lambda z}) where Lambda is the validity order.

#include <algorithm>
#include <string>

#include "dulac/errors.hpp"
#include "dulac/polexp.hpp"

namespace dulac {

template <class R>
struct DulacSeries {
  R a{1};
  Complex<R> b{};
  PolExp<R> tail;  // keys > 0, all <= validity
  R validity{5};

  static DulacSeries identity(const R& validity) { return DulacSeries{R(1), Complex<R>(), {}, validity}; }
  static DulacSeries affine(const R& a, const Complex<R>& b, const R& validity) {
    return DulacSeries{a, b, {}, validity};
  }

  Complex<R> eval(const Complex<R>& z) const { return z * a + b + tail.eval(z); }

  void normalize() {
    tail.truncate(validity);
    tail.normalize();
  }
};

/// Deck translation tau(z) = z + 2 pi i.
template <class R>
DulacSeries<R> tau(const R& validity) {
  return DulacSeries<R>::affine(R(1), two_pi_i<R>(), validity);
}

/// sum_lambda P_lambda(g) e^{-lambda g}, truncated at keys <= cut.
///
/// With g = a z + b + t:  e^{-lambda g} = e^{-lambda b} e^{-lambda a z} sum_j (-lambda t)^j / j!
/// and  P(g) = sum_i P^{(i)}(a z + b) t^i / i!.
template <class R>
PolExp<R> substitute(const PolExp<R>& T, const DulacSeries<R>& g, const R& cut) {
  PolExp<R> out;
  if (T.empty()) return out;
  const R& a = g.a;
  const PolExp<R>& t = g.tail;
  R pcut = cut - a * T.terms.front().lambda;
  if (pcut < 0 && !same_key(pcut, R(0))) return out;

  std::vector<PolExp<R>> pw;
  pw.push_back(constant_polexp<R>(Poly<R>{Complex<R>(R(1))}));
  R mu = t.empty() ? R(0) : t.terms.front().lambda;
  if (!t.empty()) {
    while (true) {
      R next = mu * static_cast<long>(pw.size());
      if (next > pcut && !same_key(next, pcut)) break;
      pw.push_back(mul(pw.back(), t, pcut));
    }
  }

  for (const auto& term : T.terms) {
    R shift = term.lambda * a;
    if (shift > cut && !same_key(shift, cut)) break;
    R c = cut - shift;

    PolExp<R> E;
    Complex<R> coef(R(1));
    for (std::size_t j = 0; j < pw.size(); ++j) {
      if (j > 0) {
        if (mu * static_cast<long>(j) > c && !same_key(mu * static_cast<long>(j), c)) break;
        coef *= Complex<R>(-term.lambda / static_cast<long>(j));
        if (is_zero(coef, R(0))) break;
      }
      E.add_scaled(pw[j], coef);
    }
    E.truncate(c);

    Poly<R> q = affine(term.p, Complex<R>(a), g.b);
    PolExp<R> prod;
    if (q.size() <= 1 || t.empty()) {
      prod = mul_poly(E, q);
    } else {
      PolExp<R> PG;
      Poly<R> qi = q;
      R scale(1);
      for (std::size_t i = 0; i < q.size() && i < pw.size(); ++i) {
        if (i > 0) {
          qi = deriv(qi);
          scale /= a * static_cast<long>(i);
          if (mu * static_cast<long>(i) > c && !same_key(mu * static_cast<long>(i), c)) break;
        }
        PolExp<R> piece = mul_poly(pw[i], scaled(qi, scale));
        PG += piece;
      }
      PG.truncate(c);
      prod = mul(PG, E, c);
    }
    Complex<R> eb = exp(Complex<R>(-term.lambda * g.b.re, -term.lambda * g.b.im));
    for (auto& tt : prod.terms) {
      for (auto& v : tt.p) v *= eb;
      out.add(tt.lambda + shift, tt.p);
    }
  }
  return out;
}

/// f o g.  Validity min(Lambda_g, a_g Lambda_f).
template <class R>
DulacSeries<R> compose(const DulacSeries<R>& f, const DulacSeries<R>& g) {
  DulacSeries<R> r;
  r.validity = std::min(g.validity, g.a * f.validity);
  r.a = f.a * g.a;
  r.b = g.b * f.a + f.b;
  r.tail = g.tail * Complex<R>(f.a);
  r.tail.truncate(r.validity);
  r.tail += substitute(f.tail, g, r.validity);
  r.normalize();
  return r;
}

/// Compositional inverse, validity Lambda_f / a_f.  Fixed point
/// g <- (z - b - T_f o g)/a, each sweep gaining one flatness level.
template <class R>
DulacSeries<R> invert(const DulacSeries<R>& f) {
  DulacSeries<R> g;
  g.a = R(1) / f.a;
  g.b = -f.b / f.a;
  g.validity = f.validity / f.a;
  if (f.tail.empty()) return g;
  const R m = f.tail.terms.front().lambda / f.a;
  const Complex<R> neg_inv_a(-g.a);
  for (long k = 1;; ++k) {
    R cut = std::min(g.validity, m * (k + 1));
    DulacSeries<R> gc = g;
    gc.tail.truncate(cut);
    PolExp<R> next = substitute(f.tail, gc, cut);
    next *= neg_inv_a;
    next.normalize();
    g.tail = std::move(next);
    if (m * (k + 1) > g.validity && !same_key(m * (k + 1), g.validity)) break;
  }
  g.normalize();
  return g;
}

/// tau o h o tau^{-1}:  h(z - 2 pi i) + 2 pi i.
template <class R>
DulacSeries<R> conj_tau(const DulacSeries<R>& h) {
  DulacSeries<R> r = h;
  r.b = h.b + two_pi_i<R>() * Complex<R>(R(1) - h.a);
  r.tail = shift_arg(h.tail, -two_pi_i<R>());
  r.normalize();
  return r;
}

/// Variation var(f) = [tau, f] = tau^{-1} f^{-1} tau f, the product taken in the
/// group of substitution operators p -> p o f (the product used by the Lie
/// calculus).  As maps this is f o tau o f^{-1} o tau^{-1}.
template <class R>
DulacSeries<R> variation(const DulacSeries<R>& f) {
  DulacSeries<R> r = compose(f, conj_tau(invert(f)));
  r.a = R(1);
  return r;
}

template <class R>
bool is_integer_key(const R& lambda) {
  using std::round;
  R n = round(lambda);
  return n >= 1 && same_key(n, lambda);
}

/// Support criterion: a = 1, integer keys, constant polynomials.
template <class R>
bool is_unramified(const DulacSeries<R>& f) {
  if (!near(f.a, R(1), eps_coeff<R>())) return false;
  for (const auto& t : f.tail.terms) {
    Poly<R> p = t.p;
    strip(p, eps_coeff<R>());
    if (p.empty()) continue;
    if (!is_integer_key(t.lambda) || p.size() > 1) return false;
  }
  return true;
}

template <class R>
bool is_mildly_ramified(const DulacSeries<R>& f) {
  return is_unramified(variation(f));
}

/// Largest coefficientwise difference, compared up to the smaller validity.
template <class R>
R distance(const DulacSeries<R>& f, const DulacSeries<R>& g) {
  using std::abs;
  R cut = std::min(f.validity, g.validity);
  R d = std::max(abs(f.a - g.a), abs(f.b - g.b));
  return std::max(d, max_abs_diff(f.tail, g.tail, cut));
}

template <class R>
bool approx_equal(const DulacSeries<R>& f, const DulacSeries<R>& g, const R& tol = eps_coeff<R>()) {
  return distance(f, g) <= tol;
}

template <class R>
bool is_identity(const DulacSeries<R>& f, const R& tol = eps_coeff<R>()) {
  return approx_equal(f, DulacSeries<R>::identity(f.validity), tol);
}

/// f^n under composition (n may be negative).
template <class R>
DulacSeries<R> power(const DulacSeries<R>& f, long n) {
  DulacSeries<R> base = n < 0 ? invert(f) : f;
  DulacSeries<R> r = DulacSeries<R>::identity(base.validity);
  for (long i = 0; i < (n < 0 ? -n : n); ++i) r = compose(r, base);
  return r;
}

enum class DynType { SuperAttracting, SuperRepelling, HypAttracting, HypRepelling, Indifferent };

inline const char* to_string(DynType t) {
  switch (t) {
    case DynType::SuperAttracting: return "SuperAttracting";
    case DynType::SuperRepelling: return "SuperRepelling";
    case DynType::HypAttracting: return "HypAttracting";
    case DynType::HypRepelling: return "HypRepelling";
    case DynType::Indifferent: return "Indifferent";
  }
  return "?";
}

struct Classification {
  DynType type;
  bool boundary_warning = false;  // |Re b| within the zero threshold
};

template <class R>
Classification classify(const DulacSeries<R>& f) {
  using std::abs;
  const R& eps = eps_coeff<R>();
  if (!near(f.a, R(1), eps)) return {f.a > 1 ? DynType::SuperAttracting : DynType::SuperRepelling, false};
  if (abs(f.b.re) <= eps) return {DynType::Indifferent, true};
  return {f.b.re > 0 ? DynType::HypAttracting : DynType::HypRepelling, false};
}

/// The group of substitution operators p -> p o f: the product x.y acts as
/// "first x, then y" on functions, i.e. the map y o x.  Appendix-style group
/// identities involving the variation are stated in this product.
namespace op {

template <class R>
DulacSeries<R> mul(const DulacSeries<R>& x, const DulacSeries<R>& y) {
  return compose(y, x);
}

template <class R>
DulacSeries<R> inv(const DulacSeries<R>& x) {
  return invert(x);
}

/// [x, y] = x^{-1} y^{-1} x y
template <class R>
DulacSeries<R> commutator(const DulacSeries<R>& x, const DulacSeries<R>& y) {
  return mul(mul(mul(inv(x), inv(y)), x), y);
}

/// x^y = y^{-1} x y
template <class R>
DulacSeries<R> conj(const DulacSeries<R>& x, const DulacSeries<R>& y) {
  return mul(mul(inv(y), x), y);
}

}  // namespace op

}  // namespace dulac
