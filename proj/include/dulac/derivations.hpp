#pragma once

// Nilpotent derivations X = sum P_lambda(z) e^{-lambda z} d/dz of the Dulac
// ring: bracket, Exp/Log, the logarithmic variation lvar = log var exp computed
// through the BCH series, its inverse, and the two normal forms.

#include <map>
#include <optional>
#include <vector>

#include "dulac/transseries.hpp"

namespace dulac {

template <class R>
struct NilpotentDerivation {
  PolExp<R> terms;  // keys > 0
  R validity{5};

  bool is_zero(const R& tol = eps_coeff<R>()) const { return max_abs(terms) <= tol; }
  void normalize() {
    terms.truncate(validity);
    terms.normalize();
  }
};

template <class R>
NilpotentDerivation<R> operator+(NilpotentDerivation<R> x, const NilpotentDerivation<R>& y) {
  x.validity = std::min(x.validity, y.validity);
  x.terms += y.terms;
  x.normalize();
  return x;
}
template <class R>
NilpotentDerivation<R> operator-(NilpotentDerivation<R> x, const NilpotentDerivation<R>& y) {
  x.validity = std::min(x.validity, y.validity);
  x.terms -= y.terms;
  x.normalize();
  return x;
}
template <class R>
NilpotentDerivation<R> operator*(NilpotentDerivation<R> x, const Complex<R>& c) {
  x.terms *= c;
  x.normalize();
  return x;
}

template <class R>
R distance(const NilpotentDerivation<R>& x, const NilpotentDerivation<R>& y) {
  return max_abs_diff(x.terms, y.terms, std::min(x.validity, y.validity));
}

/// Smallest key, the flatness of x (nullopt for 0).
template <class R>
std::optional<R> flatness(const NilpotentDerivation<R>& x) {
  if (x.terms.empty()) return std::nullopt;
  return x.terms.terms.front().lambda;
}

namespace detail {

template <class R>
PolExp<R> bracket_terms(const PolExp<R>& x, const PolExp<R>& y, const R& cut) {
  if (x.empty() || y.empty()) return {};
  PolExp<R> r = mul(x, deriv(y), cut);
  r -= mul(y, deriv(x), cut);
  r.normalize();
  return r;
}

template <class R>
R min_key(const PolExp<R>& a, const R& fallback) {
  return a.empty() ? fallback : a.terms.front().lambda;
}

/// B_0, B_1, ..., B_n with B_1 = -1/2.
template <class R>
std::vector<R> bernoulli_numbers(int n) {
  std::vector<R> B(static_cast<std::size_t>(n + 1));
  B[0] = R(1);
  for (int m = 1; m <= n; ++m) {
    R s(0), c(1);  // c = binom(m+1, k)
    for (int k = 0; k < m; ++k) {
      s += c * B[static_cast<std::size_t>(k)];
      c = c * (m + 1 - k) / (k + 1);
    }
    B[static_cast<std::size_t>(m)] = -s / (m + 1);
  }
  return B;
}

}  // namespace detail

/// [x, y] = (x y' - y x') d/dz, truncated at the smaller validity.
template <class R>
NilpotentDerivation<R> bracket(const NilpotentDerivation<R>& x, const NilpotentDerivation<R>& y) {
  NilpotentDerivation<R> r;
  r.validity = std::min(x.validity, y.validity);
  r.terms = detail::bracket_terms(x.terms, y.terms, r.validity);
  r.normalize();
  return r;
}

/// Time-one flow z + Xz + X^2 z/2 + ...
template <class R>
DulacSeries<R> exp_derivation(const NilpotentDerivation<R>& X) {
  DulacSeries<R> f = DulacSeries<R>::identity(X.validity);
  PolExp<R> cur = X.terms;
  cur.truncate(X.validity);
  for (long n = 2; !cur.empty(); ++n) {
    f.tail += cur;
    cur = mul(X.terms, deriv(cur), X.validity);
    cur *= Complex<R>(R(1) / n);
    cur.normalize();
  }
  f.normalize();
  return f;
}

/// Inverse of exp_derivation on the tangent-to-identity subgroup.
template <class R>
NilpotentDerivation<R> log_series(const DulacSeries<R>& f) {
  const R& eps = eps_coeff<R>();
  if (!near(f.a, R(1), eps) || abs(f.b) > eps) throw Error("NotTangent", "log_series needs a = 1 and b = 0");
  NilpotentDerivation<R> X{f.tail, f.validity};
  X.normalize();
  if (X.terms.empty()) return X;
  const R lmin = X.terms.terms.front().lambda;
  const long sweeps = static_cast<long>(f.validity / lmin) + 2;
  for (long i = 0; i < sweeps; ++i) {
    PolExp<R> d = f.tail - exp_derivation(X).tail;
    d.truncate(f.validity);
    d.normalize();
    if (d.empty()) break;
    X.terms += d;
    X.normalize();
  }
  return X;
}

/// X^tau: P(z) e^{-lambda z} -> e^{2 pi i lambda} P(z - 2 pi i) e^{-lambda z}.
template <class R>
NilpotentDerivation<R> conj_tau(const NilpotentDerivation<R>& X) {
  NilpotentDerivation<R> r{shift_arg(X.terms, -two_pi_i<R>()), X.validity};
  r.normalize();
  return r;
}

/// log(e^A e^B) by the Varadarajan recursion on homogeneous BCH components
///   (n+1) Z_{n+1} = 1/2 [A - B, Z_n] + sum_p B_{2p}/(2p)! W(n, 2p),
///   W(m, q) = sum_k [Z_k, W(m - k, q - 1)],  W(0, 0) = A + B.
/// Z_n is at least n*lmin flat, so the sum stops once that exceeds the validity.
template <class R>
NilpotentDerivation<R> bch(const NilpotentDerivation<R>& A, const NilpotentDerivation<R>& B) {
  const R cut = std::min(A.validity, B.validity);
  const R lmin = std::min(detail::min_key(A.terms, cut + 1), detail::min_key(B.terms, cut + 1));
  NilpotentDerivation<R> out{A.terms + B.terms, cut};
  out.normalize();
  if (lmin > cut) return out;

  const long nmax = static_cast<long>(cut / lmin) + 1;
  std::vector<R> bern = detail::bernoulli_numbers<R>(static_cast<int>(nmax + 1));
  PolExp<R> AmB = A.terms - B.terms;

  std::vector<PolExp<R>> Z(static_cast<std::size_t>(nmax + 2));
  Z[1] = out.terms;
  // W[m][q]
  std::vector<std::vector<PolExp<R>>> W(static_cast<std::size_t>(nmax + 2),
                                        std::vector<PolExp<R>>(static_cast<std::size_t>(nmax + 2)));
  W[0][0] = out.terms;

  for (long n = 1; n < nmax; ++n) {
    if (R(n + 1) * lmin > cut && !same_key(R(n + 1) * lmin, cut)) break;
    auto un = static_cast<std::size_t>(n);
    for (long q = 1; q <= n; ++q) {
      PolExp<R>& w = W[un][static_cast<std::size_t>(q)];
      for (long k = 1; k <= n - q + 1; ++k) {
        const PolExp<R>& inner = W[static_cast<std::size_t>(n - k)][static_cast<std::size_t>(q - 1)];
        if (inner.empty() || Z[static_cast<std::size_t>(k)].empty()) continue;
        w += detail::bracket_terms(Z[static_cast<std::size_t>(k)], inner, cut);
      }
      w.normalize();
    }
    PolExp<R> next = detail::bracket_terms(AmB, Z[un], cut);
    next *= Complex<R>(R(1) / 2);
    for (long p = 1; 2 * p <= n; ++p) {
      const PolExp<R>& w = W[un][static_cast<std::size_t>(2 * p)];
      if (w.empty()) continue;
      next.add_scaled(w, Complex<R>(bern[static_cast<std::size_t>(2 * p)] / factorial<R>(static_cast<int>(2 * p))));
    }
    next *= Complex<R>(R(1) / (n + 1));
    next.normalize();
    Z[un + 1] = next;
    out.terms += next;
  }
  out.normalize();
  return out;
}

/// log var exp X = log(e^{-X^tau} e^{X}) = X - X^tau + 1/2 [X, X^tau] + ...
template <class R>
NilpotentDerivation<R> lvar(const NilpotentDerivation<R>& X) {
  return bch(conj_tau(X) * Complex<R>(R(-1)), X);
}

/// The same quantity through the group: log_series(variation(exp_derivation(X))).
template <class R>
NilpotentDerivation<R> lvar_via_group(const NilpotentDerivation<R>& X) {
  DulacSeries<R> v = variation(exp_derivation(X));
  v.b = Complex<R>();
  return log_series(v);
}

// ---------------------------------------------------------------------------
// difference operators

/// (Delta P)(z) = P(z) - P(z - 2 pi i)
template <class R>
Poly<R> delta(const Poly<R>& p) {
  Poly<R> r = p;
  axpy(r, Complex<R>(R(-1)), shifted(p, -two_pi_i<R>()));
  strip(r, eps_coeff<R>());
  return r;
}

/// Delta^lambda P = P(z) - e^{2 pi i lambda} P(z - 2 pi i)
template <class R>
Poly<R> twisted_delta(const Poly<R>& p, const R& lambda) {
  Poly<R> r = p;
  axpy(r, -unit_root(lambda), shifted(p, -two_pi_i<R>()));
  strip(r, eps_coeff<R>());
  return r;
}

/// P_k = z (z + 2 pi i) ... (z + 2 pi i (k-1)) / (2 pi i)^k, so that Delta P_k = k P_{k-1}.
template <class R>
Poly<R> basis_poly(int k) {
  Poly<R> p{Complex<R>(R(1))};
  const Complex<R> w = two_pi_i<R>();
  for (int j = 0; j < k; ++j) {
    p = mul(p, Poly<R>{w * R(j), Complex<R>(R(1))});
    p = scaled(p, Complex<R>(R(1)) / w);
  }
  return p;
}

/// Solves Delta^lambda P = rhs.  For integer lambda the kernel is the constants
/// and P(0) = c0 picks the representative; otherwise the solution is unique.
template <class R>
Poly<R> solve_delta(const Poly<R>& rhs, const R& lambda, const Complex<R>& c0 = {}) {
  const R& eps = eps_coeff<R>();
  const Complex<R> w = unit_root(lambda);
  const Complex<R> s = -two_pi_i<R>();
  const bool integer = abs(Complex<R>(R(1)) - w) <= eps;
  const int d = degree(rhs);

  // binomial C(m, j) (-2 pi i)^{m-j}: coefficient of z^j in (z - 2 pi i)^m
  auto shift_coef = [&](int m, int j) {
    R c(1);
    for (int i = 0; i < m - j; ++i) c = c * (m - i) / (i + 1);
    return pow(s, m - j) * c;
  };

  if (integer) {
    Poly<R> p(static_cast<std::size_t>(d + 2));
    p[0] = c0;
    for (int j = d; j >= 0; --j) {
      // [z^j] Delta P = -sum_{m>j} p_m C(m,j) s^{m-j}
      Complex<R> acc = rhs[static_cast<std::size_t>(j)];
      for (int m = j + 2; m <= d + 1; ++m) acc += p[static_cast<std::size_t>(m)] * shift_coef(m, j);
      p[static_cast<std::size_t>(j + 1)] = acc / (-shift_coef(j + 1, j));
    }
    if (d < 0) p.assign(1, c0);
    strip(p, eps);
    return p;
  }
  Poly<R> p(static_cast<std::size_t>(std::max(d + 1, 0)));
  const Complex<R> inv = Complex<R>(R(1)) / (Complex<R>(R(1)) - w);
  for (int j = d; j >= 0; --j) {
    Complex<R> acc = rhs[static_cast<std::size_t>(j)];
    for (int m = j + 1; m <= d; ++m) acc += w * p[static_cast<std::size_t>(m)] * shift_coef(m, j);
    p[static_cast<std::size_t>(j)] = acc * inv;
  }
  strip(p, eps);
  return p;
}

/// Free constants of the integer-key polynomials solved by lvar_inverse;
/// keys absent from the map get 0.
template <class R>
using Section = std::map<long, Complex<R>>;

/// X with lvar(X) = Z.  Each sweep inverts the linear part key by key,
/// Delta^lambda P_lambda = residual_lambda, and feeds the BCH remainder into
/// the next sweep.  The section constant is used the first time a key is solved.
template <class R>
NilpotentDerivation<R> lvar_inverse(const NilpotentDerivation<R>& Z, const Section<R>& section = {}) {
  NilpotentDerivation<R> X{{}, Z.validity};
  if (Z.terms.empty()) return X;
  using std::round;
  const R lmin = Z.terms.terms.front().lambda;
  const long sweeps = static_cast<long>(Z.validity / lmin) + 3;
  std::vector<R> seen;
  auto first_time = [&](const R& l) {
    for (const auto& s : seen)
      if (same_key(s, l)) return false;
    seen.push_back(l);
    return true;
  };
  for (long i = 0; i < sweeps; ++i) {
    NilpotentDerivation<R> res = Z - lvar(X);
    if (res.terms.empty()) break;
    for (const auto& t : res.terms.terms) {
      Complex<R> c0;
      if (first_time(t.lambda) && is_integer_key(t.lambda)) {
        auto it = section.find(static_cast<long>(round(t.lambda)));
        if (it != section.end()) c0 = it->second;
      }
      X.terms.add(t.lambda, solve_delta(t.p, t.lambda, c0));
    }
    X.normalize();
  }
  for (const auto& t : Z.terms.terms) {
    if (!is_integer_key(t.lambda)) continue;
    auto it = section.find(static_cast<long>(round(t.lambda)));
    if (it != section.end() && !X.terms.at(t.lambda)) X.terms.add(t.lambda, Poly<R>{it->second});
  }
  X.normalize();
  const NilpotentDerivation<R> left = Z - lvar(X);
  if (max_abs(left.terms) > check_tol<R>() * std::max(R(1), max_abs(Z.terms)))
    throw Error("NotSolvable", "lvar(X) = Z has no solution to the requested validity");
  return X;
}

// ---------------------------------------------------------------------------
// normal forms

/// g^* Z = Z(g) / g', the derivation with Exp(g^* Z) = g^{-1} o Exp(Z) o g.
template <class R>
NilpotentDerivation<R> pullback(const NilpotentDerivation<R>& Z, const DulacSeries<R>& g) {
  NilpotentDerivation<R> r;
  r.validity = std::min(g.validity, g.a * Z.validity);
  PolExp<R> num = substitute(Z.terms, g, r.validity);
  // 1/g' = (1/a) sum_j (-t'/a)^j
  PolExp<R> u = deriv(g.tail);
  u *= Complex<R>(-R(1) / g.a);
  u.normalize();
  PolExp<R> inv = constant_polexp<R>(Poly<R>{Complex<R>(R(1) / g.a)});
  PolExp<R> pw = inv;
  for (int j = 0; j < 400 && !u.empty(); ++j) {
    pw = mul(pw, u, r.validity);
    pw.normalize();
    if (pw.empty()) break;
    inv += pw;
  }
  r.terms = mul(num, inv, r.validity);
  r.normalize();
  return r;
}

/// -2 pi i e^{-kz} / (1 + mu e^{-kz}) d/dz expanded up to the validity.
template <class R>
NilpotentDerivation<R> unramified_model(long k, const Complex<R>& mu, const R& validity) {
  NilpotentDerivation<R> r{{}, validity};
  Complex<R> c = -two_pi_i<R>();
  for (long m = 1; R(m * k) <= validity || same_key(R(m * k), validity); ++m) {
    r.terms.add(R(m * k), Poly<R>{c});
    c *= -mu;
  }
  r.normalize();
  return r;
}

template <class R>
struct UnramifiedNormalForm {
  DulacSeries<R> conjugator;
  long k;
  Complex<R> mu;
  NilpotentDerivation<R> remainder;  // conjugated field minus the model
};

/// Reduces an unramified Z by unramified conjugations to the model
/// -2 pi i e^{-kz}/(1 + mu e^{-kz}) d/dz: first a translation normalizes the
/// leading coefficient, then Exp(b_j e^{-jz} d/dz) removes the coefficient at
/// k + j (j != k); the coefficient at 2k is the residue, 2 pi i mu.
template <class R>
UnramifiedNormalForm<R> normal_form_unramified(const NilpotentDerivation<R>& Zin) {
  using std::round;
  NilpotentDerivation<R> Z = Zin;
  Z.normalize();
  R top(0);
  for (const auto& t : Z.terms.terms) top = std::max(top, max_abs(t.p));
  if (top <= eps_coeff<R>()) throw Error("ZeroDerivation", "normal form of the zero derivation");
  for (const auto& t : Z.terms.terms) {
    Poly<R> p = t.p;
    strip(p, eps_coeff<R>() * top);
    if (!p.empty() && (p.size() > 1 || !is_integer_key(t.lambda)))
      throw Error("NotUnramified", "normal_form_unramified needs integer keys with constant coefficients");
  }
  const Term<R>* lead = nullptr;
  for (const auto& t : Z.terms.terms)
    if (max_abs(t.p) > eps_coeff<R>() * top) {
      lead = &t;
      break;
    }
  const long k = static_cast<long>(round(lead->lambda));
  const Complex<R> ck = lead->p[0];
  const Complex<R> w = two_pi_i<R>();

  // Z^{z+b} has leading coefficient c_k e^{-kb}
  Complex<R> b = log(-w / ck) * Complex<R>(R(-1) / k);
  DulacSeries<R> G = DulacSeries<R>::affine(R(1), b, Z.validity);
  NilpotentDerivation<R> Zc = pullback(Z, G);

  auto coef = [](const NilpotentDerivation<R>& X, long key) {
    const Poly<R>* p = X.terms.at(R(key));
    return p && !p->empty() ? (*p)[0] : Complex<R>();
  };
  Complex<R> mu;
  for (long j = 1; R(k + j) <= Z.validity || same_key(R(k + j), Z.validity); ++j) {
    if (j == k) {
      mu = coef(Zc, 2 * k) / w;
      continue;
    }
    Complex<R> target;
    if ((k + j) % k == 0) target = -w * pow(-mu, (k + j) / k - 1);
    Complex<R> diff = coef(Zc, k + j) - target;
    if (abs(diff) <= eps_coeff<R>()) continue;
    // [b e^{-jz} d/dz, -2 pi i e^{-kz} d/dz] contributes 2 pi i b (k - j) at k + j
    Complex<R> bj = -diff / (w * R(k - j));
    NilpotentDerivation<R> Y{{}, Z.validity};
    Y.terms.add(R(j), Poly<R>{bj});
    DulacSeries<R> g = exp_derivation(Y);
    Zc = pullback(Zc, g);
    G = compose(G, g);
  }
  if (2 * k > Z.validity) mu = Complex<R>();
  NilpotentDerivation<R> rem = Zc - unramified_model(k, mu, Zc.validity);
  return {G, k, mu, rem};
}

template <class R>
struct RamifiedNormalForm {
  DulacSeries<R> conjugator;
  long k;
  Complex<R> a, b, mu;
  Complex<R> z_coef_k;    // coefficient of z at e^{-kz} (-1 in the normal form)
  Complex<R> z_coef_2k;   // coefficient of z at e^{-2kz} (mu - 1/2)
  NilpotentDerivation<R> conjugated;  // g^* X
};

/// Conjugates a mildly ramified X to
///   -(z + a) e^{-kz} d/dz + ((mu - 1/2) z + b) e^{-2kz} d/dz + o(e^{-2kz})
/// by the unramified conjugator normalizing lvar(X).
template <class R>
RamifiedNormalForm<R> normal_form_mildly_ramified(const NilpotentDerivation<R>& X) {
  NilpotentDerivation<R> Z = lvar(X);
  if (Z.is_zero()) throw Error("Unramified", "lvar(X) = 0");
  UnramifiedNormalForm<R> nf = normal_form_unramified(Z);
  NilpotentDerivation<R> Xc = pullback(X, nf.conjugator);
  auto at = [&](long key, std::size_t deg) {
    const Poly<R>* p = Xc.terms.at(R(key));
    return p && p->size() > deg ? (*p)[deg] : Complex<R>();
  };
  RamifiedNormalForm<R> r{nf.conjugator, nf.k, -at(nf.k, 0), at(2 * nf.k, 0), nf.mu,
                          at(nf.k, 1), at(2 * nf.k, 1), Xc};
  return r;
}

}  // namespace dulac
