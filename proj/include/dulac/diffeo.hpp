#pragma once

// Germs of diffeomorphisms of (C,0) as truncated power series, formal vector
// fields a(x) x d/dx, and the covering projection x = e^{-z} relating them to
// unramified Dulac series.

#include <vector>

#include "dulac/derivations.hpp"

namespace dulac {

/// Truncated power series sum_{j<=N} s_j x^j (index = power).
template <class R>
using Series = std::vector<Complex<R>>;

namespace ser {

template <class R>
Series<R> mul(const Series<R>& a, const Series<R>& b, int N) {
  Series<R> r(static_cast<std::size_t>(N + 1));
  R t;
  for (std::size_t i = 0; i < a.size() && i <= static_cast<std::size_t>(N); ++i) {
    if (a[i].re == 0 && a[i].im == 0) continue;
    for (std::size_t j = 0; j < b.size() && i + j <= static_cast<std::size_t>(N); ++j) mul_add(r[i + j], a[i], b[j], t);
  }
  return r;
}

template <class R>
Series<R> derivative(const Series<R>& a) {
  Series<R> r(a.size() > 1 ? a.size() - 1 : 1);
  for (std::size_t i = 1; i < a.size(); ++i) r[i - 1] = a[i] * R(static_cast<long>(i));
  return r;
}

/// exp(a) for a(0) = 0, via E' = a' E.
template <class R>
Series<R> exp0(const Series<R>& a, int N) {
  Series<R> e(static_cast<std::size_t>(N + 1));
  e[0] = Complex<R>(R(1));
  Series<R> da = derivative(a);
  R t;
  for (int n = 1; n <= N; ++n) {
    Complex<R> s;
    for (int j = 1; j <= n && static_cast<std::size_t>(j - 1) < da.size(); ++j)
      mul_add(s, da[static_cast<std::size_t>(j - 1)], e[static_cast<std::size_t>(n - j)], t);
    e[static_cast<std::size_t>(n)] = s / R(n);
  }
  return e;
}

/// log(1 + a) for a(0) = 0, via L' = a' / (1 + a).
template <class R>
Series<R> log1p0(const Series<R>& a, int N) {
  Series<R> L(static_cast<std::size_t>(N + 1));
  auto at = [&](int i) { return i < static_cast<int>(a.size()) ? a[static_cast<std::size_t>(i)] : Complex<R>(); };
  // (1 + a) L' = a'
  Series<R> dL(static_cast<std::size_t>(N + 1));
  R t;
  for (int n = 0; n < N; ++n) {
    Complex<R> s = at(n + 1) * R(n + 1);
    for (int j = 1; j <= n; ++j) {
      Complex<R> m;
      mul_add(m, at(j), dL[static_cast<std::size_t>(n - j)], t);
      s -= m;
    }
    dL[static_cast<std::size_t>(n)] = s;
    L[static_cast<std::size_t>(n + 1)] = s / R(n + 1);
  }
  return L;
}

}  // namespace ser

template <class R>
struct DiffeoGerm {
  Series<R> c;  // c[0] = 0, c[1] multiplier, ..., c[order]
  int order = 0;

  static DiffeoGerm identity(int N) {
    DiffeoGerm g;
    g.order = N;
    g.c.assign(static_cast<std::size_t>(N + 1), Complex<R>());
    if (N >= 1) g.c[1] = Complex<R>(R(1));
    return g;
  }
  static DiffeoGerm linear(const Complex<R>& m, int N) {
    DiffeoGerm g = identity(N);
    g.c[1] = m;
    return g;
  }

  Complex<R> coef(int j) const {
    return j >= 0 && j < static_cast<int>(c.size()) ? c[static_cast<std::size_t>(j)] : Complex<R>();
  }
  Complex<R> eval(const Complex<R>& x) const { return dulac::eval(c, x); }
};

template <class R>
R distance(const DiffeoGerm<R>& F, const DiffeoGerm<R>& G) {
  int N = std::min(F.order, G.order);
  R m(0);
  for (int j = 0; j <= N; ++j) m = std::max(m, abs(F.coef(j) - G.coef(j)));
  return m;
}

/// F o G truncated at the smaller order.
template <class R>
DiffeoGerm<R> compose(const DiffeoGerm<R>& F, const DiffeoGerm<R>& G) {
  const int N = std::min(F.order, G.order);
  DiffeoGerm<R> r;
  r.order = N;
  r.c.assign(static_cast<std::size_t>(N + 1), Complex<R>());
  Series<R> pw = G.c;
  pw.resize(static_cast<std::size_t>(N + 1));
  for (int j = 1; j <= N; ++j) {
    const Complex<R> f = F.coef(j);
    if (!(f.re == 0 && f.im == 0)) {
      R t;
      for (int i = 0; i <= N; ++i) mul_add(r.c[static_cast<std::size_t>(i)], f, pw[static_cast<std::size_t>(i)], t);
    }
    if (j < N) pw = ser::mul(pw, G.c, N);
  }
  return r;
}

/// Compositional inverse; each sweep fixes one more coefficient.
template <class R>
DiffeoGerm<R> invert(const DiffeoGerm<R>& F) {
  const Complex<R> c1 = F.coef(1);
  if (abs(c1) <= eps_coeff<R>()) throw Error("NotInvertible", "germ with vanishing linear part");
  DiffeoGerm<R> g = DiffeoGerm<R>::linear(Complex<R>(R(1)) / c1, F.order);
  DiffeoGerm<R> id = DiffeoGerm<R>::identity(F.order);
  for (int it = 1; it < F.order; ++it) {
    DiffeoGerm<R> e = compose(F, g);
    for (int j = 1; j <= F.order; ++j) g.c[static_cast<std::size_t>(j)] -= (e.c[static_cast<std::size_t>(j)] - id.c[static_cast<std::size_t>(j)]) / c1;
  }
  return g;
}

template <class R>
DiffeoGerm<R> power(const DiffeoGerm<R>& F, long n) {
  DiffeoGerm<R> base = n < 0 ? invert(F) : F;
  DiffeoGerm<R> r = DiffeoGerm<R>::identity(F.order);
  for (long i = 0; i < (n < 0 ? -n : n); ++i) r = compose(r, base);
  return r;
}

/// Least k >= 1 with c_{k+1} != 0 for a tangent-to-identity germ; 0 when the
/// germ is the identity to its order.
template <class R>
int tangency_order(const DiffeoGerm<R>& F, const R& tol = eps_coeff<R>()) {
  for (int j = 2; j <= F.order; ++j)
    if (abs(F.coef(j)) > tol) return j - 1;
  return 0;
}

/// Formal field a(x) x d/dx; a[j] is the coefficient of x^j.
template <class R>
struct FormalField {
  Series<R> a;
  int order = 0;  // same truncation as the germs it generates

  /// Coefficients of v(x) = x a(x).
  Series<R> v() const {
    Series<R> r(static_cast<std::size_t>(order + 1));
    for (std::size_t j = 0; j < a.size() && j + 1 <= static_cast<std::size_t>(order); ++j) r[j + 1] = a[j];
    return r;
  }
  static FormalField from_v(const Series<R>& v, int N) {
    FormalField f;
    f.order = N;
    f.a.assign(static_cast<std::size_t>(N), Complex<R>());
    for (int j = 1; j <= N && j < static_cast<int>(v.size()); ++j) f.a[static_cast<std::size_t>(j - 1)] = v[static_cast<std::size_t>(j)];
    return f;
  }
};

template <class R>
FormalField<R> operator*(FormalField<R> V, const Complex<R>& s) {
  for (auto& c : V.a) c *= s;
  return V;
}

/// Time-one flow: sum_n V^n(x)/n!.
template <class R>
DiffeoGerm<R> exp_field(const FormalField<R>& V) {
  const int N = V.order;
  DiffeoGerm<R> F = DiffeoGerm<R>::identity(N);
  const Series<R> v = V.v();
  Series<R> cur = F.c;
  const bool nilpotent = V.a.empty() || abs(V.a[0]) <= eps_coeff<R>();
  const int cap = nilpotent ? N + 1 : N + 400;
  for (int n = 1; n <= cap; ++n) {
    cur = ser::mul(v, ser::derivative(cur), N);
    for (auto& c : cur) c /= R(n);
    R m(0);
    for (std::size_t j = 0; j < cur.size(); ++j) {
      F.c[j] += cur[j];
      m = std::max(m, abs(cur[j]));
    }
    if (m <= eps_coeff<R>() * eps_coeff<R>()) break;
  }
  return F;
}

/// Formal generator V with exp_field(V) = F (F tangent to the identity).
template <class R>
FormalField<R> infinitesimal_generator(const DiffeoGerm<R>& F) {
  const R& eps = eps_coeff<R>();
  if (!near(F.coef(1), Complex<R>(R(1)), eps) || tangency_order(F) == 0)
    throw Error("NotTangentToIdentity", "generator needs F = x + a x^{k+1} + ..., F != id");
  const int N = F.order;
  Series<R> v = F.c;
  v[1] = Complex<R>();
  for (int it = 0; it < N; ++it) {
    DiffeoGerm<R> E = exp_field(FormalField<R>::from_v(v, N));
    R m(0);
    for (int j = 2; j <= N; ++j) {
      Complex<R> d = F.coef(j) - E.coef(j);
      v[static_cast<std::size_t>(j)] += d;
      m = std::max(m, abs(d));
    }
    if (m <= eps) break;
  }
  return FormalField<R>::from_v(v, N);
}

/// 2 pi i x^k / (1 + x^k/(1 - nu)) x d/dx
template <class R>
FormalField<R> partial_field(int k, const Complex<R>& nu, int N) {
  FormalField<R> V;
  V.order = N;
  V.a.assign(static_cast<std::size_t>(N), Complex<R>());
  Complex<R> c = two_pi_i<R>();
  const Complex<R> q = -(Complex<R>(R(1)) / (Complex<R>(R(1)) - nu));
  for (int j = k; j < N; j += k) {
    V.a[static_cast<std::size_t>(j)] = c;
    c *= q;
  }
  return V;
}

// ---------------------------------------------------------------------------
// the projection Pi: unramified Dulac series -> Diff(C,0), x = e^{-z}

/// F(x) = e^{-f(z)} = e^{-b} x exp(-sum c_j x^j); order floor(Lambda) + 1.
template <class R>
DiffeoGerm<R> project_pi(const DulacSeries<R>& f) {
  using std::floor;
  using std::round;
  if (!is_unramified(f)) throw Error("NotUnramified", "project_pi needs an unramified series");
  const int N = static_cast<int>(floor(f.validity + eps_coeff<R>())) + 1;
  Series<R> T(static_cast<std::size_t>(N + 1));
  for (const auto& t : f.tail.terms) {
    int j = static_cast<int>(round(t.lambda));
    if (j <= N && !t.p.empty()) T[static_cast<std::size_t>(j)] = -t.p[0];
  }
  Series<R> E = ser::exp0(T, N - 1);
  DiffeoGerm<R> F;
  F.order = N;
  F.c.assign(static_cast<std::size_t>(N + 1), Complex<R>());
  const Complex<R> m = exp(-f.b);
  for (int j = 0; j < N; ++j) F.c[static_cast<std::size_t>(j + 1)] = E[static_cast<std::size_t>(j)] * m;
  return F;
}

/// Unramified lift z - Log c_1 - 2 pi i branch - log(1 + sum a_k e^{-kz}).
template <class R>
DulacSeries<R> lift_pi(const DiffeoGerm<R>& F, long branch = 0) {
  const Complex<R> c1 = F.coef(1);
  if (abs(c1) <= eps_coeff<R>()) throw Error("NotInvertible", "germ with vanishing linear part");
  const int N = F.order;
  Series<R> A(static_cast<std::size_t>(N));
  for (int k = 1; k < N; ++k) A[static_cast<std::size_t>(k)] = F.coef(k + 1) / c1;
  Series<R> L = ser::log1p0(A, N - 1);
  DulacSeries<R> f = DulacSeries<R>::identity(R(std::max(N - 1, 0)));
  f.b = -log(c1) - two_pi_i<R>() * R(branch);
  for (int k = 1; k < N; ++k) f.tail.add(R(k), Poly<R>{-L[static_cast<std::size_t>(k)]});
  f.normalize();
  return f;
}

/// (G, H) = (Pi var f, Pi var f^{-1}).
template <class R>
std::pair<DiffeoGerm<R>, DiffeoGerm<R>> variation_pair(const DulacSeries<R>& f) {
  DulacSeries<R> vf = variation(f);
  if (!is_unramified(vf)) throw Error("NotMildlyRamified", "variation(f) is ramified");
  return {project_pi(vf), project_pi(variation(invert(f)))};
}

enum class GHKind { NonCommuting, EmbeddedFlow, IdenticalVariations, Inconclusive };

inline const char* to_string(GHKind k) {
  switch (k) {
    case GHKind::NonCommuting: return "NonCommuting";
    case GHKind::EmbeddedFlow: return "EmbeddedFlow";
    case GHKind::IdenticalVariations: return "IdenticalVariations";
    case GHKind::Inconclusive: return "Inconclusive";
  }
  return "?";
}

template <class R>
struct GHVerdict {
  GHKind kind;
  int k = 0;                   // common tangency order
  int kH = 0;                  // tangency order of H
  Complex<R> nu;               // EmbeddedFlow only
  int commutator_degree = 0;   // NonCommuting: degree of the leading term of [H,G] - x
  Complex<R> commutator_coef;  // and its coefficient
  int checked_degree = 0;      // commutation decided up to this degree
  bool formal_only = true;     // convergence is not decided at truncation
};

/// Prop. GH dichotomy at truncation.  [H,G] = H^{-1} o G^{-1} o H o G.
template <class R>
GHVerdict<R> gh_dichotomy(const DiffeoGerm<R>& G, const DiffeoGerm<R>& H, R tol = R(-1)) {
  const R& eps = eps_coeff<R>();
  if (!near(G.coef(1), Complex<R>(R(1)), eps) || !near(H.coef(1), Complex<R>(R(1)), eps))
    throw Error("NotTangentToIdentity", "gh_dichotomy needs tangent-to-identity germs");
  if (tol < 0) {
    using std::pow;
    using std::sqrt;
    tol = sqrt(eps);
  }
  R scale(1);
  for (const auto& c : G.c) scale = std::max(scale, abs(c));
  for (const auto& c : H.c) scale = std::max(scale, abs(c));
  const R atol = tol * scale;

  GHVerdict<R> v;
  v.k = tangency_order(G, atol);
  v.kH = tangency_order(H, atol);
  DiffeoGerm<R> C = compose(invert(H), compose(invert(G), compose(H, G)));
  v.checked_degree = C.order;
  for (int j = 2; j <= C.order; ++j) {
    if (abs(C.coef(j)) > atol) {
      v.kind = GHKind::NonCommuting;
      v.commutator_degree = j;
      v.commutator_coef = C.coef(j);
      return v;
    }
  }
  if (v.k == 0 || v.kH == 0 || v.k != v.kH) {
    v.kind = GHKind::Inconclusive;
    return v;
  }
  FormalField<R> VG = infinitesimal_generator(G), VH = infinitesimal_generator(H);
  const Complex<R> t = VH.a[static_cast<std::size_t>(v.k)] / VG.a[static_cast<std::size_t>(v.k)];
  R resid(0);
  for (std::size_t j = 0; j < VG.a.size(); ++j) resid = std::max(resid, abs(VH.a[j] - t * VG.a[j]));
  if (resid > atol) {
    v.kind = GHKind::Inconclusive;
    return v;
  }
  if (abs(t - Complex<R>(R(1))) <= atol) {
    v.kind = GHKind::IdenticalVariations;
  } else {
    v.kind = GHKind::EmbeddedFlow;
    v.nu = -(Complex<R>(R(1)) / t);
  }
  return v;
}

// ---------------------------------------------------------------------------
// the embedded-flow model and its Fatou coordinate

/// -(1/(2 pi i k)) (e^{kz} + k z/(1 - nu)); for k = 1 this is the classical
/// Fatou coordinate of the field 2 pi i x^k/(1 + x^k/(1-nu)) x d/dx.
template <class R>
Complex<R> fatou_coordinate(int k, const Complex<R>& nu, const Complex<R>& z) {
  const Complex<R> K{R(k)};
  const Complex<R> e = exp(z * K);
  return -(e + K * z / (Complex<R>(R(1)) - nu)) / (two_pi_i<R>() * K);
}

/// Solves e^{kf} + k f/(1-nu) = (e^{kz} + k z/(1-nu))/nu, nu = e^{-2 pi i k beta},
/// by damped Newton from the dominant-balance seed.
template <class R>
Complex<R> fatou_model_map(int k, const R& beta, const Complex<R>& z) {
  using std::pow;
  const Complex<R> one(R(1));
  const Complex<R> nu = unit_root(R(-k) * beta);
  if (abs(one - nu) <= eps_coeff<R>()) throw Error("PreconditionFailed", "nu = 1");
  const Complex<R> K{R(k)};
  const Complex<R> c = K / (one - nu);
  const Complex<R> rhs = (exp(z * K) + c * z) / nu;
  auto g = [&](const Complex<R>& f) { return exp(f * K) + c * f - rhs; };

  Complex<R> f = abs(exp(z * K)) >= abs(c * z) ? z + two_pi_i<R>() * beta : z / nu;
  const R tol = pow(R(10), -(real_traits<R>::digits() / 2)) * std::max(R(1), abs(rhs));
  Complex<R> gf = g(f);
  for (int it = 0; it < 200; ++it) {
    if (abs(gf) <= tol) return f;
    Complex<R> step = gf / (exp(f * K) * K + c);
    R damp(1);
    for (int h = 0; h < 40; ++h) {
      Complex<R> fn = f - step * damp;
      Complex<R> gn = g(fn);
      if (abs(gn) < abs(gf)) {
        f = fn;
        gf = gn;
        break;
      }
      damp /= 2;
      if (h == 39) throw Error("NoConvergence", "damped Newton stalled");
    }
  }
  if (abs(gf) <= tol) return f;
  throw Error("NoConvergence", "damped Newton did not converge");
}

}  // namespace dulac
