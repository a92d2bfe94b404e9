#pragma once

// Loop germs: formal Poincare maps and determinations, the Bernoulli
// functional equation R' F(R) = alpha F checked through logarithmic
// derivatives, numeric Bernoulli holonomies, and the integrability classifier.

#include <cmath>
#include <complex>
#include <map>
#include <numeric>
#include <numbers>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "dulac/diffeo.hpp"
#include "dulac/ode.hpp"

namespace dulac {

using cplx = std::complex<double>;

/// P = lift(R) o d in the log chart.
template <class R>
DulacSeries<R> poincare_formal(const DulacSeries<R>& d, const DiffeoGerm<R>& Rg, long branch = 0) {
  DulacSeries<R> r = lift_pi(Rg, branch);
  r.validity = std::min(r.validity, d.validity);
  r.normalize();
  DulacSeries<R> out = compose(r, d);
  out.validity = std::min(r.validity, d.validity);
  out.normalize();
  return out;
}

/// d_n = hOmega^{-n} o d0 = d0 o hSigma^n, both orders computed and compared.
template <class R>
DulacSeries<R> determination_formal(const DulacSeries<R>& d0, const DulacSeries<R>& hSigma,
                                    const DulacSeries<R>& hOmega, long n, const R& tol = check_tol<R>()) {
  if (!is_unramified(hSigma) || !is_unramified(hOmega))
    throw Error("NotUnramified", "holonomies must be unramified");
  DulacSeries<R> a = compose(power(hOmega, -n), d0);
  DulacSeries<R> b = compose(d0, power(hSigma, n));
  const R v = std::min({d0.validity, hSigma.validity, hOmega.validity});
  a.validity = b.validity = v;
  a.normalize();
  b.normalize();
  const R res = distance(a, b);
  if (res > tol) throw Error("DeterminationMismatch", "residual " + format_real(res, 6));
  return a;
}

/// (hSigma, hOmega) = (var(d0^{-1}), var(d0)) for a canonical determination d0.
template <class R>
std::pair<DulacSeries<R>, DulacSeries<R>> corner_holonomies(const DulacSeries<R>& d0) {
  return {variation(invert(d0)), variation(d0)};
}

// ---------------------------------------------------------------------------
// Laurent objects  c_log log y + sum_m c_m y^m

template <class R>
struct LogLaurent {
  Complex<R> log_coef;
  std::map<int, Complex<R>> c;

  Complex<R> at(int m) const {
    auto it = c.find(m);
    return it == c.end() ? Complex<R>() : it->second;
  }
  void add(int m, const Complex<R>& v) { c[m] += v; }
  void add_series(const Series<R>& s, int shift, const Complex<R>& w, int maxdeg) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      int m = static_cast<int>(i) + shift;
      if (m <= maxdeg) c[m] += s[i] * w;
    }
  }
};

namespace detail {

/// A(G(y)) for a power series A and G(0) = 0.
template <class R>
Series<R> compose_series(const Series<R>& A, const Series<R>& G, int N) {
  Series<R> r(static_cast<std::size_t>(N + 1));
  for (std::size_t j = A.size(); j-- > 0;) {
    r = ser::mul(r, G, N);
    r[0] += A[j];
  }
  return r;
}

/// log S for S(0) != 0 (principal branch on the constant).
template <class R>
Series<R> log_unit(const Series<R>& S, int N) {
  const Complex<R> s0 = S.at(0);
  Series<R> u(static_cast<std::size_t>(N + 1));
  for (int i = 1; i <= N && i < static_cast<int>(S.size()); ++i) u[static_cast<std::size_t>(i)] = S[static_cast<std::size_t>(i)] / s0;
  Series<R> L = ser::log1p0(u, N);
  L[0] = log(s0);
  return L;
}

/// R(y)/y and R'(y), both known through y^{N-1}.
template <class R>
std::pair<Series<R>, Series<R>> quotient_and_derivative(const DiffeoGerm<R>& Rg) {
  const int N = Rg.order;
  Series<R> q(static_cast<std::size_t>(N)), d(static_cast<std::size_t>(N));
  for (int j = 1; j <= N; ++j) {
    q[static_cast<std::size_t>(j - 1)] = Rg.coef(j);
    d[static_cast<std::size_t>(j - 1)] = Rg.coef(j) * R(j);
  }
  return {q, d};
}

/// R^{-j} - y^{-j} as y^{-j} times a series known through y^{N-1}.
template <class R>
Series<R> inverse_power_diff(const Series<R>& logq, int j, int N) {
  Series<R> e = logq;
  e[0] = Complex<R>();
  for (auto& c : e) c *= Complex<R>(R(-j));
  Series<R> s = ser::exp0(e, N);
  const Complex<R> lead = exp(logq[0] * Complex<R>(R(-j)));
  for (auto& c : s) c *= lead;
  s[0] -= Complex<R>(R(1));
  return s;
}

}  // namespace detail

template <class R>
struct BernoulliCheck {
  Complex<R> alpha;
  R residual;      // largest non-constant Laurent coefficient of log(R' F(R) / F)
  int worst_degree;
  int degree;      // highest degree compared
};

/// R' F(R) = alpha F with F = A y^{-a} prod exp(b_j y^{-j}), b[j-1] = b_j.
/// Compared through log(R' F(R)/F), a finite Laurent object at truncation.
template <class R>
BernoulliCheck<R> bernoulli_functional_check(const DiffeoGerm<R>& Rg, const Complex<R>& a,
                                             const std::vector<Complex<R>>& b, const Series<R>& A) {
  if (A.empty() || abs(A[0]) <= eps_coeff<R>()) throw Error("PreconditionFailed", "A(0) must be nonzero");
  const int N = Rg.order;
  int jmax = 0;
  for (std::size_t j = 0; j < b.size(); ++j)
    if (abs(b[j]) > 0) jmax = static_cast<int>(j) + 1;
  const int D = N - 1 - jmax;
  if (D < 1) throw Error("PreconditionFailed", "truncation too low for the requested exponential factors");

  auto [q, dR] = detail::quotient_and_derivative(Rg);
  Series<R> logq = detail::log_unit(q, N - 1);
  LogLaurent<R> G;
  G.add_series(detail::log_unit(dR, N - 1), 0, Complex<R>(R(1)), D);
  Series<R> Rs = Rg.c;
  Rs.resize(static_cast<std::size_t>(N + 1));
  G.add_series(detail::log_unit(detail::compose_series(A, Rs, N), N), 0, Complex<R>(R(1)), D);
  G.add_series(detail::log_unit(A, N), 0, Complex<R>(R(-1)), D);
  G.add_series(logq, 0, -a, D);
  for (int j = 1; j <= jmax; ++j) {
    const Complex<R>& bj = b[static_cast<std::size_t>(j - 1)];
    if (abs(bj) == 0) continue;
    G.add_series(detail::inverse_power_diff(logq, j, N - 1), -j, bj, D);
  }
  BernoulliCheck<R> out{exp(G.at(0)), R(0), 0, D};
  for (const auto& [m, v] : G.c) {
    if (m == 0) continue;
    if (abs(v) > out.residual) {
      out.residual = abs(v);
      out.worst_degree = m;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// numeric holonomy of  y^{k+1} dx = x (1 + a y^k + x^d y^sigma Q(y)) dy  on {x = 1}

template <class R>
struct BernoulliFit {
  DiffeoGerm<R> germ;
  double fit_residual;  // fitted germ against off-grid integrations
  double radius;
};

inline cplx bernoulli_return(int k, cplx a, int d, int sigma, const std::vector<cplx>& Q, cplx y0,
                             const ode::Options& opt) {
  const cplx twopii{0, 2 * std::numbers::pi};
  ode::State<1> y{y0};
  auto rhs = [&](double t, const ode::State<1>& u) {
    const cplx x = std::exp(twopii * t);
    cplx q = 0;
    for (std::size_t i = Q.size(); i-- > 0;) q = q * u[0] + Q[i];
    const cplx den = 1.0 + a * std::pow(u[0], k) + std::pow(x, d) * std::pow(u[0], sigma) * q;
    return ode::State<1>{twopii * std::pow(u[0], k + 1) / den};
  };
  bool bad = false;
  ode::integrate<1>(rhs, 0.0, 1.0, y, opt, [&](double, const ode::State<1>& u) {
    bad = !std::isfinite(std::abs(u[0])) || std::abs(u[0]) > 10 * std::abs(y0) + 1;
    return !bad;
  });
  if (bad) throw Error("LiftExited", "holonomy lift left the working disc");
  return y[0];
}

/// Samples the return map on |y0| = radius and fits coefficients by a discrete
/// Fourier transform.
template <class R>
BernoulliFit<R> bernoulli_holonomy_numeric(int k, const Complex<R>& a, int d, int sigma, const std::vector<Complex<R>>& Q,
                                           int degree = 6, double radius = 0.05, int M = 64) {
  if (k < 1) throw Error("PreconditionFailed", "k must be positive");
  if (d < -1 || d == 0) throw Error("PreconditionFailed", "need d in Z_{>=-1} \\ {0}");
  if (sigma < 0) throw Error("PreconditionFailed", "need sigma >= 0");
  const cplx as = to_std(a);
  const cplx s = static_cast<double>(sigma) + as * static_cast<double>(d);
  bool q_zero = true;
  for (const auto& c : Q) q_zero = q_zero && abs(c) == 0;
  if (!q_zero && std::abs(s.imag()) < 1e-14 && s.real() <= 0) throw Error("PreconditionFailed", "sigma + a d must not be real <= 0");
  if (static_cast<int>(Q.size()) > k) throw Error("PreconditionFailed", "deg Q must be at most k - 1");
  const double cond = 1e-13 / std::pow(radius, degree);
  if (cond > 1e-3 || M <= degree) throw Error("FitIllConditioned", "fit degree too high for the sampling radius");

  std::vector<cplx> q;
  for (const auto& c : Q) q.push_back(to_std(c));
  ode::Options opt;
  opt.rtol = 1e-13;
  opt.atol = 1e-16;
  opt.hmax = 0.05;

  std::vector<cplx> vals(static_cast<std::size_t>(M));
  for (int m = 0; m < M; ++m)
    vals[static_cast<std::size_t>(m)] =
        bernoulli_return(k, as, d, sigma, q, std::polar(radius, 2 * std::numbers::pi * m / M), opt);

  BernoulliFit<R> out;
  out.radius = radius;
  out.germ.order = degree;
  out.germ.c.assign(static_cast<std::size_t>(degree + 1), Complex<R>());
  for (int j = 1; j <= degree; ++j) {
    cplx acc = 0;
    for (int m = 0; m < M; ++m) acc += vals[static_cast<std::size_t>(m)] * std::polar(1.0, -2 * std::numbers::pi * m * j / M);
    out.germ.c[static_cast<std::size_t>(j)] = from_std<R>(acc / (M * std::pow(radius, j)));
  }
  double worst = 0;
  for (int m = 0; m < 4; ++m) {
    cplx y0 = std::polar(0.5 * radius, 2 * std::numbers::pi * (m + 0.5) / 4);
    cplx got = bernoulli_return(k, as, d, sigma, q, y0, opt);
    worst = std::max(worst, std::abs(got - to_std(out.germ.eval(from_std<R>(y0)))) / std::abs(y0));
  }
  out.fit_residual = worst;
  return out;
}

// ---------------------------------------------------------------------------
// classifier

template <class R>
struct LoopGermSpec {
  enum class Saddle { Linearizable, PoincareDulac } saddle = Saddle::Linearizable;
  R lambda = R(1);           // Linearizable
  int k = 1;                 // PoincareDulac
  Complex<R> mu;             // PoincareDulac
  Series<R> P;               // PoincareDulac: extra term P(u) du of the 1-form (empty: normal form)
  int d = 1;                 // PoincareDulac with P != 0
  DiffeoGerm<R> R_glue;
};

enum class IntegrabilityClass { Linear, Bernoulli, PoincareDulac, NotIntegrable, Inconclusive };

inline const char* to_string(IntegrabilityClass c) {
  switch (c) {
    case IntegrabilityClass::Linear: return "Linear";
    case IntegrabilityClass::Bernoulli: return "Bernoulli";
    case IntegrabilityClass::PoincareDulac: return "PoincareDulac";
    case IntegrabilityClass::NotIntegrable: return "NotIntegrable";
    case IntegrabilityClass::Inconclusive: return "Inconclusive";
  }
  return "?";
}

template <class R>
struct IntegrabilityVerdict {
  IntegrabilityClass cls = IntegrabilityClass::Inconclusive;
  int k_order = 0;
  Complex<R> mu, nu;
  std::map<std::string, double> certificate;
  int degree = 0;          // truncation used
  int undecided_degree = -1;
  bool caveat = false;     // conclusion rests on a truncated residual
  std::string note;
};

namespace detail {

/// p/q with q <= qmax and |x - p/q| <= tol, if any.
template <class R>
std::optional<std::pair<long, long>> rational_approx(const R& x, const R& tol, long qmax = 1000) {
  using std::abs;
  using std::floor;
  long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  R y = x;
  for (int it = 0; it < 64; ++it) {
    R fl = floor(y);
    long a = static_cast<long>(fl);
    long h2 = a * h1 + h0, k2 = a * k1 + k0;
    if (k2 > qmax) break;
    if (abs(x - R(h2) / R(k2)) <= tol) return std::make_pair(h2, k2);
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    R frac = y - fl;
    if (frac == 0) break;
    y = R(1) / frac;
  }
  return std::nullopt;
}

template <class R>
int first_nonlinear(const DiffeoGerm<R>& F, const R& tol) {
  for (int j = 2; j <= F.order; ++j)
    if (abs(F.coef(j)) > tol) return j;
  return 0;
}

/// v = c y^{k+1} / (1 + nu y^k) through order N: fitted (c, nu) and the first
/// deviating degree (0 if none).
template <class R>
std::tuple<Complex<R>, Complex<R>, int, R> fit_chi(const Series<R>& v, int k, int N, const R& tol) {
  auto at = [&](int i) { return i < static_cast<int>(v.size()) ? v[static_cast<std::size_t>(i)] : Complex<R>(); };
  const Complex<R> c = at(k + 1);
  const Complex<R> nu = 2 * k + 1 <= N ? -(at(2 * k + 1) / c) : Complex<R>();
  // (1 + nu y^k) v - c y^{k+1}
  int bad = 0;
  R worst(0);
  for (int j = 0; j <= N; ++j) {
    Complex<R> r = at(j) + (j - k >= 0 ? nu * at(j - k) : Complex<R>());
    if (j == k + 1) r -= c;
    if (abs(r) > worst) worst = abs(r);
    if (abs(r) > tol * std::max(R(1), abs(c)) && bad == 0) bad = j;
  }
  return {c, nu, bad, worst};
}

}  // namespace detail

template <class R>
IntegrabilityVerdict<R> classify_integrability(const LoopGermSpec<R>& spec, const R& tol = check_tol<R>()) {
  using C = Complex<R>;
  IntegrabilityVerdict<R> v;
  const DiffeoGerm<R>& Rg = spec.R_glue;
  v.degree = Rg.order;
  const C theta = Rg.coef(1);
  const int nl = detail::first_nonlinear(Rg, tol);

  if (spec.saddle == LoopGermSpec<R>::Saddle::Linearizable) {
    const bool one = abs(spec.lambda - R(1)) <= tol;
    if (!one) {
      // lambda irrational or p/q != 1: only linear gluings
      auto pq = detail::rational_approx(spec.lambda, tol);
      v.note = pq ? "rational eigenratio " + std::to_string(pq->first) + "/" + std::to_string(pq->second)
                  : "irrational eigenratio";
      if (nl == 0) {
        v.cls = IntegrabilityClass::Linear;
      } else {
        v.cls = IntegrabilityClass::NotIntegrable;
        v.certificate["first_nonlinear_degree"] = nl;
        v.certificate["first_nonlinear_coef"] = static_cast<double>(abs(Rg.coef(nl)));
      }
      return v;
    }
    // 1:1 linear saddle: R up to conjugacy
    if (nl == 0) {
      v.cls = IntegrabilityClass::Linear;
      v.note = "linear gluing";
      return v;
    }
    const R mod = abs(theta);
    v.certificate["multiplier_modulus"] = static_cast<double>(mod);
    if (abs(mod - R(1)) > tol) {
      v.cls = IntegrabilityClass::Linear;
      v.note = "hyperbolic multiplier: linearizable";
      return v;
    }
    const R beta = arg(theta) / (2 * pi<R>());
    auto pq = detail::rational_approx(beta, tol);
    if (!pq) {
      v.note = "multiplier not a root of unity: formal linearization only";
      v.undecided_degree = nl;
      return v;
    }
    const long q = pq->second;
    v.certificate["rotation_order"] = static_cast<double>(q);
    DiffeoGerm<R> R0 = power(Rg, q);
    const int k = tangency_order(R0, tol);
    if (k == 0) {
      v.cls = IntegrabilityClass::Linear;
      v.note = "periodic gluing: linearizable";
      return v;
    }
    const Series<R> gen = infinitesimal_generator(R0).v();
    auto [c, nu, bad, worst] = detail::fit_chi(gen, k, R0.order, tol);
    v.certificate["generator_residual"] = static_cast<double>(worst);
    if (bad != 0) {
      v.note = "tangent part is not a Bernoulli flow to the tested degree";
      v.undecided_degree = bad;
      return v;
    }
    // F = 1/v = (1 + nu y^k) / (c y^{k+1})
    Series<R> A(static_cast<std::size_t>(k + 1));
    A[0] = C(R(1)) / c;
    A[static_cast<std::size_t>(k)] = nu / c;
    BernoulliCheck<R> bc = bernoulli_functional_check(R0, C(R(k + 1)), {}, A);
    v.certificate["functional_residual"] = static_cast<double>(bc.residual);
    v.certificate["alpha_re"] = static_cast<double>(bc.alpha.re);
    v.certificate["alpha_im"] = static_cast<double>(bc.alpha.im);
    if (bc.residual > tol) {
      v.note = "functional equation residual above tolerance";
      v.undecided_degree = bc.worst_degree;
      return v;
    }
    v.cls = IntegrabilityClass::Bernoulli;
    v.k_order = k;
    v.nu = nu;
    return v;
  }

  // Poincare-Dulac saddle (1:1 resonant)
  v.mu = spec.mu;
  v.k_order = spec.k;
  const int k = spec.k;
  bool P_zero = true;
  for (const auto& c : spec.P)
    if (abs(c) > tol) P_zero = false;

  if (!P_zero) {
    if (abs(spec.mu - C(R(1) / 2)) > tol) {
      v.note = "extra term with mu != 1/2 is outside the integrable list";
      return v;
    }
    // log of LHS/RHS of the final functional equation; a pure log y term of
    // weight d survives whatever R is
    const int N = Rg.order;
    auto [q, dR] = detail::quotient_and_derivative(Rg);
    const int D = N - 1 - k;
    if (D < 1) throw Error("PreconditionFailed", "truncation too low");
    Series<R> logq = detail::log_unit(q, N - 1);
    Series<R> Rs = Rg.c;
    Rs.resize(static_cast<std::size_t>(N + 1));
    // N+(t) = 1 + t^k/2 + t^{k+1} P(t), N-(t) = 1 - t^k/2 + t^{d+k+1} P(t)
    Series<R> Np(static_cast<std::size_t>(N + 1)), Nm(static_cast<std::size_t>(N + 1));
    Np[0] = Nm[0] = C(R(1));
    if (k <= N) {
      Np[static_cast<std::size_t>(k)] += C(R(1) / 2);
      Nm[static_cast<std::size_t>(k)] -= C(R(1) / 2);
    }
    for (std::size_t i = 0; i < spec.P.size(); ++i) {
      const int ip = static_cast<int>(i) + k + 1, im = static_cast<int>(i) + spec.d + k + 1;
      if (ip <= N) Np[static_cast<std::size_t>(ip)] += spec.P[i];
      if (im >= 0 && im <= N) Nm[static_cast<std::size_t>(im)] += spec.P[i];
    }
    LogLaurent<R> G;
    G.add_series(detail::log_unit(dR, N - 1), 0, C(R(1)), D);
    G.add_series(detail::log_unit(detail::compose_series(Np, Rs, N), N), 0, C(R(1)), D);
    G.add_series(detail::log_unit(Nm, N), 0, C(R(-1)), D);
    G.add_series(logq, 0, -C(R(1 + k) - R(spec.d) / 2), D);
    G.log_coef = C(R(spec.d));
    G.add_series(detail::inverse_power_diff(logq, k, N - 1), -k, -C(R(spec.d) / R(k)), D);
    R lres(0);
    for (const auto& [m, c] : G.c)
      if (m != 0) lres = std::max(lres, abs(c));
    v.certificate["log_coefficient"] = static_cast<double>(abs(G.log_coef));
    v.certificate["laurent_residual"] = static_cast<double>(lres);
    v.caveat = true;
    v.note = "no germ solves the regluing equation at this truncation; convergence argument not reproduced";
    v.cls = abs(G.log_coef) > tol ? IntegrabilityClass::NotIntegrable : IntegrabilityClass::Inconclusive;
    return v;
  }

  if (!near(theta, C(R(1)), tol) || nl == 0) {
    v.note = nl == 0 ? "linear gluing on a nonlinear normal form" : "gluing not tangent to the identity";
    v.undecided_degree = nl;
    return v;
  }
  const int kR = tangency_order(Rg, tol);
  if (kR != k) {
    v.note = "gluing tangency differs from the saddle order";
    v.undecided_degree = kR + 1;
    return v;
  }
  const Series<R> gen = infinitesimal_generator(Rg).v();
  auto [c, nu, bad, worst] = detail::fit_chi(gen, k, Rg.order, tol);
  v.certificate["generator_residual"] = static_cast<double>(worst);
  v.certificate["chi_scale_re"] = static_cast<double>(c.re);
  v.certificate["chi_scale_im"] = static_cast<double>(c.im);
  if (bad != 0) {
    v.note = "generator is not proportional to y^{k+1}/(1 + nu y^k) d/dy";
    v.undecided_degree = bad;
    return v;
  }
  v.cls = IntegrabilityClass::PoincareDulac;
  v.nu = nu;
  return v;
}

/// G = e^{2 pi i q/p} x and H = e^{2 pi i p/q} x (1 + eps x^k)^{-1/k} to degree 4k + 2:
/// G^p = id, H^q = id, and [G, H] = id exactly when eps = 0.
template <class R>
bool solvable_pq_check(long p, long q, int k, int eps) {
  if (p < 1 || q < 1 || std::gcd(p, q) != 1) throw Error("BadParameters", "need coprime positive p, q");
  if (k < 1 || k % p == 0 || k % q == 0) throw Error("BadParameters", "k must avoid pZ and qZ");
  if (eps != 0 && eps != 1) throw Error("BadParameters", "epsilon must be 0 or 1");
  const int N = 4 * k + 2;
  const R tol = check_tol<R>();
  DiffeoGerm<R> G = DiffeoGerm<R>::linear(unit_root(R(q) / R(p)), N);
  Series<R> u(static_cast<std::size_t>(N + 1));
  u[static_cast<std::size_t>(k)] = Complex<R>(R(eps));
  Series<R> L = ser::log1p0(u, N);
  for (auto& c : L) c *= Complex<R>(R(-1) / R(k));
  Series<R> E = ser::exp0(L, N);
  DiffeoGerm<R> H = DiffeoGerm<R>::identity(N);
  const Complex<R> beta = unit_root(R(p) / R(q));
  for (int j = 1; j <= N; ++j) H.c[static_cast<std::size_t>(j)] = beta * E[static_cast<std::size_t>(j - 1)];
  const DiffeoGerm<R> id = DiffeoGerm<R>::identity(N);
  const bool gp = distance(power(G, p), id) <= tol;
  const bool hq = distance(power(H, q), id) <= tol;
  const DiffeoGerm<R> comm = compose(invert(H), compose(invert(G), compose(H, G)));
  const bool abelian = distance(comm, id) <= tol;
  return gp && hq && (abelian == (eps == 0));
}

}  // namespace dulac
