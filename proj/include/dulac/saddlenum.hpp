#pragma once

// Numerics for prepared saddles  x dy + lambda y (1 + x^n y K(x,y)) dx.
// Everything runs in the logarithmic chart x = e^{-z}, y = e^{-w} on the
// quasi-first integral phi = w + lambda z, which obeys
//     dphi/dz = -lambda e^{-((n - lambda) z + phi)} K(e^{-z}, e^{-w}).
// Double precision throughout.

#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dulac/diffeo.hpp"
#include "dulac/ode.hpp"

namespace dulac {

using cplx = std::complex<double>;

inline constexpr double kSafety = 0.99;
inline const cplx kTwoPiI{0.0, 2 * std::numbers::pi};

struct PreparedSaddle {
  double lambda = 1;
  int n = 1;
  std::map<std::pair<int, int>, cplx> K;  // (i, j) -> coefficient of x^i y^j
  double eps = 0;
  double A = 1, B = 1;
  double sigma = 0.5;  // base point of the floating transversal {y = sigma}

  cplx eval_K(const cplx& x, const cplx& y) const {
    cplx s = 0;
    for (const auto& [ij, c] : K) s += c * std::pow(x, ij.first) * std::pow(y, ij.second);
    return s;
  }

  bool linear() const {
    for (const auto& [ij, c] : K)
      if (std::abs(c) != 0) return false;
    return true;
  }

  /// Largest |sigma| allowed by the cut-transversal estimate.
  double sigma_bound() const { return 1.0 / (std::max(1.0 / (A * (1 + std::numbers::pi)), 1.0 / B) + 2 * eps); }

  /// Checks lambda > 0, n >= floor(lambda), eps B < 1, 0 < sigma < B and
  /// samples |K| <= eps over a polar grid of U_{A,B}.
  void validate() const {
    if (!(lambda > 0)) throw Error("InvalidSaddle", "lambda must be positive");
    if (n < static_cast<int>(std::floor(lambda)) || n < 1) throw Error("InvalidSaddle", "need n >= floor(lambda)");
    if (!(eps * B < 1)) throw Error("InvalidSaddle", "need eps * B < 1");
    if (!(sigma > 0 && sigma < B)) throw Error("InvalidSaddle", "need 0 < sigma < B");
    const int nr = 12, nt = 16;
    for (int a = 0; a <= nr; ++a)
      for (int b = 0; b <= nr; ++b) {
        double rx = static_cast<double>(a) / nr;
        double ry = B * b / nr;
        if (std::pow(rx, lambda) * ry > A) ry = rx > 0 ? A / std::pow(rx, lambda) : ry;
        for (int p = 0; p < nt; ++p)
          for (int q = 0; q < nt; ++q) {
            cplx x = std::polar(rx, 2 * std::numbers::pi * p / nt);
            cplx y = std::polar(ry, 2 * std::numbers::pi * q / nt);
            if (std::abs(eval_K(x, y)) > eps * (1 + 1e-12))
              throw Error("InvalidSaddle", "sampled |K| exceeds eps on U_{A,B}");
          }
      }
  }
};

/// A path in the z-chart made of smooth pieces z(t), t in [t0, t1].
struct PathSpec {
  enum class Kind { Radial, Circular, Exponential, Polyline } kind = Kind::Radial;
  cplx z0 = 0;          // Radial, Circular: start point
  double T = 1;         // Radial, Circular (signed): parameter length; Exponential: end time
  double alpha = 0;     // Exponential
  int C = 1;            // Exponential, +1 or -1
  bool backward = false;  // Exponential: run from xi(T) back to xi(0)
  std::vector<cplx> points;  // Polyline

  static PathSpec radial(const cplx& x0, double T) {
    PathSpec p;
    p.kind = Kind::Radial;
    p.z0 = -std::log(x0);
    p.T = T;
    return p;
  }
  static PathSpec circular(const cplx& z0, double T) {
    PathSpec p;
    p.kind = Kind::Circular;
    p.z0 = z0;
    p.T = T;
    return p;
  }
  static PathSpec exponential(double alpha, int C, double T, bool backward = false) {
    if (C != 1 && C != -1) throw Error("InvalidPath", "exponential path needs C = +1 or -1");
    if (alpha < 0) throw Error("InvalidPath", "exponential path needs alpha >= 0");
    PathSpec p;
    p.kind = Kind::Exponential;
    p.alpha = alpha;
    p.C = C;
    p.T = T;
    p.backward = backward;
    return p;
  }
  static PathSpec polyline(std::vector<cplx> pts) {
    if (pts.size() < 2) throw Error("InvalidPath", "polyline needs two points");
    PathSpec p;
    p.kind = Kind::Polyline;
    p.points = std::move(pts);
    return p;
  }

  /// Exponential path xi_{alpha,C}(t) = t + i C (e^{alpha t} - 1).
  cplx xi(double t) const { return cplx(t, C * (std::exp(alpha * t) - 1)); }
  cplx dxi(double t) const { return cplx(1, C * alpha * std::exp(alpha * t)); }

  struct Piece {
    double t0, t1;
    std::function<cplx(double)> z, dz;
  };

  std::vector<Piece> pieces() const {
    std::vector<Piece> out;
    switch (kind) {
      case Kind::Radial: {
        cplx a = z0;
        out.push_back({0, T, [a](double t) { return a + t; }, [](double) { return cplx(1, 0); }});
        break;
      }
      case Kind::Circular: {
        cplx a = z0;
        out.push_back({0, T, [a](double t) { return a + cplx(0, t); }, [](double) { return cplx(0, 1); }});
        break;
      }
      case Kind::Exponential: {
        PathSpec self = *this;
        auto z = [self](double t) { return self.xi(t); };
        auto dz = [self](double t) { return self.dxi(t); };
        if (backward)
          out.push_back({T, 0, z, dz});
        else
          out.push_back({0, T, z, dz});
        break;
      }
      case Kind::Polyline:
        for (std::size_t i = 0; i + 1 < points.size(); ++i) {
          cplx a = points[i], d = points[i + 1] - points[i];
          out.push_back({0, 1, [a, d](double t) { return a + d * t; }, [d](double) { return d; }});
        }
        break;
    }
    return out;
  }
};

struct LiftOptions {
  ode::Options ode;
  bool stop_on_prediction = true;
  bool record_samples = true;
};

struct LiftResult {
  std::vector<std::pair<cplx, cplx>> samples;  // (z, phi) at accepted steps
  double length = 0;
  cplx z_end, phi_end;
  bool exited = false;
  std::string exit_clause;       // first failing clause (reactive or predicted)
  bool reactive_exit = false;    // U_{A,B} inequality failed
  bool predicted_exit = false;   // length estimate predicted failure
  bool disagreement = false;     // prediction and reaction differ at the end
  bool estimate_ok = true;       // two-sided estimate held at every sample
  double estimate_slack = 0;     // worst violation (<= 0 when the estimate holds)
  long steps = 0;

  cplx w_end(double lambda) const { return phi_end - lambda * z_end; }
};

namespace detail {

/// Reactive membership in U_{A,B} (with the safety factor) at (z, phi).
inline std::optional<std::string> outside(const PreparedSaddle& s, const cplx& z, const cplx& phi) {
  const double rez = z.real();
  const double rew = (phi - s.lambda * z).real();
  if (rez < std::log(kSafety)) return std::string("|x| <= 1");
  if (rew < -std::log(s.B / kSafety)) return std::string("|y| <= B");
  if (phi.real() < -std::log(s.A / kSafety)) return std::string("|x^lambda y| <= A");
  return std::nullopt;
}

/// Length-based prediction: e^{Re phi0} - lambda eps L >= max(1/A, e^{lambda Re z}/B).
inline std::optional<std::string> predicted(const PreparedSaddle& s, double ephi0, double L, const cplx& z) {
  const double lower = ephi0 - s.lambda * s.eps * L;
  if (lower < kSafety / s.A) return std::string("length estimate: |x^lambda y| <= A");
  if (lower < kSafety * std::exp(s.lambda * z.real()) / s.B) return std::string("length estimate: |y| <= B");
  return std::nullopt;
}

}  // namespace detail

/// Lifts the path through (z(0), w0) by integrating phi along it.  The state
/// carries phi and the accumulated length; U_{A,B} is checked at each accepted
/// step, together with the length prediction and the two-sided estimate
///   e^{Re phi0} - lambda eps L <= e^{Re phi} <= e^{Re phi0} + lambda eps L.
inline LiftResult lift_path(const PreparedSaddle& s, const PathSpec& path, const cplx& w0, const LiftOptions& opt = {}) {
  if (path.kind == PathSpec::Kind::Exponential && path.alpha >= s.lambda)
    throw Error("InvalidPath", "exponential path needs alpha < lambda");
  LiftResult r;
  auto pcs = path.pieces();
  cplx z = pcs.front().z(pcs.front().t0);
  cplx phi = w0 + s.lambda * z;
  const cplx phi0 = phi;
  const double ephi0 = std::exp(phi0.real());
  const double margin = 10 * opt.ode.rtol * std::max(1.0, ephi0);
  if (opt.record_samples) r.samples.emplace_back(z, phi);
  if (auto c = detail::outside(s, z, phi)) {
    r.exited = r.reactive_exit = true;
    r.exit_clause = *c;
    r.z_end = z;
    r.phi_end = phi;
    return r;
  }

  const bool lin = s.linear();
  const double nl = s.n - s.lambda;
  double L = 0;
  for (const auto& pc : pcs) {
    ode::State<2> y{phi, cplx(L, 0)};
    const double dir = pc.t1 >= pc.t0 ? 1.0 : -1.0;
    auto rhs = [&](double t, const ode::State<2>& u) {
      const cplx zt = pc.z(t), dz = pc.dz(t);
      cplx dphi = 0;
      if (!lin) {
        const cplx x = std::exp(-zt);
        const cplx yy = std::exp(-(u[0] - s.lambda * zt));
        dphi = -s.lambda * std::exp(-(nl * zt + u[0])) * s.eval_K(x, yy) * dz;
      }
      return ode::State<2>{dphi, cplx(dir * std::abs(dz), 0)};  // length grows either way
    };
    bool stop = false;
    auto obs = [&](double t, const ode::State<2>& u) {
      const cplx zt = pc.z(t);
      const double len = u[1].real();
      ++r.steps;
      if (opt.record_samples) r.samples.emplace_back(zt, u[0]);
      auto reac = detail::outside(s, zt, u[0]);
      if (!reac) {  // the bound on K only holds inside U_{A,B}
        const double e = std::exp(u[0].real());
        const double slack = std::max(ephi0 - s.lambda * s.eps * len - e, e - ephi0 - s.lambda * s.eps * len) - margin;
        r.estimate_slack = std::max(r.estimate_slack, slack);
        if (slack > 0) r.estimate_ok = false;
      }
      auto pred = detail::predicted(s, ephi0, len, zt);
      if (pred && !r.predicted_exit) {
        r.predicted_exit = true;
        if (!r.exited && opt.stop_on_prediction) {
          r.exited = true;
          r.exit_clause = *pred;
        }
      }
      if (reac) {
        r.reactive_exit = true;
        if (!r.exited) {
          r.exited = true;
          r.exit_clause = *reac;
        }
      }
      z = zt;
      phi = u[0];
      L = len;
      if (r.exited) stop = true;
      return !stop;
    };
    ode::integrate<2>(rhs, pc.t0, pc.t1, y, opt.ode, obs);
    if (stop) break;
  }
  r.length = L;
  r.z_end = z;
  r.phi_end = phi;
  r.disagreement = r.predicted_exit != r.reactive_exit;
  return r;
}

// ---------------------------------------------------------------------------
// transversals: Omega = {x = 1} with coordinate w = -log y, and the floating
// Sigma = {y = sigma} with coordinate zeta such that x^lambda y = e^{-lambda zeta}.

inline cplx sigma_to_z(const PreparedSaddle& s, const cplx& zeta) { return zeta + std::log(s.sigma) / s.lambda; }

inline void throw_exit(const LiftResult& r) {
  throw Error("LiftExited", r.exit_clause.empty() ? "lift left U_{A,B}" : r.exit_clause);
}

/// Lifted canonical corner transition at one point: the exponential path
/// through the Sigma point, run back to z = 0.  Starting value phi0 = lambda zeta;
/// the value reached on Omega is d(zeta).  phi is tracked continuously, so the
/// result is already on the branch d(zeta) = lambda zeta + o(1).
inline cplx corner_value(const PreparedSaddle& s, const cplx& zeta, const LiftOptions& opt = {}) {
  const cplx zx = sigma_to_z(s, zeta);
  if (zx.real() <= 0) throw Error("PreconditionFailed", "corner sample must satisfy Re z > 0");
  const int C = zx.imag() >= 0 ? 1 : -1;
  const double alpha = std::log1p(std::abs(zx.imag())) / zx.real();
  if (alpha >= s.lambda) throw Error("PreconditionFailed", "sample outside the exponential-path sector");
  LiftOptions o = opt;
  o.record_samples = false;
  LiftResult r = lift_path(s, PathSpec::exponential(alpha, C, zx.real(), true), -std::log(cplx(s.sigma, 0)), o);
  if (r.exited) throw_exit(r);
  return r.phi_end;
}

inline std::vector<std::pair<cplx, cplx>> corner_map_numeric(const PreparedSaddle& s, const std::vector<cplx>& zetas,
                                                             const LiftOptions& opt = {}) {
  std::vector<std::pair<cplx, cplx>> out;
  for (const auto& z : zetas) out.emplace_back(z, corner_value(s, z, opt));
  return out;
}

enum class Transversal { Sigma, Omega };

/// Holonomy of one separatrix on its transversal, |laps| turns of the positively
/// oriented circle (negative laps: reversed orientation), in the transversal's
/// log coordinate.  The continuous lift is shifted by -2 pi i laps so that the
/// linear saddle gives w + 2 pi i (lambda - 1) on Omega and
/// zeta + 2 pi i (1/lambda - 1) on Sigma per lap.
inline cplx holonomy_numeric(const PreparedSaddle& s, Transversal which, const cplx& start, int laps = 1,
                             const LiftOptions& opt = {}) {
  if (laps == 0) return start;
  const double T = 2 * std::numbers::pi * std::abs(laps);
  const double dir = laps > 0 ? 1.0 : -1.0;
  if (which == Transversal::Omega) {
    // x = e^{i dir t}: z = -i dir t
    LiftOptions o = opt;
    o.record_samples = false;
    LiftResult r = lift_path(s, PathSpec::circular(0, -dir * T), start, o);
    if (r.exited) throw_exit(r);
    return r.w_end(s.lambda) - kTwoPiI * static_cast<double>(laps);
  }
  // Sigma: y = sigma e^{i dir t}, w = w0 - i dir t, z solves dz/dw = -1/(lambda (1 + x^n y K))
  const cplx w0 = -std::log(cplx(s.sigma, 0));
  ode::State<1> u{sigma_to_z(s, start)};
  const bool lin = s.linear();
  auto rhs = [&](double t, const ode::State<1>& v) {
    const cplx w = w0 - cplx(0, dir * t);
    cplx q = 1;
    if (!lin) {
      const cplx x = std::exp(-v[0]);
      q += std::exp(-(static_cast<double>(s.n) * v[0] + w)) * s.eval_K(x, std::exp(-w));
    }
    return ode::State<1>{cplx(0, dir) / (s.lambda * q)};
  };
  std::optional<std::string> bad;
  auto obs = [&](double t, const ode::State<1>& v) {
    const cplx w = w0 - cplx(0, dir * t);
    bad = detail::outside(s, v[0], w + s.lambda * v[0]);
    return !bad;
  };
  ode::integrate<1>(rhs, 0.0, T, u, opt.ode, obs);
  if (bad) throw Error("LiftExited", *bad);
  return u[0] - std::log(s.sigma) / s.lambda - kTwoPiI * static_cast<double>(laps);
}

struct DeterminationSample {
  cplx zeta;
  cplx via_omega;  // h_Omega^{-n}(d0(zeta))
  cplx via_sigma;  // d0(h_Sigma^{n}(zeta))
  double residual;
};

/// n-th determination computed both ways: D_n = hol_Omega^{-n} D_0 = D_0 hol_Sigma^n.
inline std::vector<DeterminationSample> determination_shift(const PreparedSaddle& s, int n,
                                                            const std::vector<cplx>& zetas,
                                                            const LiftOptions& opt = {}) {
  std::vector<DeterminationSample> out;
  for (const auto& z : zetas) {
    cplx a = holonomy_numeric(s, Transversal::Omega, corner_value(s, z, opt), -n, opt);
    cplx b = corner_value(s, holonomy_numeric(s, Transversal::Sigma, z, n, opt), opt);
    out.push_back({z, a, b, std::abs(a - b)});
  }
  return out;
}

/// Monodromy of the corner map: d(zeta + 2 pi i) against one positive Omega
/// lap applied to d(zeta) (continuous lift, no deck normalization).
inline double monodromy_residual(const PreparedSaddle& s, const cplx& zeta, const LiftOptions& opt = {}) {
  cplx lhs = corner_value(s, zeta + kTwoPiI, opt);
  cplx rhs = holonomy_numeric(s, Transversal::Omega, corner_value(s, zeta, opt), 1, opt) + kTwoPiI;
  return std::abs(lhs - rhs);
}

/// P = R o D on Sigma points given in the x-chart (principal log).
template <class Rg>
std::vector<std::pair<cplx, cplx>> poincare_numeric(const PreparedSaddle& s, const DiffeoGerm<Rg>& R,
                                                    const std::vector<cplx>& xs, double radius = 0.5,
                                                    const LiftOptions& opt = {}) {
  std::vector<std::pair<cplx, cplx>> out;
  for (const auto& x : xs) {
    cplx y = std::exp(-corner_value(s, -std::log(x), opt));
    if (std::abs(y) > radius) throw Error("RadiusExceeded", "corner output outside the reliability radius of R");
    cplx p = 0;
    for (std::size_t j = R.c.size(); j-- > 0;) p = p * y + to_std(R.c[j]);
    out.emplace_back(x, p);
  }
  return out;
}

}  // namespace dulac
