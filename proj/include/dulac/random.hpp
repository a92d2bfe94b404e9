#pragma once

// Seeded generators for the randomized property suites.

#include <cmath>
#include <cstdint>
#include <random>

#include "dulac/derivations.hpp"
#include "dulac/diffeo.hpp"
#include "dulac/saddlenum.hpp"

namespace dulac {

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo = -1, double hi = 1) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  template <class R>
  Complex<R> complex(double scale = 1) {
    return {R(scale * uniform()), R(scale * uniform())};
  }
  template <class R>
  Poly<R> poly(int max_degree, double scale = 1) {
    Poly<R> p(static_cast<std::size_t>(integer(0, max_degree) + 1));
    for (auto& c : p) c = complex<R>(scale);
    return p;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

struct SeriesShape {
  double validity = 5;
  double key_step = 0.5;     // keys on the grid key_step * {1, 2, ...}
  double key_density = 0.6;  // chance that a grid key carries a term
  int max_degree = 1;
  double scale = 1;
  double a_min = 1, a_max = 1;  // multiplier range
  double b_scale = 1;
};

template <class R>
DulacSeries<R> random_series(Sampler& s, const SeriesShape& sh = {}) {
  DulacSeries<R> f = DulacSeries<R>::identity(R(sh.validity));
  f.a = R(sh.a_min == sh.a_max ? sh.a_min : s.uniform(sh.a_min, sh.a_max));
  f.b = s.complex<R>(sh.b_scale);
  const int n = static_cast<int>(std::floor(sh.validity / sh.key_step + 1e-9));
  for (int i = 1; i <= n; ++i)
    if (s.coin(sh.key_density)) f.tail.add(R(sh.key_step * i), s.poly<R>(sh.max_degree, sh.scale));
  f.normalize();
  return f;
}

/// a = 1, integer keys, constant coefficients.
template <class R>
DulacSeries<R> random_unramified(Sampler& s, double validity = 5, double scale = 1) {
  SeriesShape sh;
  sh.validity = validity;
  sh.key_step = 1;
  sh.max_degree = 0;
  sh.scale = scale;
  return random_series<R>(s, sh);
}

/// exp of a derivation whose lvar is a random unramified derivation of order k.
template <class R>
DulacSeries<R> random_mildly_ramified(Sampler& s, long k, double validity, double scale = 1) {
  NilpotentDerivation<R> Z;
  Z.validity = R(validity);
  for (long j = k; j <= static_cast<long>(validity); ++j) Z.terms.add(R(j), Poly<R>{s.complex<R>(scale)});
  Z.terms.slot(R(k))[0] += Complex<R>(R(1));  // keep the leading key
  return exp_derivation(lvar_inverse(Z));
}

template <class R>
NilpotentDerivation<R> random_derivation(Sampler& s, const SeriesShape& sh = {}) {
  NilpotentDerivation<R> X;
  X.validity = R(sh.validity);
  const int n = static_cast<int>(std::floor(sh.validity / sh.key_step + 1e-9));
  for (int i = 1; i <= n; ++i)
    if (s.coin(sh.key_density)) X.terms.add(R(sh.key_step * i), s.poly<R>(sh.max_degree, sh.scale));
  X.normalize();
  return X;
}

/// Germ c x + ... with |c| = 1 optional.
template <class R>
DiffeoGerm<R> random_germ(Sampler& s, int order, bool tangent = false, double scale = 1) {
  DiffeoGerm<R> g = DiffeoGerm<R>::identity(order);
  if (!tangent) g.c[1] = Complex<R>(R(1)) + s.complex<R>(0.3);
  for (int j = 2; j <= order; ++j) g.c[static_cast<std::size_t>(j)] = s.complex<R>(scale);
  return g;
}

/// Prepared saddle with random K whose crude bound
///   sum |c_ij| (1/0.99)^i (B/0.99)^j
/// is scaled to eps, so that sup |K| <= eps on U_{A,B}.
inline PreparedSaddle random_saddle(Sampler& s, double lambda, double eps, double A = 1, double B = 1, int terms = 4) {
  PreparedSaddle p;
  p.lambda = lambda;
  p.n = std::max(1, static_cast<int>(std::ceil(lambda)));
  p.A = A;
  p.B = B;
  p.eps = eps;
  double bound = 0;
  for (int t = 0; t < terms; ++t) {
    int i = s.integer(0, 2), j = s.integer(0, 2);
    cplx c(s.uniform(), s.uniform());
    p.K[{i, j}] += c;
  }
  for (const auto& [ij, c] : p.K) bound += std::abs(c) * std::pow(1 / kSafety, ij.first) * std::pow(B / kSafety, ij.second);
  for (auto& [ij, c] : p.K) c *= eps / bound;
  p.sigma = std::min(0.5 * B, p.sigma_bound() * 0.9);
  return p;
}

}  // namespace dulac
