#pragma once

#include <catch2/catch_amalgamated.hpp>

#include "dulac/dulac.hpp"

namespace t {

using M = dulac::mp50;
using CM = dulac::Complex<M>;
using S = dulac::DulacSeries<M>;
using D = dulac::NilpotentDerivation<M>;
using G = dulac::DiffeoGerm<M>;

inline M tol() { return dulac::check_tol<M>(); }
inline CM c(double re, double im = 0) { return CM(M(re), M(im)); }
inline M pi() { return dulac::pi<M>(); }
inline CM two_pi_i() { return dulac::two_pi_i<M>(); }

inline S series(const std::string& text, double validity = 5) { return dulac::parse_series<M>(text, M(validity)); }
inline D derivation(const std::string& text, double validity = 5) { return dulac::parse_derivation<M>(text, M(validity)); }

/// Coefficient of z^j at e^{-lambda z}, zero when absent.
template <class T>
CM coef(const T& tail, const M& lambda, std::size_t j = 0) {
  const dulac::Poly<M>* p = tail.at(lambda);
  return p && j < p->size() ? (*p)[j] : CM();
}
template <class T>
CM coef(const T& tail, double lambda, std::size_t j = 0) {
  return coef(tail, M(lambda), j);
}

inline bool close(const CM& u, const CM& v, const M& eps = tol()) { return dulac::near(u, v, eps); }
inline bool same(const S& f, const S& g, const M& eps = tol()) { return dulac::distance(f, g) <= eps; }
inline bool same(const D& f, const D& g, const M& eps = tol()) { return dulac::distance(f, g) <= eps; }
inline bool same(const G& f, const G& g, const M& eps = tol()) { return dulac::distance(f, g) <= eps; }

inline std::string kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const dulac::Error& e) {
    return e.kind();
  }
  return "";
}

}  // namespace t
