#pragma once

// Conjugation of attracting/repelling Dulac series to their linear models,
// centralizers of the models, and the algebraic steps of the rigidity
// arguments (decomposition of a conjugacy through a centralizer element,
// conjugation of the variation group).

#include <optional>

#include "dulac/transseries.hpp"

namespace dulac {

template <class R>
struct ModelGerm {
  enum class Kind { Scaling, Translation } kind;
  Complex<R> param;  // a (real) or b

  DulacSeries<R> series(const R& validity) const {
    return kind == Kind::Scaling ? DulacSeries<R>::affine(param.re, {}, validity)
                                 : DulacSeries<R>::affine(R(1), param, validity);
  }
};

template <class R>
struct ModelConjugation {
  DulacSeries<R> phi;  // phi^{-1} o f o phi = model
  ModelGerm<R> model;
};

namespace detail {

/// Q with w Q(z + b) - Q(z) = S, w = e^{-kappa b}; triangular from the top degree.
template <class R>
Poly<R> solve_shift(const Poly<R>& S, const Complex<R>& w, const Complex<R>& b) {
  if (abs(w - Complex<R>(R(1))) <= eps_coeff<R>())
    throw Error("ResonanceResidual", "e^{-kappa b} = 1 in the hyperbolic homological equation");
  const int d = degree(S);
  Poly<R> q(static_cast<std::size_t>(std::max(d + 1, 0)));
  const Complex<R> inv = Complex<R>(R(1)) / (w - Complex<R>(R(1)));
  for (int j = d; j >= 0; --j) {
    Complex<R> acc = S[static_cast<std::size_t>(j)];
    R c(1);
    for (int m = j + 1; m <= d; ++m) {
      c = c * m / (m - j);  // C(m, j)
      acc -= w * q[static_cast<std::size_t>(m)] * pow(b, m - j) * c;
    }
    q[static_cast<std::size_t>(j)] = acc * inv;
  }
  strip(q, eps_coeff<R>());
  return q;
}

/// a > 1: f o phi = phi o (a z) with phi = z + d + Q, d = b/(1 - a) and
/// Q = (Q(a z) - T_f o phi)/a iterated until stationary.
template <class R>
DulacSeries<R> super_conjugator(const DulacSeries<R>& f) {
  DulacSeries<R> phi = DulacSeries<R>::affine(R(1), f.b / Complex<R>(R(1) - f.a), f.validity);
  if (f.tail.empty()) return phi;
  const R lmin = f.tail.terms.front().lambda;
  const long sweeps = static_cast<long>(f.validity / lmin) + 3;
  const Complex<R> inv_a(R(1) / f.a);
  for (long i = 0; i < sweeps; ++i) {
    PolExp<R> next = scale_arg(phi.tail, f.a);
    next.truncate(f.validity);
    next -= substitute(f.tail, phi, f.validity);
    next *= inv_a;
    next.normalize();
    R change = max_abs_diff(next, phi.tail, f.validity);
    phi.tail = std::move(next);
    if (change <= eps_coeff<R>()) break;
  }
  phi.normalize();
  return phi;
}

/// a = 1, Re b != 0: f o phi = phi o (z + b), phi = z + Q,
///   e^{-kappa b} Q_kappa(z + b) - Q_kappa(z) = [T_f o phi]_kappa.
template <class R>
DulacSeries<R> hyperbolic_conjugator(const DulacSeries<R>& f) {
  DulacSeries<R> phi = DulacSeries<R>::identity(f.validity);
  if (f.tail.empty()) return phi;
  const R lmin = f.tail.terms.front().lambda;
  const long sweeps = static_cast<long>(f.validity / lmin) + 3;
  for (long i = 0; i < sweeps; ++i) {
    PolExp<R> rhs = substitute(f.tail, phi, f.validity);
    rhs.normalize();
    PolExp<R> next;
    for (const auto& t : rhs.terms) {
      Complex<R> w = exp(f.b * Complex<R>(-t.lambda));
      next.add(t.lambda, solve_shift(t.p, w, f.b));
    }
    next.normalize();
    R change = max_abs_diff(next, phi.tail, f.validity);
    phi.tail = std::move(next);
    if (change <= eps_coeff<R>()) break;
  }
  phi.normalize();
  return phi;
}

}  // namespace detail

/// phi and the model (a z or z + b) with phi^{-1} o f o phi = model.
template <class R>
ModelConjugation<R> conjugate_to_model(const DulacSeries<R>& f) {
  const Classification c = classify(f);
  switch (c.type) {
    case DynType::Indifferent:
      throw Error("Indifferent", "model conjugation needs an attracting or repelling germ");
    case DynType::SuperAttracting:
      return {detail::super_conjugator(f), {ModelGerm<R>::Kind::Scaling, Complex<R>(f.a)}};
    case DynType::SuperRepelling: {
      // the inverse is super-attracting with the same conjugator
      DulacSeries<R> g = invert(f);
      g.validity = std::min(g.validity, f.validity);
      g.normalize();
      return {detail::super_conjugator(g), {ModelGerm<R>::Kind::Scaling, Complex<R>(f.a)}};
    }
    default:
      return {detail::hyperbolic_conjugator(f), {ModelGerm<R>::Kind::Translation, f.b}};
  }
}

/// Residual of phi^{-1} o f o phi against the model.
template <class R>
R model_residual(const DulacSeries<R>& f, const ModelConjugation<R>& mc) {
  DulacSeries<R> lhs = compose(f, mc.phi);
  DulacSeries<R> rhs = compose(mc.phi, mc.model.series(f.validity));
  return distance(lhs, rhs);
}

/// g commutes with the model up to validity.  For a genuine model (a != 1,
/// or Re b != 0) a commuting g must be mu z, resp. z + d; a commuting g of
/// another shape raises CentralizerMismatch.
template <class R>
bool centralizer_membership(const DulacSeries<R>& g, const ModelGerm<R>& model, const R& tol = check_tol<R>()) {
  DulacSeries<R> m = model.series(g.validity);
  const bool commutes = distance(compose(g, m), compose(m, g)) <= tol;
  if (!commutes) return false;
  const bool genuine = model.kind == ModelGerm<R>::Kind::Scaling ? !near(model.param.re, R(1), eps_coeff<R>())
                                                                : abs(model.param.re) > eps_coeff<R>();
  if (!genuine) return true;
  const bool tail_free = max_abs(g.tail) <= tol;
  const bool closed = model.kind == ModelGerm<R>::Kind::Scaling ? tail_free && abs(g.b) <= tol
                                                               : tail_free && near(g.a, R(1), tol);
  if (!closed) throw Error("CentralizerMismatch", "commuting element outside the closed-form centralizer");
  return true;
}

template <class R>
struct RigidityDecomposition {
  DulacSeries<R> phi;      // phi^{-1} o f o phi = g, built from the model conjugations
  DulacSeries<R> c;        // psi^{-1} o phi, in the centralizer of g
  DulacSeries<R> c_model;  // c seen in the model chart
  ModelGerm<R> model;      // model of g
  bool centralizer_ok;
  bool psi_unramified;
};

/// Given psi with g = psi^{-1} o f o psi, builds phi = phi_f o s o phi_g^{-1}
/// (s linking the two models, so phi^{-1} o f o phi = g as well) and the centralizer element
/// c = psi^{-1} o phi of g.
template <class R>
RigidityDecomposition<R> rigidity_decompose(const DulacSeries<R>& f, const DulacSeries<R>& psi) {
  const Classification cf = classify(f);
  if (cf.type == DynType::Indifferent) throw Error("PreconditionFailed", "f is indifferent");
  DulacSeries<R> g = compose(invert(psi), compose(f, psi));
  g.validity = std::min(g.validity, f.validity);
  g.normalize();
  if (classify(g).type != cf.type) throw Error("PreconditionFailed", "psi^{-1} f psi changes the dynamical type");
  ModelConjugation<R> mf = conjugate_to_model(f);
  ModelConjugation<R> mg = conjugate_to_model(g);
  // z + b and z + b' are conjugate by r z with r = b / b' > 0; a z is rigid.
  DulacSeries<R> link = DulacSeries<R>::identity(f.validity);
  if (mf.model.kind == ModelGerm<R>::Kind::Translation) {
    Complex<R> r = mf.model.param / mg.model.param;
    if (abs(r.im) > check_tol<R>() * abs(r) || r.re <= 0)
      throw Error("PreconditionFailed", "translation models are not conjugate by a positive scaling");
    link.a = r.re;
  } else if (!near(mf.model.param, mg.model.param, check_tol<R>())) {
    throw Error("PreconditionFailed", "psi does not conjugate f to a germ with the same model");
  }

  RigidityDecomposition<R> r;
  r.model = mg.model;
  r.phi = compose(mf.phi, compose(link, invert(mg.phi)));
  r.c = compose(invert(psi), r.phi);
  r.c_model = compose(invert(mg.phi), compose(r.c, mg.phi));
  const R v = std::min({f.validity, psi.validity, r.c_model.validity});
  r.c_model.validity = v;
  r.c_model.normalize();
  r.centralizer_ok = centralizer_membership(r.c_model, r.model);
  r.psi_unramified = is_unramified(psi);
  return r;
}

/// var(g^{-1} f g) = g^{-1} var(f) g and the same for f^{-1}, g unramified
/// (products in the operator group).
template <class R>
bool variation_group_conjugation_check(const DulacSeries<R>& f, const DulacSeries<R>& g,
                                       const R& tol = check_tol<R>()) {
  if (!is_unramified(g)) throw Error("NotUnramified", "conjugator must be unramified");
  DulacSeries<R> h = op::conj(f, g);
  bool ok = distance(variation(h), op::conj(variation(f), g)) <= tol;
  ok = ok && distance(variation(invert(h)), op::conj(variation(invert(f)), g)) <= tol;
  return ok;
}

/// The identical-variations step: var(f) = var(f^{-1}) forces f o f unramified.
/// Returns nullopt when the variations differ.
template <class R>
std::optional<bool> square_unramified_if_identical_variations(const DulacSeries<R>& f,
                                                              const R& tol = check_tol<R>()) {
  if (distance(variation(f), variation(invert(f))) > tol) return std::nullopt;
  return is_unramified(compose(f, f));
}

}  // namespace dulac
