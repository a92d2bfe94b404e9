#include "support.hpp"

using namespace dulac;
using namespace t;

using Kind = ModelGerm<M>::Kind;

TEST_CASE("conjugate_to_model: scalings are their own model") {
  ModelConjugation<M> mc = conjugate_to_model(series("3*z", 4));
  CHECK(is_identity(mc.phi, tol()));
  CHECK(mc.model.kind == Kind::Scaling);
  CHECK(close(mc.model.param, c(3)));
}

TEST_CASE("conjugate_to_model: 2z + e^{-z}") {
  S f = series("2*z + E[1]", 4);
  ModelConjugation<M> mc = conjugate_to_model(f);
  CHECK(mc.model.kind == Kind::Scaling);
  CHECK(close(mc.model.param, c(2)));
  CHECK(close(coef(mc.phi.tail, 1), c(-0.5)));
  CHECK(close(coef(mc.phi.tail, 2), c(-0.5)));
  CHECK(model_residual(f, mc) < tol());
}

TEST_CASE("conjugate_to_model: one-step hyperbolic homological equation") {
  const M lam("1.5");
  const CM b = c(0.7, 0.4), cc = c(0.3, -0.2);
  S f = S::affine(M(1), b, M(4));
  f.tail.add(lam, {cc});
  ModelConjugation<M> mc = conjugate_to_model(f);
  CHECK(mc.model.kind == Kind::Translation);
  CHECK(close(mc.model.param, b));
  const CM e = exp(b * CM(-lam));
  // phi^{-1} f phi = z + b gives q = c/(e^{-lambda b} - 1) ...
  CHECK(close(coef(mc.phi.tail, lam), cc / (e - c(1))));
  // ... and the inverse conjugator carries c/(1 - e^{-lambda b})
  CHECK(close(coef(invert(mc.phi).tail, lam), cc / (c(1) - e)));
  CHECK(model_residual(f, mc) < tol());
}

TEST_CASE("conjugate_to_model: random attracting and repelling series") {
  Sampler s(41);
  M worst(0);
  for (int i = 0; i < 60; ++i) {
    SeriesShape sh;
    sh.validity = 4;
    sh.key_density = 0.5;
    if (i % 4 == 0) {
      sh.a_min = 1.3;
      sh.a_max = 3;
    } else if (i % 4 == 1) {
      sh.a_min = 0.4;
      sh.a_max = 0.8;
    }
    S f = random_series<M>(s, sh);
    if (i % 4 >= 2) f.b.re = M((i % 4 == 2 ? 1 : -1) * s.uniform(0.3, 2));
    worst = std::max(worst, model_residual(f, conjugate_to_model(f)));
  }
  CHECK(worst < M("1e-30"));
}

TEST_CASE("conjugate_to_model: the model is a conjugation invariant") {
  Sampler s(42);
  for (int i = 0; i < 10; ++i) {
    SeriesShape sh;
    sh.validity = 4;
    if (i % 2 == 0) {
      sh.a_min = 1.5;
      sh.a_max = 2.5;
    }
    S f = random_series<M>(s, sh);
    if (i % 2) f.b.re = M(1);
    SeriesShape hs;
    hs.validity = 4;
    hs.scale = 0.5;
    S h = random_series<M>(s, hs);
    S g = compose(invert(h), compose(f, h));
    ModelGerm<M> a = conjugate_to_model(f).model, b = conjugate_to_model(g).model;
    CHECK(a.kind == b.kind);
    CHECK(close(a.param, b.param));
  }
}

TEST_CASE("conjugate_to_model: indifferent germs are rejected") {
  CHECK(kind_of([] { conjugate_to_model(series("z + (0,1) + E[1]")); }) == "Indifferent");
}

TEST_CASE("centralizer_membership: closed-form centralizers") {
  const ModelGerm<M> scaling{Kind::Scaling, c(2)}, translation{Kind::Translation, c(1, 3)};
  CHECK(centralizer_membership(series("0.37*z", 4), scaling));
  CHECK(centralizer_membership(series("z + (5,-2)", 4), translation));
  CHECK_FALSE(centralizer_membership(series("z + E[1]", 4), translation));
  CHECK_FALSE(centralizer_membership(series("2*z + 1", 4), scaling));
}

TEST_CASE("rigidity_decompose") {
  S f = series("2*z + E[1] + (0,1)*E[1.5]", 4);
  ModelConjugation<M> mc = conjugate_to_model(f);

  RigidityDecomposition<M> same_psi = rigidity_decompose(f, mc.phi);
  CHECK(is_identity(same_psi.c, M("1e-35")));
  CHECK(same_psi.centralizer_ok);

  const M mu("0.6");
  RigidityDecomposition<M> r = rigidity_decompose(f, compose(mc.phi, S::affine(mu, CM(), M(4))));
  CHECK(r.centralizer_ok);
  CHECK(close(r.c_model.a, c(1) / CM(mu), M("1e-35")));
  CHECK(max_abs(r.c_model.tail) < M("1e-35"));
  CHECK_FALSE(r.psi_unramified);

  S h = series("z + 1 + (0.5,0.5)*E[1] + E[2]", 4);
  ModelConjugation<M> mh = conjugate_to_model(h);
  const CM d = c(0.2, -3);
  RigidityDecomposition<M> rh = rigidity_decompose(h, compose(mh.phi, S::affine(M(1), d, M(4))));
  CHECK(rh.centralizer_ok);
  CHECK(close(rh.c_model.b, -d, M("1e-35")));

  CHECK(kind_of([] { rigidity_decompose(series("z + (0,2)"), series("z")); }) == "PreconditionFailed");
}

TEST_CASE("variation_group_conjugation_check") {
  Sampler s(43);
  for (int i = 0; i < 8; ++i) {
    S f = random_mildly_ramified<M>(s, 1 + i % 2, 4, 0.5);
    CHECK(variation_group_conjugation_check(f, S::identity(M(4))));
    S g = random_unramified<M>(s, 4, 0.5);
    g.b = s.complex<M>(0.5);
    CHECK(variation_group_conjugation_check(f, g, M("1e-35")));
  }
  CHECK(kind_of([] { variation_group_conjugation_check(series("z + E[1]"), series("z + z*E[1]")); }) == "NotUnramified");
}

TEST_CASE("identical variations force an unramified square") {
  const CM half_deck = CM(M(0), pi());
  Sampler s(44);
  S u = random_unramified<M>(s, 4, 0.3);
  S f = compose(u, compose(S::affine(M(1), half_deck, M(4)), invert(u)));
  auto sq = square_unramified_if_identical_variations(f);
  REQUIRE(sq.has_value());
  CHECK(*sq);
  CHECK_FALSE(square_unramified_if_identical_variations(series("2*z", 4)).has_value());
}
