#include "support.hpp"

using namespace dulac;
using namespace t;

namespace {

using F = FormalField<M>;

F field(std::initializer_list<CM> a, int N) {
  F V;
  V.order = N;
  V.a.assign(static_cast<std::size_t>(N), CM());
  std::size_t j = 0;
  for (const auto& c : a) V.a[j++] = c;
  return V;
}

}  // namespace

TEST_CASE("project_pi: deck kernel, translations, the first nonlinear term") {
  CHECK(same(project_pi(tau<M>(M(5))), G::identity(6)));

  const CM b = c(0.4, -2);
  G g = project_pi(S::affine(M(1), b, M(3)));
  CHECK(close(g.coef(1), exp(-b)));
  for (int j = 2; j <= g.order; ++j) CHECK(close(g.coef(j), CM()));

  S f = S::identity(M(1));
  f.tail.add(M(1), {two_pi_i()});
  G h = project_pi(f);
  CHECK(h.order == 2);
  CHECK(close(h.coef(1), c(1)));
  CHECK(close(h.coef(2), -two_pi_i()));

  CHECK(kind_of([] { project_pi(series("z + z*E[1]")); }) == "NotUnramified");
}

TEST_CASE("project_pi is a morphism with kernel generated by tau") {
  Sampler s(31);
  for (int i = 0; i < 20; ++i) {
    S f = random_unramified<M>(s, 5), g = random_unramified<M>(s, 5);
    f.b = s.complex<M>(0.5);
    g.b = s.complex<M>(0.5);
    CHECK(same(project_pi(compose(f, g)), compose(project_pi(f), project_pi(g)), M("1e-35")));
    CHECK(same(project_pi(compose(tau<M>(M(5)), f)), project_pi(f), M("1e-35")));
  }
}

TEST_CASE("lift_pi: branches and sections") {
  CHECK(is_identity(lift_pi(G::identity(5), 0), tol()));
  CHECK(same(lift_pi(G::identity(5), 1), S::affine(M(1), -two_pi_i(), M(4))));

  const M beta("0.3");
  S l = lift_pi(G::linear(unit_root(beta), 5), 0);
  CHECK(close(l.b, -two_pi_i() * CM(beta)));

  Sampler s(32);
  for (int i = 0; i < 10; ++i) {
    S f = random_unramified<M>(s, 5);
    f.b = s.complex<M>(0.5);
    CHECK(same(lift_pi(project_pi(f), 0), f, M("1e-35")));
  }
}

TEST_CASE("exp_field: identity, leading term, inverse flow, flow law") {
  CHECK(same(exp_field(field({}, 8)), G::identity(8)));

  const CM a = c(0.5, 1.5);
  for (int k = 1; k <= 3; ++k) {
    F V = field({}, 9);
    V.a[static_cast<std::size_t>(k)] = a;
    G g = exp_field(V);
    CHECK(close(g.coef(k + 1), a));
    for (int j = 2; j <= k; ++j) CHECK(close(g.coef(j), CM()));
  }

  F V = field({CM(), c(1, -1), c(0.5), c(0, 2)}, 10);
  CHECK(same(compose(exp_field(V), exp_field(V * c(-1))), G::identity(10)));
  CHECK(same(compose(exp_field(V * CM(M("0.25"))), exp_field(V * CM(M("0.5")))), exp_field(V * CM(M("0.75"))), M("1e-35")));
}

TEST_CASE("infinitesimal_generator") {
  F V = field({CM(), c(0.3, 0.2), c(-1), c(0, 0.5), c(0.1)}, 10);
  F W = infinitesimal_generator(exp_field(V));
  for (std::size_t j = 0; j < V.a.size(); ++j) CHECK(close(W.a[j], V.a[j], M("1e-35")));

  G g = G::identity(6);
  g.c[2] = c(1);
  F U = infinitesimal_generator(g);
  CHECK(close(U.a[1], c(1)));
  CHECK(same(exp_field(U), g, M("1e-35")));

  CHECK(kind_of([] { infinitesimal_generator(G::identity(6)); }) == "NotTangentToIdentity");
}

TEST_CASE("gh_dichotomy: the three cases") {
  const CM nu = c(0.3, 0.1);
  for (int k = 1; k <= 2; ++k) {
    const int N = 3 * k + 2;
    F d = partial_field<M>(k, nu, N);
    GHVerdict<M> emb = gh_dichotomy(exp_field(d), exp_field(d * (c(-1) / nu)));
    CHECK(emb.kind == GHKind::EmbeddedFlow);
    CHECK(emb.k == k);
    CHECK(close(emb.nu, nu, M("1e-30")));
    CHECK(emb.formal_only);
    CHECK(emb.checked_degree == N);

    F half = partial_field<M>(k, c(-1), N);  // nu = -1: the mu = 1/2 form
    GHVerdict<M> id = gh_dichotomy(exp_field(half), exp_field(half));
    CHECK(id.kind == GHKind::IdenticalVariations);
    CHECK(id.k == k);

    S f = exp_derivation(lvar_inverse(unramified_model<M>(k, c(0.2, 0.3), M(3 * k + 1))));
    auto [Gf, Hf] = variation_pair(f);
    GHVerdict<M> gen = gh_dichotomy(Gf, Hf);
    CHECK(gen.kind == GHKind::NonCommuting);
    CHECK(gen.commutator_degree == 3 * k + 1);
    CHECK(close(gen.commutator_coef, c(4 * k) * pi() * pi(), M("1e-25")));
  }
  CHECK(kind_of([] { gh_dichotomy(G::linear(c(2), 4), G::identity(4)); }) == "NotTangentToIdentity");
}

TEST_CASE("variation_pair") {
  Sampler s(33);
  S u = random_unramified<M>(s, 4);
  auto [Gu, Hu] = variation_pair(u);
  CHECK(same(Gu, G::identity(Gu.order)));
  CHECK(same(Hu, G::identity(Hu.order)));

  auto [G1, H1] = variation_pair(exp_derivation(derivation("z*E[1]", 2)));
  CHECK(close(G1.coef(2), -two_pi_i()));
  CHECK(tangency_order(G1, tol()) == 1);
  CHECK(tangency_order(H1, tol()) == 1);

  // f = t^{-1} f0 in the operator product, t = z + 2 pi i beta: G unchanged, H = s_B^{-1} H0 s_B
  const M beta("0.15");
  S f0 = random_mildly_ramified<M>(s, 1, 4, 0.5);
  S t = S::affine(M(1), two_pi_i() * CM(beta), M(4));
  auto [G0, H0] = variation_pair(f0);
  auto [Gb, Hb] = variation_pair(op::mul(op::inv(t), f0));
  const G sB = G::linear(unit_root(beta), H0.order), sBinv = G::linear(unit_root(-beta), H0.order);
  CHECK(same(Gb, G0, M("1e-35")));
  CHECK(same(Hb, compose(sBinv, compose(H0, sB)), M("1e-35")));

  CHECK(kind_of([] { variation_pair(series("z + E[0.5]")); }) == "NotMildlyRamified");
}

TEST_CASE("variation_pair: equal tangency orders on mildly ramified series") {
  Sampler s(34);
  for (int i = 0; i < 20; ++i) {
    const long k = 1 + i % 3;
    auto [Gf, Hf] = variation_pair(random_mildly_ramified<M>(s, k, 3 * k + 1, 0.5));
    CHECK(tangency_order(Gf, tol()) == k);
    CHECK(tangency_order(Hf, tol()) == k);
  }
}

TEST_CASE("fatou_model_map: implicit equation and the Fatou coordinate") {
  const M beta = M(1) / 3;
  const CM nu = unit_root(-beta);
  for (double re : {3.0, 5.0, 8.0}) {
    const CM z = c(re, 0.4);
    const CM f = fatou_model_map(1, beta, z);
    const CM lhs = exp(f) + f / (c(1) - nu), rhs = (exp(z) + z / (c(1) - nu)) / nu;
    CHECK(abs(lhs - rhs) <= M("1e-20") * abs(rhs));
    // the coordinate is multiplied by 1/nu (not -1/nu: see the ledger)
    CHECK(close(fatou_coordinate(1, nu, f), fatou_coordinate(1, nu, z) / nu, M("1e-20")));
  }
  // dominant balance when e^{kz} is negligible: f ~ z / nu
  const CM z = c(-40, 60);  // Re z and Re z/nu both very negative
  CHECK(abs(fatou_model_map(1, beta, z) - z / nu) < M("1e-10"));
  CHECK(kind_of([] { fatou_model_map(1, M(1), c(4)); }) == "PreconditionFailed");
}
