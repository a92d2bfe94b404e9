// Acceptance runner: one PASS/FAIL line per criterion.
//   acceptance                 all criteria
//   acceptance --criterion N   only criterion N (exit code 0 iff it passes)

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dulac/dulac.hpp"

using namespace dulac;
using M = mp50;
using CM = Complex<M>;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string sci(double x) {
  std::ostringstream os;
  os.precision(2);
  os << std::scientific << x;
  return os.str();
}

template <class R>
double dbl(const R& x) {
  return static_cast<double>(x);
}

DulacSeries<M> any_series(Sampler& s) {
  SeriesShape sh;
  sh.validity = 5;
  sh.key_density = 0.35;
  sh.max_degree = 1;
  if (s.coin(1.0 / 3)) {
    sh.a_min = 0.8;
    sh.a_max = 1.25;
  }
  return random_series<M>(s, sh);
}

/// Mildly ramified by construction: u o (a z) o v with u, v unramified.
DulacSeries<M> coset_mr(Sampler& s) {
  DulacSeries<M> u = random_unramified<M>(s, 5, 0.5), v = random_unramified<M>(s, 5, 0.5);
  DulacSeries<M> lin = DulacSeries<M>::affine(M(s.uniform(0.6, 1.6)), CM(), M(5));
  return compose(u, compose(lin, v));
}

// ---------------------------------------------------------------------------

void criterion1(Outcome& o) {
  using namespace op;
  auto t0 = std::chrono::steady_clock::now();
  Sampler s(101);
  const M tol("1e-35");
  M worst(0);
  std::string worst_name;
  int mr_fail = 0;
  auto rec = [&](const char* name, const DulacSeries<M>& a, const DulacSeries<M>& b) {
    M d = distance(a, b);
    if (d > worst) {
      worst = d;
      worst_name = name;
    }
  };
  // inverses are shared between identities: inversion is the expensive step
  auto comm = [](const auto& x, const auto& ix, const auto& y, const auto& iy) { return mul(mul(mul(ix, iy), x), y); };
  auto cj = [](const auto& x, const auto& y, const auto& iy) { return mul(mul(iy, x), y); };
  for (int i = 0; i < 200; ++i) {
    DulacSeries<M> x = any_series(s), y = any_series(s), z = any_series(s);
    DulacSeries<M> ix = inv(x), iy = inv(y), iz = inv(z);
    DulacSeries<M> cxy = comm(x, ix, y, iy), cyx = comm(y, iy, x, ix);
    rec("C0", cxy, mul(ix, cj(x, y, iy)));
    rec("C1", inv(cxy), cyx);
    DulacSeries<M> cxy_z = cj(cxy, z, iz);
    rec("C2", cxy_z, comm(cj(x, z, iz), cj(ix, z, iz), cj(y, z, iz), cj(iy, z, iz)));
    rec("C3", comm(x, ix, iy, y), cj(cyx, iy, y));
    rec("C4", comm(x, ix, mul(y, z), mul(iz, iy)), mul(comm(x, ix, z, iz), cxy_z));
    rec("A.1", cj(variation(ix), x, ix), inv(variation(x)));
    DulacSeries<M> u = random_unramified<M>(s, 5);
    rec("A.3 right", variation(mul(x, u)), conj(variation(x), u));
    rec("A.3 left", variation(mul(u, x)), variation(x));
    // Prop A.3: same variation => quotient unramified
    DulacSeries<M> y2 = mul(u, x);
    rec("A.3 embedding", variation(y2), variation(x));
    if (!is_unramified(mul(y2, inv(x)))) ++mr_fail;
    // Prop A.4 on a mildly ramified x: y = c x with c centralizing var(x^{-1})
    DulacSeries<M> xm = coset_mr(s);
    DulacSeries<M> w = variation(inv(xm));
    DulacSeries<M> c = mul(power(tau<M>(M(5)), s.integer(-1, 1)), power(w, s.integer(-1, 2)));
    DulacSeries<M> ym = mul(c, xm);
    rec("A.4 var", variation(ym), variation(xm));
    rec("A.4 var inv", variation(inv(ym)), variation(inv(xm)));
  }
  const double secs = seconds_since(t0);
  o.detail << "200 triples, worst residual " << sci(dbl(worst)) << " (" << worst_name << "), " << secs << " s";
  o.check(worst < tol, "residual >= 1e-35");
  o.check(mr_fail == 0, std::to_string(mr_fail) + " quotients not unramified");
  o.check(secs < 60, "runtime >= 60 s");
}

void criterion2(Outcome& o) {
  Sampler s(202);
  int disagree = 0, n_unram = 0;
  for (int i = 0; i < 200; ++i) {
    DulacSeries<M> f;
    switch (i % 4) {
      case 0:
      case 1:
        f = random_unramified<M>(s, 5);
        break;
      case 2: {  // one ramified ingredient: half-integer key, z-dependence, or multiplier
        f = random_unramified<M>(s, 5);
        int kind = s.integer(0, 2);
        if (kind == 0) f.tail.add(M(0.5 + s.integer(0, 4)), Poly<M>{s.complex<M>()});
        if (kind == 1) f.tail.add(M(s.integer(1, 5)), Poly<M>{CM(), s.complex<M>()});
        if (kind == 2) f.a = M(s.uniform(0.5, 2));
        f.normalize();
        break;
      }
      default:
        f = any_series(s);
    }
    const bool support = is_unramified(f);
    const bool commutes = is_identity(variation(f), check_tol<M>());
    n_unram += support;
    disagree += support != commutes;
  }
  o.detail << "200 series (" << n_unram << " unramified), " << disagree << " disagreements";
  o.check(disagree == 0, "support criterion and variation disagree");
}

void criterion3(Outcome& o) {
  Sampler s(303);
  const M tol("1e-30");
  M worst(0);
  for (int i = 0; i < 200; ++i) {
    SeriesShape sh;
    sh.validity = 4;
    sh.key_density = 0.5;
    if (i < 100) {
      sh.a_min = 1.3;
      sh.a_max = 3;
    }
    DulacSeries<M> f = random_series<M>(s, sh);
    if (i >= 100) {
      f.b.re = M((s.coin() ? 1 : -1) * s.uniform(0.3, 2));
    }
    worst = std::max(worst, model_residual(f, conjugate_to_model(f)));
  }
  o.detail << "200 conjugations, worst residual " << sci(dbl(worst)) << "; ";
  o.check(worst < tol, "model residual >= 1e-30");

  // 2z + e^{-z}
  DulacSeries<M> f = parse_series<M>("2*z + E[1]", M(4));
  ModelConjugation<M> mc = conjugate_to_model(f);
  const Poly<M>* p1 = mc.phi.tail.at(M(1));
  const Poly<M>* p2 = mc.phi.tail.at(M(2));
  const bool super_ok = p1 && p2 && near((*p1)[0], CM(M(-0.5)), check_tol<M>()) &&
                        near((*p2)[0], CM(M(-0.5)), check_tol<M>()) && mc.model.kind == ModelGerm<M>::Kind::Scaling;
  o.detail << "2z+e^{-z}: " << (super_ok ? "matches" : "differs") << "; ";
  o.check(super_ok, "super-attracting example");

  // z + b + c e^{-lambda z}
  const M lam(1.5);
  const CM b(M(0.7), M(0.4)), c(M(0.3), M(-0.2));
  DulacSeries<M> g = DulacSeries<M>::affine(M(1), b, M(4));
  g.tail.add(lam, Poly<M>{c});
  ModelConjugation<M> mh = conjugate_to_model(g);
  const Poly<M>* q = mh.phi.tail.at(lam);
  const CM got = q ? (*q)[0] : CM();
  const CM e = exp(b * CM(-lam));
  const CM stated = c / (CM(M(1)) - e);
  const CM solved = c / (e - CM(M(1)));
  o.detail << "hyperbolic q = " << sci(dbl(abs(got - solved))) << " from c/(e^{-lambda b}-1), "
           << sci(dbl(abs(got - stated))) << " from c/(1-e^{-lambda b})";
  o.check(near(got, solved, check_tol<M>()), "hyperbolic homological solve");
  o.check(near(got, stated, check_tol<M>()), "hyperbolic example with q = c/(1-e^{-lambda b})");
}

void criterion4(Outcome& o) {
  Sampler s(404);
  const M tol30("1e-30"), tol25("1e-25");
  M rt(0), dual(0), inv(0), b5(0), b6(0);
  for (int k = 1; k <= 3; ++k) {
    const double L = 3 * k + 1;
    SeriesShape sh;
    sh.validity = L;
    sh.key_density = 0.5;
    NilpotentDerivation<M> X = random_derivation<M>(s, sh);
    rt = std::max(rt, distance(log_series(exp_derivation(X)), X));
    dual = std::max(dual, distance(lvar(X), lvar_via_group(X)));

    NilpotentDerivation<M> Z;
    Z.validity = M(L);
    for (long j = k; j <= static_cast<long>(L); ++j) Z.terms.add(M(j), Poly<M>{s.complex<M>()});
    Section<M> sec{{k, s.complex<M>()}, {2 * k, s.complex<M>()}};
    NilpotentDerivation<M> Y = lvar_inverse(Z, sec);
    Section<M> back;
    for (const auto& t : Y.terms.terms)
      if (is_integer_key(t.lambda)) back[std::lround(dbl(t.lambda))] = t.p.empty() ? CM() : t.p[0];
    inv = std::max(inv, distance(lvar_inverse(lvar(Y), back), Y));

    RamifiedNormalForm<M> nf = normal_form_mildly_ramified(Y);
    b5 = std::max(b5, abs(nf.z_coef_2k - (nf.mu - CM(M(0.5)))));
    b5 = std::max(b5, abs(nf.z_coef_k + CM(M(1))));
    NilpotentDerivation<M> Zp = lvar(nf.conjugated), Zm = lvar(nf.conjugated * CM(M(-1)));
    NilpotentDerivation<M> br = bracket(Zm, Zp);
    const Poly<M>* lead = br.terms.at(M(3 * k));
    const bool is_leading = lead && !br.terms.terms.empty() && same_key(br.terms.terms.front().lambda, M(3 * k));
    const CM want(4 * pi<M>() * pi<M>() * k);
    b6 = std::max(b6, is_leading ? abs((*lead)[0] - want) : M(1));
  }
  M dk(0);
  for (int k = 1; k <= 8; ++k) {
    Poly<M> lhs = delta(basis_poly<M>(k));
    Poly<M> rhs = scaled(basis_poly<M>(k - 1), CM(M(k)));
    dk = std::max(dk, max_abs_diff(lhs, rhs));
  }
  o.detail << "exp/log " << sci(dbl(rt)) << ", lvar dual " << sci(dbl(dual)) << ", Delta P_k " << sci(dbl(dk))
           << ", lvar_inverse " << sci(dbl(inv)) << ", normal form " << sci(dbl(b5)) << ", bracket " << sci(dbl(b6));
  o.check(rt < tol30, "exp/log roundtrip");
  o.check(dual < tol30, "lvar dual path");
  o.check(dk < tol30, "Delta P_k = k P_{k-1}");
  o.check(inv < tol30, "lvar_inverse o lvar");
  o.check(b5 < tol30, "normal form coefficients");
  o.check(b6 < tol25, "bracket leading coefficient 4 pi^2 k");
}

void criterion5(Outcome& o) {
  Sampler s(505);
  int mismatched = 0;
  for (int i = 0; i < 50; ++i) {
    const long k = s.integer(1, 2);
    DulacSeries<M> f = random_mildly_ramified<M>(s, k, 3 * k + 1, 0.5);
    auto [G, H] = variation_pair(f);
    if (tangency_order(G, check_tol<M>()) != tangency_order(H, check_tol<M>())) ++mismatched;
  }
  o.detail << "50 instances, " << mismatched << " tangency mismatches; ";
  o.check(mismatched == 0, "tangency orders of G and H");

  const CM nu(M(0.3), M(0.1));
  M emb(0), gen(0);
  bool kinds = true;
  for (int k = 1; k <= 3; ++k) {
    const int N = 3 * k + 2;
    FormalField<M> d = partial_field<M>(k, nu, N);
    DiffeoGerm<M> G = exp_field(d), H = exp_field(d * (CM(M(-1)) / nu));
    DiffeoGerm<M> C = compose(invert(H), compose(invert(G), compose(H, G)));
    emb = std::max(emb, distance(C, DiffeoGerm<M>::identity(N)));
    GHVerdict<M> ve = gh_dichotomy(G, H);
    kinds = kinds && ve.kind == GHKind::EmbeddedFlow && near(ve.nu, nu, M("1e-20"));

    DulacSeries<M> f = exp_derivation(lvar_inverse(unramified_model<M>(k, CM(M(0.25), M(-0.1)), M(3 * k + 1))));
    auto [G2, H2] = variation_pair(f);
    GHVerdict<M> vg = gh_dichotomy(G2, H2);
    kinds = kinds && vg.kind == GHKind::NonCommuting && vg.commutator_degree == 3 * k + 1;
    gen = std::max(gen, abs(vg.commutator_coef - CM(4 * pi<M>() * pi<M>() * k)));
  }
  o.detail << "embedded pair commutator " << sci(dbl(emb)) << ", generic leading coefficient " << sci(dbl(gen));
  o.check(emb < M("1e-30"), "embedded pair commutes to degree 3k+2");
  o.check(kinds, "dichotomy verdicts");
  o.check(gen < M("1e-20"), "commutator leading coefficient 4 pi^2 k");
}

void criterion6(Outcome& o) {
  const M beta = M(1) / 3;
  const CM nu = unit_root(M(-1) * beta);
  Sampler s(606);
  M minus(0), plus(0);
  for (int i = 0; i < 20; ++i) {
    CM z(M(3 + 5.0 * i / 19), M(s.uniform(-1, 1)));
    CM fz = fatou_model_map(1, beta, z);
    CM w = fatou_coordinate(1, nu, z), wf = fatou_coordinate(1, nu, fz);
    minus = std::max(minus, abs(wf + w / nu));
    plus = std::max(plus, abs(wf - w / nu));
  }
  o.detail << "Fatou(f) + Fatou(z)/nu up to " << sci(dbl(minus)) << "; Fatou(f) - Fatou(z)/nu up to " << sci(dbl(plus));
  o.check(minus < M("1e-8"), "Fatou(f(z)) = -Fatou(z)/nu");
}

void criterion7(Outcome& o) {
  auto t0 = std::chrono::steady_clock::now();
  // conservation on the linear saddle
  double cons = 0;
  for (double lam : {0.7, 1.0, std::sqrt(2.0)}) {
    PreparedSaddle p;
    p.lambda = lam;
    p.n = static_cast<int>(std::ceil(lam));
    const cplx w0(0.4, 0.1);
    std::vector<PathSpec> paths = {PathSpec::radial(cplx(0.6, 0.2), 4.0), PathSpec::circular(cplx(0.1, 0), 4 * std::numbers::pi),
                                   PathSpec::exponential(0.5 * lam, 1, 4.0), PathSpec::exponential(0.5 * lam, -1, 4.0, true)};
    for (const auto& path : paths) {
      LiftOptions lo;
      lo.stop_on_prediction = false;
      LiftResult r = lift_path(p, path, w0, lo);
      const double base = std::exp(-r.samples.front().second.real());
      for (const auto& [z, phi] : r.samples) cons = std::max(cons, std::abs(std::exp(-phi.real()) / base - 1));
    }
  }
  // two-sided estimate on random perturbed saddles
  Sampler s(707);
  int violations = 0, lifts = 0;
  double slack = 0;
  for (int i = 0; i < 100; ++i) {
    PreparedSaddle p = random_saddle(s, s.uniform(0.5, 2.5), s.uniform(0.005, 0.05));
    p.validate();
    const cplx w0(s.uniform(0.2, 1.0), s.uniform(-1, 1));
    std::vector<PathSpec> paths = {PathSpec::radial(std::polar(s.uniform(0.3, 0.9), s.uniform(-3, 3)), 6.0),
                                   PathSpec::circular(cplx(s.uniform(0.05, 1), 0), (s.coin() ? 1 : -1) * 6 * std::numbers::pi),
                                   PathSpec::exponential(s.uniform(0, 0.9) * p.lambda, s.coin() ? 1 : -1, 8.0)};
    for (const auto& path : paths) {
      LiftResult r = lift_path(p, path, w0);
      ++lifts;
      violations += !r.estimate_ok;
      slack = std::max(slack, r.estimate_slack);
    }
  }
  // corner map of the linear saddle
  double corner = 0;
  for (double lam : {0.7, 1.0, std::sqrt(2.0)}) {
    PreparedSaddle p;
    p.lambda = lam;
    p.n = static_cast<int>(std::ceil(lam));
    for (cplx z : {cplx(4, 0.3), cplx(6, -1.5), cplx(9, 2.5)}) corner = std::max(corner, std::abs(corner_value(p, z) - lam * z));
  }
  // monodromy on perturbed saddles
  double mono = 0;
  for (int i = 0; i < 5; ++i) {
    PreparedSaddle p = random_saddle(s, s.uniform(0.6, 1.8), 0.05);
    mono = std::max(mono, monodromy_residual(p, cplx(s.uniform(8, 10), s.uniform(-1, 1))));
  }
  const double secs = seconds_since(t0);
  o.detail << "conservation " << sci(cons) << ", estimate violations " << violations << "/" << lifts << ", corner "
           << sci(corner) << ", monodromy " << sci(mono) << ", " << secs << " s";
  o.check(cons < 1e-8, "linear conservation");
  o.check(violations == 0, "two-sided length estimate");
  o.check(corner < 1e-6, "linear corner map");
  o.check(mono < 1e-5, "monodromy relation");
  o.check(secs < 300, "runtime >= 5 min");
}

void criterion8(Outcome& o) {
  Sampler s(808);
  double num = 0;
  for (int i = 0; i < 3; ++i) {
    PreparedSaddle p = random_saddle(s, s.uniform(0.6, 1.8), 0.05);
    std::vector<cplx> zs = {cplx(9, 0.2), cplx(10, -0.5)};
    for (int n = -2; n <= 2; ++n)
      for (const auto& d : determination_shift(p, n, zs)) num = std::max(num, d.residual);
  }
  M formal(0);
  int mismatches = 0;
  for (int i = 0; i < 6; ++i) {
    DulacSeries<M> d0 = i == 0 ? DulacSeries<M>::affine(M(0.7), CM(), M(5)) : coset_mr(s);
    auto [hS, hO] = corner_holonomies(d0);
    for (int n = -2; n <= 2; ++n) {
      try {
        DulacSeries<M> a = compose(power(hO, -n), d0), b = compose(d0, power(hS, n));
        formal = std::max(formal, distance(a, b));
        determination_formal(d0, hS, hO, n);
      } catch (const Error&) {
        ++mismatches;
      }
    }
  }
  o.detail << "numeric residual " << sci(num) << ", formal residual " << sci(dbl(formal));
  o.check(num < 1e-5, "numeric determinations");
  o.check(mismatches == 0 && formal < check_tol<M>(), "formal determinations");
}

void criterion9(Outcome& o) {
  const int N = 13;
  const M la = log(M(2));
  DiffeoGerm<M> Rb = DiffeoGerm<M>::identity(N);  // R = y/(1 + y log 2)
  for (int j = 1; j <= N; ++j) Rb.c[static_cast<std::size_t>(j)] = CM(pow(-la, j - 1));
  // exp(1/R) = 2 exp(1/y)  <=>  y/R = 1 + y log 2 as a series to degree 12
  Series<M> q(Rb.c.begin() + 1, Rb.c.end());
  Series<M> inv_q(static_cast<std::size_t>(N));
  inv_q[0] = CM(M(1)) / q[0];
  for (int n = 1; n < N; ++n) {
    CM acc;
    for (int j = 1; j <= n; ++j) acc += q[static_cast<std::size_t>(j)] * inv_q[static_cast<std::size_t>(n - j)];
    inv_q[static_cast<std::size_t>(n)] = -acc / q[0];
  }
  M ser(abs(inv_q[0] - CM(M(1)))), tolp("1e-35");
  ser = std::max(ser, abs(inv_q[1] - CM(la)));
  for (int n = 2; n <= 12; ++n) ser = std::max(ser, abs(inv_q[static_cast<std::size_t>(n)]));
  BernoulliCheck<M> bc = bernoulli_functional_check(Rb, CM(M(2)), {CM(M(1))}, Series<M>{CM(M(1))});
  o.detail << "exp(1/R)=2exp(1/y) " << sci(dbl(ser)) << ", functional residual " << sci(dbl(bc.residual)) << "; ";
  o.check(ser < tolp, "Bernoulli example coefficients");
  o.check(bc.residual < tolp && near(bc.alpha, CM(M(2)), tolp), "Bernoulli functional equation");

  auto verdict = [](LoopGermSpec<M> sp) { return classify_integrability(sp); };
  LoopGermSpec<M> lin;
  lin.lambda = sqrt(M(2));
  lin.R_glue = DiffeoGerm<M>::linear(CM(M(3)), N);
  LoopGermSpec<M> ber;
  ber.lambda = M(1);
  ber.R_glue = Rb;
  LoopGermSpec<M> pd;
  pd.saddle = LoopGermSpec<M>::Saddle::PoincareDulac;
  pd.k = 1;
  pd.mu = CM(M(0.5));
  const CM nu(M(0.3), M(0.1));
  FormalField<M> chi;
  chi.order = N;
  chi.a.assign(static_cast<std::size_t>(N), CM());
  CM c(M(1));
  for (int j = 1; j < N; ++j, c *= -nu) chi.a[static_cast<std::size_t>(j)] = c;
  pd.R_glue = exp_field(chi);
  LoopGermSpec<M> nb = pd;
  nb.R_glue.c[3] += CM(M(0.2));
  nb.P = {CM(M(1))};
  auto v1 = verdict(lin), v2 = verdict(ber), v3 = verdict(pd), v4 = verdict(nb);
  o.detail << to_string(v1.cls) << ", " << to_string(v2.cls) << ", " << to_string(v3.cls) << ", " << to_string(v4.cls) << "; ";
  o.check(v1.cls == IntegrabilityClass::Linear, "lambda = sqrt 2, R = 3x");
  o.check(v2.cls == IntegrabilityClass::Bernoulli, "Bernoulli gluing");
  o.check(v3.cls == IntegrabilityClass::PoincareDulac && near(v3.nu, nu, M("1e-30")), "R = exp chi");
  o.check(v4.cls == IntegrabilityClass::NotIntegrable, "case 4b");
  const bool pq = solvable_pq_check<M>(2, 3, 1, 1) && solvable_pq_check<M>(3, 5, 2, 1);
  o.detail << "pq checks " << (pq ? "hold" : "fail");
  o.check(pq, "solvable pq groups");
}

void criterion10(Outcome& o) {
  const int N = 16;
  const double l2 = std::log(2.0);
  DiffeoGerm<M> Rm = DiffeoGerm<M>::identity(N);
  const M la = log(M(2));
  for (int j = 1; j <= N; ++j) Rm.c[static_cast<std::size_t>(j)] = CM(pow(-la, j - 1));
  DiffeoGerm<double> Rd = DiffeoGerm<double>::identity(N);
  for (int j = 1; j <= N; ++j) Rd.c[static_cast<std::size_t>(j)] = Complex<double>(std::pow(-l2, j - 1));
  DulacSeries<M> P = poincare_formal(DulacSeries<M>::identity(M(N - 1)), Rm);

  PreparedSaddle s;
  s.lambda = 1;
  s.n = 1;
  std::vector<cplx> xs;
  for (int i = 0; i < 10; ++i) xs.push_back(std::polar(0.02 + 0.008 * i, -2.5 + 0.55 * i));
  double worst = 0;
  for (const auto& [x, Pn] : poincare_numeric(s, Rd, xs)) {
    const CM zeta = from_std<M>(-std::log(x));
    const cplx Pf = to_std(exp(-P.eval(zeta)));
    worst = std::max(worst, std::abs(Pf - Pn));
  }
  o.detail << "10 samples, worst |P_formal - P_numeric| " << sci(worst);
  o.check(worst < 1e-6, "formal and numeric Poincare maps");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int only = 0;
  app.add_option("--criterion", only, "run a single criterion (1-10)")->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::function<void(Outcome&)>> all = {criterion1, criterion2, criterion3, criterion4, criterion5,
                                                           criterion6, criterion7, criterion8, criterion9, criterion10};
  bool ok = true;
  for (int i = 1; i <= 10; ++i) {
    if (only && i != only) continue;
    Outcome o;
    try {
      all[static_cast<std::size_t>(i - 1)](o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "[exception: " << e.what() << "]";
    }
    std::cout << "criterion " << i << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail.str() << std::endl;
    ok = ok && o.pass;
  }
  return ok ? 0 : 1;
}
