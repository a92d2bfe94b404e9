#pragma once

// Property suites and the JSON experiment runner behind `dulac check-suite`.

#include <algorithm>
#include <atomic>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "cli_common.hpp"

namespace cli {

using dulac::Sampler;

struct SuiteResult {
  json j;
  bool pass = true;
};

inline SuiteResult tally(const std::string& name, int cases, int failures, double worst) {
  SuiteResult r;
  r.pass = failures == 0;
  r.j = {{"name", name}, {"cases", cases}, {"failures", failures}, {"worst_residual", worst}, {"pass", r.pass}};
  return r;
}

inline double dbl(const R& x) { return static_cast<double>(x); }

// ---------------------------------------------------------------------------
// formal suites

inline SuiteResult group_laws(Sampler& s, int count, double validity) {
  dulac::SeriesShape sh;
  sh.validity = validity;
  const R tol = dulac::check_tol<R>();
  int bad = 0;
  R worst(0);
  for (int i = 0; i < count; ++i) {
    auto f = dulac::random_series<R>(s, sh), g = dulac::random_series<R>(s, sh), h = dulac::random_series<R>(s, sh);
    const auto id = dulac::DulacSeries<R>::identity(R(validity));
    const R r = std::max({distance(compose(compose(f, g), h), compose(f, compose(g, h))), distance(compose(f, id), f),
                          distance(compose(id, f), f), distance(compose(f, invert(f)), id)});
    worst = std::max(worst, r);
    bad += r > tol;
  }
  return tally("group_laws", count, bad, dbl(worst));
}

inline SuiteResult unramified_equivalence(Sampler& s, int count, double validity) {
  int bad = 0;
  for (int i = 0; i < count; ++i) {
    dulac::SeriesShape sh;
    sh.validity = validity;
    if (i % 2 == 0) {
      sh.key_step = 1;
      sh.max_degree = 0;
    }
    auto f = dulac::random_series<R>(s, sh);
    bad += dulac::is_unramified(f) != dulac::is_identity(variation(f), dulac::check_tol<R>());
  }
  return tally("unramified_equivalence", count, bad, 0);
}

inline SuiteResult exp_log(Sampler& s, int count, double validity) {
  dulac::SeriesShape sh;
  sh.validity = validity;
  const R tol = dulac::check_tol<R>();
  int bad = 0;
  R worst(0);
  for (int i = 0; i < count; ++i) {
    auto X = dulac::random_derivation<R>(s, sh);
    const R r = std::max(distance(dulac::log_series(dulac::exp_derivation(X)), X), distance(dulac::lvar(X), dulac::lvar_via_group(X)));
    worst = std::max(worst, r);
    bad += r > tol;
  }
  return tally("exp_log", count, bad, dbl(worst));
}

// ---------------------------------------------------------------------------
// saddle batches (double precision, safe to run on a worker pool)

/// Random perturbed saddles with eps <= eps_max: the two-sided length estimate
/// must hold at every accepted step of every lift.  Case i draws from seed + i,
/// so the outcome does not depend on the number of workers.
inline SuiteResult saddle_batch(unsigned long seed, int count, double eps_max, int jobs) {
  std::atomic<int> next{0}, bad{0}, lifts{0};
  std::mutex mu;
  double worst = 0;
  auto work = [&] {
    for (int i = next++; i < count; i = next++) {
      Sampler s(seed + static_cast<unsigned long>(i));
      dulac::PreparedSaddle p = dulac::random_saddle(s, s.uniform(0.5, 2.5), s.uniform(0.1, 1) * eps_max);
      const cplx w0(s.uniform(0.2, 1.0), s.uniform(-1, 1));
      const std::vector<dulac::PathSpec> paths = {
          dulac::PathSpec::radial(std::polar(s.uniform(0.3, 0.9), s.uniform(-3, 3)), 6.0),
          dulac::PathSpec::circular(cplx(s.uniform(0.05, 1), 0), (s.coin() ? 1 : -1) * 6 * std::numbers::pi),
          dulac::PathSpec::exponential(s.uniform(0, 0.9) * p.lambda, s.coin() ? 1 : -1, 8.0)};
      for (const auto& path : paths) {
        dulac::LiftResult r = dulac::lift_path(p, path, w0);
        ++lifts;
        bad += !r.estimate_ok;
        std::lock_guard<std::mutex> lock(mu);
        worst = std::max(worst, r.estimate_slack);
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < std::max(1, jobs); ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return tally("saddle_batch", lifts, bad, worst);
}

// ---------------------------------------------------------------------------
// loop germs

inline dulac::LoopGermSpec<R> loop_spec_from(const json& j, const Settings& st) {
  if (!j.is_object() || !j.contains("R")) throw Error("ConfigInvalid", "loop spec needs a gluing germ R");
  dulac::LoopGermSpec<R> sp;
  const std::string kind = j.contains("saddle") ? j["saddle"].get<std::string>() : "linearizable";
  if (kind == "poincare-dulac") {
    sp.saddle = dulac::LoopGermSpec<R>::Saddle::PoincareDulac;
  } else if (kind != "linearizable") {
    throw Error("ConfigInvalid", "saddle must be linearizable or poincare-dulac");
  }
  if (j.contains("lambda")) sp.lambda = dulac::json_real<R>(j["lambda"]);
  if (j.contains("k")) sp.k = static_cast<int>(num(j, "k", 1));
  if (j.contains("mu")) sp.mu = dulac::json_complex<R>(j["mu"]);
  if (j.contains("d")) sp.d = static_cast<int>(num(j, "d", 1));
  if (j.contains("P"))
    for (const auto& c : j["P"]) sp.P.push_back(dulac::json_complex<R>(c));
  sp.R_glue = germ_from(j["R"], st);
  return sp;
}

inline json verdict_json(const dulac::IntegrabilityVerdict<R>& v, int digits) {
  json cert = json::object();
  for (const auto& [k, x] : v.certificate) cert[k] = x;
  json j = {{"class", dulac::to_string(v.cls)}, {"certificate", cert}, {"degree", v.degree}};
  if (v.k_order) j["k"] = v.k_order;
  if (v.cls == dulac::IntegrabilityClass::PoincareDulac || v.cls == dulac::IntegrabilityClass::Bernoulli)
    j["nu"] = dulac::json_of(v.nu, digits);
  if (v.undecided_degree >= 0) j["undecided_degree"] = v.undecided_degree;
  if (v.caveat) j["caveat"] = true;
  if (!v.note.empty()) j["note"] = v.note;
  return j;
}

// ---------------------------------------------------------------------------
// config runner

inline const std::set<std::string>& experiment_types() {
  static const std::set<std::string> t = {"group_laws", "unramified_equivalence", "exp_log", "saddle_batch",
                                          "saddle_lifts", "holonomy", "corner", "integrability"};
  return t;
}

/// Structural validation against schemas/config.v1.json.
inline void validate_config(const json& c) {
  if (!c.is_object()) throw Error("ConfigInvalid", "config must be an object");
  if (!c.contains("schema_version") || dulac::json_real<double>(c["schema_version"]) != 1)
    throw Error("ConfigInvalid", "schema_version must be 1");
  for (const char* k : {"precision", "seed", "validity", "jobs"})
    if (c.contains(k) && !dulac::json_is_number(c[k])) throw Error("ConfigInvalid", std::string(k) + " must be a number");
  if (c.contains("report") && !c["report"].is_string()) throw Error("ConfigInvalid", "report must be a path");
  if (!c.contains("experiments") || !c["experiments"].is_array() || c["experiments"].empty())
    throw Error("ConfigInvalid", "experiments must be a non-empty array");
  for (const auto& e : c["experiments"]) {
    if (!e.is_object() || !e.contains("type") || !e["type"].is_string())
      throw Error("ConfigInvalid", "each experiment needs a string type");
    const std::string t = e["type"].get<std::string>();
    if (!experiment_types().count(t)) throw Error("ConfigInvalid", "unknown experiment type '" + t + "'");
    auto need = [&](const char* k) {
      if (!e.contains(k)) throw Error("ConfigInvalid", t + " needs \"" + k + "\"");
    };
    if (t == "saddle_lifts") need("saddle"), need("lifts");
    if (t == "holonomy") need("saddle"), need("start");
    if (t == "corner") need("saddle"), need("zeta");
    if (t == "integrability") need("spec");
  }
}

inline SuiteResult run_experiment(const json& e, Settings st) {
  const std::string t = e["type"].get<std::string>();
  const int count = static_cast<int>(num(e, "count", 50));
  const double validity = num(e, "validity", st.validity);
  const unsigned long seed = e.contains("seed") ? static_cast<unsigned long>(num(e, "seed", 1)) : st.seed;
  Sampler s(seed);
  if (t == "group_laws") return group_laws(s, count, validity);
  if (t == "unramified_equivalence") return unramified_equivalence(s, count, validity);
  if (t == "exp_log") return exp_log(s, count, validity);
  if (t == "saddle_batch") return saddle_batch(seed, count, num(e, "eps_max", 0.05), st.jobs);

  SuiteResult r;
  r.j = {{"name", t}};
  if (t == "saddle_lifts") {
    const dulac::PreparedSaddle p = saddle_from(e["saddle"]);
    json out = json::array();
    for (const auto& l : e["lifts"]) {
      dulac::LiftOptions lo;
      if (l.contains("stop_on_prediction")) lo.stop_on_prediction = l["stop_on_prediction"].get<bool>();
      dulac::LiftResult lr = dulac::lift_path(p, path_from(l.at("path")), l.contains("w0") ? cnum(l["w0"]) : cplx(1, 0), lo);
      json lj = lift_json(lr, p.lambda);
      r.pass = r.pass && lr.estimate_ok;
      if (l.contains("expect_exit")) r.pass = r.pass && lr.exited == l["expect_exit"].get<bool>();
      out.push_back(lj);
    }
    r.j["lifts"] = out;
  } else if (t == "holonomy") {
    const dulac::PreparedSaddle p = saddle_from(e["saddle"]);
    const std::string which = e.contains("transversal") ? e["transversal"].get<std::string>() : "omega";
    const int laps = static_cast<int>(num(e, "laps", 1));
    bool exited = false;
    try {
      const cplx h = dulac::holonomy_numeric(p, which == "sigma" ? dulac::Transversal::Sigma : dulac::Transversal::Omega,
                                             cnum(e["start"]), laps);
      r.j["value"] = json_of(h);
    } catch (const Error& err) {
      if (err.kind() != "LiftExited") throw;
      exited = true;
      r.j["clause"] = err.what();
    }
    r.j["laps"] = laps;
    if (e.contains("expect_exit")) r.pass = exited == e["expect_exit"].get<bool>();
  } else if (t == "corner") {
    const dulac::PreparedSaddle p = saddle_from(e["saddle"]);
    json out = json::array();
    double worst = 0;
    for (const auto& z : e["zeta"]) {
      const cplx zeta = cnum(z), d = dulac::corner_value(p, zeta);
      worst = std::max(worst, std::abs(d - p.lambda * zeta));
      out.push_back({{"zeta", json_of(zeta)}, {"d", json_of(d)}});
    }
    r.j["values"] = out;
    r.j["max_deviation_from_linear"] = worst;
    if (e.contains("linear_tol")) r.pass = worst <= num(e, "linear_tol", 0);
  } else if (t == "integrability") {
    const auto v = dulac::classify_integrability(loop_spec_from(e["spec"], st));
    r.j["verdict"] = verdict_json(v, st.precision);
    if (e.contains("expect")) r.pass = e["expect"].get<std::string>() == dulac::to_string(v.cls);
  }
  r.j["pass"] = r.pass;
  return r;
}

/// Runs every experiment of the config; the report goes to stdout and, when
/// the config names one, to a file.  Returns the exit code (0 or 1).
inline int run_config(const std::string& path, Settings st, std::ostream& out) {
  const json c = dulac::parse_json(read_file(path));
  validate_config(c);
  if (c.contains("precision")) st.precision = static_cast<int>(num(c, "precision", 50));
  if (c.contains("seed")) st.seed = static_cast<unsigned long>(num(c, "seed", 1));
  if (c.contains("validity")) st.validity = num(c, "validity", 5);
  if (c.contains("jobs")) st.jobs = static_cast<int>(num(c, "jobs", 1));
  dulac::ScopedPrecision prec(st.precision);

  json rep = {{"config", path}, {"precision", st.precision}, {"seed", st.seed}, {"validity", st.validity}};
  json exps = json::array();
  bool pass = true;
  for (const auto& e : c["experiments"]) {
    SuiteResult r;
    try {
      r = run_experiment(e, st);
    } catch (const Error& err) {
      if (err.kind() == "ConfigInvalid") throw;
      r.pass = false;
      r.j = {{"name", e["type"]}, {"pass", false}, {"error", err.what()}};
    }
    pass = pass && r.pass;
    exps.push_back(r.j);
  }
  rep["experiments"] = exps;
  rep["pass"] = pass;
  const std::string text = dulac::dump_json(rep);
  out << text << "\n";
  if (c.contains("report")) {
    std::ofstream f(c["report"].get<std::string>());
    if (!f) throw Error("Usage", "cannot write report " + c["report"].get<std::string>());
    f << text << "\n";
  }
  return pass ? 0 : 1;
}

/// The built-in suite: formal group laws and equivalences plus a saddle batch.
inline int default_suite(const Settings& st, int count, std::ostream& out) {
  dulac::ScopedPrecision prec(st.precision);
  Sampler s(st.seed);
  std::vector<SuiteResult> rs = {group_laws(s, count, st.validity), unramified_equivalence(s, count, st.validity),
                                 exp_log(s, count, st.validity), saddle_batch(st.seed, std::max(1, count / 5), 0.05, st.jobs)};
  json arr = json::array();
  bool pass = true;
  for (const auto& r : rs) {
    arr.push_back(r.j);
    pass = pass && r.pass;
  }
  out << dulac::dump_json(json{{"suites", arr}, {"pass", pass}, {"precision", st.precision}, {"seed", st.seed}}) << "\n";
  return pass ? 0 : 1;
}

}  // namespace cli
