// dulac: command-line front end for the transseries, derivation, germ, saddle
// and loop-germ operations.  Exit codes: 0 success, 1 assertion failure,
// 2 usage, parse or config error.

#include <CLI11.hpp>

#include "cli_common.hpp"
#include "suites.hpp"

using namespace cli;

namespace {

struct Inputs {
  std::vector<std::string> args;
  std::vector<std::string> sections, zetas, xs;
  std::string w0 = "1,0", start = "0,0", transversal = "omega", config, saddle, path, glue;
  long branch = 0;
  int laps = 1, count = 50;
};

using Handler = std::function<int(const Inputs&, const Settings&, Report&)>;

const std::string& arg(const Inputs& in, std::size_t i, const char* what) {
  if (in.args.size() <= i) throw Error("Usage", std::string("missing argument: ") + what);
  return in.args[i];
}

json json_arg(const std::string& a) { return dulac::parse_json(resolve(a)); }

dulac::Section<R> sections_of(const Inputs& in) {
  dulac::Section<R> sec;
  for (const auto& s : in.sections) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw Error("Usage", "--section expects k=re,im");
    sec[std::stol(s.substr(0, eq))] = complex_arg(s.substr(eq + 1));
  }
  return sec;
}

int normal_form(const Inputs& in, const Settings& st, Report& rep) {
  const auto X = derivation_arg(arg(in, 0, "derivation"), st);
  if (dulac::lvar(X).is_zero(dulac::check_tol<R>())) {
    auto nf = dulac::normal_form_unramified(X);
    rep.put("kind", "unramified");
    rep.put("k", nf.k);
    rep.put("mu", nf.mu);
    rep.put("conjugator", nf.conjugator);
    rep.put("remainder", nf.remainder);
  } else {
    auto nf = dulac::normal_form_mildly_ramified(X);
    rep.put("kind", "mildly_ramified");
    rep.put("k", nf.k);
    rep.put("mu", nf.mu);
    rep.put("a", nf.a);
    rep.put("b", nf.b);
    rep.put("conjugator", nf.conjugator);
    rep.put("conjugated", nf.conjugated);
  }
  return 0;
}

int gh(const Inputs& in, const Settings& st, Report& rep) {
  auto [G, H] = dulac::variation_pair(series_arg(arg(in, 0, "series"), st));
  auto v = dulac::gh_dichotomy(G, H);
  rep.put("G", G);
  rep.put("H", H);
  rep.put("verdict", dulac::to_string(v.kind));
  rep.put("k", v.k);
  if (v.kind == dulac::GHKind::EmbeddedFlow) rep.put("nu", v.nu);
  if (v.kind == dulac::GHKind::NonCommuting) {
    rep.put("commutator_degree", v.commutator_degree);
    rep.put("commutator_coef", v.commutator_coef);
  }
  rep.put("checked_degree", v.checked_degree);
  rep.put("formal_only", v.formal_only);
  return 0;
}

int poincare(const Inputs& in, const Settings& st, Report& rep) {
  if (in.glue.empty()) throw Error("Usage", "poincare needs --glue R");
  const auto R_glue = germ_arg(in.glue, st);
  if (!in.saddle.empty()) {
    std::vector<cplx> xs;
    for (const auto& x : in.xs) xs.push_back(to_cplx(complex_arg(x)));
    if (xs.empty()) throw Error("Usage", "numeric poincare needs --x points");
    json out = json::array();
    for (const auto& [x, p] : dulac::poincare_numeric(saddle_from(json_arg(in.saddle)), R_glue, xs))
      out.push_back({{"x", json_of(x)}, {"P", json_of(p)}});
    rep.put("values", out);
    return 0;
  }
  rep.put("P", dulac::poincare_formal(series_arg(arg(in, 0, "corner series"), st), R_glue, in.branch));
  return 0;
}

const std::map<std::string, std::pair<std::string, Handler>>& verbs() {
  static const std::map<std::string, std::pair<std::string, Handler>> v = {
      {"compose", {"f o g of two series", [](const Inputs& in, const Settings& st, Report& rep) {
                     rep.put("result", dulac::compose(series_arg(arg(in, 0, "f"), st), series_arg(arg(in, 1, "g"), st)));
                     return 0;
                   }}},
      {"invert", {"compositional inverse", [](const Inputs& in, const Settings& st, Report& rep) {
                    rep.put("result", dulac::invert(series_arg(arg(in, 0, "f"), st)));
                    return 0;
                  }}},
      {"var", {"variation [tau, f]", [](const Inputs& in, const Settings& st, Report& rep) {
                 rep.put("result", dulac::variation(series_arg(arg(in, 0, "f"), st)));
                 return 0;
               }}},
      {"classify", {"dynamical type and ramification", [](const Inputs& in, const Settings& st, Report& rep) {
                      const auto f = series_arg(arg(in, 0, "f"), st);
                      const auto c = dulac::classify(f);
                      rep.put("type", dulac::to_string(c.type));
                      rep.put("boundary_warning", c.boundary_warning);
                      rep.put("unramified", dulac::is_unramified(f));
                      rep.put("mildly_ramified", dulac::is_mildly_ramified(f));
                      return 0;
                    }}},
      {"normal-form", {"normal form of a derivation", normal_form}},
      {"lvar", {"logarithmic variation of a derivation", [](const Inputs& in, const Settings& st, Report& rep) {
                  rep.put("result", dulac::lvar(derivation_arg(arg(in, 0, "X"), st)));
                  return 0;
                }}},
      {"lvar-inv", {"solve lvar(X) = Z (--section k=re,im fixes constants)", [](const Inputs& in, const Settings& st, Report& rep) {
                      rep.put("result", dulac::lvar_inverse(derivation_arg(arg(in, 0, "Z"), st), sections_of(in)));
                      return 0;
                    }}},
      {"exp", {"time-one map of a derivation", [](const Inputs& in, const Settings& st, Report& rep) {
                 rep.put("result", dulac::exp_derivation(derivation_arg(arg(in, 0, "X"), st)));
                 return 0;
               }}},
      {"log", {"infinitesimal generator of a tangent series", [](const Inputs& in, const Settings& st, Report& rep) {
                 rep.put("result", dulac::log_series(series_arg(arg(in, 0, "f"), st)));
                 return 0;
               }}},
      {"project", {"germ of an unramified series", [](const Inputs& in, const Settings& st, Report& rep) {
                     rep.put("result", dulac::project_pi(series_arg(arg(in, 0, "f"), st)));
                     return 0;
                   }}},
      {"lift", {"lift of a germ (--branch n)", [](const Inputs& in, const Settings& st, Report& rep) {
                  rep.put("result", dulac::lift_pi(germ_arg(arg(in, 0, "germ"), st), in.branch));
                  return 0;
                }}},
      {"conjugate-model", {"conjugation to az or z + b", [](const Inputs& in, const Settings& st, Report& rep) {
                             const auto f = series_arg(arg(in, 0, "f"), st);
                             const auto mc = dulac::conjugate_to_model(f);
                             rep.put("model", mc.model.kind == dulac::ModelGerm<R>::Kind::Scaling ? "scaling" : "translation");
                             rep.put("param", mc.model.param);
                             rep.put("phi", mc.phi);
                             rep.put("residual", dulac::json_number(dulac::model_residual(f, mc), 6));
                             return 0;
                           }}},
      {"gh", {"variation pair and its dichotomy", gh}},
      {"lift-path", {"lift a path on a prepared saddle (--saddle, --path, --w0)", [](const Inputs& in, const Settings&, Report& rep) {
                       if (in.saddle.empty() || in.path.empty()) throw Error("Usage", "lift-path needs --saddle and --path");
                       const auto s = saddle_from(json_arg(in.saddle));
                       const auto r = dulac::lift_path(s, path_from(json_arg(in.path)), to_cplx(complex_arg(in.w0)));
                       const json j = lift_json(r, s.lambda);
                       for (const auto& [k, v] : j.items()) rep.put(k, v);
                       return 0;
                     }}},
      {"corner", {"canonical corner transition (--saddle, --zeta ...)", [](const Inputs& in, const Settings&, Report& rep) {
                    if (in.saddle.empty() || in.zetas.empty()) throw Error("Usage", "corner needs --saddle and --zeta");
                    const auto s = saddle_from(json_arg(in.saddle));
                    json out = json::array();
                    for (const auto& z : in.zetas) {
                      const cplx zeta = to_cplx(complex_arg(z));
                      out.push_back({{"zeta", json_of(zeta)}, {"d", json_of(dulac::corner_value(s, zeta))}});
                    }
                    rep.put("values", out);
                    return 0;
                  }}},
      {"holonomy", {"separatrix holonomy (--saddle, --transversal, --start, --laps)", [](const Inputs& in, const Settings&, Report& rep) {
                      if (in.saddle.empty()) throw Error("Usage", "holonomy needs --saddle");
                      const auto which = in.transversal == "sigma" ? dulac::Transversal::Sigma : dulac::Transversal::Omega;
                      if (in.transversal != "sigma" && in.transversal != "omega") throw Error("Usage", "--transversal is omega or sigma");
                      rep.put("value", json_of(dulac::holonomy_numeric(saddle_from(json_arg(in.saddle)), which,
                                                                       to_cplx(complex_arg(in.start)), in.laps)));
                      rep.put("laps", in.laps);
                      return 0;
                    }}},
      {"poincare", {"P = R o d: formal (corner series) or numeric (--saddle, --x)", poincare}},
      {"integrability", {"classify a loop germ given as JSON", [](const Inputs& in, const Settings& st, Report& rep) {
                           const auto v = dulac::classify_integrability(loop_spec_from(json_arg(arg(in, 0, "loop spec")), st));
                           const json j = verdict_json(v, st.precision);
                           for (const auto& [k, x] : j.items()) rep.put(k, x);
                           return 0;
                         }}},
  };
  return v;
}

int exit_code_for(const Error& e) {
  // inputs that violate a precondition are a usage problem, not an assertion failure
  (void)e;
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Formal and numeric tools for Dulac series, saddle transitions and loop germs"};
  app.require_subcommand(1);
  app.fallthrough();

  Settings st;
  std::string format = "json";
  try {
    st.precision = default_precision();
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  app.add_option("--precision", st.precision, "working precision in decimal digits (default $DULAC_PRECISION or 50)");
  app.add_option("--validity", st.validity, "validity order for text inputs without O(E[...])");
  app.add_option("--degree", st.degree, "truncation degree of germs");
  app.add_option("--seed", st.seed, "seed of the randomized suites");
  app.add_option("--jobs", st.jobs, "worker threads for saddle batches")->check(CLI::Range(1, 256));
  app.add_option("--format", format, "output format")->check(CLI::IsMember({"json", "csv", "text"}));

  Inputs in;
  std::string chosen;
  for (const auto& [name, v] : verbs()) {
    CLI::App* sub = app.add_subcommand(name, v.first);
    sub->add_option("inputs", in.args, "series, derivations or germs: inline text, JSON, or @file");
    sub->callback([&chosen, n = name] { chosen = n; });
    if (name == "lvar-inv") sub->add_option("--section", in.sections, "constant term k=re,im of the solved polynomial at e^{-kz}");
    if (name == "lift" || name == "poincare") sub->add_option("--branch", in.branch, "branch of the lift");
    if (name == "lift-path" || name == "corner" || name == "holonomy" || name == "poincare")
      sub->add_option("--saddle", in.saddle, "prepared saddle as JSON or @file");
    if (name == "lift-path") {
      sub->add_option("--path", in.path, "path as JSON or @file");
      sub->add_option("--w0", in.w0, "start value of w = -log y");
    }
    if (name == "corner") sub->add_option("--zeta", in.zetas, "Sigma points re,im");
    if (name == "holonomy") {
      sub->add_option("--transversal", in.transversal, "omega or sigma");
      sub->add_option("--start", in.start, "start point re,im");
      sub->add_option("--laps", in.laps, "signed number of turns");
    }
    if (name == "poincare") {
      sub->add_option("--glue", in.glue, "gluing germ R");
      sub->add_option("--x", in.xs, "numeric mode: points re,im in the x chart");
    }
  }
  CLI::App* suite = app.add_subcommand("check-suite", "property suites, or the experiments of a JSON config");
  suite->add_option("--config", in.config, "experiment config (schemas/config.v1.json)");
  suite->add_option("--count", in.count, "cases per built-in suite");
  suite->callback([&chosen] { chosen = "check-suite"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  st.format = format == "csv" ? Format::Csv : format == "text" ? Format::Text : Format::Json;

  try {
    if (chosen == "check-suite") return in.config.empty() ? default_suite(st, in.count, std::cout) : run_config(in.config, st, std::cout);
    dulac::ScopedPrecision prec(st.precision);
    Report rep(st);
    const int rc = verbs().at(chosen).second(in, st, rep);
    rep.emit(std::cout);
    return rc;
  } catch (const Error& e) {
    std::cerr << dulac::dump_json(json{{"error", e.kind()}, {"message", e.what()}}, -1) << "\n";
    return exit_code_for(e);
  } catch (const std::invalid_argument& e) {
    std::cerr << dulac::dump_json(json{{"error", "Usage"}, {"message", e.what()}}, -1) << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << dulac::dump_json(json{{"error", "Internal"}, {"message", e.what()}}, -1) << "\n";
    return 2;
  }
}
