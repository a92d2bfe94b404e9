#pragma once

// Shared plumbing for the dulac command line: inputs, reports, saddle data.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dulac/dulac.hpp"

namespace cli {

using R = dulac::mp_real;
using C = dulac::Complex<R>;
using dulac::Error;
using dulac::json;
using cplx = std::complex<double>;

enum class Format { Json, Csv, Text };

struct Settings {
  int precision = 50;
  double validity = 5;
  int degree = -1;
  unsigned long seed = 1;
  int jobs = 1;
  Format format = Format::Json;
};

inline int default_precision() {
  if (const char* env = std::getenv("DULAC_PRECISION")) {
    try {
      return std::stoi(env);
    } catch (...) {
      throw Error("Usage", std::string("DULAC_PRECISION is not an integer: ") + env);
    }
  }
  return 50;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("Usage", "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// "@path" reads the file; anything else is the inline text.
inline std::string resolve(const std::string& arg) { return !arg.empty() && arg[0] == '@' ? read_file(arg.substr(1)) : arg; }

inline bool looks_like_json(const std::string& s) {
  auto p = s.find_first_not_of(" \t\r\n");
  return p != std::string::npos && (s[p] == '{' || s[p] == '[');
}

inline dulac::DulacSeries<R> series_from(const json& j, const Settings& st) {
  if (j.is_string()) return dulac::parse_series<R>(j.get<std::string>(), R(st.validity));
  return dulac::series_from_json<R>(j);
}

inline dulac::DulacSeries<R> series_arg(const std::string& arg, const Settings& st) {
  const std::string s = resolve(arg);
  return looks_like_json(s) ? dulac::series_from_json<R>(dulac::parse_json(s)) : dulac::parse_series<R>(s, R(st.validity));
}

inline dulac::NilpotentDerivation<R> derivation_arg(const std::string& arg, const Settings& st) {
  const std::string s = resolve(arg);
  return looks_like_json(s) ? dulac::derivation_from_json<R>(dulac::parse_json(s))
                            : dulac::parse_derivation<R>(s, R(st.validity));
}

inline dulac::DiffeoGerm<R> germ_from(const json& j, const Settings& st) {
  if (j.is_string()) return dulac::parse_germ<R>(j.get<std::string>(), st.degree);
  return dulac::germ_from_json<R>(j);
}

inline dulac::DiffeoGerm<R> germ_arg(const std::string& arg, const Settings& st) {
  const std::string s = resolve(arg);
  return looks_like_json(s) ? dulac::germ_from_json<R>(dulac::parse_json(s)) : dulac::parse_germ<R>(s, st.degree);
}

/// "re,im" or "re".
inline C complex_arg(const std::string& s) {
  const auto comma = s.find(',');
  try {
    if (comma == std::string::npos) return C(dulac::parse_real<R>(s));
    return {dulac::parse_real<R>(s.substr(0, comma)), dulac::parse_real<R>(s.substr(comma + 1))};
  } catch (const Error&) {
    throw Error("Usage", "not a complex number: " + s);
  }
}

inline cplx to_cplx(const C& c) { return dulac::to_std(c); }

// ---------------------------------------------------------------------------
// saddles and paths from JSON

inline double num(const json& j, const char* key, double fallback) {
  return j.contains(key) ? dulac::json_real<double>(j[key]) : fallback;
}

inline cplx cnum(const json& v) { return to_cplx(dulac::json_complex<R>(v)); }

inline dulac::PreparedSaddle saddle_from(const json& j) {
  if (!j.is_object()) throw Error("ConfigInvalid", "saddle must be an object");
  if (!j.contains("lambda")) throw Error("ConfigInvalid", "saddle needs lambda");
  dulac::PreparedSaddle s;
  s.lambda = num(j, "lambda", 1);
  s.n = j.contains("n") ? static_cast<int>(num(j, "n", 1)) : std::max(1, static_cast<int>(std::ceil(s.lambda)));
  s.eps = num(j, "eps", 0);
  s.A = num(j, "A", 1);
  s.B = num(j, "B", 1);
  s.sigma = num(j, "sigma", 0.5);
  if (j.contains("K")) {
    if (!j["K"].is_array()) throw Error("ConfigInvalid", "K must be an array of {i, j, c}");
    for (const auto& t : j["K"]) {
      if (!t.is_object() || !t.contains("i") || !t.contains("j") || !t.contains("c"))
        throw Error("ConfigInvalid", "K terms need i, j and c");
      s.K[{static_cast<int>(num(t, "i", 0)), static_cast<int>(num(t, "j", 0))}] += cnum(t["c"]);
    }
  }
  s.validate();
  return s;
}

inline dulac::PathSpec path_from(const json& j) {
  using dulac::PathSpec;
  if (!j.is_object() || !j.contains("kind")) throw Error("ConfigInvalid", "path needs a kind");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "radial") return PathSpec::radial(j.contains("x0") ? cnum(j["x0"]) : cplx(1, 0), num(j, "T", 1));
  if (kind == "circular") {
    const double T = j.contains("laps") ? 2 * std::numbers::pi * num(j, "laps", 1) : num(j, "T", 2 * std::numbers::pi);
    return PathSpec::circular(j.contains("z0") ? cnum(j["z0"]) : cplx(0, 0), T);
  }
  if (kind == "exponential")
    return PathSpec::exponential(num(j, "alpha", 0), static_cast<int>(num(j, "C", 1)), num(j, "T", 1),
                                 j.contains("backward") && j["backward"].get<bool>());
  if (kind == "polyline") {
    if (!j.contains("points") || !j["points"].is_array()) throw Error("ConfigInvalid", "polyline needs points");
    std::vector<cplx> pts;
    for (const auto& p : j["points"]) pts.push_back(cnum(p));
    return PathSpec::polyline(pts);
  }
  throw Error("ConfigInvalid", "unknown path kind '" + kind + "'");
}

inline json json_of(const cplx& z) { return json::array({z.real(), z.imag()}); }

inline json lift_json(const dulac::LiftResult& r, double lambda) {
  json j = {{"exited", r.exited},
            {"length", r.length},
            {"z_end", json_of(r.z_end)},
            {"w_end", json_of(r.w_end(lambda))},
            {"estimate_ok", r.estimate_ok},
            {"estimate_slack", r.estimate_slack},
            {"steps", r.steps},
            {"prediction_disagrees", r.disagreement}};
  if (r.exited) j["clause"] = "LiftExited: " + r.exit_clause;
  return j;
}

// ---------------------------------------------------------------------------
// round-off below eps_coeff is printed as zero

inline C chop(C c) {
  const R& e = dulac::eps_coeff<R>();
  if (abs(c.re) <= e) c.re = 0;
  if (abs(c.im) <= e) c.im = 0;
  return c;
}
inline void chop(dulac::PolExp<R>& T) {
  for (auto& t : T.terms)
    for (auto& c : t.p) c = chop(c);
}
inline dulac::DulacSeries<R> chop(dulac::DulacSeries<R> f) {
  f.b = chop(f.b);
  chop(f.tail);
  return f;
}
inline dulac::NilpotentDerivation<R> chop(dulac::NilpotentDerivation<R> X) {
  chop(X.terms);
  return X;
}
inline dulac::DiffeoGerm<R> chop(dulac::DiffeoGerm<R> g) {
  for (auto& c : g.c) c = chop(c);
  return g;
}

// ---------------------------------------------------------------------------
// reports: one JSON object, with text renderings kept alongside for text/csv

class Report {
 public:
  explicit Report(const Settings& st) : st_(st) {}

  void put(const std::string& key, const json& value, std::string text = {}) {
    j_[key] = value;
    if (text.empty()) text = value.is_string() ? value.get<std::string>() : dulac::dump_json(value, -1);
    if (text.rfind(dulac::io_detail::kRawTag, 0) == 0) text = text.substr(dulac::io_detail::kRawTag.size());
    order_.emplace_back(key, std::move(text));
  }
  void put(const std::string& key, const dulac::DulacSeries<R>& raw) {
    const auto f = chop(raw);
    put(key, dulac::to_json(f, st_.precision), dulac::format_series(f, st_.precision));
    validity_ = dulac::format_real(f.validity, 17);
  }
  void put(const std::string& key, const dulac::NilpotentDerivation<R>& raw) {
    const auto X = chop(raw);
    put(key, dulac::to_json(X, st_.precision), dulac::format_derivation(X, st_.precision));
    validity_ = dulac::format_real(X.validity, 17);
  }
  void put(const std::string& key, const dulac::DiffeoGerm<R>& raw) {
    const auto g = chop(raw);
    put(key, dulac::to_json(g, st_.precision), dulac::format_germ(g, st_.precision));
  }
  void put(const std::string& key, const C& raw) {
    const C c = chop(raw);
    put(key, dulac::json_of(c, st_.precision), dulac::io_detail::coef_text(c, st_.precision));
  }

  template <class T>
    requires std::is_arithmetic_v<T>
  void put(const std::string& key, T v) {
    put(key, json(v));
  }
  void put(const std::string& key, const char* v) { put(key, json(v)); }

  void emit(std::ostream& out) {
    json meta = {{"precision", st_.precision}};
    if (!validity_.empty()) meta["validity"] = dulac::io_detail::kRawTag + validity_;
    if (st_.degree > 0) meta["degree"] = st_.degree;
    switch (st_.format) {
      case Format::Json: {
        json all = j_;
        all["meta"] = meta;
        out << dulac::dump_json(all) << "\n";
        break;
      }
      case Format::Text:
        for (const auto& [k, v] : order_) out << k << ": " << v << "\n";
        out << "precision: " << st_.precision << "\n";
        if (!validity_.empty()) out << "validity: " << validity_ << "\n";
        break;
      case Format::Csv: {
        std::string head, row;
        for (const auto& [k, v] : order_) {
          head += k + ",";
          row += quote(v) + ",";
        }
        head += "precision";
        row += std::to_string(st_.precision);
        if (!validity_.empty()) {
          head += ",validity";
          row += "," + validity_;
        }
        out << head << "\n" << row << "\n";
        break;
      }
    }
  }

 private:
  static std::string quote(const std::string& s) {
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
  }

  Settings st_;
  json j_ = json::object();
  std::vector<std::pair<std::string, std::string>> order_;
  std::string validity_;
};

}  // namespace cli
