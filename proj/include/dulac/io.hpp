#pragma once

// Text and JSON forms of series, derivations and germs.
//
// Text grammar (whitespace-insensitive):
//   expr    := ['+'|'-'] product (('+'|'-') product)*
//   product := factor ('*' factor)*
//   factor  := number | '(' number ',' number ')' | VAR ['^' integer]
//            | 'E[' number ']' | '(' expr ')'
// VAR is 'z' for series and derivations, 'x' for germs.  E[l] is e^{-l z}.
// One remainder summand may appear: O(E[L]) sets the validity of a series or
// derivation, O(x^n) the order n - 1 of a germ.

#include <cctype>
#include <map>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "dulac/diffeo.hpp"

namespace dulac {

namespace io_detail {

/// Expanded expression: (lambda, z-power) -> coefficient.
template <class R>
struct Expansion {
  struct Key {
    R lambda;
    int power;
  };
  std::vector<std::pair<Key, Complex<R>>> items;
  std::optional<R> validity;
  std::optional<int> order;  // O(x^n): germ known through x^{n-1}

  void add(const R& l, int p, const Complex<R>& c) {
    for (auto& [k, v] : items)
      if (k.power == p && same_key(k.lambda, l)) {
        v += c;
        return;
      }
    items.push_back({{l, p}, c});
  }
  static Expansion scalar(const Complex<R>& c) {
    Expansion e;
    e.add(R(0), 0, c);
    return e;
  }
};

template <class R>
Expansion<R> product(const Expansion<R>& A, const Expansion<R>& B) {
  Expansion<R> r;
  for (const auto& [ka, va] : A.items)
    for (const auto& [kb, vb] : B.items) r.add(ka.lambda + kb.lambda, ka.power + kb.power, va * vb);
  return r;
}

template <class R>
class Parser {
 public:
  Parser(const std::string& s, char var) : s_(s), var_(var) {}

  Expansion<R> parse() {
    Expansion<R> e = expr(true);
    skip();
    if (pos_ != s_.size()) fail("'+', '-' or end of input");
    return e;
  }

 private:
  const std::string& s_;
  char var_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& expected) const {
    std::string got = pos_ < s_.size() ? std::string("'") + s_[pos_] + "'" : std::string("end of input");
    throw Error("ParseError", "at position " + std::to_string(pos_) + ": expected " + expected + ", got " + got);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("'") + c + "'");
  }
  bool peek_number() {
    skip();
    if (pos_ >= s_.size()) return false;
    char c = s_[pos_];
    return std::isdigit(static_cast<unsigned char>(c)) || c == '.';
  }
  std::string number_text(bool allow_sign) {
    skip();
    std::size_t start = pos_;
    if (allow_sign && pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) ++pos_;
    bool digits = false;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_, digits = true;
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_, digits = true;
    }
    if (!digits) {
      pos_ = start;
      fail("number");
    }
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E') && pos_ + 1 < s_.size() &&
        (std::isdigit(static_cast<unsigned char>(s_[pos_ + 1])) || s_[pos_ + 1] == '-' || s_[pos_ + 1] == '+')) {
      ++pos_;
      if (s_[pos_] == '-' || s_[pos_] == '+') ++pos_;
      std::size_t d0 = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (pos_ == d0) fail("exponent digits");
    }
    return s_.substr(start, pos_ - start);
  }
  R number(bool allow_sign = false) { return parse_real<R>(number_text(allow_sign)); }
  R bracket_key() {
    expect('[');
    R l = number();
    expect(']');
    return l;
  }

  Expansion<R> expr(bool top) {
    Expansion<R> e;
    bool first = true;
    for (;;) {
      skip();
      R sign(1);
      if (accept('-')) {
        sign = R(-1);
      } else if (!accept('+') && !first) {
        break;
      }
      first = false;
      skip();
      if (top && s_.compare(pos_, 2, "O(") == 0) {
        pos_ += 2;
        skip();
        if (e.validity || e.order) fail("a single O(...) term");
        if (var_ == 'x') {
          if (!accept('x')) fail("'x'");
          expect('^');
          const int n = std::stoi(number_text(false));
          if (n < 2) fail("an order of at least 2");
          e.order = n;
        } else {
          if (!accept('E')) fail("'E'");
          e.validity = bracket_key();
        }
        expect(')');
        continue;
      }
      Expansion<R> p = product();
      for (const auto& [k, v] : p.items) e.add(k.lambda, k.power, v * sign);
    }
    return e;
  }

  Expansion<R> product() {
    Expansion<R> p = factor();
    while (accept('*')) p = io_detail::product(p, factor());
    return p;
  }

  Expansion<R> factor() {
    skip();
    if (pos_ >= s_.size()) fail("factor");
    const char c = s_[pos_];
    if (c == var_) {
      ++pos_;
      int pw = 1;
      if (accept('^')) {
        std::string t = number_text(false);
        pw = std::stoi(t);
      }
      Expansion<R> e;
      e.add(R(0), pw, Complex<R>(R(1)));
      return e;
    }
    if (c == 'E') {
      ++pos_;
      R l = bracket_key();
      Expansion<R> e;
      e.add(l, 0, Complex<R>(R(1)));
      return e;
    }
    if (c == '(') {
      ++pos_;
      // complex literal or parenthesized expression
      std::size_t save = pos_;
      skip();
      if (peek_number() || (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+'))) {
        std::size_t before = pos_;
        try {
          R re = number(true);
          if (accept(',')) {
            R im = number(true);
            expect(')');
            return Expansion<R>::scalar(Complex<R>(re, im));
          }
        } catch (const Error&) {
        }
        pos_ = before;
      }
      pos_ = save;
      Expansion<R> e = expr(false);
      expect(')');
      return e;
    }
    if (peek_number()) return Expansion<R>::scalar(Complex<R>(number()));
    fail(std::string("number, '(', 'E[' or '") + var_ + "'");
  }
};

template <class R>
std::string coef_text(const Complex<R>& c, int digits) {
  return "(" + format_real(c.re, digits) + "," + format_real(c.im, digits) + ")";
}

template <class R>
std::string poly_text(const Poly<R>& p, int digits, const char* var) {
  std::string out;
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (is_zero(p[j], R(0)) && p.size() > 1) continue;
    if (!out.empty()) out += " + ";
    out += coef_text(p[j], digits);
    if (j >= 1) out += std::string("*") + var;
    if (j >= 2) out += "^" + std::to_string(j);
  }
  return out.empty() ? coef_text(Complex<R>(), digits) : out;
}

template <class R>
void fill_tail(PolExp<R>& tail, const Expansion<R>& e) {
  for (const auto& [k, v] : e.items) {
    if (!(k.lambda > 0)) continue;
    if (k.power < 0) throw Error("ParseError", "negative power of z");
    Poly<R>& p = tail.slot(k.lambda);
    if (p.size() <= static_cast<std::size_t>(k.power)) p.resize(static_cast<std::size_t>(k.power) + 1);
    p[static_cast<std::size_t>(k.power)] += v;
  }
}

}  // namespace io_detail

// ---------------------------------------------------------------------------
// text

template <class R>
DulacSeries<R> parse_series(const std::string& text, const R& default_validity = R(5)) {
  io_detail::Parser<R> ps(text, 'z');
  auto e = ps.parse();
  DulacSeries<R> f;
  f.a = R(0);
  f.validity = e.validity ? *e.validity : default_validity;
  for (const auto& [k, v] : e.items) {
    if (k.lambda < 0) throw Error("ParseError", "negative exponent key");
    if (k.lambda > 0) continue;
    if (k.power == 0) {
      f.b += v;
    } else if (k.power == 1) {
      if (abs(v.im) > R(0)) throw Error("ParseError", "multiplier of z must be real");
      f.a += v.re;
    } else {
      throw Error("ParseError", "z^" + std::to_string(k.power) + " without an exponential factor");
    }
  }
  if (!(f.a > 0)) throw Error("ParseError", "the multiplier of z must be positive");
  io_detail::fill_tail(f.tail, e);
  f.normalize();
  return f;
}

template <class R>
std::string format_series(const DulacSeries<R>& f, int digits = real_traits<R>::digits()) {
  std::string out = format_real(f.a, digits) + "*z + " + io_detail::coef_text(f.b, digits);
  for (const auto& t : f.tail.terms)
    out += " + (" + io_detail::poly_text(t.p, digits, "z") + ")*E[" + format_real(t.lambda, digits) + "]";
  out += " + O(E[" + format_real(f.validity, digits) + "])";
  return out;
}

/// Derivations use the same grammar; the text is the coefficient of d/dz.
template <class R>
NilpotentDerivation<R> parse_derivation(const std::string& text, const R& default_validity = R(5)) {
  io_detail::Parser<R> ps(text, 'z');
  auto e = ps.parse();
  NilpotentDerivation<R> X;
  X.validity = e.validity ? *e.validity : default_validity;
  for (const auto& [k, v] : e.items)
    if (!(k.lambda > 0) && abs(v) > R(0)) throw Error("ParseError", "derivation terms need a key lambda > 0");
  io_detail::fill_tail(X.terms, e);
  X.normalize();
  return X;
}

template <class R>
std::string format_derivation(const NilpotentDerivation<R>& X, int digits = real_traits<R>::digits()) {
  std::string out;
  for (const auto& t : X.terms.terms) {
    if (!out.empty()) out += " + ";
    out += "(" + io_detail::poly_text(t.p, digits, "z") + ")*E[" + format_real(t.lambda, digits) + "]";
  }
  if (out.empty()) out = "0";
  return out + " + O(E[" + format_real(X.validity, digits) + "])";
}

/// Germs: polynomial in x; the order is N (or the highest power present).
template <class R>
DiffeoGerm<R> parse_germ(const std::string& text, int order = -1) {
  io_detail::Parser<R> ps(text, 'x');
  auto e = ps.parse();
  int top = 1;
  for (const auto& [k, v] : e.items) {
    if (k.lambda != R(0)) throw Error("ParseError", "E[...] is not allowed in a germ");
    if (k.power < 0) throw Error("ParseError", "negative power of x");
    if (k.power == 0 && abs(v) > R(0)) throw Error("ParseError", "germ must fix 0");
    top = std::max(top, k.power);
  }
  const int N = order >= 1 ? order : e.order ? *e.order - 1 : top;
  DiffeoGerm<R> g;
  g.order = N;
  g.c.assign(static_cast<std::size_t>(N + 1), Complex<R>());
  for (const auto& [k, v] : e.items)
    if (k.power <= N) g.c[static_cast<std::size_t>(k.power)] += v;
  return g;
}

template <class R>
std::string format_germ(const DiffeoGerm<R>& g, int digits = real_traits<R>::digits()) {
  Poly<R> p(g.c.begin(), g.c.end());
  std::string out = io_detail::poly_text(p, digits, "x");
  return out + " + O(x^" + std::to_string(g.order + 1) + ")";
}

// ---------------------------------------------------------------------------
// JSON.  Numbers are read from their source text (not through double) and
// written back as raw number tokens at full precision.

using json = nlohmann::json;

namespace io_detail {

inline const std::string kRawTag = "\x01num:";

/// SAX builder that keeps every number as its source text.
class RawNumberSax : public nlohmann::json_sax<json> {
 public:
  json root;

  bool null() override { return put(json()); }
  bool boolean(bool v) override { return put(v); }
  bool number_integer(number_integer_t v) override { return put(kRawTag + std::to_string(v)); }
  bool number_unsigned(number_unsigned_t v) override { return put(kRawTag + std::to_string(v)); }
  bool number_float(number_float_t, const string_t& s) override { return put(kRawTag + s); }
  bool string(string_t& v) override { return put(v); }
  bool binary(binary_t&) override { return false; }
  bool start_object(std::size_t) override { return open(json::object()); }
  bool end_object() override { return close(); }
  bool start_array(std::size_t) override { return open(json::array()); }
  bool end_array() override { return close(); }
  bool key(string_t& k) override {
    key_ = k;
    return true;
  }
  bool parse_error(std::size_t pos, const std::string&, const nlohmann::detail::exception& ex) override {
    throw Error("ConfigInvalid", "malformed JSON at byte " + std::to_string(pos) + ": " + ex.what());
  }

 private:
  std::vector<json*> stack_;
  std::string key_;

  json* slot() {
    if (stack_.empty()) return &root;
    json* top = stack_.back();
    if (top->is_array()) {
      top->push_back(json());
      return &top->back();
    }
    return &(*top)[key_];
  }
  bool put(json v) {
    *slot() = std::move(v);
    return true;
  }
  bool open(json v) {
    json* s = slot();
    *s = std::move(v);
    stack_.push_back(s);
    return true;
  }
  bool close() {
    stack_.pop_back();
    return true;
  }
};

}  // namespace io_detail

inline json parse_json(const std::string& text) {
  io_detail::RawNumberSax sax;
  json::sax_parse(text, &sax);
  return sax.root;
}

/// Number from a JSON value: raw number, number or numeric string.
template <class R>
R json_real(const json& v) {
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    if (s.rfind(io_detail::kRawTag, 0) == 0) s = s.substr(io_detail::kRawTag.size());
    try {
      return parse_real<R>(s);
    } catch (...) {
      throw Error("ConfigInvalid", "not a number: " + s);
    }
  }
  if (v.is_number()) return R(v.get<double>());
  throw Error("ConfigInvalid", "expected a number");
}

inline bool json_is_number(const json& v) {
  return v.is_number() || (v.is_string() && v.get<std::string>().rfind(io_detail::kRawTag, 0) == 0);
}

template <class R>
json json_number(const R& x, int digits = real_traits<R>::digits()) {
  return io_detail::kRawTag + format_real(x, digits);
}

template <class R>
Complex<R> json_complex(const json& v) {
  if (v.is_array() && v.size() == 2) return {json_real<R>(v[0]), json_real<R>(v[1])};
  if (json_is_number(v)) return Complex<R>(json_real<R>(v));
  throw Error("ConfigInvalid", "expected [re, im]");
}

template <class R>
json json_of(const Complex<R>& c, int digits = real_traits<R>::digits()) {
  return json::array({json_number(c.re, digits), json_number(c.im, digits)});
}

/// Serializes with raw number tokens.
inline std::string dump_json(const json& j, int indent = 2) {
  std::string s = j.dump(indent);
  static const std::regex raw("\"\\\\u0001num:([^\"]*)\"");
  return std::regex_replace(s, raw, "$1");
}

namespace io_detail {

template <class R>
json terms_json(const PolExp<R>& T, int digits) {
  json arr = json::array();
  for (const auto& t : T.terms) {
    json poly = json::array();
    for (const auto& c : t.p) poly.push_back(json_of(c, digits));
    arr.push_back({{"lambda", json_number(t.lambda, digits)}, {"poly", poly}});
  }
  return arr;
}

template <class R>
void terms_from_json(PolExp<R>& T, const json& arr) {
  if (!arr.is_array()) throw Error("ConfigInvalid", "\"terms\" must be an array");
  for (const auto& t : arr) {
    if (!t.contains("lambda") || !t.contains("poly")) throw Error("ConfigInvalid", "term needs lambda and poly");
    R l = json_real<R>(t["lambda"]);
    if (!(l > 0)) throw Error("ConfigInvalid", "term keys must be positive");
    Poly<R> p;
    for (const auto& c : t["poly"]) p.push_back(json_complex<R>(c));
    T.add(l, p);
  }
}

}  // namespace io_detail

template <class R>
json to_json(const DulacSeries<R>& f, int digits = real_traits<R>::digits()) {
  return {{"multiplier", json_number(f.a, digits)},
          {"constant", json_of(f.b, digits)},
          {"terms", io_detail::terms_json(f.tail, digits)},
          {"validity", json_number(f.validity, digits)}};
}

template <class R>
DulacSeries<R> series_from_json(const json& j) {
  if (!j.is_object()) throw Error("ConfigInvalid", "series must be an object");
  DulacSeries<R> f;
  f.a = j.contains("multiplier") ? json_real<R>(j["multiplier"]) : R(1);
  if (!(f.a > 0)) throw Error("ConfigInvalid", "multiplier must be positive");
  f.b = j.contains("constant") ? json_complex<R>(j["constant"]) : Complex<R>();
  f.validity = j.contains("validity") ? json_real<R>(j["validity"]) : R(5);
  if (j.contains("terms")) io_detail::terms_from_json(f.tail, j["terms"]);
  f.normalize();
  return f;
}

template <class R>
json to_json(const NilpotentDerivation<R>& X, int digits = real_traits<R>::digits()) {
  return {{"terms", io_detail::terms_json(X.terms, digits)}, {"validity", json_number(X.validity, digits)}};
}

template <class R>
NilpotentDerivation<R> derivation_from_json(const json& j) {
  if (!j.is_object()) throw Error("ConfigInvalid", "derivation must be an object");
  NilpotentDerivation<R> X;
  X.validity = j.contains("validity") ? json_real<R>(j["validity"]) : R(5);
  if (j.contains("terms")) io_detail::terms_from_json(X.terms, j["terms"]);
  X.normalize();
  return X;
}

template <class R>
json to_json(const DiffeoGerm<R>& g, int digits = real_traits<R>::digits()) {
  json arr = json::array();
  for (const auto& c : g.c) arr.push_back(json_of(c, digits));
  return {{"coeffs", arr}, {"order", g.order}};
}

template <class R>
DiffeoGerm<R> germ_from_json(const json& j) {
  if (!j.is_object() || !j.contains("coeffs")) throw Error("ConfigInvalid", "germ needs \"coeffs\"");
  DiffeoGerm<R> g;
  for (const auto& c : j["coeffs"]) g.c.push_back(json_complex<R>(c));
  g.order = j.contains("order") ? static_cast<int>(json_real<double>(j["order"])) : static_cast<int>(g.c.size()) - 1;
  g.c.resize(static_cast<std::size_t>(g.order + 1));
  return g;
}

}  // namespace dulac
