#include "support.hpp"

using namespace dulac;
using namespace t;

namespace {

std::string parse_message(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("parse_series: the grammar") {
  S f = series("2*z + (1,-0.5) + 3*E[1] + (0,1)*z^2*E[1.5] - E[1] + O(E[3])");
  CHECK(f.a == M(2));
  CHECK(close(f.b, c(1, -0.5)));
  CHECK(close(coef(f.tail, 1), c(2)));
  CHECK(close(coef(f.tail, 1.5, 2), c(0, 1)));
  CHECK(f.validity == M(3));

  S g = series("z + (z + 1)*(z - 1)*E[2]", 4);
  CHECK(close(coef(g.tail, 2, 2), c(1)));
  CHECK(close(coef(g.tail, 2, 0), c(-1)));
  CHECK(close(coef(g.tail, 2, 1), CM()));
  CHECK(g.validity == M(4));

  // products of exponentials add keys; terms beyond the validity are dropped
  S h = series("z + E[1]*E[0.5] + E[7] + O(E[2])");
  CHECK(close(coef(h.tail, 1.5), c(1)));
  CHECK(h.tail.size() == 1);

  // full-precision literals survive parsing
  S p = series("z + 0.1234567890123456789012345678901234567890123*E[1]", 2);
  CHECK(close(coef(p.tail, 1), CM(M("0.1234567890123456789012345678901234567890123")), M("1e-45")));
}

TEST_CASE("parse_series: errors carry positions") {
  CHECK(kind_of([] { series("z + "); }) == "ParseError");
  CHECK(parse_message([] { series("z + *E[1]"); }).find("position 4") != std::string::npos);
  CHECK(parse_message([] { series("z + E[1"); }).find("']'") != std::string::npos);
  CHECK(kind_of([] { series("z^2"); }) == "ParseError");
  CHECK(kind_of([] { series("(0,1)*z"); }) == "ParseError");
  CHECK(kind_of([] { series("z + y"); }) == "ParseError");
  CHECK(kind_of([] { series("-z + E[1]"); }) == "ParseError");
  CHECK(kind_of([] { series("E[1]"); }) == "ParseError");
  CHECK(kind_of([] { derivation("1 + E[1]"); }) == "ParseError");
  CHECK(kind_of([] { parse_germ<M>("1 + x"); }) == "ParseError");
  CHECK(kind_of([] { parse_germ<M>("x + E[1]"); }) == "ParseError");
}

TEST_CASE("text round trips") {
  Sampler s(71);
  for (int i = 0; i < 20; ++i) {
    SeriesShape sh;
    sh.validity = 4;
    S f = random_series<M>(s, sh);
    CHECK(same(parse_series<M>(format_series(f)), f, M("1e-45")));
    CHECK(parse_series<M>(format_series(f)).validity == f.validity);
    D X = random_derivation<M>(s, sh);
    CHECK(same(parse_derivation<M>(format_derivation(X)), X, M("1e-45")));
  }
  G g = parse_germ<M>("x + (0.5,1)*x^2 - 3*x^4", 6);
  CHECK(g.order == 6);
  CHECK(close(g.coef(2), c(0.5, 1)));
  CHECK(same(parse_germ<M>(format_germ(g), 6), g));
  CHECK(parse_germ<M>(format_germ(g)).order == 6);
  CHECK(parse_germ<M>("x + x^3").order == 3);
  CHECK(parse_germ<M>("x + x^3 + O(x^9)").order == 8);
  CHECK(kind_of([] { parse_germ<M>("x + O(x^1)"); }) == "ParseError");
  CHECK(kind_of([] { series("z + O(x^3)"); }) == "ParseError");
  CHECK(format_derivation(D{{}, M(2)}).rfind("0 + O(E[", 0) == 0);
}

TEST_CASE("JSON round trips keep full precision") {
  Sampler s(72);
  for (int i = 0; i < 10; ++i) {
    SeriesShape sh;
    sh.validity = 4;
    S f = random_series<M>(s, sh);
    const std::string text = dump_json(to_json(f));
    S back = series_from_json<M>(parse_json(text));
    CHECK(same(back, f, M("1e-45")));
    CHECK(back.validity == f.validity);
    D X = random_derivation<M>(s, sh);
    CHECK(same(derivation_from_json<M>(parse_json(dump_json(to_json(X)))), X, M("1e-45")));
  }
  G g = parse_germ<M>("x + (0.5,1)*x^2", 5);
  CHECK(same(germ_from_json<M>(parse_json(dump_json(to_json(g)))), g));

  // numbers are read from their source text, not through double
  const json j = parse_json(R"({"x": 0.1000000000000000000000000000000000000001})");
  CHECK(abs(json_real<M>(j["x"]) - M("0.1000000000000000000000000000000000000001")) < M("1e-45"));
  CHECK(json_real<M>(json("2.5")) == M("2.5"));
}

TEST_CASE("JSON errors") {
  CHECK(kind_of([] { parse_json("{\"a\": [1, 2"); }) == "ConfigInvalid");
  CHECK(kind_of([] { json_real<M>(json("abc")); }) == "ConfigInvalid");
  CHECK(kind_of([] { json_real<M>(json::array()); }) == "ConfigInvalid");
  CHECK(kind_of([] { series_from_json<M>(json::array()); }) == "ConfigInvalid");
  CHECK(kind_of([] { germ_from_json<M>(json::object()); }) == "ConfigInvalid");
  CHECK(kind_of([] { series_from_json<M>(parse_json(R"({"multiplier": -2})")); }) == "ConfigInvalid");
  CHECK(kind_of([] { series_from_json<M>(parse_json(R"({"a": 1, "b": [0, 0], "terms": [{"lambda": -1, "poly": [[1, 0]]}]})")); }) ==
        "ConfigInvalid");
}
