#include "doctest.h"
#include "generators.hpp"
#include "tmkit/expr.hpp"

using namespace tmkit;

namespace {

std::optional<bool> eval(std::string_view text, const Attributes& attrs) {
  auto parsed = parse_expr(text);
  REQUIRE_MESSAGE(std::holds_alternative<Expr>(parsed), std::string(text));
  return std::get<Expr>(parsed).evaluate(attrs);
}

}  // namespace

TEST_CASE("comparisons over numbers, strings and booleans") {
  const Attributes a{{"speed", 130.0}, {"ignition", std::string("ON")}, {"armed", true}};
  CHECK(eval("speed > 120", a) == true);
  CHECK(eval("speed >= 130", a) == true);
  CHECK(eval("speed < 130", a) == false);
  CHECK(eval("speed <= -1", a) == false);
  CHECK(eval("speed == 130.0", a) == true);
  CHECK(eval("speed != 1e2", a) == true);
  CHECK(eval("ignition == \"ON\"", a) == true);
  CHECK(eval("ignition < \"P\"", a) == true);
  CHECK(eval("armed", a) == true);
  CHECK(eval("armed == true", a) == true);
  CHECK(eval("not armed", a) == false);
  CHECK(eval("!armed || speed > 100", a) == true);
  CHECK(eval("armed && ignition != \"ON\"", a) == false);
  CHECK(eval("(speed > 200 or ignition == \"ON\") and not (speed < 0)", a) == true);
}

TEST_CASE("missing attributes and type mismatches are unknown") {
  const Attributes a{{"speed", 130.0}, {"ignition", std::string("ON")}};
  CHECK_FALSE(eval("temperature > 100", a).has_value());
  CHECK_FALSE(eval("speed > \"fast\"", a).has_value());
  CHECK(eval("speed == \"fast\"", a) == false);
  CHECK_FALSE(eval("speed", a).has_value());
  CHECK(eval("temperature > 100 or speed > 120", a) == true);
  CHECK(eval("temperature > 100 and speed > 200", a) == false);
  CHECK_FALSE(eval("temperature > 100 and speed > 120", a).has_value());
  CHECK_FALSE(std::get<Expr>(parse_expr("temperature > 100")).holds(a));
}

TEST_CASE("and binds tighter than or") {
  const Attributes a{{"x", 1.0}};
  CHECK(eval("x == 1 or x == 2 and x == 3", a) == true);
  CHECK(eval("(x == 1 or x == 2) and x == 3", a) == false);
}

TEST_CASE("parse errors report byte offsets") {
  struct Case {
    const char* text;
    std::size_t offset;
  };
  const Case cases[] = {{"speed >", 7}, {"speed > 1 )", 10}, {"(speed > 1", 10}, {"name == \"abc", 8}, {"x $ 1", 2}, {"", 0}};
  for (const auto& c : cases) {
    CAPTURE(c.text);
    const auto r = parse_expr(c.text);
    REQUIRE(std::holds_alternative<ExprParseError>(r));
    CHECK(std::get<ExprParseError>(r).offset == c.offset);
  }
}

TEST_CASE("printed expressions parse back to the same meaning") {
  tmtest::Rng rng(51);
  const char* atoms[] = {"level > 50", "level <= 10", "tag == \"red\"", "flag", "missing == 1", "true", "level != 3"};
  for (int i = 0; i < 300; ++i) {
    std::string text = atoms[tmtest::uniform(rng, 0, 6)];
    const int n = tmtest::uniform(rng, 0, 4);
    for (int k = 0; k < n; ++k) {
      const std::string rhs = atoms[tmtest::uniform(rng, 0, 6)];
      switch (tmtest::uniform(rng, 0, 2)) {
        case 0: text = "(" + text + ") and " + rhs; break;
        case 1: text = text + " or " + rhs; break;
        default: text = "not (" + text + ")"; break;
      }
    }
    const Expr e = std::get<Expr>(parse_expr(text));
    const auto again = parse_expr(e.to_string());
    REQUIRE(std::holds_alternative<Expr>(again));
    for (int k = 0; k < 10; ++k) {
      Attributes a{{"level", static_cast<double>(tmtest::uniform(rng, 0, 100))}};
      if (tmtest::chance(rng, 0.7)) a["tag"] = std::string(tmtest::chance(rng, 0.5) ? "red" : "blue");
      if (tmtest::chance(rng, 0.7)) a["flag"] = tmtest::chance(rng, 0.5);
      CHECK(e.evaluate(a) == std::get<Expr>(again).evaluate(a));
    }
  }
}

TEST_CASE("value printing") {
  CHECK(to_string(Value{true}) == "true");
  CHECK(to_string(Value{std::string("a\"b")}) == "\"a\\\"b\"");
  CHECK(to_string(Value{2.5}) == "2.5");
  CHECK(to_string(Value{80.0}) == "80");
}
