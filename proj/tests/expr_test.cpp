#include <gtest/gtest.h>

#include <limits>
#include <random>

#include "cbsrv/error.hpp"
#include "cbsrv/expr.hpp"

using namespace cbsrv;

namespace {

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return Errc::invalid_argument;
}

class MapTypes : public TypeEnv {
 public:
  std::optional<Type> type_of(std::string_view name) const override {
    if (name == "x" || name == "W.x") return Type::integer;
    if (name == "b") return Type::boolean;
    return std::nullopt;
  }
  bool has_location(std::string_view c, std::string_view l) const override { return c == "W" && l == "done"; }
};

}  // namespace

TEST(Valuation, KeepsNamesSortedAndReplaces) {
  Valuation v{{"y", Value(2)}, {"x", Value(1)}};
  v.set("x", Value(5));
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v.begin()->first, "x");
  EXPECT_EQ(v.at("x"), Value(5));
  EXPECT_EQ(code_of([&] { v.at("z"); }), Errc::unbound_variable);
  EXPECT_TRUE(v.erase("y"));
  EXPECT_FALSE(v.contains("y"));
}

TEST(Valuation, OverrideTakesRightOperandOnSharedNames) {
  const Valuation v{{"x", Value(1)}, {"y", Value(2)}};
  const Valuation w{{"y", Value(9)}, {"z", Value(true)}};
  const Valuation r = override_with(v, w);
  EXPECT_EQ(r, (Valuation{{"x", Value(1)}, {"y", Value(9)}, {"z", Value(true)}}));
}

TEST(Eval, ArithmeticAndComparison) {
  const Valuation v{{"x", Value(4)}, {"b", Value(false)}};
  EXPECT_EQ(eval(parse_expr("x * 2 - 3"), v), Value(5));
  EXPECT_EQ(eval(parse_expr("abs(1 - x) < 3"), v), Value(false));
  EXPECT_EQ(eval(parse_expr("not b and x >= 4"), v), Value(true));
  EXPECT_EQ(eval(parse_expr("x == 4 or b"), v), Value(true));
  EXPECT_EQ(eval(parse_expr("-x"), v), Value(-4));
}

TEST(Eval, Errors) {
  const Valuation v{{"x", Value(std::numeric_limits<std::int64_t>::max())}, {"b", Value(true)}};
  EXPECT_EQ(code_of([&] { eval(parse_expr("y + 1"), v); }), Errc::unbound_variable);
  EXPECT_EQ(code_of([&] { eval(parse_expr("b + 1"), v); }), Errc::type_mismatch);
  EXPECT_EQ(code_of([&] { eval(parse_expr("x + 1"), v); }), Errc::overflow);
}

TEST(Assignments, AreSequential) {
  const Valuation v{{"x", Value(1)}, {"y", Value(0)}};
  const auto r = apply_assignments({{"x", ex::lit(7)}, {"y", ex::add(ex::var("x"), ex::lit(1))}}, v);
  EXPECT_EQ(r.at("y"), Value(8));
  EXPECT_EQ(code_of([&] { apply_assignments({{"z", ex::lit(1)}}, v); }), Errc::unbound_variable);
}

TEST(TypeCheck, ResolvesNamesAndLocations) {
  const MapTypes env;
  EXPECT_EQ(type_check(parse_expr("x + W.x > 2 and b"), env), Type::boolean);
  EXPECT_EQ(type_check(parse_expr("W@done"), env), Type::boolean);
  EXPECT_EQ(code_of([&] { type_check(parse_expr("q > 1"), env); }), Errc::unbound_variable);
  EXPECT_EQ(code_of([&] { type_check(parse_expr("x and b"), env); }), Errc::type_mismatch);
}

TEST(Parse, PrecedenceMatchesHandBuiltTree) {
  const Expr e = parse_expr("1 + 2 * x < 7 or not b");
  const Expr want = ex::or_(ex::lt(ex::add(ex::lit(1), ex::mul(ex::lit(2), ex::var("x"))), ex::lit(7)),
                            ex::not_(ex::var("b")));
  EXPECT_TRUE(structurally_equal(e, want)) << to_string(e);
}

TEST(Parse, RejectsMalformedInput) {
  EXPECT_THROW(parse_expr("1 +"), SyntaxError);
  EXPECT_THROW(parse_expr("(x"), SyntaxError);
  EXPECT_THROW(parse_expr("x $ 2"), SyntaxError);
}

TEST(Collect, VariablesAndLocations) {
  std::vector<std::string> vars;
  std::vector<std::pair<std::string, std::string>> locs;
  const Expr e = parse_expr("W.x > 1 and G@ready and y == 2");
  collect_vars(e, vars);
  collect_locations(e, locs);
  EXPECT_EQ(vars, (std::vector<std::string>{"W.x", "y"}));
  ASSERT_EQ(locs.size(), 1u);
  EXPECT_EQ(locs[0], (std::pair<std::string, std::string>{"G", "ready"}));
}

namespace {

Expr random_expr(std::mt19937_64& rng, int depth, bool want_bool) {
  std::uniform_int_distribution<int> pick(0, 5);
  if (depth == 0) {
    if (want_bool) return pick(rng) % 2 ? ex::var("b") : ex::lit(pick(rng) % 2 == 0);
    return pick(rng) % 2 ? ex::var("x") : ex::lit(static_cast<int>(pick(rng)) - 2);
  }
  if (want_bool) {
    switch (pick(rng)) {
      case 0: return ex::not_(random_expr(rng, depth - 1, true));
      case 1: return ex::and_(random_expr(rng, depth - 1, true), random_expr(rng, depth - 1, true));
      case 2: return ex::or_(random_expr(rng, depth - 1, true), random_expr(rng, depth - 1, true));
      case 3: return ex::le(random_expr(rng, depth - 1, false), random_expr(rng, depth - 1, false));
      case 4: return ex::eq(random_expr(rng, depth - 1, false), random_expr(rng, depth - 1, false));
      default: return ex::at("W", "done");
    }
  }
  switch (pick(rng)) {
    case 0: return ex::abs(random_expr(rng, depth - 1, false));
    case 1: return ex::unary(UnaryOp::negate, random_expr(rng, depth - 1, false));
    case 2: return ex::sub(random_expr(rng, depth - 1, false), random_expr(rng, depth - 1, false));
    case 3: return ex::mul(random_expr(rng, depth - 1, false), random_expr(rng, depth - 1, false));
    default: return ex::add(random_expr(rng, depth - 1, false), random_expr(rng, depth - 1, false));
  }
}

}  // namespace

TEST(Property, RenderThenParseIsIdentity) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 2000; ++i) {
    const Expr e = random_expr(rng, 1 + i % 4, i % 2 == 0);
    const std::string text = to_string(e);
    EXPECT_TRUE(structurally_equal(parse_expr(text), e)) << text;
  }
}

TEST(Property, RenderedFormEvaluatesTheSame) {
  std::mt19937_64 rng(12);
  const Valuation v{{"x", Value(3)}, {"b", Value(true)}};
  for (int i = 0; i < 1000; ++i) {
    const Expr e = random_expr(rng, 3, false);
    EXPECT_EQ(eval(parse_expr(to_string(e)), v), eval(e, v)) << to_string(e);
  }
}
