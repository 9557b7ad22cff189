#include <string>

#include "doctest.h"
#include "mpl/config.hpp"
#include "mpl/errors.hpp"
#include "mpl/interpretation.hpp"
#include "mpl/parser.hpp"

using namespace mpl;

namespace {

const char* kBasic = R"({
  "agents": 2,
  "sorts": {
    "x": {"int": [0, 4]},
    "b": "bool",
    "t": {"tuple": [{"int": [0, 1]}, {"int": [0, 1]}]},
    "e": {"values": [[1, 2], [2, 1]]}
  },
  "outcome": {"int": [0, 2]},
  "constants": {"k": 3, "yes": true},
  "preferences": {
    "1": {"utility": [{"then": "outcome"}]},
    "2": {"pairs": [[2, 1], [1, 0], [2, 0]]}
  }
})";

Interpretation basic() { return interpretation_from_json(kBasic); }

Value ev(const std::string& t, const Interpretation& i, const State& s = {},
         const Value* o = nullptr) {
  return eval_term(parse_term(t), s, o, i);
}

}  // namespace

TEST_CASE("interpretation loads sorts, constants and preferences") {
  auto i = basic();
  CHECK(i.num_agents() == 2);
  CHECK(i.sort_of("x")->size() == 5);
  CHECK(i.sort_of("b")->kind() == Sort::Kind::Bool);
  CHECK(i.sort_of("t")->size() == 4);
  CHECK(i.sort_of("e")->size() == 2);
  CHECK(i.is_constant("k"));
  CHECK_FALSE(i.is_constant("x"));
  CHECK(i.outcome_sort()->size() == 3);
  CHECK_THROWS_AS(i.sort_of("missing"), ConfigError);
}

TEST_CASE("integer universe is the convex hull unless widened") {
  auto i = basic();
  CHECK(i.int_lo() == 0);
  CHECK(i.int_hi() == 4);  // constant k=3 and outcome [0,2] inside [0,4]

  auto wide = interpretation_from_json(R"({
    "agents": 1, "sorts": {"x": {"int": [0, 2]}},
    "outcome": {"int": [0, 1]}, "int_universe": [-5, 9]
  })");
  CHECK(wide.int_lo() == -5);
  CHECK(wide.int_hi() == 9);

  CHECK_THROWS_AS(interpretation_from_json(R"({
    "agents": 1, "sorts": {"x": {"int": [0, 4]}},
    "outcome": {"int": [0, 1]}, "int_universe": [0, 2]
  })"),
                  ConfigError);  // must contain the hull
}

TEST_CASE("mechanism arithmetic saturates, utilities do not") {
  auto i = basic();
  State s{{"x", Value::integer(4)}};
  CHECK(ev("x + 4", i, s) == Value::integer(4));   // clamped at the hull
  CHECK(ev("0 - 9", i, s) == Value::integer(0));
  CHECK(ev("9", i, s) == Value::integer(4));       // literals clamp too

  Value big = eval_term(parse_term("x * x + x"), s, nullptr, i, EvalMode::Unbounded);
  CHECK(big == Value::integer(20));
}

TEST_CASE("bottom propagates through terms, relations reject it") {
  auto i = basic();
  Value bot = Value::bottom();
  State s{{"x", Value::integer(1)}};
  CHECK(eval_term(parse_term("outcome + 1"), s, &bot, i) == Value::bottom());
  CHECK(eval_term(parse_term("outcome[1]"), s, &bot, i) == Value::bottom());
  CHECK(eval_formula(parse_formula("outcome = outcome"), s, &bot, i));
  CHECK_FALSE(eval_formula(parse_formula("outcome = 1"), s, &bot, i));
  CHECK_FALSE(eval_formula(parse_formula("outcome < 1"), s, &bot, i));
  CHECK_FALSE(eval_formula(parse_formula("outcome >= 0"), s, &bot, i));
}

TEST_CASE("equality is polymorphic, order relations are integer-only") {
  auto i = basic();
  // true/false are formulas, not terms, so boolean equality goes through
  // variables and constants
  State s{{"t", Value::tuple({Value::integer(1), Value::integer(0)})},
          {"b", Value::boolean(true)}};
  CHECK(eval_formula(parse_formula("t = (1, 0)"), s, nullptr, i));
  CHECK_FALSE(eval_formula(parse_formula("t = (0, 1)"), s, nullptr, i));
  CHECK(eval_formula(parse_formula("b = b"), s, nullptr, i));
  CHECK(eval_formula(parse_formula("b = yes"), s, nullptr, i));
  CHECK_FALSE(eval_formula(parse_formula("b = x"), State{{"b", Value::boolean(true)},
                                                         {"x", Value::integer(1)}},
                           nullptr, i));
  CHECK_THROWS_AS(eval_formula(parse_formula("t < (1, 1)"), s, nullptr, i),
                  EvalError);
  CHECK_THROWS_AS(eval_formula(parse_formula("b < yes"), s, nullptr, i), EvalError);
}

TEST_CASE("projection is 1-based and arity-checked") {
  auto i = basic();
  State s{{"t", Value::tuple({Value::integer(1), Value::integer(0)})}};
  CHECK(ev("proj(t, 1)", i, s) == Value::integer(1));
  CHECK(ev("proj(t, 2)", i, s) == Value::integer(0));
  CHECK_THROWS_AS(ev("proj(t, 3)", i, s), EvalError);
  CHECK_THROWS_AS(ev("proj(x, 1)", i, State{{"x", Value::integer(2)}}), EvalError);
}

TEST_CASE("assignment clamps integers and demands containment otherwise") {
  auto i = basic();
  CHECK(clamp_assign(i, "x", Value::integer(9)) == Value::integer(4));
  CHECK(clamp_assign(i, "x", Value::integer(-1)) == Value::integer(0));
  CHECK(clamp_assign(i, "b", Value::boolean(false)) == Value::boolean(false));
  CHECK_THROWS_AS(clamp_assign(i, "b", Value::integer(1)), EvalError);
  CHECK_THROWS_AS(clamp_assign(i, "e", Value::tuple({Value::integer(1),
                                                     Value::integer(1)})),
                  EvalError);
}

TEST_CASE("preference over bottom is fixed") {
  auto i = basic();
  Value bot = Value::bottom();
  Value one = Value::integer(1);
  CHECK(i.prefers(1, bot, bot));
  CHECK(i.prefers(1, one, bot));
  CHECK_FALSE(i.prefers(1, bot, one));
  CHECK(i.prefers(2, bot, bot));
  CHECK(i.prefers(2, one, bot));
}

TEST_CASE("utility and pair preferences") {
  auto i = basic();
  CHECK(i.prefers(1, Value::integer(2), Value::integer(1)));
  CHECK_FALSE(i.prefers(1, Value::integer(0), Value::integer(1)));
  CHECK(i.prefers(1, Value::integer(1), Value::integer(1)));

  CHECK(i.prefers(2, Value::integer(2), Value::integer(1)));
  CHECK(i.prefers(2, Value::integer(1), Value::integer(0)));
  CHECK(i.prefers(2, Value::integer(1), Value::integer(1)));  // reflexive, added
}

TEST_CASE("transitivity gaps are an error, not silently closed") {
  CHECK_THROWS_AS(interpretation_from_json(R"({
    "agents": 1, "sorts": {"x": {"int": [0, 1]}}, "outcome": {"int": [0, 2]},
    "preferences": {"1": {"pairs": [[2, 1], [1, 0]]}}
  })"),
                  ConfigError);
}

TEST_CASE("bottom may not appear on the good side of a pair") {
  CHECK_THROWS_AS(interpretation_from_json(R"({
    "agents": 1, "sorts": {"x": {"int": [0, 1]}}, "outcome": {"int": [0, 1]},
    "preferences": {"1": {"pairs": [["bottom", 0]]}}
  })"),
                  ConfigError);
}

TEST_CASE("function tables must be total") {
  auto good = interpretation_from_json(R"({
    "agents": 1, "sorts": {"x": {"int": [0, 1]}}, "outcome": {"int": [0, 1]},
    "functions": {
      "flip": {"args": [{"int": [0, 1]}], "result": {"int": [0, 1]},
               "table": [[0, 1], [1, 0]]}
    }
  })");
  State s{{"x", Value::integer(0)}};
  CHECK(eval_term(parse_term("flip(x)", ParseMode::Mechanism), s, nullptr, good) ==
        Value::integer(1));

  CHECK_THROWS_AS(interpretation_from_json(R"({
    "agents": 1, "sorts": {"x": {"int": [0, 1]}}, "outcome": {"int": [0, 1]},
    "functions": {
      "flip": {"args": [{"int": [0, 1]}], "result": {"int": [0, 1]},
               "table": [[0, 1]]}
    }
  })"),
                  ConfigError);
}

TEST_CASE("custom relations hold only for listed rows and never on bottom") {
  auto i = interpretation_from_json(R"({
    "agents": 1, "sorts": {"x": {"int": [0, 2]}}, "outcome": {"int": [0, 2]},
    "relations": {
      "edge": {"args": [{"int": [0, 2]}, {"int": [0, 2]}],
               "table": [[0, 1], [1, 2]]}
    }
  })");
  State s{{"x", Value::integer(0)}};
  CHECK(eval_formula(parse_formula("edge(x, 1)"), s, nullptr, i));
  CHECK_FALSE(eval_formula(parse_formula("edge(1, 1)"), s, nullptr, i));
  Value bot = Value::bottom();
  CHECK_FALSE(eval_formula(parse_formula("edge(outcome, 1)"), s, &bot, i));
}

TEST_CASE("constants evaluate like literals and cannot be assigned") {
  auto i = basic();
  CHECK(ev("k + 1", i) == Value::integer(4));
  State s{{"x", Value::integer(2)}};
  CHECK(eval_formula(parse_formula("x < k"), s, nullptr, i));
}

TEST_CASE("bindings are parsed against the interpretation") {
  auto i = basic();
  auto s = parse_bindings("x = 3, t = (1, 0), b = yes", i);
  CHECK(s.at("x") == Value::integer(3));
  CHECK(s.at("t") == Value::tuple({Value::integer(1), Value::integer(0)}));
  CHECK(s.at("b") == Value::boolean(true));
  CHECK(parse_bindings("", i).empty());
  CHECK(parse_bindings("x = k", i).at("x") == Value::integer(3));  // constants ok
  CHECK_THROWS_AS(parse_bindings("x = 1, x = 2", i), ConfigError);
  CHECK_THROWS_AS(parse_bindings("x = y", i), Error);  // no variables on the right
}

TEST_CASE("config rejects malformed documents") {
  CHECK_THROWS_AS(interpretation_from_json("not json"), ConfigError);
  CHECK_THROWS_AS(interpretation_from_json("{}"), ConfigError);  // missing agents
  CHECK_THROWS_AS(interpretation_from_json(R"({"agents": 1})"), ConfigError);
  CHECK_THROWS_AS(interpretation_from_json(R"({
    "agents": 1, "sorts": {"x": {"int": [4, 0]}}, "outcome": {"int": [0, 1]}
  })"),
                  ConfigError);
  CHECK_THROWS_AS(interpretation_from_json(R"({
    "agents": 1, "sorts": {"x": {"odd": 1}}, "outcome": {"int": [0, 1]}
  })"),
                  ConfigError);
}
