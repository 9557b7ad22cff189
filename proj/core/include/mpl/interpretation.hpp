#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mpl/ast.hpp"
#include "mpl/errors.hpp"
#include "mpl/value.hpp"

namespace mpl {

// One branch of a utility definition: the first case whose guard holds of the
// outcome supplies the value. A case without a guard always matches.
struct UtilityCase {
  FormulaPtr guard;  // null = catch-all
  TermPtr value;
};

// Agent preferences, either as a utility function over outcomes or as an
// explicit weak-preference relation (pairs (a, b) meaning a is at least as
// good as b). Explicit relations may leave outcomes incomparable.
struct PreferenceSpec {
  std::vector<UtilityCase> utility;
  std::vector<std::pair<Value, Value>> pairs;

  bool is_utility() const { return !utility.empty(); }
};

struct FunctionDef {
  std::vector<SortPtr> arg_sorts;
  SortPtr result_sort;
  std::map<std::vector<Value>, Value> table;
};

struct RelationDef {
  std::vector<SortPtr> arg_sorts;
  std::set<std::vector<Value>> table;
};

struct InterpretationSpec {
  int num_agents = 0;
  std::map<std::string, SortPtr> sorts;  // program variables
  SortPtr outcome_sort;
  std::map<std::string, Value> constants;
  std::optional<std::pair<std::int64_t, std::int64_t>> int_universe;
  bool outcome_includes_bottom = false;
  std::map<std::string, FunctionDef> functions;
  std::map<std::string, RelationDef> relations;
  std::map<int, PreferenceSpec> preferences;
};

// A finite interpretation: validated spec plus precomputed preference data.
// Immutable after construction; cheap to copy only via with_preferences.
class Interpretation {
public:
  explicit Interpretation(InterpretationSpec spec);

  const InterpretationSpec& spec() const { return spec_; }
  int num_agents() const { return spec_.num_agents; }
  const std::map<std::string, SortPtr>& sorts() const { return spec_.sorts; }
  SortPtr sort_of(const std::string& var) const;
  bool is_constant(const std::string& name) const {
    return spec_.constants.count(name) != 0;
  }
  SortPtr outcome_sort() const { return spec_.outcome_sort; }
  bool outcome_includes_bottom() const { return spec_.outcome_includes_bottom; }

  // All integer arithmetic inside mechanisms and predicates saturates at
  // these bounds (the convex hull of every integer mentioned by the sorts,
  // the outcome sort and the constants, unless widened explicitly).
  std::int64_t int_lo() const { return int_lo_; }
  std::int64_t int_hi() const { return int_hi_; }

  const std::vector<Value>& outcome_values() const;
  // Outcome values plus bottom; the range preferences are defined over.
  const std::vector<Value>& outcome_universe() const { return outcome_universe_; }
  // What e-predicate fibers may contain: outcome values, plus bottom when
  // outcome_includes_bottom is set.
  const std::vector<Value>& predicate_universe() const { return predicate_universe_; }

  bool has_preference(int agent) const;
  // Weak preference a >=_agent b. Bottom is strictly worst for every agent.
  bool prefers(int agent, const Value& a, const Value& b) const;

  Interpretation with_preferences(std::map<int, PreferenceSpec> prefs) const;

private:
  void validate_and_freeze();

  InterpretationSpec spec_;
  std::int64_t int_lo_ = 0, int_hi_ = 0;
  std::vector<Value> outcome_universe_;
  std::vector<Value> predicate_universe_;
  std::map<int, std::map<Value, long long>> utilities_;
  std::map<int, std::set<std::pair<Value, Value>>> pair_relations_;
};

// Saturating is the mechanism/predicate regime: literals and arithmetic
// results clamp to the interpretation's integer bounds. Unbounded is the
// utility regime: plain integer arithmetic.
enum class EvalMode { Saturating, Unbounded };

// `outcome` may be null (mechanism contexts) or point at a value, possibly
// bottom. Bottom propagates through arithmetic, projections, functions and
// tuple construction; relations on bottom are false except that `=` holds
// between two bottoms.
Value eval_term(const TermPtr& t, const State& s, const Value* outcome,
                const Interpretation& interp, EvalMode mode = EvalMode::Saturating);
bool eval_formula(const FormulaPtr& f, const State& s, const Value* outcome,
                  const Interpretation& interp, EvalMode mode = EvalMode::Saturating);

// The value actually stored by `var := t` once t evaluated to v: integers
// clamp into an integer-range sort; any other sort requires containment.
Value clamp_assign(const Interpretation& interp, const std::string& var,
                   const Value& v);

}  // namespace mpl
