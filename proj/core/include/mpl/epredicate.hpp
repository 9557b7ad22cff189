#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mpl/ast.hpp"
#include "mpl/interpretation.hpp"
#include "mpl/value.hpp"

namespace mpl {

// The finite state space spanned by a set of variables under an
// interpretation. States are ordered by their value tuples taken in
// name-sorted variable order; every enumeration in the library walks states
// in that order. Names bound as constants are dropped — they are not state.
class Footprint {
public:
  Footprint(const Interpretation& interp, const std::set<std::string>& vars);

  const std::vector<std::pair<std::string, SortPtr>>& vars() const { return vars_; }
  std::size_t state_count() const { return count_; }
  State state_at(std::size_t ordinal) const;
  std::size_t ordinal_of(const State& s) const;

private:
  std::vector<std::pair<std::string, SortPtr>> vars_;
  std::size_t count_ = 1;
};

// An extensional predicate: a map from states to outcome sets (fibers).
// Fibers are always subsets of the interpretation's predicate universe.
// Instances are cheap shared handles; fibers are memoized per state, so a
// given instance must only ever be queried under one interpretation.
class EPredicate {
public:
  EPredicate();  // empty predicate (all fibers empty)

  static EPredicate from_formula(FormulaPtr f);
  static EPredicate from_formula_text(const std::string& text);
  // Explicit fibers over the given variables; states outside the map have
  // empty fibers. Incoming states are projected onto those variables.
  static EPredicate of_extension(std::set<std::string> vars,
                                 std::map<State, std::set<Value>> fibers);
  // Computed fibers. `vars` declares which variables the function reads.
  static EPredicate lazy(
      std::set<std::string> vars,
      std::function<std::set<Value>(const State&, const Interpretation&)> fn);

  // The fiber at s, restricted to the predicate universe. `s` must bind
  // every variable the predicate mentions; names the interpretation binds as
  // constants are resolved there instead.
  const std::set<Value>& fiber(const State& s, const Interpretation& interp) const;

  // Variables this predicate reads (formula variables, extension keys, or
  // the declared set for lazy predicates).
  const std::set<std::string>& variables() const;

  // Source formula when the predicate came from one.
  const FormulaPtr& formula() const;

private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

// P with x bound to t: the fiber at s is P's fiber at s[x := clamp(t(s))],
// using the same clamping rule assignment execution uses.
EPredicate substitute(const EPredicate& p, const std::string& var, TermPtr t);

// Fiber is P's where the (outcome-free) condition holds, empty elsewhere.
EPredicate mix_intersect(FormulaPtr cond, const EPredicate& p);

// Classical predicate to e-predicate: the full predicate universe where the
// condition holds, empty elsewhere.
EPredicate lift_predicate(FormulaPtr cond);

// Every fiber has at most one outcome.
bool is_functional(const EPredicate& p, const Interpretation& interp,
                   const Footprint& fp);

// Materialized fibers over a footprint, nonempty ones only.
std::map<State, std::set<Value>> extension(const EPredicate& p,
                                           const Interpretation& interp,
                                           const Footprint& fp);

// First (state, outcome) in canonical order that is in P but not in Q, if any.
std::optional<std::pair<State, Value>> subset_violation(const EPredicate& p,
                                                        const EPredicate& q,
                                                        const Interpretation& interp,
                                                        const Footprint& fp);

inline bool subset_of(const EPredicate& p, const EPredicate& q,
                      const Interpretation& interp, const Footprint& fp) {
  return !subset_violation(p, q, interp, fp).has_value();
}

// Fiber-wise set equality over the footprint; on failure reports the first
// differing (state, outcome) pair.
std::optional<std::pair<State, Value>> set_difference_witness(
    const EPredicate& p, const EPredicate& q, const Interpretation& interp,
    const Footprint& fp);

inline bool set_equal(const EPredicate& p, const EPredicate& q,
                      const Interpretation& interp, const Footprint& fp) {
  return !set_difference_witness(p, q, interp, fp).has_value();
}

}  // namespace mpl
