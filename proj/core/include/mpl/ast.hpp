#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace mpl {

// ---------------------------------------------------------------------------
// Terms

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
  enum class Kind {
    Var,          // variable reference
    IntLit,       // integer literal
    Call,         // builtin or interpreted function: name(args...)
    TupleCons,    // (t1, ..., tk), k >= 2
    Outcome,      // the reserved symbol `outcome` (predicate language only)
    OutcomeProj,  // outcome[k], 1-based (predicate language only)
  };

  Kind kind;
  std::string name;            // Var, Call
  std::int64_t int_value = 0;  // IntLit
  int index = 0;               // OutcomeProj
  std::vector<TermPtr> args;   // Call, TupleCons

  static TermPtr var(std::string name);
  static TermPtr int_lit(std::int64_t v);
  static TermPtr call(std::string name, std::vector<TermPtr> args);
  static TermPtr tuple(std::vector<TermPtr> parts);
  static TermPtr outcome();
  static TermPtr outcome_proj(int k);
};

// ---------------------------------------------------------------------------
// Formulas
//
// Core connectives are True / relation / not / and. The surface syntax also
// has `or`, `->` and `false`; the parser desugars them, so everything
// downstream handles four cases.

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  enum class Kind { True, Rel, Not, And };

  Kind kind;
  std::string rel;            // Rel: "=", "<", "<=", ">", ">=" or custom name
  std::vector<TermPtr> args;  // Rel
  FormulaPtr lhs, rhs;        // Not uses lhs; And uses both

  static FormulaPtr truth();
  static FormulaPtr relation(std::string name, std::vector<TermPtr> args);
  static FormulaPtr negate(FormulaPtr f);
  static FormulaPtr conj(FormulaPtr a, FormulaPtr b);
};

// ---------------------------------------------------------------------------
// Mechanisms
//
// Λ (the terminated mechanism) is represented by a null MechPtr; it only
// appears in residuals during execution, never in parsed programs.

struct Mechanism;
using MechPtr = std::shared_ptr<const Mechanism>;

struct Mechanism {
  enum class Kind { Assign, Seq, Ite, Loop, Choice };

  Kind kind;
  std::string var;    // Assign
  TermPtr term;       // Assign
  FormulaPtr cond;    // Ite, Loop
  MechPtr first, second;  // Seq; Ite then/else; Loop uses first as body
  std::vector<int> agents;              // Choice, sorted ascending
  std::vector<std::string> choice_vars; // Choice, one per agent

  static MechPtr assign(std::string var, TermPtr term);
  static MechPtr seq(MechPtr a, MechPtr b);
  static MechPtr ite(FormulaPtr cond, MechPtr then_branch, MechPtr else_branch);
  static MechPtr loop(FormulaPtr cond, MechPtr body);
  static MechPtr choice(std::vector<int> agents, std::vector<std::string> vars);
};

// Mechanism class: PRG has no choice statements, PI only singleton-agent
// choices, GENERAL anything else.
enum class MechClass { PRG, PI, GENERAL };
MechClass classify(const MechPtr& m);
std::string to_string(MechClass c);

// Structural equality (Λ == Λ, no alpha-conversion).
bool equal(const TermPtr& a, const TermPtr& b);
bool equal(const FormulaPtr& a, const FormulaPtr& b);
bool equal(const MechPtr& a, const MechPtr& b);

// Variables read or written anywhere in the object.
void collect_vars(const TermPtr& t, std::set<std::string>& out);
void collect_vars(const FormulaPtr& f, std::set<std::string>& out);
void collect_vars(const MechPtr& m, std::set<std::string>& out);

// Concrete-syntax printers; parse(pretty(x)) reproduces x up to `;`
// re-association.
std::string pretty(const TermPtr& t);
std::string pretty(const FormulaPtr& f);
std::string pretty(const MechPtr& m);

}  // namespace mpl
