#pragma once

#include <string>

#include "mpl/ast.hpp"
#include "mpl/errors.hpp"
#include "mpl/value.hpp"

namespace mpl {

class Interpretation;

// The predicate language is the mechanism expression language plus the
// reserved symbol `outcome`, projections `outcome[k]`, and implication `->`.
// Mechanism guards and right-hand sides are parsed in mechanism mode.
enum class ParseMode { Mechanism, Predicate };

// Each entry point parses the whole string; trailing input is an error.
// `#` starts a comment running to end of line.
TermPtr parse_term(const std::string& source, ParseMode mode = ParseMode::Predicate);
FormulaPtr parse_formula(const std::string& source, ParseMode mode = ParseMode::Predicate);
MechPtr parse_mechanism(const std::string& source);

// Comma-separated closed bindings, e.g. "x = 1, y = (1, 2)", as used by
// initial-state options and simulation scripts. Right-hand sides may use
// the interpretation's constants but no variables. Empty input is allowed.
State parse_bindings(const std::string& source, const Interpretation& interp);

}  // namespace mpl
