#include "mpl/interpretation.hpp"

#include <algorithm>
#include <cassert>
#include <climits>

namespace mpl {
namespace {

void hull_of_value(const Value& v, std::optional<std::int64_t>& lo,
                   std::optional<std::int64_t>& hi) {
  auto widen = [&](std::int64_t n) {
    if (!lo || n < *lo) lo = n;
    if (!hi || n > *hi) hi = n;
  };
  switch (v.kind()) {
    case Value::Kind::Int:
      widen(v.as_int());
      break;
    case Value::Kind::Tuple:
      for (const auto& p : v.parts()) hull_of_value(p, lo, hi);
      break;
    default:
      break;
  }
}

void hull_of_sort(const SortPtr& s, std::optional<std::int64_t>& lo,
                  std::optional<std::int64_t>& hi) {
  auto widen = [&](std::int64_t n) {
    if (!lo || n < *lo) lo = n;
    if (!hi || n > *hi) hi = n;
  };
  switch (s->kind()) {
    case Sort::Kind::IntRange:
      widen(s->lo());
      widen(s->hi());
      break;
    case Sort::Kind::Tuple:
      for (const auto& c : s->components()) hull_of_sort(c, lo, hi);
      break;
    case Sort::Kind::Enum:
      for (const auto& v : s->values()) hull_of_value(v, lo, hi);
      break;
    case Sort::Kind::Bool:
      break;
  }
}

}  // namespace

Interpretation::Interpretation(InterpretationSpec spec) : spec_(std::move(spec)) {
  validate_and_freeze();
}

SortPtr Interpretation::sort_of(const std::string& var) const {
  auto it = spec_.sorts.find(var);
  if (it == spec_.sorts.end()) {
    throw ConfigError("no sort declared for variable '" + var + "'");
  }
  return it->second;
}

const std::vector<Value>& Interpretation::outcome_values() const {
  return spec_.outcome_sort->values();
}

bool Interpretation::has_preference(int agent) const {
  return spec_.preferences.count(agent) != 0;
}

bool Interpretation::prefers(int agent, const Value& a, const Value& b) const {
  if (a == b) return true;
  if (b.is_bottom()) return true;
  if (a.is_bottom()) return false;
  if (auto it = utilities_.find(agent); it != utilities_.end()) {
    auto ua = it->second.find(a);
    auto ub = it->second.find(b);
    if (ua == it->second.end() || ub == it->second.end()) {
      throw ConfigError("preference of agent " + std::to_string(agent) +
                        " applied outside the outcome sort");
    }
    return ua->second >= ub->second;
  }
  if (auto it = pair_relations_.find(agent); it != pair_relations_.end()) {
    return it->second.count({a, b}) != 0;
  }
  throw ConfigError("no preference declared for agent " + std::to_string(agent));
}

Interpretation Interpretation::with_preferences(
    std::map<int, PreferenceSpec> prefs) const {
  InterpretationSpec s = spec_;
  s.preferences = std::move(prefs);
  return Interpretation(std::move(s));
}

void Interpretation::validate_and_freeze() {
  if (spec_.num_agents < 0) throw ConfigError("negative agent count");
  if (!spec_.outcome_sort) throw ConfigError("missing outcome sort");

  for (const auto& [name, sort] : spec_.sorts) {
    if (!sort) throw ConfigError("missing sort for variable '" + name + "'");
    if (spec_.constants.count(name)) {
      throw ConfigError("'" + name + "' is both a variable and a constant");
    }
  }
  for (const auto& [name, v] : spec_.constants) {
    if (v.is_bottom()) throw ConfigError("constant '" + name + "' is bottom");
  }

  // Integer universe: hull of everything mentioned, then optional widening.
  std::optional<std::int64_t> lo, hi;
  for (const auto& [name, sort] : spec_.sorts) hull_of_sort(sort, lo, hi);
  hull_of_sort(spec_.outcome_sort, lo, hi);
  for (const auto& [name, v] : spec_.constants) hull_of_value(v, lo, hi);
  for (const auto& [name, f] : spec_.functions) {
    for (const auto& s : f.arg_sorts) hull_of_sort(s, lo, hi);
    if (f.result_sort) hull_of_sort(f.result_sort, lo, hi);
  }
  int_lo_ = lo.value_or(0);
  int_hi_ = hi.value_or(0);
  if (spec_.int_universe) {
    auto [ulo, uhi] = *spec_.int_universe;
    if (ulo > uhi) throw ConfigError("empty int_universe");
    if (lo && (ulo > *lo || uhi < *hi)) {
      throw ConfigError("int_universe [" + std::to_string(ulo) + "," +
                        std::to_string(uhi) +
                        "] does not contain every integer the interpretation mentions");
    }
    int_lo_ = ulo;
    int_hi_ = uhi;
  }

  for (const auto& [name, f] : spec_.functions) {
    if (!f.result_sort) throw ConfigError("function '" + name + "' has no result sort");
    std::size_t expect = 1;
    for (const auto& s : f.arg_sorts) {
      if (!s) throw ConfigError("function '" + name + "' has a missing argument sort");
      expect *= s->size();
    }
    if (f.table.size() != expect) {
      throw ConfigError("function '" + name + "' table is not total (" +
                        std::to_string(f.table.size()) + " of " +
                        std::to_string(expect) + " entries)");
    }
    for (const auto& [args, res] : f.table) {
      if (args.size() != f.arg_sorts.size()) {
        throw ConfigError("function '" + name + "' table entry has wrong arity");
      }
      for (std::size_t i = 0; i < args.size(); ++i) {
        if (!f.arg_sorts[i]->contains(args[i])) {
          throw ConfigError("function '" + name + "' table entry argument " +
                            args[i].str() + " outside its sort");
        }
      }
      if (!f.result_sort->contains(res)) {
        throw ConfigError("function '" + name + "' result " + res.str() +
                          " outside its result sort");
      }
    }
  }
  for (const auto& [name, r] : spec_.relations) {
    for (const auto& row : r.table) {
      if (row.size() != r.arg_sorts.size()) {
        throw ConfigError("relation '" + name + "' table entry has wrong arity");
      }
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (!r.arg_sorts[i] || !r.arg_sorts[i]->contains(row[i])) {
          throw ConfigError("relation '" + name + "' table entry argument " +
                            row[i].str() + " outside its sort");
        }
      }
    }
  }

  outcome_universe_.clear();
  outcome_universe_.push_back(Value::bottom());
  for (const auto& o : outcome_values()) outcome_universe_.push_back(o);
  predicate_universe_.clear();
  if (spec_.outcome_includes_bottom) predicate_universe_.push_back(Value::bottom());
  for (const auto& o : outcome_values()) predicate_universe_.push_back(o);

  utilities_.clear();
  pair_relations_.clear();
  for (const auto& [agent, pref] : spec_.preferences) {
    if (agent < 1 || agent > spec_.num_agents) {
      throw ConfigError("preference declared for unknown agent " +
                        std::to_string(agent));
    }
    if (pref.is_utility()) {
      if (!pref.pairs.empty()) {
        throw ConfigError("agent " + std::to_string(agent) +
                          " has both utility and pair preferences");
      }
      auto& table = utilities_[agent];
      for (const auto& o : outcome_values()) {
        const State empty;
        bool matched = false;
        for (const auto& c : pref.utility) {
          if (c.guard &&
              !eval_formula(c.guard, empty, &o, *this, EvalMode::Unbounded)) {
            continue;
          }
          Value u = eval_term(c.value, empty, &o, *this, EvalMode::Unbounded);
          if (!u.is_int()) {
            throw ConfigError("utility of agent " + std::to_string(agent) +
                              " is not an integer at outcome " + o.str());
          }
          table[o] = u.as_int();
          matched = true;
          break;
        }
        if (!matched) {
          throw ConfigError("utility of agent " + std::to_string(agent) +
                            " has no case matching outcome " + o.str());
        }
      }
    } else {
      auto& rel = pair_relations_[agent];
      auto in_universe = [&](const Value& v) {
        return v.is_bottom() || spec_.outcome_sort->contains(v);
      };
      for (const auto& [a, b] : pref.pairs) {
        if (!in_universe(a) || !in_universe(b)) {
          throw ConfigError("preference pair of agent " + std::to_string(agent) +
                            " mentions a value outside the outcome universe");
        }
        if (a.is_bottom() && !b.is_bottom()) {
          throw ConfigError("agent " + std::to_string(agent) +
                            " prefers bottom over " + b.str() +
                            "; bottom must be strictly worst");
        }
        rel.insert({a, b});
      }
      for (const auto& v : outcome_universe_) {
        rel.insert({v, v});
        rel.insert({v, Value::bottom()});
      }
      for (const auto& [a, b] : rel) {
        for (const auto& v : outcome_universe_) {
          if (rel.count({b, v}) && !rel.count({a, v})) {
            throw ConfigError("preference of agent " + std::to_string(agent) +
                              " is not transitive: " + a.str() + " >= " + b.str() +
                              " >= " + v.str() + " but not " + a.str() +
                              " >= " + v.str());
          }
        }
      }
    }
  }
}

namespace {

struct EvalCtx {
  const State& state;
  const Value* outcome;
  const Interpretation& interp;
  EvalMode mode;

  Value clamp_int(std::int64_t n) const {
    if (mode == EvalMode::Unbounded) return Value::integer(n);
    return Value::integer(
        std::clamp(n, interp.int_lo(), interp.int_hi()));
  }
};

Value eval(const TermPtr& t, const EvalCtx& ctx);

Value eval_builtin_arith(const Term& t, const EvalCtx& ctx) {
  if (t.args.size() != 2) throw EvalError("'" + t.name + "' expects 2 arguments");
  Value a = eval(t.args[0], ctx);
  Value b = eval(t.args[1], ctx);
  if (a.is_bottom() || b.is_bottom()) return Value::bottom();
  if (!a.is_int() || !b.is_int()) {
    throw EvalError("'" + t.name + "' applied to non-integers " + a.str() +
                    ", " + b.str());
  }
  // Operands are bounded, so __int128 can never overflow here.
  __int128 x = a.as_int(), y = b.as_int(), r = 0;
  if (t.name == "+") r = x + y;
  else if (t.name == "-") r = x - y;
  else r = x * y;
  if (ctx.mode == EvalMode::Saturating) {
    if (r < ctx.interp.int_lo()) r = ctx.interp.int_lo();
    if (r > ctx.interp.int_hi()) r = ctx.interp.int_hi();
  } else if (r < LLONG_MIN || r > LLONG_MAX) {
    throw EvalError("integer overflow in unbounded evaluation");
  }
  return Value::integer(static_cast<std::int64_t>(r));
}

Value eval(const TermPtr& t, const EvalCtx& ctx) {
  switch (t->kind) {
    case Term::Kind::Var: {
      auto it = ctx.state.find(t->name);
      if (it != ctx.state.end()) return it->second;
      auto ct = ctx.interp.spec().constants.find(t->name);
      if (ct != ctx.interp.spec().constants.end()) return ct->second;
      throw EvalError("unknown variable '" + t->name + "'");
    }
    case Term::Kind::IntLit:
      return ctx.clamp_int(t->int_value);
    case Term::Kind::Outcome:
      if (!ctx.outcome) throw EvalError("'outcome' used outside a predicate");
      return *ctx.outcome;
    case Term::Kind::OutcomeProj: {
      if (!ctx.outcome) throw EvalError("'outcome' used outside a predicate");
      if (ctx.outcome->is_bottom()) return Value::bottom();
      if (!ctx.outcome->is_tuple()) {
        throw EvalError("outcome[" + std::to_string(t->index) +
                        "] on non-tuple outcome " + ctx.outcome->str());
      }
      const auto& parts = ctx.outcome->parts();
      if (t->index < 1 || static_cast<std::size_t>(t->index) > parts.size()) {
        throw EvalError("outcome[" + std::to_string(t->index) + "] out of range");
      }
      return parts[t->index - 1];
    }
    case Term::Kind::TupleCons: {
      std::vector<Value> parts;
      parts.reserve(t->args.size());
      bool bottom = false;
      for (const auto& a : t->args) {
        Value v = eval(a, ctx);
        if (v.is_bottom()) bottom = true;
        parts.push_back(std::move(v));
      }
      if (bottom) return Value::bottom();
      return Value::tuple(std::move(parts));
    }
    case Term::Kind::Call: {
      if (t->name == "+" || t->name == "-" || t->name == "*") {
        return eval_builtin_arith(*t, ctx);
      }
      if (t->name == "proj") {
        if (t->args.size() != 2 || t->args[1]->kind != Term::Kind::IntLit) {
          throw EvalError("proj expects (tuple, literal index)");
        }
        Value v = eval(t->args[0], ctx);
        if (v.is_bottom()) return Value::bottom();
        std::int64_t k = t->args[1]->int_value;
        if (!v.is_tuple()) {
          throw EvalError("proj applied to non-tuple " + v.str());
        }
        if (k < 1 || static_cast<std::size_t>(k) > v.parts().size()) {
          throw EvalError("proj index " + std::to_string(k) + " out of range");
        }
        return v.parts()[k - 1];
      }
      auto it = ctx.interp.spec().functions.find(t->name);
      if (it == ctx.interp.spec().functions.end()) {
        throw EvalError("unknown function '" + t->name + "'");
      }
      const FunctionDef& f = it->second;
      if (t->args.size() != f.arg_sorts.size()) {
        throw EvalError("function '" + t->name + "' applied to " +
                        std::to_string(t->args.size()) + " arguments, expects " +
                        std::to_string(f.arg_sorts.size()));
      }
      std::vector<Value> args;
      args.reserve(t->args.size());
      for (const auto& a : t->args) {
        Value v = eval(a, ctx);
        if (v.is_bottom()) return Value::bottom();
        args.push_back(std::move(v));
      }
      auto row = f.table.find(args);
      if (row == f.table.end()) {
        std::string call = t->name + "(";
        for (std::size_t i = 0; i < args.size(); ++i) {
          if (i) call += ", ";
          call += args[i].str();
        }
        throw EvalError("function application " + call + ") outside its domain");
      }
      return row->second;
    }
  }
  throw EvalError("malformed term");
}

bool eval_bool(const FormulaPtr& f, const EvalCtx& ctx) {
  switch (f->kind) {
    case Formula::Kind::True:
      return true;
    case Formula::Kind::Not:
      return !eval_bool(f->lhs, ctx);
    case Formula::Kind::And:
      return eval_bool(f->lhs, ctx) && eval_bool(f->rhs, ctx);
    case Formula::Kind::Rel: {
      if (f->rel == "=") {
        if (f->args.size() != 2) throw EvalError("'=' expects 2 arguments");
        Value a = eval(f->args[0], ctx);
        Value b = eval(f->args[1], ctx);
        return a == b;  // covers bottom = bottom
      }
      if (f->rel == "<" || f->rel == "<=" || f->rel == ">" || f->rel == ">=") {
        if (f->args.size() != 2) throw EvalError("'" + f->rel + "' expects 2 arguments");
        Value a = eval(f->args[0], ctx);
        Value b = eval(f->args[1], ctx);
        if (a.is_bottom() || b.is_bottom()) return false;
        if (!a.is_int() || !b.is_int()) {
          throw EvalError("'" + f->rel + "' applied to non-integers " + a.str() +
                          ", " + b.str());
        }
        std::int64_t x = a.as_int(), y = b.as_int();
        if (f->rel == "<") return x < y;
        if (f->rel == "<=") return x <= y;
        if (f->rel == ">") return x > y;
        return x >= y;
      }
      auto it = ctx.interp.spec().relations.find(f->rel);
      if (it == ctx.interp.spec().relations.end()) {
        throw EvalError("unknown relation '" + f->rel + "'");
      }
      const RelationDef& r = it->second;
      if (f->args.size() != r.arg_sorts.size()) {
        throw EvalError("relation '" + f->rel + "' applied to " +
                        std::to_string(f->args.size()) + " arguments, expects " +
                        std::to_string(r.arg_sorts.size()));
      }
      std::vector<Value> args;
      for (const auto& a : f->args) {
        Value v = eval(a, ctx);
        if (v.is_bottom()) return false;
        args.push_back(std::move(v));
      }
      for (std::size_t i = 0; i < args.size(); ++i) {
        if (!r.arg_sorts[i]->contains(args[i])) {
          throw EvalError("relation '" + f->rel + "' argument " + args[i].str() +
                          " outside its sort");
        }
      }
      return it->second.table.count(args) != 0;
    }
  }
  throw EvalError("malformed formula");
}

}  // namespace

Value eval_term(const TermPtr& t, const State& s, const Value* outcome,
                const Interpretation& interp, EvalMode mode) {
  if (!t) throw EvalError("null term");
  return eval(t, EvalCtx{s, outcome, interp, mode});
}

bool eval_formula(const FormulaPtr& f, const State& s, const Value* outcome,
                  const Interpretation& interp, EvalMode mode) {
  if (!f) throw EvalError("null formula");
  return eval_bool(f, EvalCtx{s, outcome, interp, mode});
}

Value clamp_assign(const Interpretation& interp, const std::string& var,
                   const Value& v) {
  SortPtr sort = interp.sort_of(var);
  if (sort->kind() == Sort::Kind::IntRange) {
    if (!v.is_int()) {
      throw EvalError("assigning non-integer " + v.str() + " to '" + var + "'");
    }
    return Value::integer(std::clamp(v.as_int(), sort->lo(), sort->hi()));
  }
  if (!sort->contains(v)) {
    throw EvalError("assigning " + v.str() + " to '" + var +
                    "' outside its sort " + sort->str());
  }
  return v;
}

}  // namespace mpl
