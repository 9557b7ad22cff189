#include "mpl/epredicate.hpp"

#include <algorithm>
#include <mutex>

#include "mpl/parser.hpp"

namespace mpl {

Footprint::Footprint(const Interpretation& interp,
                     const std::set<std::string>& vars) {
  for (const auto& name : vars) {
    if (interp.is_constant(name)) continue;
    SortPtr s = interp.sort_of(name);  // throws on undeclared variables
    count_ *= s->size();
    vars_.emplace_back(name, s);
  }
}

State Footprint::state_at(std::size_t ordinal) const {
  State s;
  // Mixed-radix decode; the last variable varies fastest.
  for (auto it = vars_.rbegin(); it != vars_.rend(); ++it) {
    const auto& vals = it->second->values();
    s.emplace(it->first, vals[ordinal % vals.size()]);
    ordinal /= vals.size();
  }
  return s;
}

std::size_t Footprint::ordinal_of(const State& s) const {
  std::size_t ord = 0;
  for (const auto& [name, sort] : vars_) {
    auto it = s.find(name);
    if (it == s.end()) throw EvalError("state does not bind '" + name + "'");
    const auto& vals = sort->values();
    auto pos = std::lower_bound(vals.begin(), vals.end(), it->second);
    if (pos == vals.end() || !(*pos == it->second)) {
      throw EvalError("state value " + it->second.str() + " for '" + name +
                      "' outside its sort");
    }
    ord = ord * vals.size() + static_cast<std::size_t>(pos - vals.begin());
  }
  return ord;
}

struct EPredicate::Impl {
  enum class Kind { Formula, Extension, Lazy } kind = Kind::Extension;
  FormulaPtr formula;
  std::set<std::string> vars;
  std::map<State, std::set<Value>> fibers;  // Extension source
  std::function<std::set<Value>(const State&, const Interpretation&)> fn;

  std::mutex mu;
  std::map<State, std::set<Value>> memo;
};

EPredicate::EPredicate() : impl_(std::make_shared<Impl>()) {}

EPredicate EPredicate::from_formula(FormulaPtr f) {
  EPredicate p;
  p.impl_->kind = Impl::Kind::Formula;
  collect_vars(f, p.impl_->vars);
  p.impl_->formula = std::move(f);
  return p;
}

EPredicate EPredicate::from_formula_text(const std::string& text) {
  return from_formula(parse_formula(text, ParseMode::Predicate));
}

EPredicate EPredicate::of_extension(std::set<std::string> vars,
                                    std::map<State, std::set<Value>> fibers) {
  EPredicate p;
  p.impl_->kind = Impl::Kind::Extension;
  p.impl_->vars = std::move(vars);
  for (const auto& [s, fib] : fibers) {
    for (const auto& [name, v] : s) {
      if (!p.impl_->vars.count(name)) {
        throw ConfigError("extension state binds undeclared variable '" + name + "'");
      }
    }
    if (s.size() != p.impl_->vars.size()) {
      throw ConfigError("extension state " + state_str(s) +
                        " does not bind every declared variable");
    }
  }
  p.impl_->fibers = std::move(fibers);
  return p;
}

EPredicate EPredicate::lazy(
    std::set<std::string> vars,
    std::function<std::set<Value>(const State&, const Interpretation&)> fn) {
  EPredicate p;
  p.impl_->kind = Impl::Kind::Lazy;
  p.impl_->vars = std::move(vars);
  p.impl_->fn = std::move(fn);
  return p;
}

const std::set<Value>& EPredicate::fiber(const State& s,
                                         const Interpretation& interp) const {
  Impl& im = *impl_;
  State key;
  for (const auto& v : im.vars) {
    auto it = s.find(v);
    if (it == s.end()) {
      if (interp.is_constant(v)) continue;  // the evaluator resolves these
      throw EvalError("state does not bind '" + v + "'");
    }
    key.emplace(v, it->second);
  }
  {
    std::lock_guard<std::mutex> lock(im.mu);
    if (auto it = im.memo.find(key); it != im.memo.end()) return it->second;
  }

  // Computed outside the lock: lazy fibers may consult other predicates, and
  // concurrent callers (the parallel validity scan) must not serialize here.
  // A racing duplicate computation is harmless; emplace keeps the first.
  std::set<Value> out;
  switch (im.kind) {
    case Impl::Kind::Formula:
      for (const auto& o : interp.predicate_universe()) {
        if (eval_formula(im.formula, key, &o, interp)) out.insert(o);
      }
      break;
    case Impl::Kind::Extension: {
      auto it = im.fibers.find(key);
      if (it != im.fibers.end()) {
        for (const auto& o : it->second) {
          if (o.is_bottom() ? interp.outcome_includes_bottom()
                            : interp.outcome_sort()->contains(o)) {
            out.insert(o);
          } else {
            throw ConfigError("extension fiber value " + o.str() +
                              " outside the predicate universe");
          }
        }
      }
      break;
    }
    case Impl::Kind::Lazy: {
      std::set<Value> raw = im.fn(key, interp);
      for (const auto& o : raw) {
        if (o.is_bottom() ? interp.outcome_includes_bottom()
                          : interp.outcome_sort()->contains(o)) {
          out.insert(o);
        }
      }
      break;
    }
  }
  std::lock_guard<std::mutex> lock(im.mu);
  return im.memo.emplace(std::move(key), std::move(out)).first->second;
}

const std::set<std::string>& EPredicate::variables() const { return impl_->vars; }

const FormulaPtr& EPredicate::formula() const { return impl_->formula; }

EPredicate substitute(const EPredicate& p, const std::string& var, TermPtr t) {
  std::set<std::string> vars = p.variables();
  collect_vars(t, vars);
  vars.insert(var);
  return EPredicate::lazy(
      vars, [p, var, t](const State& s, const Interpretation& interp) {
        State updated = s;
        Value v = eval_term(t, s, nullptr, interp);
        updated[var] = clamp_assign(interp, var, v);
        return p.fiber(updated, interp);
      });
}

EPredicate mix_intersect(FormulaPtr cond, const EPredicate& p) {
  std::set<std::string> vars = p.variables();
  collect_vars(cond, vars);
  return EPredicate::lazy(
      vars, [cond, p](const State& s, const Interpretation& interp) {
        if (!eval_formula(cond, s, nullptr, interp)) return std::set<Value>();
        return p.fiber(s, interp);
      });
}

EPredicate lift_predicate(FormulaPtr cond) {
  std::set<std::string> vars;
  collect_vars(cond, vars);
  return EPredicate::lazy(
      vars, [cond](const State& s, const Interpretation& interp) {
        std::set<Value> out;
        if (eval_formula(cond, s, nullptr, interp)) {
          out.insert(interp.predicate_universe().begin(),
                     interp.predicate_universe().end());
        }
        return out;
      });
}

bool is_functional(const EPredicate& p, const Interpretation& interp,
                   const Footprint& fp) {
  for (std::size_t i = 0; i < fp.state_count(); ++i) {
    if (p.fiber(fp.state_at(i), interp).size() > 1) return false;
  }
  return true;
}

std::map<State, std::set<Value>> extension(const EPredicate& p,
                                           const Interpretation& interp,
                                           const Footprint& fp) {
  std::map<State, std::set<Value>> out;
  for (std::size_t i = 0; i < fp.state_count(); ++i) {
    State s = fp.state_at(i);
    const auto& fib = p.fiber(s, interp);
    if (!fib.empty()) out.emplace(std::move(s), fib);
  }
  return out;
}

std::optional<std::pair<State, Value>> subset_violation(const EPredicate& p,
                                                        const EPredicate& q,
                                                        const Interpretation& interp,
                                                        const Footprint& fp) {
  for (std::size_t i = 0; i < fp.state_count(); ++i) {
    State s = fp.state_at(i);
    const auto& pf = p.fiber(s, interp);
    if (pf.empty()) continue;
    const auto& qf = q.fiber(s, interp);
    for (const auto& o : pf) {
      if (!qf.count(o)) return std::make_pair(std::move(s), o);
    }
  }
  return std::nullopt;
}

std::optional<std::pair<State, Value>> set_difference_witness(
    const EPredicate& p, const EPredicate& q, const Interpretation& interp,
    const Footprint& fp) {
  for (std::size_t i = 0; i < fp.state_count(); ++i) {
    State s = fp.state_at(i);
    const auto& pf = p.fiber(s, interp);
    const auto& qf = q.fiber(s, interp);
    if (pf == qf) continue;
    for (const auto& o : pf) {
      if (!qf.count(o)) return std::make_pair(std::move(s), o);
    }
    for (const auto& o : qf) {
      if (!pf.count(o)) return std::make_pair(std::move(s), o);
    }
  }
  return std::nullopt;
}

}  // namespace mpl
