#include "mpl/ast.hpp"

#include <cassert>
#include <sstream>

namespace mpl {

TermPtr Term::var(std::string name) {
  auto t = std::make_shared<Term>();
  t->kind = Kind::Var;
  t->name = std::move(name);
  return t;
}

TermPtr Term::int_lit(std::int64_t v) {
  auto t = std::make_shared<Term>();
  t->kind = Kind::IntLit;
  t->int_value = v;
  return t;
}

TermPtr Term::call(std::string name, std::vector<TermPtr> args) {
  auto t = std::make_shared<Term>();
  t->kind = Kind::Call;
  t->name = std::move(name);
  t->args = std::move(args);
  return t;
}

TermPtr Term::tuple(std::vector<TermPtr> parts) {
  assert(parts.size() >= 2);
  auto t = std::make_shared<Term>();
  t->kind = Kind::TupleCons;
  t->args = std::move(parts);
  return t;
}

TermPtr Term::outcome() {
  auto t = std::make_shared<Term>();
  t->kind = Kind::Outcome;
  return t;
}

TermPtr Term::outcome_proj(int k) {
  assert(k >= 1);
  auto t = std::make_shared<Term>();
  t->kind = Kind::OutcomeProj;
  t->index = k;
  return t;
}

FormulaPtr Formula::truth() {
  auto f = std::make_shared<Formula>();
  f->kind = Kind::True;
  return f;
}

FormulaPtr Formula::relation(std::string name, std::vector<TermPtr> args) {
  auto f = std::make_shared<Formula>();
  f->kind = Kind::Rel;
  f->rel = std::move(name);
  f->args = std::move(args);
  return f;
}

FormulaPtr Formula::negate(FormulaPtr inner) {
  auto f = std::make_shared<Formula>();
  f->kind = Kind::Not;
  f->lhs = std::move(inner);
  return f;
}

FormulaPtr Formula::conj(FormulaPtr a, FormulaPtr b) {
  auto f = std::make_shared<Formula>();
  f->kind = Kind::And;
  f->lhs = std::move(a);
  f->rhs = std::move(b);
  return f;
}

MechPtr Mechanism::assign(std::string var, TermPtr term) {
  auto m = std::make_shared<Mechanism>();
  m->kind = Kind::Assign;
  m->var = std::move(var);
  m->term = std::move(term);
  return m;
}

MechPtr Mechanism::seq(MechPtr a, MechPtr b) {
  assert(a && b);
  auto m = std::make_shared<Mechanism>();
  m->kind = Kind::Seq;
  m->first = std::move(a);
  m->second = std::move(b);
  return m;
}

MechPtr Mechanism::ite(FormulaPtr cond, MechPtr then_branch, MechPtr else_branch) {
  assert(then_branch && else_branch);
  auto m = std::make_shared<Mechanism>();
  m->kind = Kind::Ite;
  m->cond = std::move(cond);
  m->first = std::move(then_branch);
  m->second = std::move(else_branch);
  return m;
}

MechPtr Mechanism::loop(FormulaPtr cond, MechPtr body) {
  assert(body);
  auto m = std::make_shared<Mechanism>();
  m->kind = Kind::Loop;
  m->cond = std::move(cond);
  m->first = std::move(body);
  return m;
}

MechPtr Mechanism::choice(std::vector<int> agents, std::vector<std::string> vars) {
  assert(!agents.empty() && agents.size() == vars.size());
  auto m = std::make_shared<Mechanism>();
  m->kind = Kind::Choice;
  m->agents = std::move(agents);
  m->choice_vars = std::move(vars);
  return m;
}

std::string to_string(MechClass c) {
  switch (c) {
    case MechClass::PRG: return "PRG";
    case MechClass::PI: return "PI";
    case MechClass::GENERAL: return "GENERAL";
  }
  return "?";
}

MechClass classify(const MechPtr& m) {
  if (!m) return MechClass::PRG;
  switch (m->kind) {
    case Mechanism::Kind::Assign:
      return MechClass::PRG;
    case Mechanism::Kind::Choice:
      return m->agents.size() == 1 ? MechClass::PI : MechClass::GENERAL;
    case Mechanism::Kind::Loop:
      return classify(m->first);
    case Mechanism::Kind::Seq:
    case Mechanism::Kind::Ite: {
      MechClass a = classify(m->first);
      MechClass b = classify(m->second);
      if (a == MechClass::GENERAL || b == MechClass::GENERAL) return MechClass::GENERAL;
      if (a == MechClass::PI || b == MechClass::PI) return MechClass::PI;
      return MechClass::PRG;
    }
  }
  return MechClass::GENERAL;
}

bool equal(const TermPtr& a, const TermPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Term::Kind::Var:
      return a->name == b->name;
    case Term::Kind::IntLit:
      return a->int_value == b->int_value;
    case Term::Kind::Outcome:
      return true;
    case Term::Kind::OutcomeProj:
      return a->index == b->index;
    case Term::Kind::Call:
      if (a->name != b->name) return false;
      [[fallthrough]];
    case Term::Kind::TupleCons: {
      if (a->args.size() != b->args.size()) return false;
      for (std::size_t i = 0; i < a->args.size(); ++i) {
        if (!equal(a->args[i], b->args[i])) return false;
      }
      return true;
    }
  }
  return false;
}

bool equal(const FormulaPtr& a, const FormulaPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Formula::Kind::True:
      return true;
    case Formula::Kind::Rel: {
      if (a->rel != b->rel || a->args.size() != b->args.size()) return false;
      for (std::size_t i = 0; i < a->args.size(); ++i) {
        if (!equal(a->args[i], b->args[i])) return false;
      }
      return true;
    }
    case Formula::Kind::Not:
      return equal(a->lhs, b->lhs);
    case Formula::Kind::And:
      return equal(a->lhs, b->lhs) && equal(a->rhs, b->rhs);
  }
  return false;
}

bool equal(const MechPtr& a, const MechPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Mechanism::Kind::Assign:
      return a->var == b->var && equal(a->term, b->term);
    case Mechanism::Kind::Seq:
      return equal(a->first, b->first) && equal(a->second, b->second);
    case Mechanism::Kind::Ite:
      return equal(a->cond, b->cond) && equal(a->first, b->first) &&
             equal(a->second, b->second);
    case Mechanism::Kind::Loop:
      return equal(a->cond, b->cond) && equal(a->first, b->first);
    case Mechanism::Kind::Choice:
      return a->agents == b->agents && a->choice_vars == b->choice_vars;
  }
  return false;
}

void collect_vars(const TermPtr& t, std::set<std::string>& out) {
  if (!t) return;
  if (t->kind == Term::Kind::Var) out.insert(t->name);
  for (const auto& arg : t->args) collect_vars(arg, out);
}

void collect_vars(const FormulaPtr& f, std::set<std::string>& out) {
  if (!f) return;
  for (const auto& arg : f->args) collect_vars(arg, out);
  collect_vars(f->lhs, out);
  collect_vars(f->rhs, out);
}

void collect_vars(const MechPtr& m, std::set<std::string>& out) {
  if (!m) return;
  switch (m->kind) {
    case Mechanism::Kind::Assign:
      out.insert(m->var);
      collect_vars(m->term, out);
      break;
    case Mechanism::Kind::Seq:
      collect_vars(m->first, out);
      collect_vars(m->second, out);
      break;
    case Mechanism::Kind::Ite:
      collect_vars(m->cond, out);
      collect_vars(m->first, out);
      collect_vars(m->second, out);
      break;
    case Mechanism::Kind::Loop:
      collect_vars(m->cond, out);
      collect_vars(m->first, out);
      break;
    case Mechanism::Kind::Choice:
      for (const auto& v : m->choice_vars) out.insert(v);
      break;
  }
}

namespace {

// Precedence climbing for printing: addition binds looser than
// multiplication; parenthesize a looser child inside a tighter parent.
int term_prec(const Term& t) {
  if (t.kind == Term::Kind::Call && t.args.size() == 2) {
    if (t.name == "+" || t.name == "-") return 1;
    if (t.name == "*") return 2;
  }
  return 3;
}

void print_term(const Term& t, int parent_prec, std::ostringstream& out) {
  switch (t.kind) {
    case Term::Kind::Var:
      out << t.name;
      return;
    case Term::Kind::IntLit:
      out << t.int_value;
      return;
    case Term::Kind::Outcome:
      out << "outcome";
      return;
    case Term::Kind::OutcomeProj:
      out << "outcome[" << t.index << "]";
      return;
    case Term::Kind::TupleCons: {
      out << "(";
      for (std::size_t i = 0; i < t.args.size(); ++i) {
        if (i) out << ", ";
        print_term(*t.args[i], 0, out);
      }
      out << ")";
      return;
    }
    case Term::Kind::Call: {
      int prec = term_prec(t);
      if (prec < 3) {
        bool paren = prec < parent_prec;
        if (paren) out << "(";
        print_term(*t.args[0], prec, out);
        out << " " << t.name << " ";
        // Right child needs strictly tighter binding: "a - (b - c)".
        print_term(*t.args[1], prec + 1, out);
        if (paren) out << ")";
      } else {
        out << t.name << "(";
        for (std::size_t i = 0; i < t.args.size(); ++i) {
          if (i) out << ", ";
          print_term(*t.args[i], 0, out);
        }
        out << ")";
      }
      return;
    }
  }
}

// Formula precedence: not > and. Desugared forms print as-is.
void print_formula(const Formula& f, bool need_atom, std::ostringstream& out) {
  switch (f.kind) {
    case Formula::Kind::True:
      out << "true";
      return;
    case Formula::Kind::Rel: {
      if (f.args.size() == 2 &&
          (f.rel == "=" || f.rel == "<" || f.rel == "<=" || f.rel == ">" ||
           f.rel == ">=")) {
        print_term(*f.args[0], 0, out);
        out << " " << f.rel << " ";
        print_term(*f.args[1], 0, out);
      } else {
        out << f.rel << "(";
        for (std::size_t i = 0; i < f.args.size(); ++i) {
          if (i) out << ", ";
          print_term(*f.args[i], 0, out);
        }
        out << ")";
      }
      return;
    }
    case Formula::Kind::Not:
      out << "not ";
      print_formula(*f.lhs, true, out);
      return;
    case Formula::Kind::And: {
      if (need_atom) out << "(";
      print_formula(*f.lhs, true, out);
      out << " and ";
      print_formula(*f.rhs, true, out);
      if (need_atom) out << ")";
      return;
    }
  }
}

void print_mech(const Mechanism& m, std::ostringstream& out) {
  switch (m.kind) {
    case Mechanism::Kind::Assign:
      out << m.var << " := ";
      print_term(*m.term, 0, out);
      return;
    case Mechanism::Kind::Seq:
      print_mech(*m.first, out);
      out << "; ";
      print_mech(*m.second, out);
      return;
    case Mechanism::Kind::Ite:
      out << "if ";
      print_formula(*m.cond, false, out);
      out << " then ";
      print_mech(*m.first, out);
      out << " else ";
      print_mech(*m.second, out);
      out << " fi";
      return;
    case Mechanism::Kind::Loop:
      out << "while ";
      print_formula(*m.cond, false, out);
      out << " do ";
      print_mech(*m.first, out);
      out << " od";
      return;
    case Mechanism::Kind::Choice: {
      out << "ch {";
      for (std::size_t i = 0; i < m.agents.size(); ++i) {
        if (i) out << ", ";
        out << m.agents[i];
      }
      out << "} (";
      for (std::size_t i = 0; i < m.choice_vars.size(); ++i) {
        if (i) out << ", ";
        out << m.choice_vars[i];
      }
      out << ")";
      return;
    }
  }
}

}  // namespace

std::string pretty(const TermPtr& t) {
  std::ostringstream out;
  if (t) print_term(*t, 0, out);
  return out.str();
}

std::string pretty(const FormulaPtr& f) {
  std::ostringstream out;
  if (f) print_formula(*f, false, out);
  return out.str();
}

std::string pretty(const MechPtr& m) {
  if (!m) return "";
  std::ostringstream out;
  print_mech(*m, out);
  return out.str();
}

}  // namespace mpl
