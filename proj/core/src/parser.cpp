#include "mpl/parser.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <vector>

#include "mpl/interpretation.hpp"

namespace mpl {
namespace {

enum class Tok {
  Ident, Int, Keyword,
  Assign,     // :=
  Semi, Comma, LParen, RParen, LBrace, RBrace, LBracket, RBracket,
  Plus, Minus, Star,
  Eq, Lt, Le, Gt, Ge,
  Arrow,      // ->
  End,
};

struct Token {
  Tok kind;
  std::string text;
  std::int64_t int_value = 0;
  int line = 1;
  int col = 1;
};

const std::set<std::string> kKeywords = {
    "if", "then", "else", "fi", "while", "do", "od",
    "ch", "not", "and", "or", "true", "false", "outcome",
};

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> toks;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto push = [&](Tok k, std::string text) {
    toks.push_back({k, std::move(text), 0, line, col});
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == '\n') {
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++col;
      ++i;
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = i;
      while (i < src.size() && (std::isalnum(static_cast<unsigned char>(src[i])) ||
                                src[i] == '_')) {
        ++i;
      }
      std::string word = src.substr(start, i - start);
      push(kKeywords.count(word) ? Tok::Keyword : Tok::Ident, word);
      col += static_cast<int>(word.size());
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = i;
      while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
      std::string digits = src.substr(start, i - start);
      Token t{Tok::Int, digits, 0, line, col};
      try {
        t.int_value = std::stoll(digits);
      } catch (const std::exception&) {
        throw ParseError("integer literal out of range: " + digits, line, col);
      }
      toks.push_back(std::move(t));
      col += static_cast<int>(digits.size());
      continue;
    }
    auto two = [&](char a, char b) {
      return c == a && i + 1 < src.size() && src[i + 1] == b;
    };
    if (two(':', '=')) { push(Tok::Assign, ":="); i += 2; col += 2; continue; }
    if (two('<', '=')) { push(Tok::Le, "<="); i += 2; col += 2; continue; }
    if (two('>', '=')) { push(Tok::Ge, ">="); i += 2; col += 2; continue; }
    if (two('-', '>')) { push(Tok::Arrow, "->"); i += 2; col += 2; continue; }
    Tok k;
    switch (c) {
      case ';': k = Tok::Semi; break;
      case ',': k = Tok::Comma; break;
      case '(': k = Tok::LParen; break;
      case ')': k = Tok::RParen; break;
      case '{': k = Tok::LBrace; break;
      case '}': k = Tok::RBrace; break;
      case '[': k = Tok::LBracket; break;
      case ']': k = Tok::RBracket; break;
      case '+': k = Tok::Plus; break;
      case '-': k = Tok::Minus; break;
      case '*': k = Tok::Star; break;
      case '=': k = Tok::Eq; break;
      case '<': k = Tok::Lt; break;
      case '>': k = Tok::Gt; break;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", line, col);
    }
    push(k, std::string(1, c));
    ++i;
    ++col;
  }
  toks.push_back({Tok::End, "", 0, line, col});
  return toks;
}

class Parser {
public:
  Parser(const std::string& src, ParseMode mode)
      : toks_(lex(src)), mode_(mode) {}

  TermPtr term_only() {
    TermPtr t = term();
    expect_end();
    return t;
  }

  FormulaPtr formula_only() {
    FormulaPtr f = formula();
    expect_end();
    return f;
  }

  MechPtr mechanism_only() {
    MechPtr m = sequence();
    expect_end();
    return m;
  }

  std::vector<std::pair<std::string, TermPtr>> bindings_only() {
    std::vector<std::pair<std::string, TermPtr>> out;
    if (!check(Tok::End)) {
      do {
        if (!check(Tok::Ident)) fail("expected a variable name");
        std::string name = next().text;
        expect(Tok::Eq, "'='");
        out.emplace_back(std::move(name), term());
      } while (match(Tok::Comma));
    }
    expect_end();
    return out;
  }

private:
  const Token& peek(int ahead = 0) const {
    std::size_t i = pos_ + ahead;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  const Token& next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }
  bool check(Tok k) const { return peek().kind == k; }
  bool check_kw(const char* w) const {
    return peek().kind == Tok::Keyword && peek().text == w;
  }
  bool match(Tok k) {
    if (!check(k)) return false;
    ++pos_;
    return true;
  }
  bool match_kw(const char* w) {
    if (!check_kw(w)) return false;
    ++pos_;
    return true;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    std::string got = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw ParseError(msg + ", got " + got, t.line, t.col);
  }
  void expect(Tok k, const char* what) {
    if (!match(k)) fail(std::string("expected ") + what);
  }
  void expect_kw(const char* w) {
    if (!match_kw(w)) fail(std::string("expected '") + w + "'");
  }
  void expect_end() {
    if (!check(Tok::End)) fail("expected end of input");
  }

  // ---- terms ----------------------------------------------------------

  TermPtr term() {
    TermPtr lhs = addend();
    while (check(Tok::Plus) || check(Tok::Minus)) {
      std::string op = next().text;
      TermPtr rhs = addend();
      lhs = Term::call(op, {lhs, rhs});
    }
    return lhs;
  }

  TermPtr addend() {
    TermPtr lhs = factor();
    while (check(Tok::Star)) {
      next();
      TermPtr rhs = factor();
      lhs = Term::call("*", {lhs, rhs});
    }
    return lhs;
  }

  TermPtr factor() {
    if (check(Tok::Int)) return Term::int_lit(next().int_value);
    if (check_kw("outcome")) {
      if (mode_ != ParseMode::Predicate) {
        fail("'outcome' is only allowed in predicates");
      }
      next();
      if (match(Tok::LBracket)) {
        if (!check(Tok::Int) || peek().int_value < 1) {
          fail("expected positive component index");
        }
        int k = static_cast<int>(next().int_value);
        expect(Tok::RBracket, "']'");
        return Term::outcome_proj(k);
      }
      return Term::outcome();
    }
    if (check(Tok::Ident)) {
      std::string name = next().text;
      if (match(Tok::LParen)) {
        std::vector<TermPtr> args;
        if (!check(Tok::RParen)) {
          args.push_back(term());
          while (match(Tok::Comma)) args.push_back(term());
        }
        expect(Tok::RParen, "')'");
        return Term::call(name, std::move(args));
      }
      return Term::var(name);
    }
    if (match(Tok::LParen)) {
      TermPtr first = term();
      if (match(Tok::Comma)) {
        std::vector<TermPtr> parts{first, term()};
        while (match(Tok::Comma)) parts.push_back(term());
        expect(Tok::RParen, "')'");
        return Term::tuple(std::move(parts));
      }
      expect(Tok::RParen, "')'");
      return first;
    }
    fail("expected a term");
  }

  // ---- formulas -------------------------------------------------------
  //
  // implication (right-assoc, predicate mode only) > or > and > not > atom;
  // `or` and `->` desugar to not/and.

  FormulaPtr formula() {
    FormulaPtr lhs = disjunction();
    if (check(Tok::Arrow)) {
      if (mode_ != ParseMode::Predicate) fail("'->' is only allowed in predicates");
      next();
      FormulaPtr rhs = formula();
      return Formula::negate(Formula::conj(lhs, Formula::negate(rhs)));
    }
    return lhs;
  }

  FormulaPtr disjunction() {
    FormulaPtr lhs = conjunction();
    while (match_kw("or")) {
      FormulaPtr rhs = conjunction();
      lhs = Formula::negate(
          Formula::conj(Formula::negate(lhs), Formula::negate(rhs)));
    }
    return lhs;
  }

  FormulaPtr conjunction() {
    FormulaPtr lhs = negation();
    while (match_kw("and")) {
      FormulaPtr rhs = negation();
      lhs = Formula::conj(lhs, rhs);
    }
    return lhs;
  }

  FormulaPtr negation() {
    if (match_kw("not")) return Formula::negate(negation());
    return atom();
  }

  FormulaPtr atom() {
    if (match_kw("true")) return Formula::truth();
    if (match_kw("false")) return Formula::negate(Formula::truth());
    if (check(Tok::LParen)) {
      // Either a parenthesized formula or a relation whose left term starts
      // with '(' (grouping or a tuple literal). Try the formula reading and
      // fall back on failure.
      std::size_t save = pos_;
      try {
        next();
        FormulaPtr f = formula();
        expect(Tok::RParen, "')'");
        if (relop_ahead()) {
          // "(t) = u": the parenthesized part was really a term.
          throw ParseError("term context", peek().line, peek().col);
        }
        return f;
      } catch (const ParseError&) {
        pos_ = save;
        return relation();
      }
    }
    return relation();
  }

  bool relop_ahead() const {
    switch (peek().kind) {
      case Tok::Eq: case Tok::Lt: case Tok::Le: case Tok::Gt: case Tok::Ge:
        return true;
      default:
        return false;
    }
  }

  FormulaPtr relation() {
    TermPtr lhs = term();
    if (relop_ahead()) {
      std::string op = next().text;
      TermPtr rhs = term();
      return Formula::relation(op, {lhs, rhs});
    }
    // A bare call is a custom relation atom; anything else is not a formula.
    if (lhs->kind == Term::Kind::Call && !lhs->args.empty() &&
        lhs->name != "+" && lhs->name != "-" && lhs->name != "*") {
      return Formula::relation(lhs->name, lhs->args);
    }
    fail("expected a relation");
  }

  // ---- mechanisms -----------------------------------------------------

  MechPtr sequence() {
    MechPtr m = statement();
    while (match(Tok::Semi)) {
      MechPtr rhs = statement();
      m = Mechanism::seq(m, rhs);
    }
    return m;
  }

  MechPtr statement() {
    if (match_kw("if")) {
      FormulaPtr cond = formula();
      expect_kw("then");
      MechPtr then_branch = sequence();
      expect_kw("else");
      MechPtr else_branch = sequence();
      expect_kw("fi");
      return Mechanism::ite(cond, then_branch, else_branch);
    }
    if (match_kw("while")) {
      FormulaPtr cond = formula();
      expect_kw("do");
      MechPtr body = sequence();
      expect_kw("od");
      return Mechanism::loop(cond, body);
    }
    if (match_kw("ch")) return choice_stmt();
    if (check(Tok::Ident)) {
      std::string var = next().text;
      expect(Tok::Assign, "':='");
      return Mechanism::assign(var, term());
    }
    fail("expected a statement");
  }

  MechPtr choice_stmt() {
    expect(Tok::LBrace, "'{'");
    std::vector<int> agents;
    do {
      if (!check(Tok::Int) || peek().int_value < 1) {
        fail("expected positive agent number");
      }
      agents.push_back(static_cast<int>(next().int_value));
    } while (match(Tok::Comma));
    expect(Tok::RBrace, "'}'");
    expect(Tok::LParen, "'('");
    std::vector<std::string> vars;
    do {
      if (!check(Tok::Ident)) fail("expected choice variable");
      vars.push_back(next().text);
    } while (match(Tok::Comma));
    expect(Tok::RParen, "')'");
    if (agents.size() != vars.size()) {
      fail("choice agent and variable lists differ in length");
    }
    // Pair positionally, then canonicalize by agent number.
    std::vector<std::pair<int, std::string>> pairs;
    for (std::size_t i = 0; i < agents.size(); ++i) {
      pairs.emplace_back(agents[i], vars[i]);
    }
    std::sort(pairs.begin(), pairs.end());
    for (std::size_t i = 1; i < pairs.size(); ++i) {
      if (pairs[i].first == pairs[i - 1].first) fail("duplicate agent in choice");
    }
    std::set<std::string> seen;
    std::vector<int> sorted_agents;
    std::vector<std::string> sorted_vars;
    for (auto& [a, v] : pairs) {
      if (!seen.insert(v).second) fail("duplicate variable in choice");
      sorted_agents.push_back(a);
      sorted_vars.push_back(std::move(v));
    }
    return Mechanism::choice(std::move(sorted_agents), std::move(sorted_vars));
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  ParseMode mode_;
};

}  // namespace

TermPtr parse_term(const std::string& source, ParseMode mode) {
  return Parser(source, mode).term_only();
}

FormulaPtr parse_formula(const std::string& source, ParseMode mode) {
  return Parser(source, mode).formula_only();
}

MechPtr parse_mechanism(const std::string& source) {
  return Parser(source, ParseMode::Mechanism).mechanism_only();
}

State parse_bindings(const std::string& source, const Interpretation& interp) {
  State out;
  for (auto& [name, t] : Parser(source, ParseMode::Mechanism).bindings_only()) {
    Value v = eval_term(t, State{}, nullptr, interp, EvalMode::Unbounded);
    if (!out.emplace(name, std::move(v)).second) {
      throw ConfigError("duplicate binding for '" + name + "'");
    }
  }
  return out;
}

}  // namespace mpl
