#include "mpl/derivation_io.hpp"

#include "json.hpp"
#include "json_values.hpp"
#include "mpl/config.hpp"
#include "mpl/parser.hpp"

namespace mpl {
namespace {

using json = nlohmann::ordered_json;
using detail::value_from_json;
using detail::value_to_json;

Derivation::Rule rule_from_string(const std::string& s, const std::string& where) {
  if (s == "assign") return Derivation::Rule::Assign;
  if (s == "choice") return Derivation::Rule::Choice;
  if (s == "comp") return Derivation::Rule::Comp;
  if (s == "if") return Derivation::Rule::If;
  if (s == "while") return Derivation::Rule::While;
  if (s == "consequence") return Derivation::Rule::Consequence;
  throw ConfigError(where + ": unknown rule \"" + s + "\"");
}

struct PredSpec {
  EPredicate pred;
  std::optional<std::string> text;
  bool is_auto = false;
};

// Accepts a bare formula string, {"formula": "..."}, {"extension": [...]},
// and (for axiom preconditions only) the marker "auto".
PredSpec pred_from_json(const json& j, const std::string& where, bool allow_auto) {
  PredSpec out;
  if (j.is_string()) {
    std::string s = j.get<std::string>();
    if (s == "auto") {
      if (!allow_auto) {
        throw ConfigError(where +
                          ": \"auto\" is only allowed as an axiom precondition");
      }
      out.is_auto = true;
      return out;
    }
    out.pred = EPredicate::from_formula_text(s);
    out.text = std::move(s);
    return out;
  }
  if (j.is_object() && j.contains("formula")) {
    if (!j["formula"].is_string()) {
      throw ConfigError(where + ".formula: expected a string");
    }
    std::string s = j["formula"].get<std::string>();
    out.pred = EPredicate::from_formula_text(s);
    out.text = std::move(s);
    return out;
  }
  if (j.is_object() && j.contains("extension")) {
    const json& rows = j["extension"];
    if (!rows.is_array()) {
      throw ConfigError(where + ".extension: expected an array of rows");
    }
    std::set<std::string> vars;
    std::map<State, std::set<Value>> fibers;
    bool first = true;
    for (const json& row : rows) {
      if (!row.is_object() || !row.contains("state") || !row.contains("outcomes")) {
        throw ConfigError(where +
                          ".extension: each row needs \"state\" and \"outcomes\"");
      }
      const json& st = row["state"];
      if (!st.is_object()) {
        throw ConfigError(where + ".extension: \"state\" must be an object");
      }
      State s;
      for (auto it = st.begin(); it != st.end(); ++it) {
        s.emplace(it.key(), value_from_json(it.value(), where + ".extension.state"));
      }
      std::set<std::string> row_vars;
      for (const auto& [name, _] : s) row_vars.insert(name);
      if (first) {
        vars = std::move(row_vars);
        first = false;
      } else if (row_vars != vars) {
        throw ConfigError(where + ".extension: rows bind different variables");
      }
      const json& outs = row["outcomes"];
      if (!outs.is_array()) {
        throw ConfigError(where + ".extension: \"outcomes\" must be an array");
      }
      std::set<Value>& fib = fibers[std::move(s)];
      for (const json& o : outs) {
        fib.insert(value_from_json(o, where + ".extension.outcomes"));
      }
    }
    out.pred = EPredicate::of_extension(std::move(vars), std::move(fibers));
    return out;
  }
  throw ConfigError(where + ": expected a formula string, {\"formula\": ...}" +
                    std::string(", {\"extension\": ...}") +
                    (allow_auto ? " or \"auto\"" : ""));
}

Derivation node_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  Derivation d;
  if (!j.contains("rule") || !j["rule"].is_string()) {
    throw ConfigError(where + ": missing \"rule\"");
  }
  d.rule = rule_from_string(j["rule"].get<std::string>(), where);
  if (!j.contains("mechanism") || !j["mechanism"].is_string()) {
    throw ConfigError(where + ": missing \"mechanism\"");
  }
  d.mech = parse_mechanism(j["mechanism"].get<std::string>());

  bool axiom = d.rule == Derivation::Rule::Assign ||
               d.rule == Derivation::Rule::Choice;
  if (!j.contains("pre")) throw ConfigError(where + ": missing \"pre\"");
  PredSpec pre = pred_from_json(j["pre"], where + ".pre", axiom);
  d.pre = std::move(pre.pred);
  d.pre_text = std::move(pre.text);
  d.pre_auto = pre.is_auto;

  if (!j.contains("post")) throw ConfigError(where + ": missing \"post\"");
  PredSpec post = pred_from_json(j["post"], where + ".post", false);
  d.post = std::move(post.pred);
  d.post_text = std::move(post.text);

  if (d.rule == Derivation::Rule::Comp) {
    if (!j.contains("midpoint")) {
      throw ConfigError(where + ": comp nodes need a \"midpoint\"");
    }
    PredSpec mid = pred_from_json(j["midpoint"], where + ".midpoint", false);
    d.midpoint = std::move(mid.pred);
    d.midpoint_text = std::move(mid.text);
  }
  if (d.rule == Derivation::Rule::While) {
    if (!j.contains("invariant")) {
      throw ConfigError(where + ": while nodes need an \"invariant\"");
    }
    PredSpec inv = pred_from_json(j["invariant"], where + ".invariant", false);
    d.invariant = std::move(inv.pred);
    d.invariant_text = std::move(inv.text);
  }

  if (j.contains("children")) {
    const json& kids = j["children"];
    if (!kids.is_array()) {
      throw ConfigError(where + ".children: expected an array");
    }
    std::size_t i = 0;
    for (const json& kid : kids) {
      d.children.push_back(
          node_from_json(kid, where + ".children[" + std::to_string(i) + "]"));
      ++i;
    }
  }
  return d;
}

json pred_to_json(const EPredicate& p, const std::optional<std::string>& text,
                  const Interpretation& interp) {
  if (text) return json{{"formula", *text}};
  if (p.formula()) return json{{"formula", pretty(p.formula())}};
  Footprint fp(interp, p.variables());
  json rows = json::array();
  for (const auto& [s, fib] : extension(p, interp, fp)) {
    json st = json::object();
    for (const auto& [name, v] : s) st[name] = value_to_json<json>(v);
    json outs = json::array();
    for (const Value& o : fib) outs.push_back(value_to_json<json>(o));
    rows.push_back(json{{"state", st}, {"outcomes", outs}});
  }
  return json{{"extension", rows}};
}

json node_to_json(const Derivation& d, const Interpretation& interp) {
  json out;
  out["rule"] = to_string(d.rule);
  out["mechanism"] = pretty(d.mech);
  out["pre"] = d.pre_auto ? json("auto") : pred_to_json(d.pre, d.pre_text, interp);
  out["post"] = pred_to_json(d.post, d.post_text, interp);
  if (d.rule == Derivation::Rule::Comp) {
    out["midpoint"] = pred_to_json(d.midpoint, d.midpoint_text, interp);
  }
  if (d.rule == Derivation::Rule::While) {
    out["invariant"] = pred_to_json(d.invariant, d.invariant_text, interp);
  }
  if (!d.children.empty()) {
    json kids = json::array();
    for (const Derivation& c : d.children) kids.push_back(node_to_json(c, interp));
    out["children"] = std::move(kids);
  }
  return out;
}

json parse_document(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

}  // namespace

std::string derivation_to_json(const Derivation& d, const Interpretation& interp) {
  return node_to_json(d, interp).dump(2);
}

Derivation derivation_from_json(const std::string& json_text) {
  json doc = parse_document(json_text, "derivation document");
  return node_from_json(doc, "root");
}

SocialChoiceSpec social_choice_from_json(const std::string& json_text) {
  json doc = parse_document(json_text, "social choice document");
  if (!doc.is_object() || !doc.contains("profiles") || !doc["profiles"].is_array()) {
    throw ConfigError("social choice document: expected {\"profiles\": [...]}");
  }
  SocialChoiceSpec spec;
  std::size_t i = 0;
  for (const json& pj : doc["profiles"]) {
    std::string where = "profiles[" + std::to_string(i) + "]";
    ++i;
    if (!pj.is_object()) throw ConfigError(where + ": expected an object");
    SocialChoiceProfile prof;
    if (pj.contains("name")) {
      if (!pj["name"].is_string()) {
        throw ConfigError(where + ".name: expected a string");
      }
      prof.name = pj["name"].get<std::string>();
    } else {
      prof.name = "profile-" + std::to_string(i);
    }
    if (!pj.contains("preferences")) {
      throw ConfigError(where + ": missing \"preferences\"");
    }
    prof.preferences = preferences_from_json(pj["preferences"].dump());
    if (!pj.contains("outcomes") || !pj["outcomes"].is_array()) {
      throw ConfigError(where + ": missing \"outcomes\" array");
    }
    for (const json& o : pj["outcomes"]) {
      prof.outcomes.insert(value_from_json(o, where + ".outcomes"));
    }
    if (prof.outcomes.empty()) {
      throw ConfigError(where + ": needs at least one goal outcome");
    }
    spec.profiles.push_back(std::move(prof));
  }
  if (spec.profiles.empty()) {
    throw ConfigError("social choice document: no profiles given");
  }
  return spec;
}

}  // namespace mpl
