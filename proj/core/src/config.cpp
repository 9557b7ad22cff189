#include "mpl/config.hpp"

#include "json.hpp"
#include "json_values.hpp"
#include "mpl/parser.hpp"

namespace mpl {
namespace {

using nlohmann::json;
using detail::value_from_json;

SortPtr sort_from_json(const json& j, const std::string& where) {
  if (j.is_string() && j.get<std::string>() == "bool") return Sort::boolean();
  if (!j.is_object()) {
    throw ConfigError(where + ": expected a sort object or \"bool\"");
  }
  if (j.contains("int")) {
    const auto& r = j.at("int");
    if (!r.is_array() || r.size() != 2 || !r[0].is_number_integer() ||
        !r[1].is_number_integer()) {
      throw ConfigError(where + ": \"int\" takes [lo, hi]");
    }
    return Sort::int_range(r[0].get<std::int64_t>(), r[1].get<std::int64_t>());
  }
  if (j.contains("tuple")) {
    const auto& comps = j.at("tuple");
    if (!comps.is_array() || comps.size() < 2) {
      throw ConfigError(where + ": \"tuple\" takes at least 2 component sorts");
    }
    std::vector<SortPtr> parts;
    for (std::size_t i = 0; i < comps.size(); ++i) {
      parts.push_back(sort_from_json(comps[i], where + ".tuple[" + std::to_string(i) + "]"));
    }
    return Sort::tuple(std::move(parts));
  }
  if (j.contains("values")) {
    const auto& vals = j.at("values");
    if (!vals.is_array() || vals.empty()) {
      throw ConfigError(where + ": \"values\" takes a nonempty array");
    }
    std::vector<Value> out;
    for (const auto& v : vals) {
      Value val = value_from_json(v, where + ".values");
      if (val.is_bottom()) {
        throw ConfigError(where + ": enum sorts may not contain bottom");
      }
      out.push_back(std::move(val));
    }
    return Sort::enumeration(std::move(out));
  }
  throw ConfigError(where + ": sort needs one of \"int\", \"tuple\", \"values\"");
}

PreferenceSpec preference_from_json(const json& j, const std::string& where) {
  PreferenceSpec pref;
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  if (j.contains("utility")) {
    const auto& u = j.at("utility");
    auto parse_case = [&](const json& c) {
      UtilityCase uc;
      if (c.is_string()) {
        uc.value = parse_term(c.get<std::string>(), ParseMode::Predicate);
        return uc;
      }
      if (!c.is_object() || !c.contains("then")) {
        throw ConfigError(where + ": utility case needs a \"then\" term");
      }
      if (c.contains("if")) {
        uc.guard = parse_formula(c.at("if").get<std::string>(), ParseMode::Predicate);
      }
      uc.value = parse_term(c.at("then").get<std::string>(), ParseMode::Predicate);
      return uc;
    };
    if (u.is_string()) {
      pref.utility.push_back(parse_case(u));
    } else if (u.is_array()) {
      for (const auto& c : u) pref.utility.push_back(parse_case(c));
    } else {
      throw ConfigError(where + ": \"utility\" takes a term string or case array");
    }
    if (pref.utility.empty()) throw ConfigError(where + ": empty utility case list");
  } else if (j.contains("pairs")) {
    const auto& p = j.at("pairs");
    if (!p.is_array()) throw ConfigError(where + ": \"pairs\" takes an array");
    for (const auto& pair : p) {
      if (!pair.is_array() || pair.size() != 2) {
        throw ConfigError(where + ": each preference pair is [better, worse]");
      }
      pref.pairs.emplace_back(value_from_json(pair[0], where),
                              value_from_json(pair[1], where));
    }
  } else {
    throw ConfigError(where + ": preference needs \"utility\" or \"pairs\"");
  }
  return pref;
}

std::map<int, PreferenceSpec> preference_table_from_json(const json& j,
                                                         const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  std::map<int, PreferenceSpec> out;
  for (const auto& [key, val] : j.items()) {
    int agent = 0;
    try {
      std::size_t used = 0;
      agent = std::stoi(key, &used);
      if (used != key.size()) throw std::invalid_argument(key);
    } catch (const std::exception&) {
      throw ConfigError(where + ": agent keys must be numbers, got \"" + key + "\"");
    }
    out.emplace(agent, preference_from_json(val, where + "." + key));
  }
  return out;
}

}  // namespace

InterpretationSpec interpretation_spec_from_json(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("interpretation must be a JSON object");

  InterpretationSpec spec;
  if (!doc.contains("agents") || !doc.at("agents").is_number_integer()) {
    throw ConfigError("\"agents\" (integer) is required");
  }
  spec.num_agents = doc.at("agents").get<int>();

  if (doc.contains("sorts")) {
    const auto& sorts = doc.at("sorts");
    if (!sorts.is_object()) throw ConfigError("\"sorts\" must be an object");
    for (const auto& [name, s] : sorts.items()) {
      spec.sorts.emplace(name, sort_from_json(s, "sorts." + name));
    }
  }
  if (!doc.contains("outcome")) throw ConfigError("\"outcome\" sort is required");
  spec.outcome_sort = sort_from_json(doc.at("outcome"), "outcome");

  if (doc.contains("constants")) {
    if (!doc.at("constants").is_object()) {
      throw ConfigError("\"constants\" must be an object");
    }
    for (const auto& [name, v] : doc.at("constants").items()) {
      spec.constants.emplace(name, value_from_json(v, "constants." + name));
    }
  }
  if (doc.contains("int_universe")) {
    const auto& u = doc.at("int_universe");
    if (!u.is_array() || u.size() != 2 || !u[0].is_number_integer() ||
        !u[1].is_number_integer()) {
      throw ConfigError("\"int_universe\" takes [lo, hi]");
    }
    spec.int_universe = {u[0].get<std::int64_t>(), u[1].get<std::int64_t>()};
  }
  if (doc.contains("outcome_includes_bottom")) {
    const auto& b = doc.at("outcome_includes_bottom");
    if (!b.is_boolean()) throw ConfigError("\"outcome_includes_bottom\" must be a boolean");
    spec.outcome_includes_bottom = b.get<bool>();
  }

  if (doc.contains("functions")) {
    for (const auto& [name, f] : doc.at("functions").items()) {
      const std::string where = "functions." + name;
      FunctionDef def;
      if (!f.is_object() || !f.contains("args") || !f.contains("result") ||
          !f.contains("table") || !f.at("args").is_array() ||
          !f.at("table").is_array()) {
        throw ConfigError(where + ": needs \"args\" (array), \"result\", \"table\" (array)");
      }
      for (std::size_t i = 0; i < f.at("args").size(); ++i) {
        def.arg_sorts.push_back(
            sort_from_json(f.at("args")[i], where + ".args[" + std::to_string(i) + "]"));
      }
      def.result_sort = sort_from_json(f.at("result"), where + ".result");
      for (const auto& row : f.at("table")) {
        if (!row.is_array() || row.size() != def.arg_sorts.size() + 1) {
          throw ConfigError(where + ": each table row is [arg..., result]");
        }
        std::vector<Value> args;
        for (std::size_t i = 0; i + 1 < row.size(); ++i) {
          args.push_back(value_from_json(row[i], where + ".table"));
        }
        Value res = value_from_json(row.back(), where + ".table");
        if (!def.table.emplace(std::move(args), std::move(res)).second) {
          throw ConfigError(where + ": duplicate table row");
        }
      }
      spec.functions.emplace(name, std::move(def));
    }
  }
  if (doc.contains("relations")) {
    for (const auto& [name, r] : doc.at("relations").items()) {
      const std::string where = "relations." + name;
      RelationDef def;
      if (!r.is_object() || !r.contains("args") || !r.contains("table") ||
          !r.at("args").is_array() || !r.at("table").is_array()) {
        throw ConfigError(where + ": needs \"args\" (array) and \"table\" (array)");
      }
      for (std::size_t i = 0; i < r.at("args").size(); ++i) {
        def.arg_sorts.push_back(
            sort_from_json(r.at("args")[i], where + ".args[" + std::to_string(i) + "]"));
      }
      for (const auto& row : r.at("table")) {
        if (!row.is_array() || row.size() != def.arg_sorts.size()) {
          throw ConfigError(where + ": each table row lists one argument tuple");
        }
        std::vector<Value> args;
        for (const auto& cell : row) {
          args.push_back(value_from_json(cell, where + ".table"));
        }
        def.table.insert(std::move(args));
      }
      spec.relations.emplace(name, std::move(def));
    }
  }
  if (doc.contains("preferences")) {
    spec.preferences = preference_table_from_json(doc.at("preferences"), "preferences");
  }
  return spec;
}

Interpretation interpretation_from_json(const std::string& json_text) {
  return Interpretation(interpretation_spec_from_json(json_text));
}

std::map<int, PreferenceSpec> preferences_from_json(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  return preference_table_from_json(doc, "preferences");
}

}  // namespace mpl
