#pragma once

#include <string>

#include "json.hpp"
#include "mpl/errors.hpp"
#include "mpl/value.hpp"

namespace mpl::detail {

template <class Json>
Value value_from_json(const Json& j, const std::string& where) {
  if (j.is_number_integer()) return Value::integer(j.template get<std::int64_t>());
  if (j.is_boolean()) return Value::boolean(j.template get<bool>());
  if (j.is_string() && j.template get<std::string>() == "bottom") {
    return Value::bottom();
  }
  if (j.is_array()) {
    if (j.size() < 2) {
      throw ConfigError(where + ": tuple values need at least 2 components");
    }
    std::vector<Value> parts;
    for (const auto& p : j) parts.push_back(value_from_json(p, where));
    return Value::tuple(std::move(parts));
  }
  throw ConfigError(where + ": expected an integer, boolean, tuple array or \"bottom\"");
}

template <class Json = nlohmann::json>
Json value_to_json(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::Bottom:
      return "bottom";
    case Value::Kind::Bool:
      return v.as_bool();
    case Value::Kind::Int:
      return v.as_int();
    case Value::Kind::Tuple: {
      Json arr = Json::array();
      for (const auto& p : v.parts()) arr.push_back(value_to_json<Json>(p));
      return arr;
    }
  }
  throw EvalError("unreachable value kind");
}

}  // namespace mpl::detail
