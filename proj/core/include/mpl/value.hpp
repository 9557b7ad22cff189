#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace mpl {

// A runtime value: the distinguished bottom element, a boolean, a bounded
// integer, or a tuple of values. Values are small and freely copied; tuple
// payloads are shared.
class Value {
public:
  enum class Kind { Bottom, Bool, Int, Tuple };

  Value() : kind_(Kind::Bottom) {}
  static Value bottom() { return Value(); }
  static Value boolean(bool b);
  static Value integer(std::int64_t n);
  static Value tuple(std::vector<Value> parts);

  Kind kind() const { return kind_; }
  bool is_bottom() const { return kind_ == Kind::Bottom; }
  bool is_bool() const { return kind_ == Kind::Bool; }
  bool is_int() const { return kind_ == Kind::Int; }
  bool is_tuple() const { return kind_ == Kind::Tuple; }

  bool as_bool() const;
  std::int64_t as_int() const;
  const std::vector<Value>& parts() const;

  // Canonical total order: Bottom < Bool (false < true) < Int (ascending)
  // < Tuple (by arity, then lexicographic). Used for all deterministic
  // iteration and tie-breaking.
  std::strong_ordering operator<=>(const Value& other) const;
  bool operator==(const Value& other) const;

  std::string str() const;

private:
  Kind kind_;
  std::int64_t scalar_ = 0;
  std::shared_ptr<const std::vector<Value>> parts_;
};

// A finite sort. Enum sorts carry an explicit value list; the others are
// generated. Sorts are immutable and shared.
class Sort;
using SortPtr = std::shared_ptr<const Sort>;

class Sort {
public:
  enum class Kind { Bool, IntRange, Tuple, Enum };

  static SortPtr boolean();
  static SortPtr int_range(std::int64_t lo, std::int64_t hi);
  static SortPtr tuple(std::vector<SortPtr> components);
  static SortPtr enumeration(std::vector<Value> values);

  Kind kind() const { return kind_; }
  std::int64_t lo() const { return lo_; }
  std::int64_t hi() const { return hi_; }
  const std::vector<SortPtr>& components() const { return components_; }

  bool contains(const Value& v) const;
  // All elements in canonical order. Computed on first use and cached.
  const std::vector<Value>& values() const;
  std::size_t size() const { return values().size(); }
  std::string str() const;

private:
  Sort() = default;

  Kind kind_ = Kind::Bool;
  std::int64_t lo_ = 0, hi_ = 0;
  std::vector<SortPtr> components_;
  mutable std::vector<Value> values_;
  mutable bool values_ready_ = false;
};

// A program state: total map from variable names to values. Bottom is never
// a state value.
using State = std::map<std::string, Value>;

std::string state_str(const State& s);

}  // namespace mpl
