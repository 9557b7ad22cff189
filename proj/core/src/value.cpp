#include "mpl/value.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

#include "mpl/errors.hpp"

namespace mpl {

Value Value::boolean(bool b) {
  Value v;
  v.kind_ = Kind::Bool;
  v.scalar_ = b ? 1 : 0;
  return v;
}

Value Value::integer(std::int64_t n) {
  Value v;
  v.kind_ = Kind::Int;
  v.scalar_ = n;
  return v;
}

Value Value::tuple(std::vector<Value> parts) {
  Value v;
  v.kind_ = Kind::Tuple;
  v.parts_ = std::make_shared<const std::vector<Value>>(std::move(parts));
  return v;
}

bool Value::as_bool() const {
  assert(kind_ == Kind::Bool);
  return scalar_ != 0;
}

std::int64_t Value::as_int() const {
  assert(kind_ == Kind::Int);
  return scalar_;
}

const std::vector<Value>& Value::parts() const {
  assert(kind_ == Kind::Tuple);
  return *parts_;
}

std::strong_ordering Value::operator<=>(const Value& other) const {
  if (kind_ != other.kind_) {
    return static_cast<int>(kind_) <=> static_cast<int>(other.kind_);
  }
  switch (kind_) {
    case Kind::Bottom:
      return std::strong_ordering::equal;
    case Kind::Bool:
    case Kind::Int:
      return scalar_ <=> other.scalar_;
    case Kind::Tuple: {
      const auto& a = *parts_;
      const auto& b = *other.parts_;
      if (a.size() != b.size()) return a.size() <=> b.size();
      for (std::size_t i = 0; i < a.size(); ++i) {
        auto c = a[i] <=> b[i];
        if (c != std::strong_ordering::equal) return c;
      }
      return std::strong_ordering::equal;
    }
  }
  return std::strong_ordering::equal;
}

bool Value::operator==(const Value& other) const {
  return (*this <=> other) == std::strong_ordering::equal;
}

std::string Value::str() const {
  switch (kind_) {
    case Kind::Bottom:
      return "_|_";
    case Kind::Bool:
      return scalar_ ? "true" : "false";
    case Kind::Int:
      return std::to_string(scalar_);
    case Kind::Tuple: {
      std::ostringstream out;
      out << "(";
      for (std::size_t i = 0; i < parts_->size(); ++i) {
        if (i) out << ", ";
        out << (*parts_)[i].str();
      }
      out << ")";
      return out.str();
    }
  }
  return "?";
}

SortPtr Sort::boolean() {
  auto s = std::shared_ptr<Sort>(new Sort());
  s->kind_ = Kind::Bool;
  return s;
}

SortPtr Sort::int_range(std::int64_t lo, std::int64_t hi) {
  if (lo > hi) throw ConfigError("empty integer range sort");
  auto s = std::shared_ptr<Sort>(new Sort());
  s->kind_ = Kind::IntRange;
  s->lo_ = lo;
  s->hi_ = hi;
  return s;
}

SortPtr Sort::tuple(std::vector<SortPtr> components) {
  if (components.size() < 2) throw ConfigError("tuple sort needs arity >= 2");
  auto s = std::shared_ptr<Sort>(new Sort());
  s->kind_ = Kind::Tuple;
  s->components_ = std::move(components);
  return s;
}

SortPtr Sort::enumeration(std::vector<Value> values) {
  if (values.empty()) throw ConfigError("empty enum sort");
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  for (const auto& v : values) {
    if (v.is_bottom()) throw ConfigError("enum sort may not contain bottom");
  }
  auto s = std::shared_ptr<Sort>(new Sort());
  s->kind_ = Kind::Enum;
  s->values_ = std::move(values);
  s->values_ready_ = true;
  return s;
}

bool Sort::contains(const Value& v) const {
  switch (kind_) {
    case Kind::Bool:
      return v.is_bool();
    case Kind::IntRange:
      return v.is_int() && v.as_int() >= lo_ && v.as_int() <= hi_;
    case Kind::Tuple: {
      if (!v.is_tuple() || v.parts().size() != components_.size()) return false;
      for (std::size_t i = 0; i < components_.size(); ++i) {
        if (!components_[i]->contains(v.parts()[i])) return false;
      }
      return true;
    }
    case Kind::Enum: {
      const auto& vals = values();
      return std::binary_search(vals.begin(), vals.end(), v);
    }
  }
  return false;
}

const std::vector<Value>& Sort::values() const {
  if (values_ready_) return values_;
  switch (kind_) {
    case Kind::Bool:
      values_ = {Value::boolean(false), Value::boolean(true)};
      break;
    case Kind::IntRange:
      for (std::int64_t n = lo_; n <= hi_; ++n) values_.push_back(Value::integer(n));
      break;
    case Kind::Tuple: {
      std::vector<Value> acc;
      std::vector<Value> row(components_.size());
      // Odometer over component value lists; canonical order falls out
      // because each component list is sorted and we vary the last fastest.
      std::vector<std::size_t> idx(components_.size(), 0);
      for (;;) {
        for (std::size_t i = 0; i < components_.size(); ++i) {
          row[i] = components_[i]->values()[idx[i]];
        }
        acc.push_back(Value::tuple(row));
        std::size_t i = components_.size();
        while (i > 0) {
          --i;
          if (++idx[i] < components_[i]->values().size()) break;
          idx[i] = 0;
          if (i == 0) {
            values_ = std::move(acc);
            values_ready_ = true;
            return values_;
          }
        }
      }
    }
    case Kind::Enum:
      break;  // always precomputed
  }
  values_ready_ = true;
  return values_;
}

std::string Sort::str() const {
  switch (kind_) {
    case Kind::Bool:
      return "bool";
    case Kind::IntRange:
      return "int[" + std::to_string(lo_) + "," + std::to_string(hi_) + "]";
    case Kind::Tuple: {
      std::string out = "tuple(";
      for (std::size_t i = 0; i < components_.size(); ++i) {
        if (i) out += ", ";
        out += components_[i]->str();
      }
      return out + ")";
    }
    case Kind::Enum:
      return "enum[" + std::to_string(values_.size()) + "]";
  }
  return "?";
}

std::string state_str(const State& s) {
  std::string out = "{";
  bool first = true;
  for (const auto& [name, v] : s) {
    if (!first) out += ", ";
    first = false;
    out += name + "=" + v.str();
  }
  return out + "}";
}

}  // namespace mpl
