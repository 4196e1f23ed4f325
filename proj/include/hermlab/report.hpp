#pragma once

// Ordered report tree and its JSON / text renderings.  Numbers are printed
// with 17 significant digits so identical runs give identical bytes.

#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "hermlab/tensorcore.hpp"
#include "hermlab/verify.hpp"

namespace hermlab {

struct Value;
using Object = std::vector<std::pair<std::string, Value>>;
using Array = std::vector<Value>;

struct Value {
  std::variant<std::nullptr_t, bool, double, long long, std::string, std::shared_ptr<Array>, std::shared_ptr<Object>> v;

  Value() : v(nullptr) {}
  Value(std::nullptr_t) : v(nullptr) {}
  Value(bool b) : v(b) {}
  Value(double d) : v(d) {}
  Value(int i) : v((long long)i) {}
  Value(long long i) : v(i) {}
  Value(const char* s) : v(std::string(s)) {}
  Value(std::string s) : v(std::move(s)) {}
  Value(Array a) : v(std::make_shared<Array>(std::move(a))) {}
  Value(Object o) : v(std::make_shared<Object>(std::move(o))) {}

  const Object* object() const {
    auto p = std::get_if<std::shared_ptr<Object>>(&v);
    return p ? p->get() : nullptr;
  }
  const Array* array() const {
    auto p = std::get_if<std::shared_ptr<Array>>(&v);
    return p ? p->get() : nullptr;
  }
  // first member with this key, or nullptr
  const Value* find(const std::string& k) const {
    if (auto o = object())
      for (auto& [a, b] : *o)
        if (a == k) return &b;
    return nullptr;
  }
};

inline std::string format_number(double x) {
  if (!std::isfinite(x)) return "null";
  if (x == 0) x = 0.0;  // no negative zero
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s = buf;
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

inline std::string json_escape(const std::string& s) {
  std::string o = "\"";
  for (char c : s) {
    switch (c) {
      case '"': o += "\\\""; break;
      case '\\': o += "\\\\"; break;
      case '\n': o += "\\n"; break;
      case '\t': o += "\\t"; break;
      default:
        if ((unsigned char)c < 0x20) {
          char b[8];
          std::snprintf(b, sizeof b, "\\u%04x", c);
          o += b;
        } else {
          o += c;
        }
    }
  }
  return o + "\"";
}

namespace detail {

inline bool scalar_array(const Array& a) {
  for (auto& x : a)
    if (x.array() || x.object()) return false;
  return true;
}

inline std::string scalar_text(const Value& x, bool json) {
  if (std::holds_alternative<std::nullptr_t>(x.v)) return "null";
  if (auto b = std::get_if<bool>(&x.v)) return *b ? "true" : "false";
  if (auto d = std::get_if<double>(&x.v)) return format_number(*d);
  if (auto i = std::get_if<long long>(&x.v)) return std::to_string(*i);
  if (auto s = std::get_if<std::string>(&x.v)) return json ? json_escape(*s) : *s;
  return "";
}

inline void write_json(std::ostream& os, const Value& x, int indent) {
  std::string pad(indent, ' '), pad2(indent + 2, ' ');
  if (auto o = x.object()) {
    if (o->empty()) {
      os << "{}";
      return;
    }
    os << "{\n";
    for (size_t k = 0; k < o->size(); ++k) {
      os << pad2 << json_escape((*o)[k].first) << ": ";
      write_json(os, (*o)[k].second, indent + 2);
      os << (k + 1 < o->size() ? ",\n" : "\n");
    }
    os << pad << "}";
  } else if (auto a = x.array()) {
    if (a->empty()) {
      os << "[]";
    } else if (scalar_array(*a)) {
      // numeric rows stay on one line
      os << "[";
      for (size_t k = 0; k < a->size(); ++k) os << (k ? ", " : "") << scalar_text((*a)[k], true);
      os << "]";
    } else {
      os << "[\n";
      for (size_t k = 0; k < a->size(); ++k) {
        os << pad2;
        write_json(os, (*a)[k], indent + 2);
        os << (k + 1 < a->size() ? ",\n" : "\n");
      }
      os << pad << "]";
    }
  } else {
    os << scalar_text(x, true);
  }
}

inline void write_text(std::ostream& os, const Value& x, const std::string& prefix) {
  if (auto o = x.object()) {
    for (auto& [k, v] : *o) write_text(os, v, prefix.empty() ? k : prefix + "." + k);
  } else if (auto a = x.array()) {
    if (scalar_array(*a)) {
      os << prefix << " =";
      for (auto& e : *a) os << " " << scalar_text(e, false);
      os << "\n";
    } else {
      for (size_t k = 0; k < a->size(); ++k) write_text(os, (*a)[k], prefix + "[" + std::to_string(k) + "]");
    }
  } else {
    os << prefix << " = " << scalar_text(x, false) << "\n";
  }
}

}  // namespace detail

inline void write_json(std::ostream& os, const Value& x) {
  detail::write_json(os, x, 0);
  os << "\n";
}

// flat `path = value` lines of the same tree
inline void write_text(std::ostream& os, const Value& x) { detail::write_text(os, x, ""); }

// ---------------------------------------------------------------------------
// conversions

inline Value real_matrix(const MatC& m) {
  Array rows;
  for (int i = 0; i < m.rows(); ++i) {
    Array r;
    for (int j = 0; j < m.cols(); ++j) r.push_back(m(i, j).real());
    rows.push_back(r);
  }
  return rows;
}

inline Value imag_matrix(const MatC& m) {
  Array rows;
  for (int i = 0; i < m.rows(); ++i) {
    Array r;
    for (int j = 0; j < m.cols(); ++j) r.push_back(m(i, j).imag());
    rows.push_back(r);
  }
  return rows;
}

inline Value complex_vector(const VecC& v) {
  Array a;
  for (int i = 0; i < v.size(); ++i) a.push_back(Array{v(i).real(), v(i).imag()});
  return a;
}

inline Value point_value(const ChartPoint& p) {
  Array a;
  for (double x : p.real_coords()) a.push_back(x);
  return a;
}

inline Value check_value(const CheckReport& r) {
  Object d;
  for (auto& [k, v] : r.details) d.emplace_back(k, v);
  return Object{{"name", r.name},
                {"geometry", r.geometry},
                {"kind", r.kind},
                {"value", r.value},
                {"tolerance", r.tolerance},
                {"passed", r.passed},
                {"status", r.status},
                {"regime", r.regime},
                {"sample_count", r.sample_count},
                {"note", r.note},
                {"details", d}};
}

}  // namespace hermlab
