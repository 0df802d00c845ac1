#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <variant>

namespace pwqc {

// Presence marker for valueless options such as enforce_for_root.
struct Flag {
  bool present = false;
  friend bool operator==(const Flag&, const Flag&) = default;
};

// A parameter value. Equality is exact and never coerces across
// alternatives: integer 8 and string "8" compare unequal.
class ParamValue {
 public:
  ParamValue() : v_(std::string{}) {}
  ParamValue(std::int64_t i) : v_(i) {}           // NOLINT(google-explicit-constructor)
  ParamValue(int i) : v_(std::int64_t{i}) {}      // NOLINT(google-explicit-constructor)
  ParamValue(std::string s) : v_(std::move(s)) {} // NOLINT(google-explicit-constructor)
  ParamValue(const char* s) : v_(std::string(s)) {}  // NOLINT(google-explicit-constructor)
  ParamValue(Flag f) : v_(f) {}                   // NOLINT(google-explicit-constructor)

  bool is_integer() const { return std::holds_alternative<std::int64_t>(v_); }
  bool is_string() const { return std::holds_alternative<std::string>(v_); }
  bool is_flag() const { return std::holds_alternative<Flag>(v_); }

  std::int64_t as_integer() const { return std::get<std::int64_t>(v_); }
  const std::string& as_string() const { return std::get<std::string>(v_); }
  bool flag_present() const { return std::get<Flag>(v_).present; }

  // Text as it would appear on the right-hand side of a config line.
  std::string to_text() const {
    if (is_integer()) return std::to_string(as_integer());
    if (is_flag()) return flag_present() ? "present" : "absent";
    return as_string();
  }

  friend bool operator==(const ParamValue&, const ParamValue&) = default;

  friend std::ostream& operator<<(std::ostream& os, const ParamValue& v) {
    if (v.is_string()) return os << '"' << v.as_string() << '"';
    return os << v.to_text();
  }

 private:
  std::variant<std::int64_t, std::string, Flag> v_;
};

}  // namespace pwqc
