#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pwqc/bundled_data.hpp"
#include "pwqc/error.hpp"
#include "pwqc/policy.hpp"
#include "pwqc/text.hpp"
#include "pwqc/value.hpp"

namespace pwqc {

enum class ValueKind { integer, string, flag };

inline std::string_view to_string(ValueKind k) {
  switch (k) {
    case ValueKind::integer: return "integer";
    case ValueKind::string: return "string";
    case ValueKind::flag: return "flag";
  }
  return "?";
}

struct ParamSpec {
  std::string name;
  ValueKind kind = ValueKind::integer;
  ParamValue default_value;
  std::string description;

  friend bool operator==(const ParamSpec&, const ParamSpec&) = default;
};

// Closed catalog of real pwquality.conf parameters. Any name outside it is
// hallucinated. Immutable once constructed.
class ParameterSchema {
 public:
  explicit ParameterSchema(std::vector<ParamSpec> specs) : specs_(std::move(specs)) {
    for (std::size_t i = 0; i < specs_.size(); ++i) {
      const auto& s = specs_[i];
      if (!index_.emplace(s.name, i).second)
        throw InputError("duplicate parameter in schema: " + s.name);
      const bool ok = (s.kind == ValueKind::integer && s.default_value.is_integer()) ||
                      (s.kind == ValueKind::string && s.default_value.is_string()) ||
                      (s.kind == ValueKind::flag && s.default_value.is_flag());
      if (!ok) throw InputError("default of " + s.name + " is outside its value kind");
    }
  }

  // Schema compiled in from data/schema.tsv.
  static const ParameterSchema& bundled();

  const std::vector<ParamSpec>& specs() const { return specs_; }
  std::size_t size() const { return specs_.size(); }

  // Case-sensitive: "MINLEN" is not a parameter.
  const ParamSpec* lookup(std::string_view name) const {
    auto it = index_.find(std::string(name));
    return it == index_.end() ? nullptr : &specs_[it->second];
  }

  bool contains(std::string_view name) const { return lookup(name) != nullptr; }

  // Every parameter at its documented default. Each call returns a fresh value.
  EffectivePolicy load_defaults() const {
    EffectivePolicy p;
    for (const auto& s : specs_) p.values.emplace(s.name, s.default_value);
    return p;
  }

 private:
  std::vector<ParamSpec> specs_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Reads the line-oriented schema format (see data/schema.tsv header).
inline ParameterSchema parse_schema(std::string_view text) {
  std::vector<ParamSpec> specs;
  int line_no = 0;
  for (std::string_view line : split_lines(text)) {
    ++line_no;
    if (trim(line).empty() || trim(line).front() == '#') continue;
    auto fields = split(line, '\t');
    if (fields.size() < 3 || fields.size() > 4)
      throw InputError("schema line " + std::to_string(line_no) + ": expected 3 or 4 tab-separated fields");
    ParamSpec s;
    s.name = std::string(trim(fields[0]));
    const auto kind = trim(fields[1]);
    const auto def = fields[2];
    if (fields.size() == 4) s.description = std::string(trim(fields[3]));
    if (kind == "integer") {
      auto v = parse_int(trim(def));
      if (!v) throw InputError("schema line " + std::to_string(line_no) + ": bad integer default");
      s.kind = ValueKind::integer;
      s.default_value = *v;
    } else if (kind == "string") {
      s.kind = ValueKind::string;
      s.default_value = std::string(def);
    } else if (kind == "flag") {
      s.kind = ValueKind::flag;
      if (trim(def) == "absent") s.default_value = Flag{false};
      else if (trim(def) == "present") s.default_value = Flag{true};
      else throw InputError("schema line " + std::to_string(line_no) + ": flag default must be absent or present");
    } else {
      throw InputError("schema line " + std::to_string(line_no) + ": unknown kind '" + std::string(kind) + "'");
    }
    specs.push_back(std::move(s));
  }
  return ParameterSchema(std::move(specs));
}

inline const ParameterSchema& ParameterSchema::bundled() {
  static const ParameterSchema schema = parse_schema(bundled::kSchema);
  return schema;
}

inline EffectivePolicy load_defaults() { return ParameterSchema::bundled().load_defaults(); }

inline std::optional<ParamSpec> schema_lookup(std::string_view name) {
  if (const auto* s = ParameterSchema::bundled().lookup(name)) return *s;
  return std::nullopt;
}

}  // namespace pwqc
