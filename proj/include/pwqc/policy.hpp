#pragma once

#include <map>
#include <string>
#include <vector>

#include "pwqc/value.hpp"

namespace pwqc {

// Fully resolved parameter map of one configuration file.
struct EffectivePolicy {
  std::map<std::string, ParamValue> values;  // total over the schema
  bool fell_back = false;                    // whole-file failsafe applied
  std::vector<std::string> ignored_params;   // unknown names, file order

  const ParamValue& at(const std::string& name) const { return values.at(name); }
  std::int64_t integer(const std::string& name) const { return values.at(name).as_integer(); }

  friend bool operator==(const EffectivePolicy&, const EffectivePolicy&) = default;
};

}  // namespace pwqc
