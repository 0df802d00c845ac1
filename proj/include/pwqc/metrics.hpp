#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "pwqc/error.hpp"
#include "pwqc/parser.hpp"
#include "pwqc/rational.hpp"
#include "pwqc/schema.hpp"

namespace pwqc {

// Result of comparing two responses parameter by parameter.
//
// avg_hallucinated is num_hal / 2, where num_hal counts hallucinated keys
// that carry the same value in both files. A hallucinated key present in
// only one file contributes nothing to it. Use hallucination_census() for a
// direct per-file count.
struct ComparisonTriple {
  Rational avg_hallucinated;
  Rational consistency_incl_hal;
  Rational consistency_real;

  // raw tallies behind the ratios
  std::int64_t num_hal = 0;
  std::int64_t num_same = 0;
  std::int64_t num_same_real = 0;
  std::int64_t key_count = 0;
  std::int64_t real_count = 0;

  friend bool operator==(const ComparisonTriple&, const ComparisonTriple&) = default;
};

struct ConsistencyReport {
  std::int64_t iterations = 0;
  std::int64_t pair_count = 0;
  Rational avg_hallucinated;
  Rational avg_consistency_incl_hal;
  Rational avg_consistency_real;

  friend bool operator==(const ConsistencyReport&, const ConsistencyReport&) = default;
};

struct CorrectnessScore {
  Rational avg_correct_real;
  std::vector<Rational> per_response;
  // Benchmark parameters with a non-default value that the response omits.
  std::vector<std::vector<std::string>> missing_params_per_response;

  friend bool operator==(const CorrectnessScore&, const CorrectnessScore&) = default;
};

struct CensusEntry {
  std::int64_t count = 0;
  std::vector<std::string> names;

  friend bool operator==(const CensusEntry&, const CensusEntry&) = default;
};

struct SoundnessThresholds {
  Rational consistency{1};
  Rational correctness{1};
};

struct SoundnessVerdict {
  bool consistent = false;
  bool correct = false;
  bool hallucination_free = false;
  bool complete = false;
  bool sound = false;

  friend bool operator==(const SoundnessVerdict&, const SoundnessVerdict&) = default;
};

namespace detail {

// Schema defaults overlaid with every assignment, unknown names included.
inline std::map<std::string, ParamValue> merged_assignments(const ParsedConfig& cfg,
                                                           const ParameterSchema& schema) {
  auto merged = schema.load_defaults().values;
  for (const auto& a : cfg.assignments) merged[a.name] = a.value;
  return merged;
}

inline void require_gold(const ParsedConfig& benchmark) {
  for (const auto& d : benchmark.diagnostics)
    if (d.severity == Severity::fatal || fatal_in_strict(d.kind))
      throw InputError("benchmark has a fatal diagnostic: " + std::string(to_string(d.kind)) + " on line " +
                       std::to_string(d.line_no));
}

}  // namespace detail

inline ComparisonTriple response_comparison(const ParsedConfig& r1, const ParsedConfig& r2,
                                            const ParameterSchema& schema = ParameterSchema::bundled()) {
  const auto m1 = detail::merged_assignments(r1, schema);
  const auto m2 = detail::merged_assignments(r2, schema);

  std::set<std::string> all_keys;
  for (const auto& [k, v] : m1) all_keys.insert(k);
  for (const auto& [k, v] : m2) all_keys.insert(k);

  ComparisonTriple t;
  for (const auto& k : all_keys) {
    auto a = m1.find(k);
    auto b = m2.find(k);
    // absence never equals a value
    if (a == m1.end() || b == m2.end() || !(a->second == b->second)) continue;
    ++t.num_same;
    if (schema.contains(k)) ++t.num_same_real;
    else ++t.num_hal;
  }
  t.key_count = static_cast<std::int64_t>(all_keys.size());
  t.real_count = static_cast<std::int64_t>(schema.size());
  t.avg_hallucinated = Rational(t.num_hal, 2);
  t.consistency_incl_hal = Rational(t.num_same, t.key_count);
  t.consistency_real = Rational(t.num_same_real, t.real_count);
  return t;
}

// Averages response_comparison over every unordered pair i < j.
inline ConsistencyReport avg_consistency(const std::vector<ParsedConfig>& responses,
                                         const ParameterSchema& schema = ParameterSchema::bundled()) {
  const auto n = static_cast<std::int64_t>(responses.size());
  if (n < 2) throw InputError("consistency needs at least 2 responses, got " + std::to_string(n));

  Rational hal, incl, real;
  for (std::size_t i = 0; i < responses.size(); ++i) {
    for (std::size_t j = i + 1; j < responses.size(); ++j) {
      const auto t = response_comparison(responses[i], responses[j], schema);
      hal += t.avg_hallucinated;
      incl += t.consistency_incl_hal;
      real += t.consistency_real;
    }
  }
  ConsistencyReport r;
  r.iterations = n;
  r.pair_count = n * (n - 1) / 2;
  r.avg_hallucinated = hal / r.pair_count;
  r.avg_consistency_incl_hal = incl / r.pair_count;
  r.avg_consistency_real = real / r.pair_count;
  return r;
}

inline CorrectnessScore avg_correctness(const std::vector<ParsedConfig>& responses, const ParsedConfig& benchmark,
                                        const ParameterSchema& schema = ParameterSchema::bundled()) {
  if (responses.empty()) throw InputError("correctness needs at least 1 response");
  detail::require_gold(benchmark);

  const auto defaults = schema.load_defaults().values;
  const auto gold = detail::merged_assignments(benchmark, schema);
  std::vector<std::string> required;
  for (const auto& s : schema.specs())
    if (!(gold.at(s.name) == defaults.at(s.name))) required.push_back(s.name);

  CorrectnessScore score;
  Rational total;
  for (const auto& r : responses) {
    const auto t = response_comparison(r, benchmark, schema);
    score.per_response.push_back(t.consistency_real);
    total += t.consistency_real;

    std::vector<std::string> missing;
    for (const auto& name : required)
      if (!r.find(name)) missing.push_back(name);
    score.missing_params_per_response.push_back(std::move(missing));
  }
  score.avg_correct_real = total / static_cast<std::int64_t>(responses.size());
  return score;
}

// Direct count of assigned names that are not real parameters.
inline std::vector<CensusEntry> hallucination_census(const std::vector<ParsedConfig>& responses,
                                                     const ParameterSchema& schema = ParameterSchema::bundled()) {
  std::vector<CensusEntry> out;
  out.reserve(responses.size());
  for (const auto& r : responses) {
    CensusEntry e;
    for (const auto& a : r.assignments)
      if (!schema.contains(a.name)) e.names.push_back(a.name);
    e.count = static_cast<std::int64_t>(e.names.size());
    out.push_back(std::move(e));
  }
  return out;
}

inline SoundnessVerdict soundness_from(const ConsistencyReport& consistency, const CorrectnessScore& correctness,
                                       const std::vector<CensusEntry>& census,
                                       const SoundnessThresholds& thresholds) {
  SoundnessVerdict v;
  v.consistent = consistency.avg_consistency_real >= thresholds.consistency;
  v.correct = correctness.avg_correct_real >= thresholds.correctness;
  v.hallucination_free = std::all_of(census.begin(), census.end(), [](const CensusEntry& e) { return e.count == 0; });
  v.complete = std::all_of(correctness.missing_params_per_response.begin(),
                           correctness.missing_params_per_response.end(),
                           [](const auto& m) { return m.empty(); });
  v.sound = v.consistent && v.correct && v.hallucination_free && v.complete;
  return v;
}

inline SoundnessVerdict soundness_verdict(const std::vector<ParsedConfig>& responses, const ParsedConfig& benchmark,
                                          const SoundnessThresholds& thresholds = {},
                                          const ParameterSchema& schema = ParameterSchema::bundled()) {
  const auto consistency = avg_consistency(responses, schema);
  const auto correctness = avg_correctness(responses, benchmark, schema);
  return soundness_from(consistency, correctness, hallucination_census(responses, schema), thresholds);
}

}  // namespace pwqc
