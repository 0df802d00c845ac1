#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "pwqc/corpus.hpp"
#include "pwqc/error.hpp"
#include "pwqc/harness.hpp"
#include "pwqc/metrics.hpp"
#include "pwqc/parser.hpp"
#include "pwqc/rational.hpp"

namespace pwqc {

// Metrics for one (model, prompt, augmentation) cell of a run.
// consistency and soundness need at least two usable responses,
// correctness at least one; otherwise they are absent.
struct CellResult {
  std::string model;
  std::string prompt_id;
  bool doc_augmented = false;
  std::string records_sha256;
  std::int64_t responses = 0;
  std::int64_t failed_iterations = 0;
  std::optional<ConsistencyReport> consistency;
  std::optional<CorrectnessScore> correctness;
  std::vector<CensusEntry> census;
  std::optional<SoundnessVerdict> soundness;

  friend bool operator==(const CellResult&, const CellResult&) = default;
};

enum class ReportFormat { json, csv };

inline constexpr std::string_view kCsvHeader =
    "model,prompt_id,doc_augmented,responses,failed_iterations,avg_hallucinated_pairwise,"
    "avg_consistency_incl_hal,avg_consistency_real,avg_correct_real,avg_hallucinated_census,"
    "incomplete_responses,consistent,correct,hallucination_free,complete,sound,records_sha256";

// Computes one CellResult per cell, ordered by (model, prompt_id, doc_augmented).
inline std::vector<CellResult> build_report(const RunManifest& run, const std::vector<CorpusEntry>& corpus,
                                            const SoundnessThresholds& thresholds = {}) {
  using Key = std::tuple<std::string, std::string, bool>;
  std::map<Key, std::vector<const GenerationRecord*>> cells;
  for (const auto& r : run.records) cells[{r.model, r.prompt_id, r.doc_augmented}].push_back(&r);

  std::vector<CellResult> report;
  for (auto& [key, recs] : cells) {
    const auto& [model, prompt_id, doc] = key;
    const auto* entry = find_entry(corpus, prompt_id);
    if (!entry) throw InputError("run references prompt '" + prompt_id + "' which is not in the corpus");
    std::sort(recs.begin(), recs.end(),
              [](const auto* a, const auto* b) { return a->iteration_index < b->iteration_index; });

    CellResult cell;
    cell.model = model;
    cell.prompt_id = prompt_id;
    cell.doc_augmented = doc;

    std::string canonical;
    std::vector<ParsedConfig> parsed;
    for (const auto* r : recs) {
      canonical += std::to_string(r->iteration_index) + (r->ok() ? " ok " : " failed ") +
                   std::to_string(r->extracted_config.size()) + "\n" + r->extracted_config;
      if (!r->ok()) {
        ++cell.failed_iterations;
        continue;
      }
      try {
        parsed.push_back(parse_config(r->extracted_config, ParseMode::lenient));
      } catch (const EncodingError& e) {
        throw RunError("record " + detail::record_stem(*r) + ": " + e.what());
      }
    }
    cell.records_sha256 = sha256_hex(canonical);
    cell.responses = static_cast<std::int64_t>(parsed.size());
    cell.census = hallucination_census(parsed);
    if (!parsed.empty()) cell.correctness = avg_correctness(parsed, entry->benchmark);
    if (parsed.size() >= 2) {
      cell.consistency = avg_consistency(parsed);
      cell.soundness = soundness_from(*cell.consistency, *cell.correctness, cell.census, thresholds);
    }
    report.push_back(std::move(cell));
  }
  return report;
}

inline std::vector<CellResult> build_report(const std::filesystem::path& run_dir,
                                            const std::vector<CorpusEntry>& corpus,
                                            const SoundnessThresholds& thresholds = {}) {
  return build_report(read_run(run_dir), corpus, thresholds);
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::ordered_json rational_json(const Rational& r) {
  nlohmann::ordered_json j;
  j["decimal"] = to_decimal(r);
  j["num"] = r.numerator();
  j["den"] = r.denominator();
  return j;
}

inline Rational rational_from_json(const nlohmann::json& j) {
  return Rational(j.at("num").get<std::int64_t>(), j.at("den").get<std::int64_t>());
}

inline nlohmann::ordered_json to_json(const ComparisonTriple& t) {
  nlohmann::ordered_json j;
  j["avg_hallucinated"] = rational_json(t.avg_hallucinated);
  j["consistency_incl_hal"] = rational_json(t.consistency_incl_hal);
  j["consistency_real"] = rational_json(t.consistency_real);
  j["num_hal"] = t.num_hal;
  j["num_same"] = t.num_same;
  j["num_same_real"] = t.num_same_real;
  j["key_count"] = t.key_count;
  j["real_count"] = t.real_count;
  return j;
}

inline nlohmann::ordered_json to_json(const ConsistencyReport& c) {
  nlohmann::ordered_json j;
  j["iterations"] = c.iterations;
  j["pair_count"] = c.pair_count;
  j["avg_hallucinated"] = rational_json(c.avg_hallucinated);
  j["avg_consistency_incl_hal"] = rational_json(c.avg_consistency_incl_hal);
  j["avg_consistency_real"] = rational_json(c.avg_consistency_real);
  return j;
}

inline nlohmann::ordered_json to_json(const CorrectnessScore& c) {
  nlohmann::ordered_json j;
  j["avg_correct_real"] = rational_json(c.avg_correct_real);
  j["per_response"] = nlohmann::ordered_json::array();
  for (const auto& r : c.per_response) j["per_response"].push_back(rational_json(r));
  j["missing_params_per_response"] = c.missing_params_per_response;
  return j;
}

inline nlohmann::ordered_json to_json(const std::vector<CensusEntry>& census) {
  nlohmann::ordered_json j;
  j["counts"] = nlohmann::ordered_json::array();
  j["names"] = nlohmann::ordered_json::array();
  std::int64_t total = 0;
  for (const auto& e : census) {
    j["counts"].push_back(e.count);
    j["names"].push_back(e.names);
    total += e.count;
  }
  j["avg_hallucinated"] = census.empty() ? nlohmann::ordered_json(nullptr)
                                         : rational_json(Rational(total, static_cast<std::int64_t>(census.size())));
  return j;
}

inline nlohmann::ordered_json to_json(const SoundnessVerdict& v) {
  return {{"consistent", v.consistent},
          {"correct", v.correct},
          {"hallucination_free", v.hallucination_free},
          {"complete", v.complete},
          {"sound", v.sound}};
}

inline nlohmann::ordered_json to_json(const CellResult& c) {
  nlohmann::ordered_json j;
  j["model"] = c.model;
  j["prompt_id"] = c.prompt_id;
  j["doc_augmented"] = c.doc_augmented;
  j["records_sha256"] = c.records_sha256;
  j["responses"] = c.responses;
  j["failed_iterations"] = c.failed_iterations;
  j["consistency"] = c.consistency ? to_json(*c.consistency) : nlohmann::ordered_json(nullptr);
  j["correctness"] = c.correctness ? to_json(*c.correctness) : nlohmann::ordered_json(nullptr);
  j["census"] = to_json(c.census);
  j["soundness"] = c.soundness ? to_json(*c.soundness) : nlohmann::ordered_json(nullptr);
  return j;
}

inline std::vector<CellResult> report_from_json(std::string_view text) {
  std::vector<CellResult> out;
  try {
    const auto arr = nlohmann::json::parse(text);
    for (const auto& j : arr) {
      CellResult c;
      c.model = j.at("model").get<std::string>();
      c.prompt_id = j.at("prompt_id").get<std::string>();
      c.doc_augmented = j.at("doc_augmented").get<bool>();
      c.records_sha256 = j.at("records_sha256").get<std::string>();
      c.responses = j.at("responses").get<std::int64_t>();
      c.failed_iterations = j.at("failed_iterations").get<std::int64_t>();
      if (const auto& jc = j.at("consistency"); !jc.is_null()) {
        ConsistencyReport r;
        r.iterations = jc.at("iterations").get<std::int64_t>();
        r.pair_count = jc.at("pair_count").get<std::int64_t>();
        r.avg_hallucinated = rational_from_json(jc.at("avg_hallucinated"));
        r.avg_consistency_incl_hal = rational_from_json(jc.at("avg_consistency_incl_hal"));
        r.avg_consistency_real = rational_from_json(jc.at("avg_consistency_real"));
        c.consistency = r;
      }
      if (const auto& jk = j.at("correctness"); !jk.is_null()) {
        CorrectnessScore s;
        s.avg_correct_real = rational_from_json(jk.at("avg_correct_real"));
        for (const auto& r : jk.at("per_response")) s.per_response.push_back(rational_from_json(r));
        s.missing_params_per_response = jk.at("missing_params_per_response").get<std::vector<std::vector<std::string>>>();
        c.correctness = s;
      }
      const auto& jh = j.at("census");
      const auto counts = jh.at("counts").get<std::vector<std::int64_t>>();
      const auto names = jh.at("names").get<std::vector<std::vector<std::string>>>();
      if (counts.size() != names.size()) throw InputError("census counts and names differ in length");
      for (std::size_t i = 0; i < counts.size(); ++i) c.census.push_back({counts[i], names[i]});
      if (const auto& js = j.at("soundness"); !js.is_null()) {
        SoundnessVerdict v;
        v.consistent = js.at("consistent").get<bool>();
        v.correct = js.at("correct").get<bool>();
        v.hallucination_free = js.at("hallucination_free").get<bool>();
        v.complete = js.at("complete").get<bool>();
        v.sound = js.at("sound").get<bool>();
        c.soundness = v;
      }
      out.push_back(std::move(c));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed report JSON: ") + e.what());
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV

namespace detail {

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string csv_bool(bool b) { return b ? "true" : "false"; }

}  // namespace detail

inline std::string emit(const std::vector<CellResult>& report, ReportFormat format) {
  if (format == ReportFormat::json) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& c : report) arr.push_back(to_json(c));
    return arr.dump(2) + "\n";
  }

  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& c : report) {
    std::vector<std::string> row;
    row.push_back(detail::csv_field(c.model));
    row.push_back(detail::csv_field(c.prompt_id));
    row.push_back(detail::csv_bool(c.doc_augmented));
    row.push_back(std::to_string(c.responses));
    row.push_back(std::to_string(c.failed_iterations));
    if (c.consistency) {
      row.push_back(to_decimal(c.consistency->avg_hallucinated));
      row.push_back(to_decimal(c.consistency->avg_consistency_incl_hal));
      row.push_back(to_decimal(c.consistency->avg_consistency_real));
    } else {
      row.insert(row.end(), 3, "");
    }
    row.push_back(c.correctness ? to_decimal(c.correctness->avg_correct_real) : "");
    if (c.census.empty()) {
      row.push_back("");
    } else {
      std::int64_t total = 0;
      for (const auto& e : c.census) total += e.count;
      row.push_back(to_decimal(Rational(total, static_cast<std::int64_t>(c.census.size()))));
    }
    if (c.correctness) {
      const auto& m = c.correctness->missing_params_per_response;
      row.push_back(std::to_string(std::count_if(m.begin(), m.end(), [](const auto& v) { return !v.empty(); })));
    } else {
      row.push_back("");
    }
    if (c.soundness) {
      row.push_back(detail::csv_bool(c.soundness->consistent));
      row.push_back(detail::csv_bool(c.soundness->correct));
      row.push_back(detail::csv_bool(c.soundness->hallucination_free));
      row.push_back(detail::csv_bool(c.soundness->complete));
      row.push_back(detail::csv_bool(c.soundness->sound));
    } else {
      row.insert(row.end(), 5, "");
    }
    row.push_back(c.records_sha256);
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += row[i];
    }
    out += '\n';
  }
  return out;
}

}  // namespace pwqc
