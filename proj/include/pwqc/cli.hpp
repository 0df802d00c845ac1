#pragma once

// Command-line front end. run_cli() holds everything except process setup so
// it can be driven from tests with captured streams and a fake environment.

#include <filesystem>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pwqc/corpus.hpp"
#include "pwqc/error.hpp"
#include "pwqc/harness.hpp"
#include "pwqc/metrics.hpp"
#include "pwqc/parser.hpp"
#include "pwqc/providers.hpp"
#include "pwqc/report.hpp"
#include "pwqc/semantics.hpp"

namespace pwqc {

enum class ExitStatus : int {
  success = 0,
  check_failed = 1,
  usage_error = 2,
  io_error = 3,
};

namespace cli_detail {

namespace fs = std::filesystem;

inline std::string read_text(const fs::path& p) {
  if (!fs::is_regular_file(p)) throw IoError("no such file: " + p.string());
  return detail::read_file(p);
}

// Regular files of `dir` in name order.
inline std::vector<fs::path> config_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("no such directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  return files;
}

inline std::vector<ParsedConfig> parse_dir(const std::vector<fs::path>& files) {
  std::vector<ParsedConfig> out;
  for (const auto& f : files) out.push_back(parse_config(read_text(f), ParseMode::lenient));
  return out;
}

inline ParsedConfig load_benchmark(const fs::path& p) {
  auto cfg = parse_config(read_text(p), ParseMode::strict);
  if (cfg.has_fatal()) throw InputError("benchmark " + p.string() + " has fatal diagnostics; run lint on it");
  return cfg;
}

inline SoundnessThresholds parse_thresholds(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw InputError("--thresholds expects two decimals: c,k");
  SoundnessThresholds t;
  t.consistency = parse_decimal(trim(std::string_view(text).substr(0, comma)));
  t.correctness = parse_decimal(trim(std::string_view(text).substr(comma + 1)));
  return t;
}

inline std::string fmt(const Rational& r) {
  return to_decimal(r) + " (" + std::to_string(r.numerator()) + "/" + std::to_string(r.denominator()) + ")";
}

inline std::string bool_text(bool b) { return b ? "true" : "false"; }

inline nlohmann::ordered_json diagnostics_json(const ParsedConfig& cfg) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& d : cfg.diagnostics)
    arr.push_back({{"line", d.line_no},
                   {"severity", to_string(d.severity)},
                   {"kind", to_string(d.kind)},
                   {"message", d.message}});
  return arr;
}

inline nlohmann::ordered_json value_json(const ParamValue& v) {
  if (v.is_integer()) return v.as_integer();
  if (v.is_flag()) return v.flag_present();
  return v.as_string();
}

}  // namespace cli_detail

inline int run_cli(const std::vector<std::string>& args, const EnvLookup& env, std::ostream& out,
                   std::ostream& err) {
  using namespace cli_detail;

  CLI::App app{"pwqc: pwquality.conf parser, policy simulator and LLM output evaluator", "pwqc"};
  app.require_subcommand(1);

  // lint
  std::string lint_file;
  bool lint_strict = false, lint_lenient = false, lint_json = false;
  auto* lint = app.add_subcommand("lint", "Parse a config file and print its diagnostics");
  lint->add_option("file", lint_file, "pwquality.conf file")->required();
  auto* strict_flag = lint->add_flag("--strict", lint_strict, "Parse like pam_pwquality (default)");
  lint->add_flag("--lenient", lint_lenient, "Skip malformed lines with warnings")->excludes(strict_flag);
  lint->add_flag("--json", lint_json, "Machine-readable output");

  // compare
  std::string cmp_a, cmp_b;
  bool cmp_json = false;
  auto* compare = app.add_subcommand("compare", "Compare two config files");
  compare->add_option("a", cmp_a)->required();
  compare->add_option("b", cmp_b)->required();
  compare->add_flag("--json", cmp_json);

  // consistency
  std::string cons_dir;
  bool cons_json = false;
  auto* consistency = app.add_subcommand("consistency", "Average pairwise consistency of all configs in a directory");
  consistency->add_option("dir", cons_dir)->required();
  consistency->add_flag("--json", cons_json);

  // correctness
  std::string corr_dir, corr_bench;
  bool corr_json = false;
  auto* correctness = app.add_subcommand("correctness", "Score configs in a directory against a benchmark");
  correctness->add_option("dir", corr_dir)->required();
  correctness->add_option("--benchmark", corr_bench)->required();
  correctness->add_flag("--json", corr_json);

  // soundness
  std::string snd_dir, snd_bench, snd_thresholds = "1,1";
  bool snd_json = false;
  auto* soundness = app.add_subcommand("soundness", "Consistent, correct, hallucination-free and complete?");
  soundness->add_option("dir", snd_dir)->required();
  soundness->add_option("--benchmark", snd_bench)->required();
  soundness->add_option("--thresholds", snd_thresholds, "consistency,correctness minimums (default 1,1)");
  soundness->add_flag("--json", snd_json);

  // simulate
  std::string sim_config, sim_password;
  std::optional<std::string> sim_old, sim_user, sim_dict;
  bool sim_json = false;
  auto* simulate = app.add_subcommand("simulate", "Check a password against a config's effective policy");
  simulate->add_option("config", sim_config)->required();
  simulate->add_option("--password", sim_password)->required();
  simulate->add_option("--old", sim_old);
  simulate->add_option("--user", sim_user);
  simulate->add_option("--dict", sim_dict, "Wordlist, one word per line");
  simulate->add_flag("--json", sim_json);

  // generate
  ProviderOptions gen_provider;
  std::string gen_corpus, gen_out;
  int gen_iterations = 5;
  int gen_in_flight = 4;
  bool gen_with_doc = false;
  std::vector<std::string> gen_prompts;
  auto* generate = app.add_subcommand("generate", "Collect LLM responses for every corpus prompt");
  generate->add_option("--provider", gen_provider.name, "openai, deepseek, gemini, cohere, openai-compatible, mock")
      ->required();
  generate->add_option("--model", gen_provider.model, "Model id (persona for mock: blank, noeq, headers, good)");
  generate->add_option("--base-url", gen_provider.base_url);
  generate->add_option("--corpus", gen_corpus)->required();
  generate->add_option("--iterations", gen_iterations)->check(CLI::PositiveNumber);
  generate->add_flag("--with-doc", gen_with_doc, "Embed the pwquality.conf documentation in the prompt");
  generate->add_option("--out", gen_out)->required();
  generate->add_option("--max-in-flight", gen_in_flight)->check(CLI::PositiveNumber);
  generate->add_option("--prompt", gen_prompts, "Restrict to these corpus entry ids");

  // report
  std::string rep_run, rep_corpus, rep_format = "json", rep_thresholds = "1,1";
  auto* report = app.add_subcommand("report", "Compute metrics for every cell of a run");
  report->add_option("run", rep_run)->required();
  report->add_option("--corpus", rep_corpus)->required();
  report->add_option("--format", rep_format)->check(CLI::IsMember({"json", "csv"}));
  report->add_option("--thresholds", rep_thresholds);

  std::vector<const char*> argv{"pwqc"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ExitStatus::usage_error);
  }

  try {
    if (lint->parsed()) {
      const auto mode = lint_lenient ? ParseMode::lenient : ParseMode::strict;
      const auto cfg = parse_config(read_text(lint_file), mode);
      if (lint_json) {
        nlohmann::ordered_json j;
        j["file"] = lint_file;
        j["mode"] = to_string(mode);
        j["assignments"] = nlohmann::ordered_json::array();
        for (const auto& a : cfg.assignments)
          j["assignments"].push_back({{"name", a.name}, {"value", value_json(a.value)}, {"line", a.line_no}});
        j["diagnostics"] = diagnostics_json(cfg);
        j["ok"] = !cfg.has_fatal();
        out << j.dump(2) << "\n";
      } else {
        for (const auto& d : cfg.diagnostics)
          out << lint_file << ":" << d.line_no << ": " << to_string(d.severity) << ": " << to_string(d.kind) << ": "
              << d.message << "\n";
        out << cfg.assignments.size() << " assignment(s), " << cfg.diagnostics.size() << " diagnostic(s), mode "
            << to_string(mode) << "\n";
      }
      return static_cast<int>(cfg.has_fatal() ? ExitStatus::check_failed : ExitStatus::success);
    }

    if (compare->parsed()) {
      const auto text_a = read_text(cmp_a);
      const auto text_b = read_text(cmp_b);
      const auto triple = response_comparison(parse_config(text_a), parse_config(text_b));
      const bool equivalent = functionally_equivalent(parse_config(text_a, ParseMode::strict),
                                                      parse_config(text_b, ParseMode::strict));
      if (cmp_json) {
        nlohmann::ordered_json j;
        j["functionally_equivalent"] = equivalent;
        j["comparison"] = to_json(triple);
        out << j.dump(2) << "\n";
      } else {
        out << "functionally_equivalent: " << bool_text(equivalent) << "\n"
            << "avg_hallucinated_pairwise: " << fmt(triple.avg_hallucinated) << "\n"
            << "consistency_incl_hal: " << fmt(triple.consistency_incl_hal) << "\n"
            << "consistency_real: " << fmt(triple.consistency_real) << "\n";
      }
      return static_cast<int>(equivalent ? ExitStatus::success : ExitStatus::check_failed);
    }

    if (consistency->parsed()) {
      const auto files = config_files(cons_dir);
      const auto parsed = parse_dir(files);
      const auto rep = avg_consistency(parsed);
      const auto census = hallucination_census(parsed);
      if (cons_json) {
        nlohmann::ordered_json j;
        j["files"] = nlohmann::ordered_json::array();
        for (const auto& f : files) j["files"].push_back(f.filename().string());
        j["consistency"] = to_json(rep);
        j["census"] = to_json(census);
        out << j.dump(2) << "\n";
      } else {
        out << "files: " << files.size() << "\npairs: " << rep.pair_count << "\n"
            << "avg_hallucinated_pairwise: " << fmt(rep.avg_hallucinated) << "\n"
            << "avg_consistency_incl_hal: " << fmt(rep.avg_consistency_incl_hal) << "\n"
            << "avg_consistency_real: " << fmt(rep.avg_consistency_real) << "\n";
        for (std::size_t i = 0; i < files.size(); ++i)
          out << "census " << files[i].filename().string() << ": " << census[i].count << "\n";
      }
      return 0;
    }

    if (correctness->parsed()) {
      const auto files = config_files(corr_dir);
      const auto score = avg_correctness(parse_dir(files), load_benchmark(corr_bench));
      if (corr_json) {
        nlohmann::ordered_json j;
        j["files"] = nlohmann::ordered_json::array();
        for (const auto& f : files) j["files"].push_back(f.filename().string());
        j["correctness"] = to_json(score);
        out << j.dump(2) << "\n";
      } else {
        out << "avg_correct_real: " << fmt(score.avg_correct_real) << "\n";
        for (std::size_t i = 0; i < files.size(); ++i) {
          out << files[i].filename().string() << ": " << fmt(score.per_response[i]);
          const auto& missing = score.missing_params_per_response[i];
          if (!missing.empty()) {
            out << " missing:";
            for (const auto& m : missing) out << " " << m;
          }
          out << "\n";
        }
      }
      return 0;
    }

    if (soundness->parsed()) {
      const auto thresholds = parse_thresholds(snd_thresholds);
      const auto parsed = parse_dir(config_files(snd_dir));
      const auto bench = load_benchmark(snd_bench);
      const auto cons = avg_consistency(parsed);
      const auto corr = avg_correctness(parsed, bench);
      const auto census = hallucination_census(parsed);
      const auto verdict = soundness_from(cons, corr, census, thresholds);
      if (snd_json) {
        nlohmann::ordered_json j;
        j["consistency"] = to_json(cons);
        j["correctness"] = to_json(corr);
        j["census"] = to_json(census);
        j["soundness"] = to_json(verdict);
        out << j.dump(2) << "\n";
      } else {
        out << "consistent: " << bool_text(verdict.consistent) << " (" << to_decimal(cons.avg_consistency_real)
            << ")\n"
            << "correct: " << bool_text(verdict.correct) << " (" << to_decimal(corr.avg_correct_real) << ")\n"
            << "hallucination_free: " << bool_text(verdict.hallucination_free) << "\n"
            << "complete: " << bool_text(verdict.complete) << "\n"
            << "sound: " << bool_text(verdict.sound) << "\n";
      }
      return static_cast<int>(verdict.sound ? ExitStatus::success : ExitStatus::check_failed);
    }

    if (simulate->parsed()) {
      const auto cfg = parse_config(read_text(sim_config), ParseMode::strict);
      const auto policy = effective_policy(cfg);
      std::optional<Wordlist> words;
      if (sim_dict) words = parse_wordlist(read_text(*sim_dict));
      std::optional<std::string_view> old_pw, user;
      if (sim_old) old_pw = *sim_old;
      if (sim_user) user = *sim_user;
      const auto result = check_password(policy, sim_password, old_pw, user, words ? &*words : nullptr);
      if (sim_json) {
        nlohmann::ordered_json j;
        j["fell_back"] = policy.fell_back;
        j["ignored_params"] = policy.ignored_params;
        j["verdict"] = result.accepted() ? "accept" : "reject";
        j["failures"] = nlohmann::ordered_json::array();
        for (auto f : result.failures) j["failures"].push_back(to_string(f));
        out << j.dump(2) << "\n";
      } else {
        if (policy.fell_back) out << "note: config is invalid; the failsafe defaults apply\n";
        for (const auto& name : policy.ignored_params) out << "note: ignored unknown parameter " << name << "\n";
        out << "verdict: " << (result.accepted() ? "accept" : "reject") << "\n";
        for (auto f : result.failures) out << "failure: " << to_string(f) << "\n";
      }
      return static_cast<int>(result.accepted() ? ExitStatus::success : ExitStatus::check_failed);
    }

    if (generate->parsed()) {
      const auto corpus = load_corpus(gen_corpus);
      const auto provider = make_provider(gen_provider, env);
      GenerateOptions opts;
      opts.max_in_flight = gen_in_flight;
      std::vector<GenerationRecord> all;
      for (const auto& entry : corpus) {
        if (!gen_prompts.empty() &&
            std::find(gen_prompts.begin(), gen_prompts.end(), entry.prompt.id) == gen_prompts.end())
          continue;
        auto recs = generate_responses(*provider, entry.prompt, gen_iterations, gen_with_doc, opts);
        all.insert(all.end(), recs.begin(), recs.end());
      }
      write_run(gen_out, all);
      std::size_t failed = 0;
      for (const auto& r : all) {
        if (r.ok()) continue;
        ++failed;
        err << "warning: " << detail::record_stem(r) << " failed: " << *r.error << "\n";
      }
      out << "wrote " << all.size() << " record(s) for " << provider->model() << " to " << gen_out << "\n";
      return static_cast<int>(failed ? ExitStatus::io_error : ExitStatus::success);
    }

    if (report->parsed()) {
      const auto corpus = load_corpus(rep_corpus);
      const auto cells = build_report(fs::path(rep_run), corpus, parse_thresholds(rep_thresholds));
      out << emit(cells, rep_format == "csv" ? ReportFormat::csv : ReportFormat::json);
      return 0;
    }
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ExitStatus::usage_error);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ExitStatus::io_error);
  }
  return static_cast<int>(ExitStatus::usage_error);
}

}  // namespace pwqc
