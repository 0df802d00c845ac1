#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "pwqc/bundled_data.hpp"
#include "pwqc/error.hpp"
#include "pwqc/hash.hpp"
#include "pwqc/parser.hpp"

namespace pwqc {

struct PolicyPrompt {
  std::string id;
  std::string policy_text;
  std::optional<std::string> doc_text;  // documentation embedded when augmented

  friend bool operator==(const PolicyPrompt&, const PolicyPrompt&) = default;
};

// ---------------------------------------------------------------------------
// Prompt template

inline constexpr std::string_view kPromptTemplateVersion = "pwqc-prompt/1";

inline constexpr std::string_view kPromptInstruction =
    "You are configuring password quality enforcement on a Linux system that uses\n"
    "pam_pwquality. Write the /etc/security/pwquality.conf file that enforces the\n"
    "password policy below. Produce only the contents of pwquality.conf.\n";

inline constexpr std::string_view kPolicyHeading = "\n=== PASSWORD POLICY ===\n";
inline constexpr std::string_view kDocBegin = "\n=== BEGIN pwquality.conf DOCUMENTATION ===\n";
inline constexpr std::string_view kDocEnd = "=== END pwquality.conf DOCUMENTATION ===\n";

// Hash of the fixed template text, cited in run manifests.
inline std::string prompt_template_sha256() {
  std::string skeleton;
  skeleton += kPromptTemplateVersion;
  skeleton += '\n';
  skeleton += kPromptInstruction;
  skeleton += kPolicyHeading;
  skeleton += kDocBegin;
  skeleton += kDocEnd;
  return sha256_hex(skeleton);
}

namespace detail {
inline void append_block(std::string& out, std::string_view text) {
  out += text;
  if (text.empty() || text.back() != '\n') out += '\n';
}
}  // namespace detail

inline std::string render_prompt(const PolicyPrompt& prompt, bool doc_augmented) {
  if (doc_augmented && !prompt.doc_text)
    throw InputError("prompt '" + prompt.id + "' has no documentation text for the augmented arm");
  std::string out(kPromptInstruction);
  out += kPolicyHeading;
  detail::append_block(out, prompt.policy_text);
  if (doc_augmented) {
    out += kDocBegin;
    detail::append_block(out, *prompt.doc_text);
    out += kDocEnd;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Providers

struct CompletionRequest {
  std::string prompt;
  int iteration_index = 0;  // only the scripted mock looks at this
};

// One completion endpoint. complete() may be called from several threads.
// Implementations throw AuthError, TransientError or ProviderError.
class Provider {
 public:
  virtual ~Provider() = default;
  virtual std::string model() const = 0;
  virtual std::string complete(const CompletionRequest& request) const = 0;
};

// Deterministic stand-in for a real model. Responses depend only on the
// request, never on call order, so concurrent runs are reproducible.
class MockProvider : public Provider {
 public:
  enum class Persona {
    blank,    // refuses: always an empty file
    noeq,     // drops '=' on 3 of every 5 files
    headers,  // wraps settings in [section] headers
    good,     // prose + fenced config, occasional drift and hallucination
  };

  explicit MockProvider(Persona persona) : persona_(persona) {}

  // Cycles through fixed responses by iteration index.
  explicit MockProvider(std::vector<std::string> script, std::string model = "mock-script")
      : script_(std::move(script)), model_(std::move(model)) {
    if (script_.empty()) throw InputError("mock script is empty");
  }

  static std::optional<Persona> persona_from_name(std::string_view name) {
    if (name == "blank") return Persona::blank;
    if (name == "noeq") return Persona::noeq;
    if (name == "headers") return Persona::headers;
    if (name == "good") return Persona::good;
    return std::nullopt;
  }

  std::string model() const override {
    if (!script_.empty()) return model_;
    switch (persona_) {
      case Persona::blank: return "mock-blank";
      case Persona::noeq: return "mock-noeq";
      case Persona::headers: return "mock-headers";
      case Persona::good: return "mock-good";
    }
    return "mock";
  }

  std::string complete(const CompletionRequest& req) const override {
    const auto i = req.iteration_index;
    if (!script_.empty()) return script_[static_cast<std::size_t>(i) % script_.size()];

    const bool with_doc = req.prompt.find(kDocBegin) != std::string::npos;
    const bool wants_retries = req.prompt.find("retries") != std::string::npos;
    switch (persona_) {
      case Persona::blank:
        return "";
      case Persona::noeq:
        if (i % 5 == 0 || i % 5 == 2 || i % 5 == 4) return "minlen 8\ndcredit -1\nretry=3\n";
        return "minlen = 8\ndcredit = -1\nretry = 3\n";
      case Persona::headers:
        return "[general]\nminlen = 8\ndifok = 1\n" + std::string(wants_retries ? "retry = 3\n" : "") +
               "\n[dictionary]\ndictcheck = 1\n";
      case Persona::good: {
        std::string body = "difok = 1\n";
        body += (i % 4 == 3) ? "minlen = 10\n" : "minlen = 8\n";
        body += "dictcheck = 1\nusercheck = 1\nenforcing = 1\n";
        if (wants_retries) body += "retry = 3\n";
        if (!with_doc && i % 2 == 1) body += "check_userpass = 1\n";
        return "Here is a pwquality.conf for this policy:\n\n```ini\n# /etc/security/pwquality.conf\n" + body +
               "```\n\nPlace it in /etc/security/ and test with passwd.\n";
      }
    }
    return "";
  }

 private:
  Persona persona_ = Persona::good;
  std::vector<std::string> script_;
  std::string model_;
};

// ---------------------------------------------------------------------------
// Generation

struct GenerationRecord {
  std::string model;
  std::string prompt_id;
  bool doc_augmented = false;
  int iteration_index = 0;
  std::string raw_response;
  std::string extracted_config;
  std::string timestamp;             // UTC, ISO 8601
  std::optional<std::string> error;  // set when every attempt failed
  int attempts = 0;

  bool ok() const { return !error.has_value(); }

  friend bool operator==(const GenerationRecord&, const GenerationRecord&) = default;
};

using Clock = std::function<std::chrono::system_clock::time_point()>;

inline std::string format_utc(std::chrono::system_clock::time_point tp) {
  const std::time_t t = std::chrono::system_clock::to_time_t(tp);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct GenerateOptions {
  int max_in_flight = 4;
  int max_retries = 2;  // extra attempts after a TransientError
  std::chrono::milliseconds retry_backoff{500};
  Clock clock = [] { return std::chrono::system_clock::now(); };
};

// Issues `iterations` independent completions of the rendered prompt.
// Transient failures are retried; a request that still fails is kept as a
// record with `error` set. An AuthError aborts the whole batch.
inline std::vector<GenerationRecord> generate_responses(const Provider& provider, const PolicyPrompt& prompt,
                                                        int iterations, bool doc_augmented,
                                                        const GenerateOptions& options = {}) {
  if (iterations < 1) throw InputError("iterations must be at least 1");
  const std::string text = render_prompt(prompt, doc_augmented);

  std::vector<GenerationRecord> records(static_cast<std::size_t>(iterations));
  std::atomic<int> next{0};
  std::atomic<bool> abort{false};
  std::exception_ptr fatal;
  std::mutex fatal_mu;

  auto worker = [&] {
    for (int i = next++; i < iterations && !abort; i = next++) {
      auto& rec = records[static_cast<std::size_t>(i)];
      rec.model = provider.model();
      rec.prompt_id = prompt.id;
      rec.doc_augmented = doc_augmented;
      rec.iteration_index = i;
      for (int attempt = 0;; ++attempt) {
        rec.attempts = attempt + 1;
        try {
          rec.raw_response = provider.complete({text, i});
          rec.extracted_config = extract_config_from_response(rec.raw_response);
          rec.error.reset();
          break;
        } catch (const AuthError&) {
          std::lock_guard lock(fatal_mu);
          if (!fatal) fatal = std::current_exception();
          abort = true;
          return;
        } catch (const TransientError& e) {
          rec.error = e.what();
          if (attempt >= options.max_retries) break;
          std::this_thread::sleep_for(options.retry_backoff * (attempt + 1));
        } catch (const std::exception& e) {
          rec.error = e.what();
          break;
        }
      }
      rec.timestamp = format_utc(options.clock());
    }
  };

  const int workers = std::clamp(options.max_in_flight, 1, iterations);
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (fatal) std::rethrow_exception(fatal);
  return records;
}

// ---------------------------------------------------------------------------
// Run directories
//
//   <run>/manifest.json
//   <run>/records/<model>__<prompt>__<plain|doc>__<i>.raw.txt
//   <run>/records/<model>__<prompt>__<plain|doc>__<i>.conf

inline constexpr std::string_view kRunFormat = "pwqc-run/1";

struct RunManifest {
  std::string template_version{kPromptTemplateVersion};
  std::string template_sha256 = prompt_template_sha256();
  std::vector<GenerationRecord> records;
};

namespace detail {

inline std::string file_safe(std::string_view s) {
  std::string out;
  for (char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
                    c == '.' || c == '_';
    out.push_back(ok ? c : '_');
  }
  return out;
}

inline std::string record_stem(const GenerationRecord& r) {
  return file_safe(r.model) + "__" + file_safe(r.prompt_id) + "__" + (r.doc_augmented ? "doc" : "plain") + "__" +
         std::to_string(r.iteration_index);
}

inline auto record_key(const GenerationRecord& r) {
  return std::tie(r.model, r.prompt_id, r.doc_augmented, r.iteration_index);
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& p, std::string_view data) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + p.string());
  out << data;
  if (!out) throw IoError("write failed: " + p.string());
}

}  // namespace detail

inline RunManifest read_run(const std::filesystem::path& dir) {
  const auto manifest_path = dir / "manifest.json";
  if (!std::filesystem::exists(manifest_path)) throw RunError("no manifest.json in " + dir.string());
  RunManifest run;
  try {
    const auto j = nlohmann::json::parse(detail::read_file(manifest_path));
    if (j.at("format").get<std::string>() != kRunFormat)
      throw RunError("unsupported run format in " + manifest_path.string());
    run.template_version = j.at("prompt_template").at("version").get<std::string>();
    run.template_sha256 = j.at("prompt_template").at("sha256").get<std::string>();
    for (const auto& jr : j.at("records")) {
      GenerationRecord r;
      r.model = jr.at("model").get<std::string>();
      r.prompt_id = jr.at("prompt_id").get<std::string>();
      r.doc_augmented = jr.at("doc_augmented").get<bool>();
      r.iteration_index = jr.at("iteration_index").get<int>();
      r.timestamp = jr.at("timestamp").get<std::string>();
      r.attempts = jr.at("attempts").get<int>();
      if (!jr.at("error").is_null()) r.error = jr.at("error").get<std::string>();
      r.raw_response = detail::read_file(dir / jr.at("raw_response").get<std::string>());
      r.extracted_config = detail::read_file(dir / jr.at("extracted_config").get<std::string>());
      if (r.extracted_config != extract_config_from_response(r.raw_response))
        throw RunError("record " + detail::record_stem(r) + ": extracted config does not match raw response");
      run.records.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw RunError("corrupt manifest " + manifest_path.string() + ": " + e.what());
  } catch (const IoError& e) {
    throw RunError(std::string("corrupt run: ") + e.what());
  }
  return run;
}

// Adds records to the run in `dir`, creating it if needed. A record with the
// same (model, prompt_id, doc_augmented, iteration_index) replaces the old one.
// Not safe to call concurrently on the same directory.
inline void write_run(const std::filesystem::path& dir, const std::vector<GenerationRecord>& records) {
  namespace fs = std::filesystem;
  RunManifest run;
  if (fs::exists(dir / "manifest.json")) run = read_run(dir);
  fs::create_directories(dir / "records");

  for (const auto& r : records) {
    auto same = [&](const GenerationRecord& o) { return detail::record_key(o) == detail::record_key(r); };
    run.records.erase(std::remove_if(run.records.begin(), run.records.end(), same), run.records.end());
    run.records.push_back(r);
  }
  std::sort(run.records.begin(), run.records.end(), [](const auto& a, const auto& b) {
    return detail::record_key(a) < detail::record_key(b);
  });

  nlohmann::ordered_json j;
  j["format"] = kRunFormat;
  j["prompt_template"] = {{"version", run.template_version}, {"sha256", run.template_sha256}};
  j["sampling"] = "provider-default";
  j["records"] = nlohmann::ordered_json::array();
  for (const auto& r : run.records) {
    const auto stem = detail::record_stem(r);
    const std::string raw_rel = "records/" + stem + ".raw.txt";
    const std::string conf_rel = "records/" + stem + ".conf";
    detail::write_file(dir / raw_rel, r.raw_response);
    detail::write_file(dir / conf_rel, r.extracted_config);
    nlohmann::ordered_json jr;
    jr["model"] = r.model;
    jr["prompt_id"] = r.prompt_id;
    jr["doc_augmented"] = r.doc_augmented;
    jr["iteration_index"] = r.iteration_index;
    jr["timestamp"] = r.timestamp;
    jr["raw_response"] = raw_rel;
    jr["extracted_config"] = conf_rel;
    jr["attempts"] = r.attempts;
    jr["error"] = r.error ? nlohmann::ordered_json(*r.error) : nlohmann::ordered_json(nullptr);
    j["records"].push_back(std::move(jr));
  }
  detail::write_file(dir / "manifest.json", j.dump(2) + "\n");
}

}  // namespace pwqc
