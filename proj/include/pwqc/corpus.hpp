#pragma once

#include <algorithm>
#include <filesystem>
#include <string>
#include <vector>

#include "pwqc/bundled_data.hpp"
#include "pwqc/error.hpp"
#include "pwqc/harness.hpp"
#include "pwqc/parser.hpp"
#include "pwqc/schema.hpp"

namespace pwqc {

// A policy prompt paired with its hand-written gold configuration.
struct CorpusEntry {
  PolicyPrompt prompt;
  ParsedConfig benchmark;  // strict parse, no fatal diagnostics, no unknown names
  std::string notes;       // red herrings and mapping remarks

  friend bool operator==(const CorpusEntry&, const CorpusEntry&) = default;
};

// Loads `<dir>/<entry-id>/{prompt.txt, benchmark.conf[, notes.txt, doc.txt]}`.
// Entries come back sorted by id. Without doc.txt an entry gets the bundled
// pwquality.conf documentation as its augmentation text.
inline std::vector<CorpusEntry> load_corpus(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw CorpusError("corpus directory not found: " + dir.string());

  std::vector<fs::path> entry_dirs;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_directory()) entry_dirs.push_back(e.path());
  std::sort(entry_dirs.begin(), entry_dirs.end());

  std::vector<CorpusEntry> corpus;
  for (const auto& p : entry_dirs) {
    const auto id = p.filename().string();
    if (!fs::exists(p / "prompt.txt") || !fs::exists(p / "benchmark.conf"))
      throw CorpusError("corpus entry '" + id + "' needs prompt.txt and benchmark.conf");

    CorpusEntry entry;
    entry.prompt.id = id;
    try {
      entry.prompt.policy_text = detail::read_file(p / "prompt.txt");
      entry.prompt.doc_text = fs::exists(p / "doc.txt") ? detail::read_file(p / "doc.txt")
                                                         : std::string(bundled::kDocumentation);
      if (fs::exists(p / "notes.txt")) entry.notes = detail::read_file(p / "notes.txt");
      entry.benchmark = parse_config(detail::read_file(p / "benchmark.conf"), ParseMode::strict);
    } catch (const IoError& e) {
      throw CorpusError(e.what());
    } catch (const EncodingError& e) {
      throw CorpusError("corpus entry '" + id + "': " + e.what());
    }

    for (const auto& d : entry.benchmark.diagnostics) {
      if (d.severity == Severity::fatal || d.kind == DiagnosticKind::unknown_parameter) {
        std::ostringstream msg;
        msg << "benchmark of '" << id << "' is not gold: " << d;
        throw CorpusError(msg.str());
      }
    }
    corpus.push_back(std::move(entry));
  }
  return corpus;
}

inline const CorpusEntry* find_entry(const std::vector<CorpusEntry>& corpus, std::string_view id) {
  auto it = std::find_if(corpus.begin(), corpus.end(), [id](const CorpusEntry& e) { return e.prompt.id == id; });
  return it == corpus.end() ? nullptr : &*it;
}

}  // namespace pwqc
