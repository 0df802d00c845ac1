#pragma once

#include <algorithm>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "pwqc/error.hpp"
#include "pwqc/schema.hpp"
#include "pwqc/text.hpp"
#include "pwqc/value.hpp"

namespace pwqc {

// strict models what pam_pwquality would accept; lenient keeps going on
// the malformations LLMs tend to produce so metrics can still be computed.
enum class ParseMode { strict, lenient };

enum class Severity { fatal, warning };

enum class DiagnosticKind {
  malformed_assignment,
  unknown_parameter,
  invalid_value,
  section_header,
  duplicate_key,
  empty_file_note,
};

inline std::string_view to_string(ParseMode m) { return m == ParseMode::strict ? "strict" : "lenient"; }
inline std::string_view to_string(Severity s) { return s == Severity::fatal ? "fatal" : "warning"; }

inline std::string_view to_string(DiagnosticKind k) {
  switch (k) {
    case DiagnosticKind::malformed_assignment: return "malformed_assignment";
    case DiagnosticKind::unknown_parameter: return "unknown_parameter";
    case DiagnosticKind::invalid_value: return "invalid_value";
    case DiagnosticKind::section_header: return "section_header";
    case DiagnosticKind::duplicate_key: return "duplicate_key";
    case DiagnosticKind::empty_file_note: return "empty_file_note";
  }
  return "?";
}

struct Diagnostic {
  int line_no = 0;  // 0 for file-level notes
  Severity severity = Severity::warning;
  DiagnosticKind kind = DiagnosticKind::empty_file_note;
  std::string message;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

struct Assignment {
  std::string name;
  ParamValue value;
  int line_no = 0;

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

struct ParsedConfig {
  std::vector<Assignment> assignments;  // at most one per name, ordered by line
  std::vector<Diagnostic> diagnostics;
  ParseMode mode = ParseMode::lenient;

  bool has_fatal() const {
    return std::any_of(diagnostics.begin(), diagnostics.end(),
                       [](const Diagnostic& d) { return d.severity == Severity::fatal; });
  }

  bool has(DiagnosticKind kind) const {
    return std::any_of(diagnostics.begin(), diagnostics.end(),
                       [kind](const Diagnostic& d) { return d.kind == kind; });
  }

  const Assignment* find(std::string_view name) const {
    auto it = std::find_if(assignments.begin(), assignments.end(),
                           [name](const Assignment& a) { return a.name == name; });
    return it == assignments.end() ? nullptr : &*it;
  }

  friend bool operator==(const ParsedConfig&, const ParsedConfig&) = default;
};

namespace detail {

// Kinds that make a file unusable for the real module.
constexpr bool fatal_in_strict(DiagnosticKind k) {
  return k == DiagnosticKind::malformed_assignment || k == DiagnosticKind::invalid_value ||
         k == DiagnosticKind::section_header;
}

inline bool is_identifier(std::string_view s) {
  return !s.empty() && std::none_of(s.begin(), s.end(), [](char c) { return is_space(c) || c == '='; });
}

}  // namespace detail

// Parses pwquality.conf text. Throws EncodingError on invalid UTF-8.
inline ParsedConfig parse_config(std::string_view text, ParseMode mode = ParseMode::lenient,
                                 const ParameterSchema& schema = ParameterSchema::bundled()) {
  if (auto bad = find_invalid_utf8(text))
    throw EncodingError("input is not valid UTF-8 (byte offset " + std::to_string(*bad) + ")");

  ParsedConfig out;
  out.mode = mode;
  auto diag = [&](int line_no, DiagnosticKind kind, std::string msg) {
    const Severity sev =
        mode == ParseMode::strict && detail::fatal_in_strict(kind) ? Severity::fatal : Severity::warning;
    out.diagnostics.push_back({line_no, sev, kind, std::move(msg)});
  };
  auto assign = [&](int line_no, std::string name, ParamValue value) {
    auto prev = std::find_if(out.assignments.begin(), out.assignments.end(),
                             [&](const Assignment& a) { return a.name == name; });
    if (prev != out.assignments.end()) {
      diag(line_no, DiagnosticKind::duplicate_key,
           "'" + name + "' already set on line " + std::to_string(prev->line_no) + "; last value wins");
      out.assignments.erase(prev);
    }
    out.assignments.push_back({std::move(name), std::move(value), line_no});
  };

  bool saw_content = false;
  int line_no = 0;
  for (std::string_view raw : split_lines(text)) {
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    saw_content = true;

    if (line.front() == '[' && line.back() == ']') {
      diag(line_no, DiagnosticKind::section_header,
           "section header " + std::string(line) + " is not pwquality.conf syntax; ignored");
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      const auto* spec = schema.lookup(line);
      if (spec && spec->kind == ValueKind::flag) {
        assign(line_no, std::string(line), Flag{true});
      } else {
        diag(line_no, DiagnosticKind::malformed_assignment,
             "missing '=' in \"" + std::string(line) + "\"; line skipped");
      }
      continue;
    }

    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (!detail::is_identifier(key)) {
      diag(line_no, DiagnosticKind::malformed_assignment,
           "invalid parameter name in \"" + std::string(line) + "\"; line skipped");
      continue;
    }

    const auto* spec = schema.lookup(key);
    if (!spec) {
      diag(line_no, DiagnosticKind::unknown_parameter,
           "'" + std::string(key) + "' is not a pwquality.conf parameter");
      assign(line_no, std::string(key), std::string(value));
      continue;
    }
    switch (spec->kind) {
      case ValueKind::integer:
        if (auto v = parse_int(value)) {
          assign(line_no, std::string(key), *v);
        } else {
          diag(line_no, DiagnosticKind::invalid_value,
               "'" + std::string(key) + "' expects an integer, got \"" + std::string(value) + "\"");
          assign(line_no, std::string(key), std::string(value));
        }
        break;
      case ValueKind::string:
        assign(line_no, std::string(key), std::string(value));
        break;
      case ValueKind::flag:
        // libpwquality sets flag options regardless of any value given.
        assign(line_no, std::string(key), Flag{true});
        break;
    }
  }

  if (!saw_content)
    out.diagnostics.push_back({0, Severity::warning, DiagnosticKind::empty_file_note,
                               "file contains no settings; all defaults apply"});
  return out;
}

// Emits `key = value` lines (bare name for present flags), LF endings.
inline std::string serialize(const ParsedConfig& cfg) {
  std::string out;
  for (const auto& a : cfg.assignments) {
    if (a.value.is_flag()) {
      if (a.value.flag_present()) out += a.name + "\n";
      continue;
    }
    out += a.name + " = " + a.value.to_text() + "\n";
  }
  return out;
}

// Pulls the config body out of a chat-style answer: the contents of the
// first ``` fence, or the input unchanged when there is none.
inline std::string extract_config_from_response(std::string_view raw) {
  auto lines = split(raw, '\n');
  std::size_t open = lines.size();
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).substr(0, 3) == "```") {
      open = i;
      break;
    }
  }
  if (open == lines.size()) return std::string(raw);

  std::string body;
  for (std::size_t i = open + 1; i < lines.size(); ++i) {
    auto line = lines[i];
    if (trim(line).substr(0, 3) == "```") break;
    // an unterminated fence runs to end of input; avoid inventing a newline
    if (i + 1 == lines.size() && line.empty()) break;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    body.append(line);
    body.push_back('\n');
  }
  return body;
}

inline std::ostream& operator<<(std::ostream& os, const Diagnostic& d) {
  return os << "line " << d.line_no << ": " << to_string(d.severity) << ": " << to_string(d.kind) << ": "
            << d.message;
}

}  // namespace pwqc
