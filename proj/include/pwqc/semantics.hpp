#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "pwqc/error.hpp"
#include "pwqc/parser.hpp"
#include "pwqc/policy.hpp"
#include "pwqc/schema.hpp"
#include "pwqc/text.hpp"

namespace pwqc {

// Resolves what pam_pwquality would enforce for a parsed file.
//
// Unknown parameters are listed in ignored_params and have no effect. A
// single invalid value for a real parameter, or any fatal strict-mode
// diagnostic, discards the whole file: every value reverts to its default
// and fell_back is set. ignored_params is still reported in that case.
inline EffectivePolicy effective_policy(const ParsedConfig& parsed,
                                        const ParameterSchema& schema = ParameterSchema::bundled()) {
  EffectivePolicy policy = schema.load_defaults();
  bool invalid = parsed.has_fatal() || parsed.has(DiagnosticKind::invalid_value);

  for (const auto& a : parsed.assignments) {
    const auto* spec = schema.lookup(a.name);
    if (!spec) {
      policy.ignored_params.push_back(a.name);
      continue;
    }
    const bool kind_ok = (spec->kind == ValueKind::integer && a.value.is_integer()) ||
                         (spec->kind == ValueKind::string && a.value.is_string()) ||
                         (spec->kind == ValueKind::flag && a.value.is_flag());
    if (!kind_ok) {
      invalid = true;
      continue;
    }
    policy.values[a.name] = a.value;
  }

  if (invalid) {
    policy.values = schema.load_defaults().values;
    policy.fell_back = true;
  }
  return policy;
}

inline bool functionally_equivalent(const ParsedConfig& a, const ParsedConfig& b,
                                    const ParameterSchema& schema = ParameterSchema::bundled()) {
  return effective_policy(a, schema).values == effective_policy(b, schema).values;
}

enum class PasswordFailure {
  too_short,
  too_few_classes,
  insufficient_difok,
  dictionary_word,
  contains_username,
  class_minimum_unmet,
  repeat_run,
  sequence_run,
  class_repeat_run,
  badword,
};

inline std::string_view to_string(PasswordFailure f) {
  switch (f) {
    case PasswordFailure::too_short: return "too_short";
    case PasswordFailure::too_few_classes: return "too_few_classes";
    case PasswordFailure::insufficient_difok: return "insufficient_difok";
    case PasswordFailure::dictionary_word: return "dictionary_word";
    case PasswordFailure::contains_username: return "contains_username";
    case PasswordFailure::class_minimum_unmet: return "class_minimum_unmet";
    case PasswordFailure::repeat_run: return "repeat_run";
    case PasswordFailure::sequence_run: return "sequence_run";
    case PasswordFailure::class_repeat_run: return "class_repeat_run";
    case PasswordFailure::badword: return "badword";
  }
  return "?";
}

enum class Verdict { accept, reject };

struct PasswordCheckResult {
  Verdict verdict = Verdict::accept;
  std::vector<PasswordFailure> failures;  // in check order, no duplicates

  bool accepted() const { return verdict == Verdict::accept; }
  bool failed(PasswordFailure f) const {
    return std::find(failures.begin(), failures.end(), f) != failures.end();
  }

  friend bool operator==(const PasswordCheckResult&, const PasswordCheckResult&) = default;
};

// Lower-cased dictionary words.
using Wordlist = std::unordered_set<std::string>;

// One word per line; blank lines and surrounding whitespace are ignored.
inline Wordlist parse_wordlist(std::string_view text) {
  Wordlist words;
  for (auto line : split_lines(text)) {
    auto w = trim(line);
    if (!w.empty()) words.insert(to_lower_ascii(w));
  }
  return words;
}

enum class CharClass { digit, upper, lower, other };

constexpr CharClass classify(char32_t c) {
  if (c >= U'0' && c <= U'9') return CharClass::digit;
  if (c >= U'A' && c <= U'Z') return CharClass::upper;
  if (c >= U'a' && c <= U'z') return CharClass::lower;
  return CharClass::other;
}

namespace detail {

inline std::u32string lower(std::u32string s) {
  for (auto& c : s)
    if (c >= U'A' && c <= U'Z') c = c - U'A' + U'a';
  return s;
}

inline bool contains(const std::u32string& hay, const std::u32string& needle) {
  return !needle.empty() && hay.find(needle) != std::u32string::npos;
}

inline std::size_t longest_repeat(const std::u32string& s) {
  std::size_t best = 0, run = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    run = (i > 0 && s[i] == s[i - 1]) ? run + 1 : 1;
    best = std::max(best, run);
  }
  return best;
}

inline std::size_t longest_class_repeat(const std::u32string& s) {
  std::size_t best = 0, run = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    run = (i > 0 && classify(s[i]) == classify(s[i - 1])) ? run + 1 : 1;
    best = std::max(best, run);
  }
  return best;
}

// Longest run where every step is +1, or every step is -1 ("abcd", "4321").
inline std::size_t longest_sequence(const std::u32string& s) {
  if (s.empty()) return 0;
  std::size_t best = 1, run = 1;
  long dir = 0;
  for (std::size_t i = 1; i < s.size(); ++i) {
    const long step = static_cast<long>(s[i]) - static_cast<long>(s[i - 1]);
    if ((step == 1 || step == -1) && (run == 1 || step == dir)) {
      ++run;
      dir = step;
    } else if (step == 1 || step == -1) {
      run = 2;
      dir = step;
    } else {
      run = 1;
      dir = 0;
    }
    best = std::max(best, run);
  }
  return best;
}

}  // namespace detail

// Simulates the pam_pwquality checks for one candidate password.
//
// gecoscheck, enforce_for_root and local_users_only need system context and
// are not evaluated. Character classes are ASCII based; anything outside
// [0-9A-Za-z] counts as "other".
inline PasswordCheckResult check_password(const EffectivePolicy& policy, std::string_view candidate,
                                          std::optional<std::string_view> old_password = std::nullopt,
                                          std::optional<std::string_view> username = std::nullopt,
                                          const Wordlist* wordlist = nullptr) {
  if (candidate.empty()) throw InputError("candidate password is empty");
  const std::u32string pw = decode_utf8(candidate);

  PasswordCheckResult result;
  auto fail = [&](PasswordFailure f) {
    if (!result.failed(f)) result.failures.push_back(f);
  };

  std::array<std::int64_t, 4> counts{};
  for (char32_t c : pw) ++counts[static_cast<std::size_t>(classify(c))];

  // length with class credits
  const std::array<std::int64_t, 4> credits{policy.integer("dcredit"), policy.integer("ucredit"),
                                            policy.integer("lcredit"), policy.integer("ocredit")};
  std::int64_t effective_length = static_cast<std::int64_t>(pw.size());
  for (std::size_t k = 0; k < 4; ++k) {
    if (credits[k] > 0) {
      effective_length += std::min(counts[k], credits[k]);
    } else if (credits[k] < 0 && counts[k] < -credits[k]) {
      fail(PasswordFailure::class_minimum_unmet);
    }
  }
  if (effective_length < policy.integer("minlen")) fail(PasswordFailure::too_short);

  const auto classes = std::count_if(counts.begin(), counts.end(), [](std::int64_t n) { return n > 0; });
  if (classes < policy.integer("minclass")) fail(PasswordFailure::too_few_classes);

  if (const auto difok = policy.integer("difok"); old_password && difok > 0) {
    const std::u32string old = decode_utf8(*old_password);
    const auto fresh = std::count_if(pw.begin(), pw.end(),
                                     [&](char32_t c) { return old.find(c) == std::u32string::npos; });
    if (fresh < difok) fail(PasswordFailure::insufficient_difok);
  }

  if (const auto n = policy.integer("maxrepeat"); n > 0 && static_cast<std::int64_t>(detail::longest_repeat(pw)) > n)
    fail(PasswordFailure::repeat_run);
  if (const auto n = policy.integer("maxsequence");
      n > 0 && static_cast<std::int64_t>(detail::longest_sequence(pw)) > n)
    fail(PasswordFailure::sequence_run);
  if (const auto n = policy.integer("maxclassrepeat");
      n > 0 && static_cast<std::int64_t>(detail::longest_class_repeat(pw)) > n)
    fail(PasswordFailure::class_repeat_run);

  const std::u32string pw_lower = detail::lower(pw);
  if (username && !username->empty() && policy.integer("usercheck") != 0) {
    const std::u32string user = detail::lower(decode_utf8(*username));
    const std::u32string resu(user.rbegin(), user.rend());
    if (detail::contains(pw_lower, user) || detail::contains(pw_lower, resu))
      fail(PasswordFailure::contains_username);

    const auto sub = policy.integer("usersubstr");
    if (sub > 3 && static_cast<std::size_t>(sub) <= user.size()) {
      const auto len = static_cast<std::size_t>(sub);
      for (std::size_t i = 0; i + len <= user.size(); ++i) {
        std::u32string piece = user.substr(i, len);
        std::u32string rev(piece.rbegin(), piece.rend());
        if (detail::contains(pw_lower, piece) || detail::contains(pw_lower, rev)) {
          fail(PasswordFailure::contains_username);
          break;
        }
      }
    }
  }

  if (wordlist && policy.integer("dictcheck") != 0 && wordlist->count(to_lower_ascii(candidate)) > 0)
    fail(PasswordFailure::dictionary_word);

  const auto& badwords = policy.at("badwords").as_string();
  for (auto word : split(badwords, ' ')) {
    if (trim(word).empty()) continue;
    if (detail::contains(pw_lower, detail::lower(decode_utf8(trim(word))))) {
      fail(PasswordFailure::badword);
      break;
    }
  }

  result.verdict = result.failures.empty() ? Verdict::accept : Verdict::reject;
  return result;
}

}  // namespace pwqc
