#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "pwqc/parser.hpp"
#include "test_support.hpp"

namespace pwqc {
namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<DiagnosticKind> kinds(const ParsedConfig& c) {
  std::vector<DiagnosticKind> out;
  for (const auto& d : c.diagnostics) out.push_back(d.kind);
  return out;
}

TEST(Parser, EmptyFileHasNoteOnly) {
  const auto c = parse_config("");
  EXPECT_TRUE(c.assignments.empty());
  ASSERT_EQ(c.diagnostics.size(), 1u);
  EXPECT_EQ(c.diagnostics[0].kind, DiagnosticKind::empty_file_note);
  EXPECT_EQ(c.diagnostics[0].severity, Severity::warning);
}

TEST(Parser, CommentOnlyFileCountsAsEmpty) {
  const auto c = parse_config("# nothing here\n\n   # still nothing\n", ParseMode::strict);
  EXPECT_TRUE(c.assignments.empty());
  EXPECT_EQ(kinds(c), std::vector{DiagnosticKind::empty_file_note});
  EXPECT_FALSE(c.has_fatal());
}

TEST(Parser, MissingEqualsIsFatalInStrictMode) {
  const auto c = parse_config("minlen 8", ParseMode::strict);
  EXPECT_TRUE(c.assignments.empty());
  ASSERT_EQ(c.diagnostics.size(), 1u);
  EXPECT_EQ(c.diagnostics[0].kind, DiagnosticKind::malformed_assignment);
  EXPECT_EQ(c.diagnostics[0].severity, Severity::fatal);
  EXPECT_EQ(c.diagnostics[0].line_no, 1);
}

TEST(Parser, MissingEqualsIsSkippedWithWarningInLenientMode) {
  const auto c = parse_config("minlen 8\nretry=3\n", ParseMode::lenient);
  ASSERT_EQ(c.assignments.size(), 1u);
  EXPECT_EQ(c.assignments[0].name, "retry");
  EXPECT_EQ(c.diagnostics[0].kind, DiagnosticKind::malformed_assignment);
  EXPECT_EQ(c.diagnostics[0].severity, Severity::warning);
  EXPECT_FALSE(c.has_fatal());
}

TEST(Parser, SectionHeaderLenient) {
  const auto c = parse_config("[general]\nminlen=10", ParseMode::lenient);
  ASSERT_EQ(c.assignments.size(), 1u);
  EXPECT_EQ(c.assignments[0], (Assignment{"minlen", 10, 2}));
  ASSERT_EQ(c.diagnostics.size(), 1u);
  EXPECT_EQ(c.diagnostics[0].kind, DiagnosticKind::section_header);
  EXPECT_EQ(c.diagnostics[0].severity, Severity::warning);
}

TEST(Parser, SectionHeaderStrictIsFatal) {
  const auto c = parse_config("[general]\nminlen=10", ParseMode::strict);
  EXPECT_TRUE(c.has_fatal());
  EXPECT_EQ(c.assignments.size(), 1u);
}

TEST(Parser, InvalidIntegerKeepsRawString) {
  for (auto mode : {ParseMode::strict, ParseMode::lenient}) {
    const auto c = parse_config("minlen=abc", mode);
    ASSERT_EQ(c.assignments.size(), 1u);
    EXPECT_EQ(c.assignments[0].value, ParamValue("abc"));
    ASSERT_EQ(c.diagnostics.size(), 1u);
    EXPECT_EQ(c.diagnostics[0].kind, DiagnosticKind::invalid_value);
    EXPECT_EQ(c.diagnostics[0].severity, mode == ParseMode::strict ? Severity::fatal : Severity::warning);
  }
}

TEST(Parser, IntegerForms) {
  EXPECT_EQ(parse_config("dcredit = -1").assignments.at(0).value, ParamValue(-1));
  EXPECT_EQ(parse_config("minlen = +12").assignments.at(0).value, ParamValue(12));
  EXPECT_TRUE(parse_config("minlen = 8.5").has(DiagnosticKind::invalid_value));
  EXPECT_TRUE(parse_config("minlen = 8 chars").has(DiagnosticKind::invalid_value));
  EXPECT_TRUE(parse_config("minlen =").has(DiagnosticKind::invalid_value));
  EXPECT_TRUE(parse_config("minlen = 99999999999999999999").has(DiagnosticKind::invalid_value));
  EXPECT_TRUE(parse_config("minlen = +-3").has(DiagnosticKind::invalid_value));
}

TEST(Parser, WhitespaceAroundEqualsAndTrailingCommentsIgnored) {
  const auto c = parse_config("  minlen\t=   10   # ten\n");
  ASSERT_EQ(c.assignments.size(), 1u);
  EXPECT_EQ(c.assignments[0].value, ParamValue(10));
  EXPECT_TRUE(c.diagnostics.empty());
}

TEST(Parser, StringValuesKeepInternalSpaces) {
  const auto c = parse_config("badwords = acme  corp secret   \n");
  EXPECT_EQ(c.assignments.at(0).value, ParamValue("acme  corp secret"));
}

TEST(Parser, FirstEqualsSplits) {
  const auto c = parse_config("dictpath = /usr/share/a=b\n");
  EXPECT_EQ(c.assignments.at(0).value, ParamValue("/usr/share/a=b"));
}

TEST(Parser, UnknownParameterRetainedWithWarning) {
  const auto c = parse_config("check_userpass = 1", ParseMode::strict);
  ASSERT_EQ(c.assignments.size(), 1u);
  EXPECT_EQ(c.assignments[0].value, ParamValue("1"));
  EXPECT_EQ(kinds(c), std::vector{DiagnosticKind::unknown_parameter});
  EXPECT_FALSE(c.has_fatal());
}

TEST(Parser, NamesAreCaseSensitive) {
  const auto c = parse_config("MINLEN = 12");
  EXPECT_TRUE(c.has(DiagnosticKind::unknown_parameter));
  EXPECT_EQ(c.assignments.at(0).value, ParamValue("12"));
}

TEST(Parser, DuplicateLastWins) {
  const auto c = parse_config("minlen=9\nretry=2\nminlen=12\n");
  ASSERT_EQ(c.assignments.size(), 2u);
  EXPECT_EQ(c.assignments[0].name, "retry");
  EXPECT_EQ(c.assignments[1], (Assignment{"minlen", 12, 3}));
  EXPECT_EQ(kinds(c), std::vector{DiagnosticKind::duplicate_key});
  EXPECT_EQ(c.diagnostics[0].line_no, 3);
}

TEST(Parser, BareFlags) {
  const auto c = parse_config("enforce_for_root\nlocal_users_only\n", ParseMode::strict);
  ASSERT_EQ(c.assignments.size(), 2u);
  EXPECT_EQ(c.assignments[0].value, ParamValue(Flag{true}));
  EXPECT_TRUE(c.diagnostics.empty());
}

TEST(Parser, BareNonFlagIsMalformed) {
  const auto c = parse_config("minlen", ParseMode::strict);
  EXPECT_TRUE(c.assignments.empty());
  EXPECT_EQ(kinds(c), std::vector{DiagnosticKind::malformed_assignment});
}

TEST(Parser, KeyWithSpacesIsMalformed) {
  const auto c = parse_config("min len = 8", ParseMode::lenient);
  EXPECT_TRUE(c.assignments.empty());
  EXPECT_EQ(kinds(c), std::vector{DiagnosticKind::malformed_assignment});
}

TEST(Parser, CrlfLineEndings) {
  const auto c = parse_config("minlen = 9\r\nretry = 2\r\n");
  ASSERT_EQ(c.assignments.size(), 2u);
  EXPECT_EQ(c.assignments[1], (Assignment{"retry", 2, 2}));
}

TEST(Parser, RejectsInvalidUtf8) {
  EXPECT_THROW(parse_config(std::string("minlen = 8\n\xff\n")), EncodingError);
  EXPECT_THROW(parse_config(std::string("badwords = \xc0\xaf")), EncodingError);  // overlong
  EXPECT_NO_THROW(parse_config("badwords = pässwört"));
}

TEST(Parser, TotalOverRandomUtf8Text) {
  std::mt19937_64 rng(7);
  const std::vector<std::string> atoms = {"minlen", "=", " ", "\n", "#", "[", "]", "abc", "-", "7",
                                          "check_userpass", "\t", "\r", "enforce_for_root", "ü", "badwords"};
  std::uniform_int_distribution<std::size_t> pick(0, atoms.size() - 1);
  std::uniform_int_distribution<int> len(0, 40);
  for (int i = 0; i < 3000; ++i) {
    std::string text;
    for (int k = len(rng); k > 0; --k) text += atoms[pick(rng)];
    for (auto mode : {ParseMode::strict, ParseMode::lenient}) {
      ParsedConfig a, b;
      ASSERT_NO_THROW(a = parse_config(text, mode)) << text;
      b = parse_config(text, mode);
      EXPECT_EQ(a, b);
      for (const auto& asg : a.assignments) {
        EXPECT_GE(asg.line_no, 1);
        EXPECT_LE(asg.line_no, static_cast<int>(split_lines(text).size()));
      }
    }
  }
}

TEST(Parser, RandomBytesEitherParseOrEncodingError) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> byte(0, 255);
  for (int i = 0; i < 2000; ++i) {
    std::string text;
    for (int k = 0; k < 32; ++k) text.push_back(static_cast<char>(byte(rng)));
    try {
      parse_config(text, ParseMode::lenient);
    } catch (const EncodingError&) {
    }
  }
}

TEST(Parser, LenientAssignmentsContainStrictOnes) {
  testing::MiniConfigGen gen(21);
  std::mt19937_64& rng = gen.rng();
  const std::vector<std::string> junk = {"[general]", "minlen 8", "# c", "", "difok = x"};
  for (int i = 0; i < 500; ++i) {
    std::string text = oracle::to_text(gen.next());
    text += junk[rng() % junk.size()] + "\n";
    const auto strict = parse_config(text, ParseMode::strict);
    const auto lenient = parse_config(text, ParseMode::lenient);
    for (const auto& a : strict.assignments)
      EXPECT_NE(std::find(lenient.assignments.begin(), lenient.assignments.end(), a), lenient.assignments.end());
  }
}

TEST(Parser, SerializeRoundTripOnCleanStrictConfigs) {
  std::mt19937_64 rng(5);
  const std::vector<std::string> lines = {"minlen = 12", "dcredit = -1", "badwords = foo bar", "enforce_for_root",
                                          "dictpath = /usr/share/cracklib/pw_dict", "retry = 3", "maxrepeat = 0"};
  for (int i = 0; i < 300; ++i) {
    std::vector<std::string> chosen = lines;
    std::shuffle(chosen.begin(), chosen.end(), rng);
    chosen.resize(rng() % (chosen.size() + 1));
    std::string text;
    for (const auto& l : chosen) text += l + "\n";
    const auto first = parse_config(text, ParseMode::strict);
    if (chosen.empty()) continue;  // empty file carries its note
    ASSERT_TRUE(first.diagnostics.empty()) << text;
    EXPECT_EQ(parse_config(serialize(first), ParseMode::strict), first) << text;
  }
}

TEST(Parser, SerializeFormat) {
  const auto c = parse_config("minlen=9\nenforce_for_root\nbadwords=a b\n");
  EXPECT_EQ(serialize(c), "minlen = 9\nenforce_for_root\nbadwords = a b\n");
}

TEST(ExtractConfig, Examples) {
  EXPECT_EQ(extract_config_from_response("```\nminlen=8\n```"), "minlen=8\n");
  EXPECT_EQ(extract_config_from_response("minlen=8"), "minlen=8");
  EXPECT_EQ(extract_config_from_response("Here is the file:\n```conf\nminlen=8\n```\nHope this helps!"),
            "minlen=8\n");
  EXPECT_EQ(extract_config_from_response(""), "");
  EXPECT_EQ(extract_config_from_response("```\nminlen=8"), "minlen=8\n");
  EXPECT_EQ(extract_config_from_response("```ini\r\nminlen=8\r\n```\r\n"), "minlen=8\n");
}

TEST(ExtractConfig, StoredResponses) {
  const auto dir = testing::test_dir() / "fixtures" / "responses";
  int checked = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.path().extension() != ".txt") continue;
    auto expected = e.path();
    expected.replace_extension(".expected");
    SCOPED_TRACE(e.path().filename().string());
    EXPECT_EQ(extract_config_from_response(slurp(e.path())), slurp(expected));
    ++checked;
  }
  EXPECT_EQ(checked, 3);
}

}  // namespace
}  // namespace pwqc
