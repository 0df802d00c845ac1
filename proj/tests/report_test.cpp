#include <gtest/gtest.h>

#include "pwqc/corpus.hpp"
#include "pwqc/report.hpp"
#include "test_support.hpp"

namespace pwqc {
namespace {

using testing::TempDir;

const std::vector<CorpusEntry>& corpus() {
  static const auto c = load_corpus(testing::corpus_dir());
  return c;
}

GenerateOptions fixed_clock() {
  GenerateOptions o;
  o.clock = [] { return std::chrono::system_clock::time_point{}; };
  return o;
}

// Same layout the CLI produces for `generate --provider mock --iterations 5 --with-doc`.
RunManifest mock_run(MockProvider::Persona persona, GenerateOptions opts = fixed_clock()) {
  RunManifest run;
  const MockProvider mock(persona);
  for (const auto& e : corpus())
    for (bool doc : {false, true})
      for (auto& r : generate_responses(mock, e.prompt, 5, doc, opts)) run.records.push_back(std::move(r));
  return run;
}

TEST(BuildReport, EmptyRun) {
  EXPECT_TRUE(build_report(RunManifest{}, corpus()).empty());
  EXPECT_EQ(emit({}, ReportFormat::json), "[]\n");
  EXPECT_EQ(emit({}, ReportFormat::csv), std::string(kCsvHeader) + "\n");
}

TEST(BuildReport, BlankCellAgainstP1) {
  const auto report = build_report(mock_run(MockProvider::Persona::blank), corpus());
  ASSERT_EQ(report.size(), 4u);
  const auto& c = report[0];
  EXPECT_EQ(c.model, "mock-blank");
  EXPECT_EQ(c.prompt_id, "P1");
  EXPECT_FALSE(c.doc_augmented);
  EXPECT_EQ(c.responses, 5);
  ASSERT_TRUE(c.consistency);
  EXPECT_EQ(c.consistency->avg_consistency_real, Rational(1));
  EXPECT_EQ(c.consistency->avg_hallucinated, Rational(0));
  ASSERT_TRUE(c.correctness);
  EXPECT_EQ(c.correctness->avg_correct_real, Rational(19, 20));
  ASSERT_TRUE(c.soundness);
  EXPECT_FALSE(c.soundness->complete);
  EXPECT_FALSE(c.soundness->sound);
  // P2 only restates defaults, so blank answers are sound there
  EXPECT_EQ(report[2].prompt_id, "P2");
  EXPECT_TRUE(report[2].soundness->sound);
}

TEST(BuildReport, GoodPersonaP1PlainCell) {
  // Iterations 1 and 3 add check_userpass=1, iteration 3 also sets minlen=10.
  const auto report = build_report(mock_run(MockProvider::Persona::good), corpus());
  const auto& c = report[0];
  ASSERT_EQ(c.prompt_id, "P1");
  ASSERT_FALSE(c.doc_augmented);
  // one of ten pairs shares the hallucinated key: (1/2) / 10
  EXPECT_EQ(c.consistency->avg_hallucinated, Rational(1, 20));
  // 3 pairs at 1, 3 at 20/21, 3 at 19/21, 1 at 20/21
  EXPECT_EQ(c.consistency->avg_consistency_incl_hal, Rational(20, 21));
  // 4 pairs touch iteration 3 and differ in minlen
  EXPECT_EQ(c.consistency->avg_consistency_real, Rational(49, 50));
  EXPECT_EQ(c.correctness->avg_correct_real, Rational(99, 100));
  EXPECT_EQ(c.census[1].names, std::vector<std::string>{"check_userpass"});
  EXPECT_FALSE(c.soundness->hallucination_free);

  const auto& doc = report[1];
  ASSERT_TRUE(doc.doc_augmented);
  EXPECT_TRUE(doc.soundness->hallucination_free);
  EXPECT_EQ(doc.consistency->avg_consistency_incl_hal, doc.consistency->avg_consistency_real);
}

TEST(BuildReport, FailedRecordsAreCountedButNotScored) {
  RunManifest run;
  GenerationRecord ok{"m", "P1", false, 0, "retry=3", "retry=3", "", std::nullopt, 1};
  GenerationRecord bad{"m", "P1", false, 1, "", "", "", std::string("timeout"), 3};
  run.records = {ok, bad};
  const auto report = build_report(run, corpus());
  ASSERT_EQ(report.size(), 1u);
  EXPECT_EQ(report[0].responses, 1);
  EXPECT_EQ(report[0].failed_iterations, 1);
  EXPECT_FALSE(report[0].consistency);
  EXPECT_FALSE(report[0].soundness);
  ASSERT_TRUE(report[0].correctness);
  EXPECT_EQ(report[0].correctness->avg_correct_real, Rational(1));
  const auto csv = emit(report, ReportFormat::csv);
  EXPECT_NE(csv.find("m,P1,false,1,1,,,,1.000000,0.000000,0,,,,,,"), std::string::npos) << csv;
}

TEST(BuildReport, UnknownPromptIsInputError) {
  RunManifest run;
  run.records.push_back({"m", "P7", false, 0, "", "", "", std::nullopt, 1});
  EXPECT_THROW(build_report(run, corpus()), InputError);
}

TEST(BuildReport, RecordHashIgnoresTimestamps) {
  auto later = fixed_clock();
  later.clock = [] { return std::chrono::system_clock::time_point{std::chrono::hours{1000}}; };
  const auto a = build_report(mock_run(MockProvider::Persona::good), corpus());
  const auto b = build_report(mock_run(MockProvider::Persona::good, later), corpus());
  EXPECT_EQ(a, b);
  const auto noeq = build_report(mock_run(MockProvider::Persona::noeq), corpus());
  EXPECT_NE(a[0].records_sha256, noeq[0].records_sha256);
}

TEST(ReportJson, RoundTrip) {
  for (auto persona : {MockProvider::Persona::good, MockProvider::Persona::noeq, MockProvider::Persona::headers}) {
    const auto report = build_report(mock_run(persona), corpus());
    const auto text = emit(report, ReportFormat::json);
    EXPECT_EQ(report_from_json(text), report);
    EXPECT_EQ(emit(report_from_json(text), ReportFormat::json), text);
  }
  EXPECT_THROW(report_from_json("{"), InputError);
  EXPECT_THROW(report_from_json(R"([{"model":"m"}])"), InputError);
}

TEST(ReportJson, RationalsCarryExactParts) {
  const auto j = rational_json(Rational(29, 30));
  EXPECT_EQ(j["decimal"], "0.966667");
  EXPECT_EQ(j["num"], 29);
  EXPECT_EQ(j["den"], 30);
  EXPECT_EQ(rational_from_json(nlohmann::json::parse(j.dump())), Rational(29, 30));
}

TEST(ReportCsv, HeaderAndColumnCount) {
  const auto csv = emit(build_report(mock_run(MockProvider::Persona::good), corpus()), ReportFormat::csv);
  const auto lines = split_lines(csv);
  ASSERT_EQ(lines.size(), 5u);
  EXPECT_EQ(lines[0], kCsvHeader);
  for (const auto& l : lines) EXPECT_EQ(std::count(l.begin(), l.end(), ','), 16) << l;
  EXPECT_EQ(lines[1].rfind("mock-good,P1,false,5,0,0.050000,0.952381,0.980000,0.990000,0.400000,0,false,false,false,true,false,", 0), 0u)
      << lines[1];
}

TEST(ReportCsv, QuotesAwkwardFields) {
  CellResult c;
  c.model = "a,\"b\"";
  c.prompt_id = "P1";
  const auto csv = emit({c}, ReportFormat::csv);
  EXPECT_NE(csv.find("\"a,\"\"b\"\"\",P1,"), std::string::npos);
}

TEST(ReportGolden, MockGoodRunMatchesCheckedInReport) {
  TempDir dir("golden");
  auto run = mock_run(MockProvider::Persona::good);
  write_run(dir.path(), run.records);
  const auto report = build_report(dir.path(), corpus());
  EXPECT_EQ(emit(report, ReportFormat::json), detail::read_file(testing::test_dir() / "golden" / "report.json"));
  EXPECT_EQ(emit(report, ReportFormat::csv), detail::read_file(testing::test_dir() / "golden" / "report.csv"));
}

}  // namespace
}  // namespace pwqc
