#include <gtest/gtest.h>

#include "pwqc/corpus.hpp"
#include "pwqc/semantics.hpp"
#include "test_support.hpp"

namespace pwqc {
namespace {

using testing::TempDir;

void make_entry(const TempDir& root, const std::string& id, const std::string& benchmark) {
  std::filesystem::create_directories(root / id);
  detail::write_file(root / id / "prompt.txt", "Passwords need 9 characters.\n");
  detail::write_file(root / id / "benchmark.conf", benchmark);
}

TEST(BundledCorpus, HasBothPrompts) {
  const auto corpus = load_corpus(testing::corpus_dir());
  ASSERT_EQ(corpus.size(), 2u);
  EXPECT_EQ(corpus[0].prompt.id, "P1");
  EXPECT_EQ(corpus[1].prompt.id, "P2");
  for (const auto& e : corpus) {
    EXPECT_FALSE(e.prompt.policy_text.empty());
    ASSERT_TRUE(e.prompt.doc_text.has_value());
    EXPECT_NE(e.prompt.doc_text->find("minlen"), std::string::npos);
    EXPECT_FALSE(e.notes.empty());
    EXPECT_TRUE(e.benchmark.diagnostics.empty());
  }
  EXPECT_NE(find_entry(corpus, "P2"), nullptr);
  EXPECT_EQ(find_entry(corpus, "P9"), nullptr);
}

TEST(BundledCorpus, P1DiffersFromDefaultsOnlyInRetry) {
  const auto corpus = load_corpus(testing::corpus_dir());
  const auto policy = effective_policy(corpus[0].benchmark);
  const auto defaults = load_defaults();
  std::vector<std::string> changed;
  for (const auto& [k, v] : policy.values)
    if (!(defaults.values.at(k) == v)) changed.push_back(k);
  EXPECT_EQ(changed, std::vector<std::string>{"retry"});
  EXPECT_EQ(policy.integer("retry"), 3);
  EXPECT_EQ(policy.integer("minlen"), 8);
  EXPECT_EQ(policy.integer("difok"), 1);
}

TEST(BundledCorpus, P2IsEquivalentToDefaults) {
  const auto corpus = load_corpus(testing::corpus_dir());
  EXPECT_TRUE(functionally_equivalent(corpus[1].benchmark, parse_config("", ParseMode::strict)));
  EXPECT_EQ(effective_policy(corpus[1].benchmark).integer("minlen"), 8);
}

TEST(BundledCorpus, BenchmarksSurviveReserialization) {
  for (const auto& e : load_corpus(testing::corpus_dir())) {
    const auto again = parse_config(serialize(e.benchmark), ParseMode::strict);
    EXPECT_EQ(again.assignments.size(), e.benchmark.assignments.size());
    EXPECT_TRUE(functionally_equivalent(again, e.benchmark));
    EXPECT_EQ(serialize(again), serialize(e.benchmark));
  }
}

TEST(LoadCorpus, EmptyDirectoryGivesEmptyCorpus) {
  TempDir root("corpus-empty");
  EXPECT_TRUE(load_corpus(root.path()).empty());
}

TEST(LoadCorpus, MissingDirectory) {
  EXPECT_THROW(load_corpus("/nonexistent/pwqc-corpus"), CorpusError);
}

TEST(LoadCorpus, EntriesAreSortedAndDocCanBeOverridden) {
  TempDir root("corpus-sort");
  make_entry(root, "b", "minlen=9\n");
  make_entry(root, "a", "");
  detail::write_file(root / "a" / "doc.txt", "custom docs\n");
  const auto corpus = load_corpus(root.path());
  ASSERT_EQ(corpus.size(), 2u);
  EXPECT_EQ(corpus[0].prompt.id, "a");
  EXPECT_EQ(*corpus[0].prompt.doc_text, "custom docs\n");
  EXPECT_EQ(corpus[1].prompt.id, "b");
  EXPECT_TRUE(corpus[1].notes.empty());
}

TEST(LoadCorpus, RejectsNonGoldBenchmarks) {
  for (const std::string bad : {"minlen 9\n", "[pwquality]\nminlen=9\n", "minlen=nine\n", "check_userpass=1\n"}) {
    TempDir root("corpus-bad");
    make_entry(root, "X", bad);
    EXPECT_THROW(load_corpus(root.path()), CorpusError) << bad;
  }
}

TEST(LoadCorpus, RejectsIncompleteEntries) {
  TempDir root("corpus-incomplete");
  std::filesystem::create_directories(root / "X");
  detail::write_file(root / "X" / "prompt.txt", "text");
  EXPECT_THROW(load_corpus(root.path()), CorpusError);
}

TEST(LoadCorpus, RejectsInvalidUtf8) {
  TempDir root("corpus-utf8");
  make_entry(root, "X", "minlen=8\n");
  detail::write_file(root / "X" / "benchmark.conf", "minlen=\xff\n");
  EXPECT_THROW(load_corpus(root.path()), CorpusError);
}

}  // namespace
}  // namespace pwqc
