#include "costeval/manifest.hpp"

#include <gtest/gtest.h>

#include "costeval/errors.hpp"
#include "oracles.hpp"

namespace costeval {
namespace {

constexpr Generality kGeneralities[] = {Generality::distribution_specific,
                                        Generality::task_specific, Generality::domain_general,
                                        Generality::fully_general};
constexpr Holdout kHoldouts[] = {Holdout::none, Holdout::in_distribution_samples,
                                 Holdout::out_of_distribution_samples, Holdout::tasks,
                                 Holdout::domains};

char letter(LintVerdict v) {
  switch (v) {
    case LintVerdict::pass: return 'P';
    case LintVerdict::warn: return 'W';
    case LintVerdict::fail: return 'F';
  }
  return '?';
}

TEST(HoldoutLint, GridWithoutIntent) {
  for (int g = 0; g < 4; ++g) {
    for (int h = 0; h < 5; ++h) {
      EXPECT_EQ(letter(lint(kGeneralities[g], kHoldouts[h], false).verdict),
                oracle::kLintGrid[g][h])
          << to_string(kGeneralities[g]) << " / " << to_string(kHoldouts[h]);
    }
  }
}

TEST(HoldoutLint, IntentDowngradesFailuresToWarnings) {
  for (int g = 0; g < 4; ++g) {
    for (int h = 0; h < 5; ++h) {
      const char want = oracle::kLintGrid[g][h] == 'F' ? 'W' : 'P';
      EXPECT_EQ(letter(lint(kGeneralities[g], kHoldouts[h], true).verdict), want);
    }
  }
}

TEST(HoldoutLint, MessageNamesRequiredHoldout) {
  const auto r = lint(Generality::domain_general, Holdout::in_distribution_samples, false);
  EXPECT_EQ(r.required, Holdout::tasks);
  EXPECT_NE(r.message.find("tasks"), std::string::npos);
  const auto t = lint(Generality::task_specific, Holdout::none, false);
  EXPECT_NE(t.message.find("out-of-distribution samples"), std::string::npos);
  const auto j = to_json(r);
  EXPECT_EQ(j["verdict"], "FAIL");
  EXPECT_EQ(j["required"], "tasks");
}

TEST(Manifest, JsonRoundTripAndLint) {
  BenchmarkManifest m;
  m.benchmark_id = "b";
  m.tasks = {{"t1", 0.2, 10}, {"t2", 0.9, 20}};
  m.generality = Generality::task_specific;
  m.holdout = Holdout::none;
  m.intent_note = "split coming";
  const auto back = BenchmarkManifest::from_json(m.to_json());
  EXPECT_EQ(back.task_ids(), (std::vector<std::string>{"t1", "t2"}));
  EXPECT_EQ(back.intent_note, m.intent_note);
  EXPECT_EQ(back.tasks[1].difficulty, 0.9);
  EXPECT_EQ(lint_manifest(back).verdict, LintVerdict::warn);
  m.intent_note.reset();
  EXPECT_EQ(lint_manifest(m).verdict, LintVerdict::fail);
}

TEST(Manifest, Validation) {
  BenchmarkManifest m;
  m.benchmark_id = "b";
  EXPECT_THROW(m.validate(), ConfigError);
  m.tasks = {{"t", 0.1, 1}, {"t", 0.2, 1}};
  EXPECT_THROW(m.validate(), ConfigError);
  EXPECT_THROW(parse_generality("universal"), SchemaError);
  EXPECT_THROW(parse_holdout("some"), SchemaError);
  EXPECT_EQ(parse_holdout("out_of_distribution_samples"), Holdout::out_of_distribution_samples);
  EXPECT_EQ(describe(Holdout::none), "no holdout");
}

TEST(Manifest, ShippedFilesLoad) {
  const std::string dir = COSTEVAL_CONFIG_DIR;
  EXPECT_EQ(lint_manifest(BenchmarkManifest::load(dir + "/manifest.json")).verdict,
            LintVerdict::pass);
  EXPECT_EQ(lint_manifest(BenchmarkManifest::load(dir + "/manifest-no-holdout.json")).verdict,
            LintVerdict::fail);
  EXPECT_EQ(lint_manifest(BenchmarkManifest::load(dir + "/manifest-intent.json")).verdict,
            LintVerdict::warn);
}

}  // namespace
}  // namespace costeval
