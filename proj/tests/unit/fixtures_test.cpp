#include <gtest/gtest.h>

#include <cmath>

#include "socinstruct/corpus.hpp"
#include "socinstruct/fixtures.hpp"
#include "test_util.hpp"

using namespace socinstruct;
using testutil::TempDir;

namespace {

std::vector<RawRecord> read_raw(const std::filesystem::path& p) {
  std::vector<RawRecord> out;
  std::istringstream in(testutil::slurp(p));
  for (std::string line; std::getline(in, line);) {
    out.push_back(raw_record_from_json(nlohmann::json::parse(line)));
  }
  return out;
}

}  // namespace

TEST(Fixtures, DeterministicForSeed) {
  TempDir a("fx_a");
  TempDir b("fx_b");
  TempDir c("fx_c");
  FixtureOptions fo;
  fo.tasks = {"humor", "valence_cls", "same_side_stance"};
  const auto ma = generate_fixtures(a.path(), fo);
  const auto mb = generate_fixtures(b.path(), fo);
  EXPECT_EQ(ma, mb);
  for (const auto& entry : std::filesystem::directory_iterator(a.path())) {
    EXPECT_EQ(testutil::slurp(entry.path()),
              testutil::slurp(b / entry.path().filename().string()));
  }
  fo.seed = 43;
  generate_fixtures(c.path(), fo);
  EXPECT_NE(testutil::slurp(a / "humor.train.raw.jsonl"),
            testutil::slurp(c / "humor.train.raw.jsonl"));
}

TEST(Fixtures, CountsFollowScaleWithFloor) {
  TempDir dir("fx_counts");
  FixtureOptions fo;
  fo.tasks = {"sentiment", "same_side_stance", "irony"};
  const auto m = generate_fixtures(dir.path(), fo);
  EXPECT_EQ(m.tasks.at("sentiment").counts.at(Split::test), 123);  // ceil(122.84)
  EXPECT_EQ(m.tasks.at("sentiment").counts.at(Split::train), 80);
  EXPECT_EQ(m.tasks.at("same_side_stance").counts.at(Split::train), 20);
  EXPECT_EQ(m.tasks.at("irony").counts.size(), 1u);
  EXPECT_EQ(read_raw(dir / "sentiment.test.raw.jsonl").size(), 123u);
}

TEST(Fixtures, ThresholdTaskHitsTheThresholdExactly) {
  TempDir dir("fx_tie");
  FixtureOptions fo;
  fo.tasks = {"humour_rating", "dominance_cls"};
  generate_fixtures(dir.path(), fo);
  for (const char* id : {"humour_rating", "dominance_cls"}) {
    const auto& task = get_task(id);
    bool tie = false;
    for (const auto& r : read_raw(dir / (std::string(id) + ".train.raw.jsonl"))) {
      ASSERT_TRUE(r.score);
      if (*r.score == task.reframing->threshold) {
        tie = true;
        EXPECT_EQ(reframe_record(task, r, 0).gold, task.reframing->tie_label);
      }
    }
    EXPECT_TRUE(tie) << id;
  }
}

TEST(Fixtures, EveryLabelAppearsInEverySplit) {
  TempDir dir("fx_labels");
  const auto m = generate_fixtures(dir.path());
  ASSERT_EQ(m.tasks.size(), 26u);
  for (const auto& [id, ft] : m.tasks) {
    for (const auto& [split, hist] : ft.label_frequencies) {
      EXPECT_EQ(hist.size(), get_task(id).label_set.size()) << id << " " << to_string(split);
    }
  }
}

TEST(Fixtures, ManifestMatchesCompiledCorpus) {
  TempDir dir("fx_compile");
  FixtureOptions fo;
  fo.scale = 0.002;
  fo.capped_surplus = 0.5;
  fo.tasks = {"offensive", "subjective_bias", "humor", "valence_cls", "complaints"};
  const auto m = generate_fixtures(dir / "raw", fo);
  EXPECT_EQ(read_fixture_manifest(dir / "raw" / "manifest.json"), m);
  const auto res =
      compile_corpus(discover_raw_sources(dir / "raw", fo.tasks), dir / "corpus", {});
  for (const auto& [id, ft] : m.tasks) {
    EXPECT_EQ(res.stats.tasks.at(id).counts, ft.compiled_counts) << id;
    EXPECT_EQ(res.stats.tasks.at(id).label_histogram.at(Split::test),
              ft.label_frequencies.at(Split::test))
        << id;
  }
  EXPECT_EQ(res.stats.total_train, m.compiled_train_total());
}

TEST(Fixtures, FullShapeCompilesToPublishedTrainTotal) {
  TempDir dir("fx_full");
  const auto opts = full_shape_options();
  const auto m = generate_fixtures(dir / "raw", opts);
  EXPECT_EQ(m.compiled_train_total(), 107939);
  EXPECT_GT(m.tasks.at("offensive").counts.at(Split::train), 8000);
  const auto res = compile_corpus(discover_raw_sources(dir / "raw", Registry::builtin().slugs()),
                                  dir / "corpus", {});
  EXPECT_EQ(res.stats.total_train, 107939);
  for (const auto& t : list_tasks(TaskFilter{std::nullopt, Role::seen})) {
    const auto compiled = res.stats.tasks.at(t.task_id).counts.at(Split::train);
    EXPECT_EQ(compiled, t.expected_splits.at(Split::train)) << t.task_id;
    if (t.cap) EXPECT_LE(compiled, *t.cap);
  }
}
