#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "socinstruct/corpus.hpp"
#include "socinstruct/fixtures.hpp"
#include "socinstruct/text.hpp"
#include "test_util.hpp"

using namespace socinstruct;
using testutil::TempDir;

namespace {

RawRecord text_record(const std::string& task, const std::string& text,
                      std::optional<std::string> label, std::optional<double> score = {}) {
  RawRecord r;
  r.task_id = task;
  r.split = Split::train;
  r.fields["text"] = text;
  r.label = std::move(label);
  r.score = score;
  return r;
}

std::vector<InstructionInstance> numbered(std::size_t n, const std::string& task = "offensive") {
  std::vector<InstructionInstance> out;
  for (std::size_t i = 0; i < n; ++i) {
    InstructionInstance inst;
    inst.task_id = task;
    inst.gold = i % 3 == 0 ? "offensive" : "not offensive";
    inst.input = "x" + std::to_string(i);
    inst.source_index = static_cast<std::int64_t>(i);
    out.push_back(inst);
  }
  return out;
}

// Compiles 1%-scale fixtures for a few tasks into dir/corpus.
void compile_small(const TempDir& dir, std::vector<std::string> tasks) {
  FixtureOptions fo;
  fo.tasks = tasks;
  generate_fixtures(dir / "raw", fo);
  compile_corpus(discover_raw_sources(dir / "raw", tasks), dir / "corpus", CompileOptions{});
}

void rewrite_line(const std::filesystem::path& file, std::size_t line_no,
                  const std::function<void(nlohmann::ordered_json&)>& edit) {
  std::istringstream in(testutil::slurp(file));
  std::string line;
  std::string out;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    if (n++ == line_no) {
      auto j = nlohmann::ordered_json::parse(line);
      edit(j);
      line = j.dump();
    }
    out += line + "\n";
  }
  testutil::spit(file, out);
}

}  // namespace

TEST(Text, RenderTemplateSinglePass) {
  EXPECT_EQ(render_template("{a} [SEP] {b}", {{"a", "x {b}"}, {"b", "y"}}), "x {b} [SEP] y");
  EXPECT_THROW(render_template("{a} [SEP] {b}", {{"a", "x"}}), MissingField);
  try {
    render_template("{text}", {});
  } catch (const MissingField& e) {
    EXPECT_EQ(e.name(), "text");
  }
  EXPECT_EQ(template_placeholders("Premise: {premise}\n\nHypothesis: {hypothesis}"),
            (std::vector<std::string>{"premise", "hypothesis"}));
}

TEST(Binarize, Examples) {
  const auto& humour = *get_task("humour_rating").reframing;
  const auto& valence = *get_task("valence_cls").reframing;
  EXPECT_EQ(binarize_score(humour, 3.4), "high humor");
  EXPECT_EQ(binarize_score(valence, 2.0), "Low Valence");
  EXPECT_EQ(binarize_score(valence, 4.0), "Low Valence");
}

TEST(Binarize, BoundaryScores) {
  const std::vector<double> scores{2.999, 3.0, 3.001, 3.999, 4.0, 4.001};
  const std::vector<std::string> humour{"low humor", "low humor", "high humor",
                                        "high humor", "high humor", "high humor"};
  const std::vector<std::string> arousal{"Low Arousal", "Low Arousal", "Low Arousal",
                                         "Low Arousal", "Low Arousal", "High Arousal"};
  for (std::size_t i = 0; i < scores.size(); ++i) {
    EXPECT_EQ(binarize_score(*get_task("humour_rating").reframing, scores[i]), humour[i])
        << scores[i];
    EXPECT_EQ(binarize_score(*get_task("arousal_cls").reframing, scores[i]), arousal[i])
        << scores[i];
  }
}

TEST(Binarize, RandomScoresPartitionTheLine) {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> dist(-2.0, 9.0);
  for (const char* slug : {"humour_rating", "valence_cls", "arousal_cls", "dominance_cls"}) {
    const auto& rule = *get_task(slug).reframing;
    for (int i = 0; i < 10000; ++i) {
      double s = dist(gen);
      if (i % 50 == 0) s = rule.threshold;
      const auto label = binarize_score(rule, s);
      const std::string expected = s > rule.threshold ? rule.above_label : rule.below_label;
      ASSERT_EQ(label, expected) << slug << " " << s;
    }
  }
}

TEST(Binarize, NonFiniteThrows) {
  const auto& rule = *get_task("valence_cls").reframing;
  EXPECT_THROW(binarize_score(rule, std::nan("")), InvalidScore);
  EXPECT_THROW(binarize_score(rule, std::numeric_limits<double>::infinity()), InvalidScore);
}

TEST(Reframe, HumorExample) {
  const auto inst = reframe_record(
      get_task("humor"), text_record("humor", "TENNESSEE: We're the best state", "humorous"), 0);
  EXPECT_EQ(inst.gold, "humorous");
  EXPECT_EQ(inst.input, "TENNESSEE: We're the best state");
  EXPECT_EQ(inst.instruction, get_task("humor").instruction_text);
}

TEST(Reframe, PairAndPremiseTemplates) {
  RawRecord pair;
  pair.task_id = "same_side_stance";
  pair.fields = {{"a", "first claim."}, {"b", "second claim"}};
  pair.label = "same side";
  EXPECT_EQ(reframe_record(get_task("same_side_stance"), pair, 3).input,
            "first claim. [SEP] second claim");

  RawRecord flute;
  flute.task_id = "flute";
  flute.fields = {{"premise", "P"}, {"hypothesis", "H"}};
  flute.label = "sarcasm";
  const auto inst = reframe_record(get_task("flute"), flute, 1);
  EXPECT_EQ(inst.input, "Premise: P\n\nHypothesis: H");
  EXPECT_EQ(inst.gold, "Sarcasm");
}

TEST(Reframe, Errors) {
  RawRecord missing;
  missing.task_id = "same_side_stance";
  missing.fields = {{"a", "only one"}};
  missing.label = "same side";
  EXPECT_THROW(reframe_record(get_task("same_side_stance"), missing, 0), MissingField);
  EXPECT_THROW(reframe_record(get_task("emotion"), text_record("emotion", "t", "Happy"), 0),
               UnknownLabel);
  EXPECT_THROW(reframe_record(get_task("valence_cls"), text_record("valence_cls", "t", {}), 0),
               InvalidScore);
  EXPECT_EQ(reframe_record(get_task("valence_cls"),
                           text_record("valence_cls", "t", {}, 4.5), 0).gold,
            "High Valence");
}

TEST(Cap, ShrinksToCapDeterministically) {
  const auto in = numbered(9000);
  const auto a = cap_task(in, 8000, 7);
  const auto b = cap_task(in, 8000, 7);
  ASSERT_EQ(a.size(), 8000u);
  EXPECT_EQ(a, b);
  std::set<std::int64_t> seen;
  for (std::size_t i = 0; i < a.size(); ++i) {
    seen.insert(a[i].source_index);
    if (i) EXPECT_LT(a[i - 1].source_index, a[i].source_index);
  }
  EXPECT_EQ(seen.size(), 8000u);
  EXPECT_NE(cap_task(in, 8000, 8), a);
}

TEST(Cap, SmallInputUnchanged) {
  auto in = numbered(140, "same_side_stance");
  std::reverse(in.begin(), in.end());
  EXPECT_EQ(cap_task(in, 8000, 7), in);
}

TEST(Cap, StratifiedKeepsProportions) {
  const auto in = numbered(900);  // 300 offensive, 600 not
  const auto out = cap_task(in, 300, 1, CapOptions{true});
  ASSERT_EQ(out.size(), 300u);
  const auto off = std::count_if(out.begin(), out.end(),
                                 [](const auto& i) { return i.gold == "offensive"; });
  EXPECT_EQ(off, 100);
}

TEST(Cap, UniformDrawIsRoughlyUniform) {
  // Each of 100 items should survive a 50-of-100 cap about half the time.
  std::vector<int> kept(100, 0);
  const auto in = numbered(100);
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    for (const auto& i : cap_task(in, 50, seed)) ++kept[static_cast<std::size_t>(i.source_index)];
  }
  for (int k : kept) {
    EXPECT_GT(k, 850);
    EXPECT_LT(k, 1150);
  }
}

TEST(Compile, DeterministicAndRoundTrips) {
  TempDir a("compile_a");
  TempDir b("compile_b");
  const std::vector<std::string> tasks{"humor", "same_side_stance", "valence_cls", "flute"};
  compile_small(a, tasks);
  compile_small(b, tasks);
  for (const auto& entry : std::filesystem::directory_iterator(a / "corpus")) {
    const auto name = entry.path().filename();
    EXPECT_EQ(testutil::slurp(entry.path()), testutil::slurp(b / "corpus" / name.string()))
        << name;
    if (name.string().ends_with(".jsonl")) {
      const auto insts = read_instances(entry.path());
      TempDir c("rt");
      write_instances(c / "x.jsonl", insts);
      EXPECT_EQ(read_instances(c / "x.jsonl"), insts);
      EXPECT_EQ(testutil::slurp(c / "x.jsonl"), testutil::slurp(entry.path()));
    }
  }
}

TEST(Compile, CapAppliesToTrainOfCappedTasksOnly) {
  TempDir dir("compile_cap");
  std::string offensive;
  std::string humor;
  for (int i = 0; i < 8100; ++i) {
    offensive += to_json(text_record("offensive", "t" + std::to_string(i),
                                     i % 2 ? "offensive" : "not offensive")).dump() + "\n";
    humor += to_json(text_record("humor", "h" + std::to_string(i), "humorous")).dump() + "\n";
  }
  testutil::spit(dir / "offensive.train.raw.jsonl", offensive);
  testutil::spit(dir / "humor.train.raw.jsonl", humor);
  const auto res = compile_corpus(discover_raw_sources(dir.path(), {"offensive", "humor"}),
                                  dir / "out", CompileOptions{5});
  EXPECT_EQ(res.stats.tasks.at("offensive").counts.at(Split::train), 8000);
  EXPECT_EQ(res.stats.tasks.at("humor").counts.at(Split::train), 8100);
  EXPECT_EQ(res.stats.total_train, 16100);
}

TEST(Compile, EmptyInputWritesNothing) {
  TempDir dir("compile_empty");
  const auto res = compile_corpus({}, dir / "out", CompileOptions{});
  EXPECT_EQ(res.stats.total_train, 0);
  EXPECT_TRUE(res.stats.tasks.empty());
  EXPECT_FALSE(std::filesystem::exists(dir / "out") &&
               !std::filesystem::is_empty(dir / "out"));
}

TEST(Compile, ErrorBudget) {
  TempDir dir("compile_budget");
  std::string data = to_json(text_record("emotion", "fine", "joy")).dump() + "\n";
  data += "{not json\n";
  data += to_json(text_record("emotion", "bad", "Happy")).dump() + "\n";
  testutil::spit(dir / "emotion.train.raw.jsonl", data);
  const auto sources = discover_raw_sources(dir.path(), {"emotion"});

  try {
    compile_corpus(sources, dir / "out", CompileOptions{});
    FAIL() << "expected CompileError";
  } catch (const CompileError& e) {
    EXPECT_EQ(e.errors().size(), 2u);
    EXPECT_EQ(e.errors()[0].line, 2);
    EXPECT_EQ(e.errors()[1].line, 3);
  }
  EXPECT_FALSE(std::filesystem::exists(dir / "out" / "emotion.train.jsonl"));

  CompileOptions lenient;
  lenient.max_errors = 2;
  const auto res = compile_corpus(sources, dir / "out", lenient);
  EXPECT_EQ(res.errors.size(), 2u);
  EXPECT_EQ(res.stats.tasks.at("emotion").counts.at(Split::train), 1);
}

TEST(Validate, FreshCorpusIsClean) {
  TempDir dir("val_clean");
  compile_small(dir, {"emotion", "intimacy", "agree_disagree"});
  ValidateOptions opts;
  opts.templates_dir = SOCINSTRUCT_TEMPLATES_DIR;
  const auto report = validate_corpus(dir / "corpus", opts);
  EXPECT_TRUE(report.ok()) << (report.violations.empty() ? "" : report.violations[0].message);
  EXPECT_GT(report.instances_checked, 0u);
}

TEST(Validate, MutatedGoldGivesOneUnknownLabel) {
  TempDir dir("val_gold");
  compile_small(dir, {"emotion"});
  rewrite_line(dir / "corpus" / "emotion.test.jsonl", 4, [](auto& j) { j["gold"] = "Happy"; });
  const auto report = validate_corpus(dir / "corpus");
  EXPECT_EQ(report.violations.size(), 1u);
  EXPECT_EQ(report.count(ViolationKind::unknown_label), 1u);
  EXPECT_EQ(report.violations[0].line, 5);
}

TEST(Validate, TemplateWhitespaceChangeIsNamed) {
  TempDir dir("val_tpl");
  compile_small(dir, {"emotion", "humor"});
  rewrite_line(dir / "corpus" / "humor.validation.jsonl", 0, [](auto& j) {
    j["instruction"] = j["instruction"].template get<std::string>() + " ";
  });
  const auto report = validate_corpus(dir / "corpus");
  ASSERT_EQ(report.count(ViolationKind::template_mismatch), 1u);
  for (const auto& v : report.violations) {
    if (v.kind == ViolationKind::template_mismatch) EXPECT_EQ(v.task_id, "humor");
  }
}

TEST(Validate, MalformedLineIsReportedNotThrown) {
  TempDir dir("val_bad");
  compile_small(dir, {"irony"});
  const auto f = dir / "corpus" / "irony.test.jsonl";
  testutil::spit(f, testutil::slurp(f) + "{oops\n");
  const auto report = validate_corpus(dir / "corpus");
  EXPECT_EQ(report.count(ViolationKind::malformed_line), 1u);
}

TEST(Validate, UnresolvedPlaceholderAndStatsMismatch) {
  TempDir dir("val_misc");
  compile_small(dir, {"irony"});
  rewrite_line(dir / "corpus" / "irony.test.jsonl", 0, [](auto& j) { j["input"] = "{text}"; });
  auto report = validate_corpus(dir / "corpus");
  EXPECT_EQ(report.count(ViolationKind::unresolved_placeholder), 1u);

  const auto f = dir / "corpus" / "irony.test.jsonl";
  std::string data = testutil::slurp(f);
  data.erase(data.rfind('\n', data.size() - 2) + 1);  // drop the last line
  testutil::spit(f, data);
  report = validate_corpus(dir / "corpus");
  EXPECT_GE(report.count(ViolationKind::stats_mismatch), 1u);
}

TEST(Validate, GoldenTemplateMutationDetected) {
  TempDir dir("golden");
  for (const auto& entry : std::filesystem::directory_iterator(SOCINSTRUCT_TEMPLATES_DIR)) {
    std::filesystem::copy_file(entry.path(), dir / entry.path().filename().string());
  }
  EXPECT_TRUE(check_golden_templates(dir.path()).ok());
  const auto f = dir / "sexist.txt";
  auto text = testutil::slurp(f);
  text[text.size() / 2] = text[text.size() / 2] == 'x' ? 'y' : 'x';
  testutil::spit(f, text);
  const auto report = check_golden_templates(dir.path());
  ASSERT_EQ(report.violations.size(), 1u);
  EXPECT_EQ(report.violations[0].task_id, "sexist");
}

TEST(Validate, TieRuleNotesMentionEveryThresholdTask) {
  const auto notes = tie_rule_notes(Registry::builtin());
  EXPECT_EQ(notes.size(), 4u);
}

TEST(Reconcile, SexistFamilyDiscrepancyReported) {
  CorpusStats stats;
  for (const char* id : {"sexist", "intent_to_offend", "biased_implication", "offensive"}) {
    stats.tasks[id].counts[Split::train] = 8000;
  }
  const auto notes = reconcile_with_registry(stats, Registry::builtin());
  std::size_t below_cap = 0;
  for (const auto& n : notes) {
    if (n.find("7999") != std::string::npos && n.find("cap") != std::string::npos) ++below_cap;
  }
  EXPECT_EQ(below_cap, 3u);
}
