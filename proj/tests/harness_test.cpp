#include <gtest/gtest.h>

#include "rearrange/harness.hpp"

namespace rearrange {
namespace {

std::shared_ptr<const DatasetFile> dataset() {
  static const auto ds = std::make_shared<const DatasetFile>(build_dataset({2, 3, 17}));
  return ds;
}

std::vector<std::shared_ptr<const RearrangementEpisode>> train(int limit = 0) {
  return select_episodes(*dataset(), Split::kTrain, limit);
}

TEST(HarnessTest, SelectEpisodesLimitsPerRoom) {
  EXPECT_EQ(train().size(), 24u);
  const auto one = train(1);
  ASSERT_EQ(one.size(), 8u);
  for (const auto& ep : one) EXPECT_EQ(ep->episode_id.substr(ep->episode_id.size() - 3), "000");
  EXPECT_EQ(train(10).size(), 24u);
}

TEST(HarnessTest, AgentsByName) {
  EXPECT_EQ(make_agent("noop")->name(), "noop");
  EXPECT_EQ(make_agent("random")->name(), "random");
  EXPECT_EQ(make_agent("expert")->name(), "expert");
  EXPECT_THROW(make_agent("oracle"), std::invalid_argument);
}

TEST(HarnessTest, NoopBaseline) {
  auto agent = make_noop_agent();
  const auto rows = run_agent(train(1), *agent, {});
  for (const auto& r : rows) {
    EXPECT_FALSE(r.failed) << r.error;
    EXPECT_EQ(r.metrics.success, 0);
    EXPECT_DOUBLE_EQ(r.metrics.energy_remaining_prop, 1.0);
    EXPECT_EQ(r.metrics.num_changed, 0);
    EXPECT_EQ(r.walkthrough_steps, 1);
    EXPECT_EQ(r.unshuffle_steps, 1);
  }
  const Aggregate agg = aggregate(rows);
  EXPECT_EQ(agg.episodes, 8);
  EXPECT_DOUBLE_EQ(agg.energy_remaining_prop, 1.0);
  EXPECT_DOUBLE_EQ(agg.success, 0.0);
}

TEST(HarnessTest, RunsAreReproducible) {
  RunOptions opts;
  opts.policy_seed = 4;
  auto a = make_random_agent();
  auto b = make_random_agent();
  const auto ra = run_agent(train(1), *a, opts);
  const auto rb = run_agent(train(1), *b, opts);
  EXPECT_EQ(aggregate(ra).digest, aggregate(rb).digest);
  opts.policy_seed = 5;
  EXPECT_NE(aggregate(run_agent(train(1), *a, opts)).digest, aggregate(ra).digest);
}

TEST(HarnessTest, CsvRoundTripPreservesAggregate) {
  auto agent = make_expert_agent();
  RunOptions opts;
  opts.mode = EpisodeMode::kOnePhase;
  std::vector<ResultRow> rows = run_agent(train(1), *agent, opts);
  rows.front().failed = true;
  rows.front().error = "boom, with \"quotes\"\nand lines";
  const std::string text = to_csv(rows);
  const auto back = parse_csv(text);
  ASSERT_EQ(back.size(), rows.size());
  EXPECT_EQ(back.front().error, "boom  with  quotes  and lines");
  EXPECT_EQ(to_csv(back), text);
  const Aggregate a = aggregate(rows);
  const Aggregate b = aggregate(back);
  EXPECT_EQ(to_json(a), to_json(b));
  EXPECT_EQ(a.failed, 1);
  EXPECT_EQ(a.episodes, 7);
}

TEST(HarnessTest, AggregateIsTheMeanOfRows) {
  std::vector<ResultRow> rows(3);
  rows[0].metrics = {1, 1.0, 0.0, 2, 2, 0, 0};
  rows[1].metrics = {0, 0.5, 0.25, 4, 2, 1, 0};
  rows[2].failed = true;
  const Aggregate agg = aggregate(rows);
  EXPECT_EQ(agg.episodes, 2);
  EXPECT_EQ(agg.failed, 1);
  EXPECT_DOUBLE_EQ(agg.success, 0.5);
  EXPECT_DOUBLE_EQ(agg.fixed_strict, 0.75);
  EXPECT_DOUBLE_EQ(agg.energy_remaining_prop, 0.125);
  EXPECT_DOUBLE_EQ(agg.num_changed, 3.0);
  EXPECT_EQ(to_json(agg).at("digest").get<std::string>().size(), 16u);
  EXPECT_EQ(aggregate({}).episodes, 0);
}

TEST(HarnessTest, ParseCsvErrorsNameTheLine) {
  auto expect_line = [](const std::string& text, const std::string& prefix) {
    try {
      parse_csv(text);
      ADD_FAILURE() << "accepted";
    } catch (const std::runtime_error& e) {
      EXPECT_EQ(std::string(e.what()).rfind(prefix, 0), 0u) << e.what();
    }
  };
  expect_line("", "line 1");
  expect_line("a,b\n", "line 1");
  const std::string head = csv_header() + "\n";
  expect_line(head + "x,noop\n", "line 2");
  expect_line(head + "x,noop,two-phase,ok,z,0,0,0,0,0,0,0,0,0,0,0,0,\n", "line 2");
  expect_line(head + "\nx,noop,sideways,ok,0,0,0,0,0,0,0,0,0,0,0,0,0,\n", "line 3");
  EXPECT_TRUE(parse_csv(head).empty());
}

TEST(HarnessTest, ExternProcessMatchesInProcessNoop) {
  const auto eps = train(1);
  const std::string script =
      "for id in $(echo \"$REARRANGE_EPISODES\" | tr , ' '); do "
      "echo \"{\\\"cmd\\\":\\\"reset\\\",\\\"episode\\\":\\\"$id\\\",\\\"mode\\\":\\\"$REARRANGE_MODE\\\"}\"; read r; "
      "echo '{\"cmd\":\"step\",\"action\":\"Done\"}'; read r; "
      "echo '{\"cmd\":\"step\",\"action\":\"Done\"}'; read r; "
      "done";
  const auto rows = run_extern(dataset(), eps, script, {});
  auto noop = make_noop_agent();
  const auto ref = run_agent(eps, *noop, {});
  ASSERT_EQ(rows.size(), ref.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_FALSE(rows[i].failed) << rows[i].error;
    EXPECT_EQ(rows[i].episode_id, ref[i].episode_id);
    EXPECT_EQ(rows[i].agent, "extern");
    EXPECT_EQ(rows[i].trajectory_digest, ref[i].trajectory_digest);
    EXPECT_EQ(rows[i].metrics, ref[i].metrics);
  }
}

TEST(HarnessTest, ExternAgentThatQuitsLeavesFailedRows) {
  const auto eps = train(1);
  const auto rows = run_extern(dataset(), eps, "exit 3", {});
  ASSERT_EQ(rows.size(), eps.size());
  for (const auto& r : rows) {
    EXPECT_TRUE(r.failed);
    EXPECT_FALSE(r.error.empty());
  }
  EXPECT_EQ(aggregate(rows).failed, static_cast<int>(eps.size()));
}

}  // namespace
}  // namespace rearrange
