#include <gtest/gtest.h>

#include <sstream>

#include "rearrange/protocol.hpp"
#include "support/fixtures.hpp"

namespace rearrange {
namespace {

std::shared_ptr<const DatasetFile> tiny_dataset() {
  static const auto ds = std::make_shared<const DatasetFile>(build_dataset({1, 2, 5}));
  return ds;
}

std::string first_episode() { return tiny_dataset()->splits.at(Split::kTrain).front()->episode_id; }

Json call(Session& s, const Json& req) { return Json::parse(s.handle(req.dump())); }

std::string error_of(Session& s, std::string_view line) {
  const Json r = Json::parse(s.handle(line));
  EXPECT_FALSE(r.at("ok").get<bool>()) << line;
  EXPECT_TRUE(r.at("message").is_string());
  return r.value("error", "");
}

TEST(ProtocolTest, ErrorCodes) {
  Session s(tiny_dataset(), {});
  EXPECT_EQ(error_of(s, "{not json"), "parse_error");
  EXPECT_EQ(error_of(s, "[1,2]"), "bad_request");
  EXPECT_EQ(error_of(s, R"({"cmd":7})"), "bad_request");
  EXPECT_EQ(error_of(s, R"({"cmd":"dance"})"), "bad_request");
  EXPECT_EQ(error_of(s, R"({"cmd":"reset"})"), "bad_request");
  EXPECT_EQ(error_of(s, R"({"cmd":"reset","episode":"nowhere__000"})"), "unknown_episode");
  EXPECT_EQ(error_of(s, R"({"cmd":"step","action":"MoveAhead"})"), "no_episode");
  EXPECT_EQ(error_of(s, R"({"cmd":"step","action":"fly"})"), "unknown_action");
  EXPECT_EQ(error_of(s, R"({"cmd":"step","action":"Pickup","arg":"Unicorn"})"), "unknown_action");
  EXPECT_EQ(error_of(s, R"({"cmd":"expert_action"})"), "forbidden");
  const Json reset = {{"cmd", "reset"}, {"episode", first_episode()}, {"mode", "three-phase"}};
  EXPECT_EQ(error_of(s, reset.dump()), "bad_request");
  EXPECT_FALSE(s.closed());
}

TEST(ProtocolTest, ResetStepDone) {
  Session s(tiny_dataset(), {});
  const Json r = call(s, {{"cmd", "reset"}, {"episode", first_episode()}});
  EXPECT_TRUE(r.at("ok").get<bool>());
  EXPECT_EQ(r.at("done"), false);
  EXPECT_EQ(r.at("observation").at("stage"), "walkthrough");
  const Json a = call(s, {{"cmd", "step"}, {"action", "RotateRight"}});
  EXPECT_TRUE(a.at("ok").get<bool>());
  EXPECT_FALSE(a.contains("metrics"));
  EXPECT_EQ(a.at("info").at("walkthrough_steps"), 1);
  const Json b = call(s, {{"cmd", "step"}, {"action", "Done"}});
  EXPECT_EQ(b.at("info").at("stage_changed"), true);
  EXPECT_EQ(b.at("done"), false);
  const Json c = call(s, {{"cmd", "step"}, {"action", "Done"}});
  EXPECT_EQ(c.at("done"), true);
  ASSERT_TRUE(c.contains("metrics"));
  EXPECT_EQ(c.at("metrics").at("success"), 0);
  EXPECT_NEAR(c.at("metrics").at("energy_remaining_prop").get<double>(), 1.0, 1e-12);
  EXPECT_EQ(error_of(s, R"({"cmd":"step","action":"Done"})"), "no_episode");
}

TEST(ProtocolTest, ModeOverride) {
  ProtocolOptions opts;
  opts.default_mode = EpisodeMode::kOnePhase;
  Session s(tiny_dataset(), opts);
  EXPECT_EQ(call(s, {{"cmd", "reset"}, {"episode", first_episode()}}).at("observation").at("stage"), "unshuffle");
  EXPECT_EQ(call(s, {{"cmd", "reset"}, {"episode", first_episode()}, {"mode", "two-phase"}})
                .at("observation")
                .at("stage"),
            "walkthrough");
}

TEST(ProtocolTest, ParseErrorKeepsEpisode) {
  Session s(tiny_dataset(), {});
  call(s, {{"cmd", "reset"}, {"episode", first_episode()}});
  EXPECT_EQ(error_of(s, "{\"cmd\":\"step\",\"action\""), "parse_error");
  EXPECT_EQ(error_of(s, R"({"cmd":"step","action":"jump"})"), "unknown_action");
  EXPECT_TRUE(call(s, {{"cmd", "step"}, {"action", "MoveAhead"}}).at("ok").get<bool>());
}

TEST(ProtocolTest, ActionList) {
  Session s(tiny_dataset(), {});
  const Json r = call(s, {{"cmd", "actions"}});
  ASSERT_EQ(r.at("actions").size(), 84u);
  EXPECT_EQ(r.at("actions").front(), all_actions(shipped_catalog()).front().name());
}

TEST(ProtocolTest, ExpertOverTheWireSolves) {
  ProtocolOptions opts;
  opts.allow_expert = true;
  Session s(tiny_dataset(), opts);
  EXPECT_EQ(error_of(s, R"({"cmd":"expert_action"})"), "no_episode");
  std::optional<SessionEpisode> ended;
  s.on_episode_end([&](const SessionEpisode& e) { ended = e; });
  call(s, {{"cmd", "reset"}, {"episode", first_episode()}});
  Json last;
  for (int i = 0; i < 2000; ++i) {
    const Json e = call(s, {{"cmd", "expert_action"}});
    ASSERT_TRUE(e.at("ok").get<bool>()) << e.dump();
    const Action a = parse_action(e.at("action").get<std::string>(), std::nullopt, shipped_catalog());
    Json step = {{"cmd", "step"}, {"action", e.at("action")}};
    last = call(s, step);
    ASSERT_TRUE(last.at("ok").get<bool>()) << a.name();
    if (last.at("done").get<bool>()) break;
  }
  ASSERT_TRUE(ended.has_value());
  EXPECT_EQ(last.at("metrics").at("success"), 1);
  EXPECT_EQ(ended->metrics.success, 1);
  EXPECT_EQ(ended->episode_id, first_episode());
  EXPECT_GT(ended->walkthrough_steps, 0);
}

TEST(ProtocolTest, ArgFormMatchesCombinedName) {
  Session a(tiny_dataset(), {{EpisodeMode::kOnePhase}});
  Session b(tiny_dataset(), {{EpisodeMode::kOnePhase}});
  call(a, {{"cmd", "reset"}, {"episode", first_episode()}});
  call(b, {{"cmd", "reset"}, {"episode", first_episode()}});
  const Json ra = call(a, {{"cmd", "step"}, {"action", "Pickup"}, {"arg", "Mug"}});
  const Json rb = call(b, {{"cmd", "step"}, {"action", "PickupMug"}});
  EXPECT_EQ(ra, rb);
}

TEST(ProtocolTest, StreamSkipsBlankLinesAndStopsAtClose) {
  Session s(tiny_dataset(), {});
  std::istringstream in("{\"cmd\":\"actions\"}\n\n   \r\n{bad\r\n{\"cmd\":\"close\"}\n{\"cmd\":\"actions\"}\n");
  std::ostringstream out;
  serve_stream(s, in, out);
  std::istringstream lines(out.str());
  std::vector<Json> replies;
  for (std::string l; std::getline(lines, l);) replies.push_back(Json::parse(l));
  ASSERT_EQ(replies.size(), 3u);
  EXPECT_EQ(replies[1].at("error"), "parse_error");
  EXPECT_EQ(replies[2], Json({{"ok", true}}));
  EXPECT_TRUE(s.closed());
}

TEST(ProtocolTest, DigestMatchesFold) {
  Session s(tiny_dataset(), {{EpisodeMode::kOnePhase}});
  std::uint64_t digest = 0;
  s.on_episode_end([&](const SessionEpisode& e) { digest = e.trajectory_digest; });
  call(s, {{"cmd", "reset"}, {"episode", first_episode()}});
  call(s, {{"cmd", "step"}, {"action", "Done"}});

  EpisodeRuntime rt;
  rt.reset(tiny_dataset()->find_episode(first_episode()), EpisodeMode::kOnePhase);
  const StepResult r = rt.step(Action::done());
  EXPECT_EQ(digest, fold_step(0xcbf29ce484222325ULL, r.info.action, r));
}

TEST(ProtocolFuzzTest, MalformedInputNeverThrows) {
  Session s(tiny_dataset(), {});
  Rng rng(99);
  const std::string alphabet = "{}[]\":,0123456789.eE-+ abcdtrufnls\\\x01\xff";
  const std::vector<std::string> seeds = {R"({"cmd":"reset","episode":")" + first_episode() + "\"}",
                                          R"({"cmd":"step","action":"MoveAhead"})",
                                          R"({"cmd":"step","action":"Pickup","arg":"Mug"})"};
  for (int i = 0; i < 3000; ++i) {
    std::string line = seeds[rng.uniform_int(0, 2)];
    const int edits = rng.uniform_int(0, 4);
    for (int k = 0; k < edits && !line.empty(); ++k) {
      const std::size_t pos = rng.uniform_int(0, static_cast<int>(line.size()) - 1);
      line[pos] = alphabet[rng.uniform_int(0, static_cast<int>(alphabet.size()) - 1)];
    }
    std::string reply;
    ASSERT_NO_THROW(reply = s.handle(line)) << line;
    const Json r = Json::parse(reply);
    ASSERT_TRUE(r.contains("ok"));
    if (!r.at("ok").get<bool>()) EXPECT_NE(r.at("error"), "internal") << line << " -> " << reply;
  }
}

}  // namespace
}  // namespace rearrange
