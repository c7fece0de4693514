#include <gtest/gtest.h>

#include <algorithm>

#include "rearrange/dataset.hpp"
#include "rearrange/expert.hpp"
#include "rearrange/generator.hpp"
#include "rearrange/protocol.hpp"

namespace rearrange {
namespace {

const DatasetFile& corpus() {
  static const DatasetFile ds = build_dataset({2, 4, 31});
  return ds;
}

std::vector<std::shared_ptr<const RearrangementEpisode>> episodes() {
  std::vector<std::shared_ptr<const RearrangementEpisode>> out;
  for (Split s : kSplits) {
    for (const auto& ep : corpus().splits.at(s)) out.push_back(ep);
  }
  return out;
}

std::vector<InstanceId> ids_of(const SceneState& s) { return s.instance_ids(); }

TEST(VisibilityProperty, MonotoneInRangeAndDeterministic) {
  Rng rng(4);
  for (const auto& ep : episodes()) {
    const auto cells = reachable_cells(*ep->room).cells();
    for (int i = 0; i < 10; ++i) {
      SceneState s = ep->s0;
      s.agent.cell = rng.pick(cells);
      s.agent.yaw = 90 * rng.uniform_int(0, 3);
      s.agent.pitch = 30 * rng.uniform_int(-1, 2);
      s.agent.standing = rng.bernoulli(0.5);
      ViewConfig wide;
      wide.range = 1.5;
      ViewConfig narrow = wide;
      narrow.range = rng.uniform(0.1, 1.5);
      const auto big = visible_objects(s, wide);
      const auto small = visible_objects(s, narrow);
      for (const auto& id : small) EXPECT_NE(std::find(big.begin(), big.end(), id), big.end()) << id;
      EXPECT_EQ(visible_objects(s, wide), big);
      const SceneState copy = s;
      EXPECT_EQ(visible_objects(copy, wide), big);
    }
  }
}

TEST(SceneProperty, BoxCentersInsideRoom) {
  for (const auto& ep : episodes()) {
    const Rect b = ep->room->bounds();
    for (const SceneState* s : {&ep->s0, &ep->s_star}) {
      for (const auto& [id, o] : s->objects) {
        const Vec3 c = o.box().center();
        EXPECT_TRUE(b.contains(c.x(), c.y())) << ep->episode_id << " " << id;
      }
    }
  }
}

TEST(EnergyProperty, NonIncreasingOnceOverlapping) {
  Rng rng(6);
  const ObjectClass& book = shipped_catalog().at("Book");
  for (int p = 0; p < 200; ++p) {
    const double yaw = rng.uniform(0.0, 6.28);
    const Vec3 goal(2.0, 2.0, 0.8);
    const Vec3 dir = Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-0.2, 0.2)).normalized();
    const ObjectState target = ObjectState::make("Book_0", book, Pose::from_yaw(goal, yaw));
    double prev = 1.0;
    for (int k = 0; k <= 100; ++k) {
      const double t = 1.0 - k / 100.0;
      const ObjectState moving = ObjectState::make("Book_0", book, Pose::from_yaw(goal + 0.1 * t * dir, yaw));
      if (iou(moving.box(), target.box()) == 0.0) continue;
      const double e = energy(moving, target);
      EXPECT_LE(e, prev + 1e-12) << "pair " << p << " step " << k;
      EXPECT_LE(e, 0.25);
      prev = e;
    }
  }
}

TEST(EnergyProperty, AxisAlignedApproachIsMonotone) {
  const ObjectClass& mug = shipped_catalog().at("Mug");
  for (const Vec3& dir : {Vec3(1, 0, 0), Vec3(0, -1, 0), Vec3(0, 0, 1)}) {
    const ObjectState target = ObjectState::make("Mug_0", mug, Pose::from_yaw(Vec3(2, 2, 1), 0.0));
    double prev = 2.0;
    for (int k = 0; k <= 200; ++k) {
      const double t = 3.0 * (1.0 - k / 200.0);
      const double e = energy(ObjectState::make("Mug_0", mug, Pose::from_yaw(Vec3(2, 2, 1) + t * dir, 0.0)), target);
      EXPECT_LE(e, prev + 1e-12);
      prev = e;
    }
    EXPECT_EQ(prev, 0.0);
  }
}

struct Trace {
  std::vector<double> rewards;
  std::vector<std::string> observations;
  MetricsReport metrics;
};

class RandomTrajectoryTest : public ::testing::TestWithParam<EpisodeMode> {};

TEST_P(RandomTrajectoryTest, Invariants) {
  const auto all = all_actions(shipped_catalog());
  for (const auto& ep : episodes()) {
    for (std::uint64_t seed : {1u, 2u}) {
      Rng rng(seed);
      std::vector<Action> plan;
      for (int i = 0; i < 120; ++i) {
        // Bias toward interactions so each run picks up and places something.
        const int roll = rng.uniform_int(0, 9);
        if (roll < 6) plan.push_back(all[static_cast<std::size_t>(rng.uniform_int(0, 9))]);
        else if (roll < 8) plan.push_back(rng.pick(all));
        else plan.push_back({ActionKind::kPlaceObject, {}});
      }
      plan.push_back(Action::done());
      plan.push_back(Action::done());

      auto play = [&](Trace& trace) {
        EpisodeRuntime rt;
        rt.reset(ep, GetParam());
        const auto ids0 = ids_of(rt.live_scene());
        const std::optional<SceneState> twin = rt.walkthrough_twin();
        double unshuffle_total = 0.0;
        bool counted = GetParam() == EpisodeMode::kOnePhase;
        double e_start = scene_energy(ep->s0, ep->s_star);
        for (const Action& a : plan) {
          if (rt.done()) break;
          const Stage stage = rt.stage();
          const StepResult r = rt.step(a);
          trace.rewards.push_back(r.reward);
          trace.observations.push_back(to_json(r.observation).dump());
          if (stage == Stage::kUnshuffle && counted) unshuffle_total += r.reward;
          if (r.info.stage_changed) counted = true;
          EXPECT_EQ(ids_of(rt.live_scene()), ids0);
          EXPECT_TRUE(rt.reachable().contains(rt.live_scene().agent.cell));
          if (twin) EXPECT_TRUE(rt.walkthrough_twin()->objects == twin->objects);
        }
        ASSERT_TRUE(rt.done());
        trace.metrics = *rt.metrics();
        EXPECT_NEAR(unshuffle_total, e_start - 2.0 * scene_energy(rt.live_scene(), ep->s_star), 1e-9)
            << ep->episode_id;
      };
      Trace a, b;
      play(a);
      play(b);
      EXPECT_EQ(a.rewards, b.rewards);
      EXPECT_EQ(a.observations, b.observations);
      EXPECT_EQ(a.metrics, b.metrics);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(BothModes, RandomTrajectoryTest,
                         ::testing::Values(EpisodeMode::kTwoPhase, EpisodeMode::kOnePhase),
                         [](const auto& info) { return info.param == EpisodeMode::kTwoPhase ? "TwoPhase" : "OnePhase"; });

TEST(GeneratorProperty, MovesAreSpreadOut) {
  const DatasetFile ds = build_dataset({5, 50, 8});
  int moves = 0, far = 0, checked = 0;
  for (Split s : kSplits) {
    for (const auto& ep : ds.splits.at(s)) {
      if (checked++ >= 1000) break;
      for (const auto& id : ep->moved_sample) {
        const Vec3 d = ep->s0.objects.at(id).pose().position - ep->s_star.objects.at(id).pose().position;
        ++moves;
        far += std::abs(d.x()) + std::abs(d.y()) > 0.5;
      }
    }
  }
  ASSERT_GT(moves, 1000);
  EXPECT_GE(static_cast<double>(far) / moves, 0.9);
}

TEST(ExpertProperty, NoSelfEvidentlyWastedActions) {
  for (const auto& ep : episodes()) {
    for (EpisodeMode mode : {EpisodeMode::kTwoPhase, EpisodeMode::kOnePhase}) {
      EpisodeRuntime rt;
      ExpertState st;
      rt.reset(ep, mode);
      while (!rt.done()) {
        const Action a = expert_action(rt, st);
        if (rt.stage() == Stage::kUnshuffle) {
          const SceneState& s = rt.live_scene();
          if (a.kind == ActionKind::kPickup) EXPECT_FALSE(s.held.has_value()) << ep->episode_id;
          if (a.kind == ActionKind::kPlaceObject) EXPECT_TRUE(s.held.has_value()) << ep->episode_id;
          if (a.kind == ActionKind::kOpen) {
            const ObjectState* opened = nullptr;
            for (const auto& id : visible_objects(s, rt.config().view)) {
              const ObjectState& o = s.objects.at(id);
              if (o.cls->name == a.target && o.openness && o.openness != ep->s_star.objects.at(id).openness) {
                opened = &o;
                break;
              }
            }
            ASSERT_NE(opened, nullptr) << ep->episode_id << " Open with nothing to open";
            EXPECT_FALSE(poses_approx_equal(*opened, ep->s_star.objects.at(opened->instance_id)));
          }
        }
        rt.step(a);
      }
      EXPECT_LT(rt.unshuffle_steps(), rt.config().unshuffle_cap) << ep->episode_id;
      EXPECT_LT(rt.walkthrough_steps(), rt.config().walkthrough_cap + 1);
      for (const auto& id : rt.touched_set()) {
        const bool sampled = std::count(ep->moved_sample.begin(), ep->moved_sample.end(), id) +
                             std::count(ep->opened_sample.begin(), ep->opened_sample.end(), id);
        EXPECT_TRUE(sampled) << ep->episode_id << " touched in-place " << id;
      }
    }
  }
}

}  // namespace
}  // namespace rearrange
