#include <gtest/gtest.h>

#include "rearrange/generator.hpp"
#include "rearrange/metrics.hpp"

namespace rearrange {
namespace {

std::shared_ptr<const RoomLayout> room_for(std::uint64_t seed, RoomCategory cat) {
  return std::make_shared<const RoomLayout>(generate_room(seed, cat, shipped_catalog(), "r"));
}

std::vector<const ObjectState*> others(const SceneState& s, const InstanceId& skip) {
  std::vector<const ObjectState*> out;
  for (const auto& [id, o] : s.objects) {
    if (id != skip) out.push_back(&o);
  }
  return out;
}

TEST(RoomGenTest, Deterministic) {
  for (RoomCategory cat : kRoomCategories) {
    EXPECT_EQ(generate_room(9, cat, shipped_catalog(), "a"), generate_room(9, cat, shipped_catalog(), "a"));
  }
  EXPECT_FALSE(generate_room(9, RoomCategory::kKitchen, shipped_catalog(), "a") ==
               generate_room(10, RoomCategory::kKitchen, shipped_catalog(), "a"));
}

TEST(RoomGenTest, CountsAndBounds) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const RoomCategory cat = kRoomCategories[seed % 4];
    const auto room = room_for(seed, cat);
    SCOPED_TRACE(std::string(to_string(cat)) + " seed " + std::to_string(seed));
    EXPECT_GE(room->width, kMinRoomCells);
    EXPECT_LE(room->width, kMaxRoomCells);
    EXPECT_GE(room->depth, kMinRoomCells);
    EXPECT_LE(room->depth, kMaxRoomCells);
    int pickupable = 0, openable = 0;
    for (const auto& o : room->objects) {
      pickupable += o.cls->pickupable;
      openable += o.cls->openness_tracked();
    }
    EXPECT_GE(pickupable, kMinPickupable);
    EXPECT_LE(pickupable, kMaxPickupable);
    EXPECT_GE(openable, kMinOpenable);
    EXPECT_LE(openable, kMaxOpenable);
    const Rect b = room->bounds();
    for (const auto& s : room->surfaces) {
      EXPECT_TRUE(b.contains(s.rect.x0, s.rect.y0) && b.contains(s.rect.x1, s.rect.y1)) << s.owner;
    }
    EXPECT_GT(reachable_cells(*room).size(), 20u);
    EXPECT_TRUE(std::is_sorted(room->objects.begin(), room->objects.end(),
                               [](const auto& a, const auto& b) { return a.instance_id < b.instance_id; }));
  }
}

TEST(RoomGenTest, EveryObjectIsViewable) {
  for (std::uint64_t seed = 100; seed < 108; ++seed) {
    RoomContext ctx(room_for(seed, kRoomCategories[seed % 4]));
    for (const auto& o : ctx.room().objects) {
      EXPECT_TRUE(ctx.viewable(o.box().center(), o.under_surface)) << o.instance_id;
    }
  }
}

TEST(RoomGenTest, HomePlacementsDoNotOverlap) {
  for (std::uint64_t seed = 200; seed < 212; ++seed) {
    const auto room = room_for(seed, kRoomCategories[seed % 4]);
    for (std::size_t i = 0; i < room->objects.size(); ++i) {
      for (std::size_t j = i + 1; j < room->objects.size(); ++j) {
        const auto& a = room->objects[i];
        const auto& b = room->objects[j];
        if (!a.cls->pickupable && !b.cls->pickupable) continue;
        EXPECT_LE(intersection_volume(a.box(), b.box()), kOverlapEpsilon) << a.instance_id << " " << b.instance_id;
      }
    }
  }
}

class EpisodeGenTest : public ::testing::TestWithParam<RoomCategory> {};

TEST_P(EpisodeGenTest, InvariantsHold) {
  const RoomContext ctx(room_for(31, GetParam()));
  for (std::uint64_t k = 0; k < 25; ++k) {
    const RearrangementEpisode ep = generate_rearrangement(ctx, derive_seed(5, {k}), "e");
    SCOPED_TRACE("episode " + std::to_string(k));
    EXPECT_NO_THROW(ep.validate());
    EXPECT_LE(ep.opened_sample.size(), 1u);
    const std::size_t total = ep.opened_sample.size() + ep.moved_sample.size();
    EXPECT_GE(total, 1u);
    EXPECT_LE(total, 5u);
    EXPECT_EQ(ep.s0.agent, ep.s_star.agent);
    EXPECT_TRUE(ctx.reachable().contains(ep.start_agent.cell));
    EXPECT_EQ(ep.start_agent.pitch, 0);
    EXPECT_TRUE(ep.start_agent.standing);
    const auto wrong = misplaced(ep.s0, ep.s_star);
    for (const auto& id : ep.moved_sample) EXPECT_TRUE(wrong.contains(id)) << id;
    for (const auto& id : ep.opened_sample) EXPECT_TRUE(wrong.contains(id)) << id;
    EXPECT_EQ(wrong.size(), total);
    for (const SceneState* s : {&ep.s0, &ep.s_star}) {
      for (const auto& [id, o] : s->objects) {
        EXPECT_FALSE(o.broken);
        if (o.cls->pickupable) {
          EXPECT_FALSE(overlaps_any(o.box(), others(*s, id))) << id;
          EXPECT_TRUE(ctx.viewable(o.box().center(), o.under_surface)) << id;
        }
        if (o.openness) {
          EXPECT_GE(*o.openness, 0.0);
          EXPECT_LE(*o.openness, 1.0);
        }
      }
    }
  }
}

TEST_P(EpisodeGenTest, Deterministic) {
  const auto room = room_for(44, GetParam());
  EXPECT_EQ(generate_rearrangement(room, 77, "x"), generate_rearrangement(room, 77, "x"));
  EXPECT_FALSE(generate_rearrangement(room, 77, "x") == generate_rearrangement(room, 78, "x"));
}

INSTANTIATE_TEST_SUITE_P(AllCategories, EpisodeGenTest,
                         ::testing::Values(RoomCategory::kKitchen, RoomCategory::kLivingRoom,
                                           RoomCategory::kBathroom, RoomCategory::kBedroom),
                         [](const auto& info) {
                           std::string n(to_string(info.param));
                           n.erase(std::remove(n.begin(), n.end(), '-'), n.end());
                           return n;
                         });

TEST(EpisodeGenErrorTest, RoomWithoutPickupablesFails) {
  RoomLayout bare = generate_room(3, RoomCategory::kBedroom, shipped_catalog(), "bare");
  std::erase_if(bare.objects, [](const ObjectState& o) { return o.cls->pickupable; });
  EXPECT_THROW(generate_rearrangement(std::make_shared<const RoomLayout>(bare), 1, "bare__000"), GenerationError);
}

TEST(PlacementTest, SpotsFitTheirSurfaces) {
  Rng rng(8);
  const RoomContext ctx(room_for(12, RoomCategory::kKitchen));
  const ObjectClass& mug = shipped_catalog().at("Mug");
  int fitted = 0;
  for (int i = 0; i < 200; ++i) {
    const PlacementSpot& spot = ctx.sample_spot(rng, mug);
    const ObjectState s = ctx.place("Mug_0", mug, spot, rng.uniform(0.0, 6.28));
    EXPECT_NEAR(s.box().center().z() - spot.base.z(), mug.footprint.z(), 1e-9);
    if (ctx.fits(s.box(), spot)) ++fitted;
  }
  EXPECT_GT(fitted, 100);
}

}  // namespace
}  // namespace rearrange
