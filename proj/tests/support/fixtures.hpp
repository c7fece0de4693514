#pragma once

// A hand-built 3 m × 3 m room with one table and a fridge, and an episode on it.

#include <memory>

#include "rearrange/episode.hpp"

namespace rearrange::testing {

inline constexpr double kTableTop = 0.76;

inline std::shared_ptr<const RoomLayout> small_room() {
  const Catalog& cat = shipped_catalog();
  auto room = std::make_shared<RoomLayout>();
  room->room_id = "test_room";
  room->category = RoomCategory::kKitchen;
  room->width = 12;
  room->depth = 12;
  room->occupancy.assign(144, 0);
  room->entry = {6, 0};
  for (int r = 6; r <= 7; ++r) {
    for (int c = 5; c <= 6; ++c) room->occupancy[room->index({c, r})] = 1;
  }
  for (int r = 10; r <= 11; ++r) {
    for (int c = 0; c <= 1; ++c) room->occupancy[room->index({c, r})] = 1;
  }
  room->surfaces.push_back({{1.25, 1.5, 1.75, 2.0}, kTableTop, "DiningTable"});
  const ObjectClass& table = cat.at("DiningTable");
  room->static_objects.push_back(
      ObjectState::make("DiningTable_0", table, Pose::from_yaw(Vec3(1.5, 1.75, kTableTop / 2.0), 0.0)));
  room->objects.push_back(
      ObjectState::make("Apple_0", cat.at("Apple"), Pose::from_yaw(Vec3(1.4, 1.8, kTableTop + 0.04), 0.0)));
  room->objects.push_back(ObjectState::make("Fridge_0", cat.at("Fridge"), Pose::from_yaw(Vec3(0.25, 2.75, 0.9), 0.0)));
  room->objects.push_back(
      ObjectState::make("Vase_0", cat.at("Vase"), Pose::from_yaw(Vec3(1.6, 1.65, kTableTop + 0.15), 0.0)));
  room->validate();
  return room;
}

inline SceneState scene_of(const std::shared_ptr<const RoomLayout>& room, const AgentPose& agent) {
  SceneState s;
  s.room = room;
  s.agent = agent;
  for (const auto& o : room->objects) s.objects.emplace(o.instance_id, o);
  return s;
}

inline AgentPose start_pose() {
  AgentPose a;
  a.cell = {6, 3};
  a.yaw = 0;
  a.pitch = 30;
  return a;
}

/// Goal: the room's home placement. Start: the apple slid to the table's
/// other corner and the fridge 80% open.
inline std::shared_ptr<const RearrangementEpisode> small_episode() {
  auto room = small_room();
  auto ep = std::make_shared<RearrangementEpisode>();
  ep->episode_id = "test_room__000";
  ep->room = room;
  ep->start_agent = start_pose();
  ep->s_star = scene_of(room, ep->start_agent);
  ep->s0 = ep->s_star;
  ep->s0.objects.at("Apple_0").set_pose(Pose::from_yaw(Vec3(1.35, 1.55, kTableTop + 0.04), 0.0));
  ep->s0.objects.at("Fridge_0").openness = 0.8;
  ep->opened_sample = {"Fridge_0"};
  ep->moved_sample = {"Apple_0"};
  ep->seed = 1;
  ep->validate();
  return ep;
}

}  // namespace rearrange::testing
