#include "rearrange/scene.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>

namespace rearrange {

Mat3 Pose::rotation_matrix() const {
  Eigen::Quaterniond q(rotation[0], rotation[1], rotation[2], rotation[3]);
  q.normalize();
  return q.toRotationMatrix();
}

Pose Pose::from_yaw(const Vec3& position, double yaw) {
  Pose pose;
  pose.position = position;
  pose.rotation = {std::cos(yaw / 2.0), 0.0, 0.0, std::sin(yaw / 2.0)};
  return pose;
}

ObjectState ObjectState::make(InstanceId id, const ObjectClass& cls, const Pose& pose,
                              std::optional<double> openness) {
  ObjectState s;
  s.instance_id = std::move(id);
  s.cls = &cls;
  if (cls.openable) {
    s.openness = openness.value_or(0.0);
  }
  s.set_pose(pose);
  return s;
}

void ObjectState::set_pose(const Pose& pose) {
  pose_ = pose;
  box_ = OrientedBox(pose.position, pose.rotation_matrix(), cls->footprint);
}

bool ObjectState::operator==(const ObjectState& other) const {
  return instance_id == other.instance_id && cls == other.cls && pose_ == other.pose_ &&
         openness == other.openness && broken == other.broken && under_surface == other.under_surface;
}

std::string_view to_string(RoomCategory category) {
  switch (category) {
    case RoomCategory::kKitchen: return "kitchen";
    case RoomCategory::kLivingRoom: return "living-room";
    case RoomCategory::kBathroom: return "bathroom";
    case RoomCategory::kBedroom: return "bedroom";
  }
  return "kitchen";
}

RoomCategory parse_room_category(std::string_view name) {
  for (auto c : kRoomCategories) {
    if (to_string(c) == name) return c;
  }
  throw std::invalid_argument("unknown room category: " + std::string(name));
}

Cell RoomLayout::cell_at(double x, double y) const {
  return {static_cast<int>(std::floor(x / kCellSize)), static_cast<int>(std::floor(y / kCellSize))};
}

void RoomLayout::validate() const {
  if (width <= 0 || depth <= 0) throw InvalidRoomError("room " + room_id + ": empty grid");
  if (occupancy.size() != static_cast<std::size_t>(width) * depth) {
    throw InvalidRoomError("room " + room_id + ": occupancy grid does not match bounds");
  }
  const Rect b = bounds();
  for (const auto& s : surfaces) {
    if (!b.contains(s.rect.x0, s.rect.y0) || !b.contains(s.rect.x1, s.rect.y1)) {
      throw InvalidRoomError("room " + room_id + ": surface of " + s.owner + " leaves the room");
    }
  }
}

Vec3 cell_center(Cell cell, double z) {
  return {(cell.col + 0.5) * kCellSize, (cell.row + 0.5) * kCellSize, z};
}

std::vector<Cell> CellSet::cells() const {
  std::vector<Cell> out;
  out.reserve(count_);
  for (int r = 0; r < depth_; ++r) {
    for (int c = 0; c < width_; ++c) {
      if (bits_[std::size_t(r) * width_ + c]) out.push_back({c, r});
    }
  }
  return out;
}

CellSet reachable_cells(const RoomLayout& room) {
  if (room.blocked(room.entry)) {
    throw InvalidRoomError("room " + room.room_id + ": entry cell is blocked or outside the room");
  }
  CellSet seen(room.width, room.depth);
  std::deque<Cell> frontier{room.entry};
  seen.insert(room.entry);
  static constexpr Cell kSteps[4] = {{0, -1}, {-1, 0}, {1, 0}, {0, 1}};
  while (!frontier.empty()) {
    const Cell c = frontier.front();
    frontier.pop_front();
    for (const Cell& d : kSteps) {
      const Cell n{c.col + d.col, c.row + d.row};
      if (!room.blocked(n) && !seen.contains(n)) {
        seen.insert(n);
        frontier.push_back(n);
      }
    }
  }
  return seen;
}

const ObjectState* SceneState::find(const InstanceId& id) const {
  if (const auto it = objects.find(id); it != objects.end()) return &it->second;
  if (held && held->instance_id == id) return &*held;
  return nullptr;
}

std::vector<InstanceId> SceneState::instance_ids() const {
  std::vector<InstanceId> ids;
  ids.reserve(objects.size() + 1);
  for (const auto& [id, state] : objects) ids.push_back(id);
  if (held) ids.push_back(held->instance_id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

bool SceneState::operator==(const SceneState& other) const {
  const bool rooms_equal = room == other.room || (room && other.room && *room == *other.room);
  return rooms_equal && objects == other.objects && held == other.held && agent == other.agent;
}

Vec3 yaw_forward(int yaw_degrees) {
  switch (((yaw_degrees % 360) + 360) % 360) {
    case 0: return {0.0, 1.0, 0.0};
    case 90: return {1.0, 0.0, 0.0};
    case 180: return {0.0, -1.0, 0.0};
    case 270: return {-1.0, 0.0, 0.0};
  }
  const double r = yaw_degrees * std::numbers::pi / 180.0;
  return {std::sin(r), std::cos(r), 0.0};
}

Vec3 camera_point(const AgentPose& agent, const ViewConfig& view) {
  return cell_center(agent.cell, agent.standing ? view.standing_height : view.crouching_height);
}

bool in_view(const AgentPose& agent, const Vec3& target, bool under_surface, const ViewConfig& view) {
  if (under_surface && agent.standing) return false;
  const Vec3 ray = target - camera_point(agent, view);
  if (ray.norm() > view.range + 1e-9) return false;
  const double horizontal = std::hypot(ray.x(), ray.y());
  constexpr double kDeg = 180.0 / std::numbers::pi;
  if (horizontal > 1e-9) {
    const Vec3 f = yaw_forward(agent.yaw);
    const double cosang = std::clamp((ray.x() * f.x() + ray.y() * f.y()) / horizontal, -1.0, 1.0);
    if (std::acos(cosang) * kDeg > view.half_hfov_deg + 1e-9) return false;
  }
  const double depression = std::atan2(-ray.z(), horizontal) * kDeg;
  return depression >= agent.pitch - view.half_vfov_deg - 1e-9 &&
         depression <= agent.pitch + view.half_vfov_deg + 1e-9;
}

std::vector<InstanceId> visible_objects(const SceneState& scene, const ViewConfig& view) {
  const Vec3 cam = camera_point(scene.agent, view);
  std::vector<std::pair<double, const InstanceId*>> hits;
  for (const auto& [id, state] : scene.objects) {
    const Vec3& c = state.box().center();
    if (in_view(scene.agent, c, state.under_surface, view)) hits.emplace_back((c - cam).norm(), &id);
  }
  std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first < b.first : *a.second < *b.second;
  });
  std::vector<InstanceId> out;
  out.reserve(hits.size());
  for (const auto& h : hits) out.push_back(*h.second);
  return out;
}

std::vector<AgentPose> viewing_poses(const CellSet& cells, const Vec3& target, bool under_surface,
                                     const ViewConfig& view) {
  std::vector<AgentPose> out;
  const double reach = view.range + kCellSize;
  const int c0 = std::max(0, static_cast<int>(std::floor((target.x() - reach) / kCellSize)));
  const int c1 = std::min(cells.width() - 1, static_cast<int>(std::floor((target.x() + reach) / kCellSize)));
  const int r0 = std::max(0, static_cast<int>(std::floor((target.y() - reach) / kCellSize)));
  const int r1 = std::min(cells.depth() - 1, static_cast<int>(std::floor((target.y() + reach) / kCellSize)));
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) {
      const Cell cell{c, r};
      if (!cells.contains(cell)) continue;
      for (int yaw : kYaws) {
        for (int pitch : kPitches) {
          for (bool standing : {false, true}) {
            AgentPose pose{cell, yaw, pitch, standing, std::nullopt};
            if (in_view(pose, target, under_surface, view)) out.push_back(std::move(pose));
          }
        }
      }
    }
  }
  return out;
}

ObjectState hand_state(const ObjectState& held, const AgentPose& agent, const ViewConfig& view) {
  ObjectState s = held;
  Pose pose = held.pose();
  pose.position = camera_point(agent, view) + 0.4 * yaw_forward(agent.yaw) - Vec3(0.0, 0.0, 0.3);
  s.set_pose(pose);
  s.under_surface = false;
  return s;
}

}  // namespace rearrange
