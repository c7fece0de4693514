#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rearrange/catalog.hpp"
#include "rearrange/geometry.hpp"

namespace rearrange {

using InstanceId = std::string;

inline constexpr double kCellSize = 0.25;

/// Grid cell; `col` runs along +x, `row` along +y. Ordered by (row, col).
struct Cell {
  int col = 0;
  int row = 0;

  bool operator==(const Cell&) const = default;
  std::strong_ordering operator<=>(const Cell& other) const {
    if (auto c = row <=> other.row; c != 0) return c;
    return col <=> other.col;
  }
};

/// Rigid placement. The rotation is stored as a raw (w, x, y, z) quaternion
/// and normalized on use, so stored values survive text round trips intact.
struct Pose {
  Vec3 position = Vec3::Zero();
  std::array<double, 4> rotation{1.0, 0.0, 0.0, 0.0};

  Mat3 rotation_matrix() const;
  static Pose from_yaw(const Vec3& position, double yaw);

  bool operator==(const Pose&) const = default;
};

struct ObjectState {
  InstanceId instance_id;
  const ObjectClass* cls = nullptr;
  std::optional<double> openness;
  bool broken = false;
  /// Resting below a surface plane; only visible while crouching.
  bool under_surface = false;

  /// Builds a state whose box matches `pose` and the class footprint.
  /// Openness defaults to 0 for openable classes and is absent otherwise.
  static ObjectState make(InstanceId id, const ObjectClass& cls, const Pose& pose,
                          std::optional<double> openness = std::nullopt);

  const Pose& pose() const { return pose_; }
  const OrientedBox& box() const { return box_; }
  /// Moves the instance; the box follows.
  void set_pose(const Pose& pose);

  bool operator==(const ObjectState& other) const;

 private:
  Pose pose_;
  OrientedBox box_ = OrientedBox::axis_aligned(Vec3::Zero(), Vec3::Ones());
};

struct AgentPose {
  Cell cell;
  int yaw = 0;    // degrees clockwise from +y: 0, 90, 180, 270
  int pitch = 0;  // degrees below the horizon: -30, 0, 30, 60
  bool standing = true;
  std::optional<InstanceId> holding;

  bool operator==(const AgentPose&) const = default;
};

inline constexpr std::array<int, 4> kYaws{0, 90, 180, 270};
inline constexpr std::array<int, 4> kPitches{-30, 0, 30, 60};

enum class RoomCategory { kKitchen, kLivingRoom, kBathroom, kBedroom };

inline constexpr std::array<RoomCategory, 4> kRoomCategories{
    RoomCategory::kKitchen, RoomCategory::kLivingRoom, RoomCategory::kBathroom, RoomCategory::kBedroom};

std::string_view to_string(RoomCategory category);
RoomCategory parse_room_category(std::string_view name);

struct Rect {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;

  bool contains(double x, double y, double tolerance = 1e-9) const {
    return x >= x0 - tolerance && x <= x1 + tolerance && y >= y0 - tolerance && y <= y1 + tolerance;
  }
  bool operator==(const Rect&) const = default;
};

/// A horizontal supporting plane objects can rest on.
struct Surface {
  Rect rect;
  double height = 0.0;
  std::string owner;  // class name of the furniture providing it

  bool operator==(const Surface&) const = default;
};

class InvalidRoomError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RoomLayout {
  std::string room_id;
  RoomCategory category = RoomCategory::kKitchen;
  int width = 0;  // cells along x
  int depth = 0;  // cells along y
  std::vector<std::uint8_t> occupancy;  // row-major; 1 = blocked for the agent
  Cell entry;
  std::vector<Surface> surfaces;
  std::vector<ObjectState> static_objects;
  /// Rearrangeable instances (pickupable or openable) in their home placement.
  std::vector<ObjectState> objects;

  double width_m() const { return width * kCellSize; }
  double depth_m() const { return depth * kCellSize; }
  Rect bounds() const { return {0.0, 0.0, width_m(), depth_m()}; }
  bool in_bounds(Cell c) const { return c.col >= 0 && c.row >= 0 && c.col < width && c.row < depth; }
  bool blocked(Cell c) const { return !in_bounds(c) || occupancy[index(c)] != 0; }
  std::size_t index(Cell c) const { return static_cast<std::size_t>(c.row) * width + c.col; }
  Cell cell_at(double x, double y) const;

  /// Throws InvalidRoomError on a broken grid or out-of-bounds surface.
  void validate() const;

  bool operator==(const RoomLayout&) const = default;
};

Vec3 cell_center(Cell cell, double z = 0.0);

/// Dense membership set over a room grid.
class CellSet {
 public:
  CellSet() = default;
  CellSet(int width, int depth) : width_(width), depth_(depth), bits_(std::size_t(width) * depth, 0) {}

  bool contains(Cell c) const {
    return c.col >= 0 && c.row >= 0 && c.col < width_ && c.row < depth_ && bits_[idx(c)] != 0;
  }
  void insert(Cell c) {
    if (!bits_[idx(c)]) {
      bits_[idx(c)] = 1;
      ++count_;
    }
  }
  std::size_t size() const { return count_; }
  bool empty() const { return count_ == 0; }
  int width() const { return width_; }
  int depth() const { return depth_; }
  /// Members in (row, col) order.
  std::vector<Cell> cells() const;

 private:
  std::size_t idx(Cell c) const { return std::size_t(c.row) * width_ + c.col; }
  int width_ = 0;
  int depth_ = 0;
  std::vector<std::uint8_t> bits_;
  std::size_t count_ = 0;
};

/// 4-connected component of free cells containing the entry cell.
/// Throws InvalidRoomError when the entry is blocked or out of bounds.
CellSet reachable_cells(const RoomLayout& room);

struct SceneState {
  std::shared_ptr<const RoomLayout> room;
  std::map<InstanceId, ObjectState> objects;  // placed instances
  std::optional<ObjectState> held;            // the instance in the agent's hand
  AgentPose agent;

  /// Placed or held state of an instance, or nullptr.
  const ObjectState* find(const InstanceId& id) const;
  /// Every instance id, placed or held, sorted.
  std::vector<InstanceId> instance_ids() const;

  bool operator==(const SceneState& other) const;
};

struct ViewConfig {
  double range = 1.5;           // meters from the camera point
  double half_hfov_deg = 45.0;  // half of the 90° horizontal field of view
  double half_vfov_deg = 45.0;
  double standing_height = 1.5;
  double crouching_height = 0.9;
};

Vec3 camera_point(const AgentPose& agent, const ViewConfig& view = {});

/// Unit forward vector of a yaw in the horizontal plane.
Vec3 yaw_forward(int yaw_degrees);

/// The visibility gate: range, horizontal and vertical field of view, and
/// the crouch requirement for objects under surfaces.
bool in_view(const AgentPose& agent, const Vec3& target, bool under_surface, const ViewConfig& view = {});

/// Placed instances passing the gate, ordered by distance then instance id.
std::vector<InstanceId> visible_objects(const SceneState& scene, const ViewConfig& view = {});

/// All agent poses on `cells` from which `target` passes the gate. Sorted
/// by cell, then yaw, pitch, standing.
std::vector<AgentPose> viewing_poses(const CellSet& cells, const Vec3& target, bool under_surface,
                                     const ViewConfig& view = {});

/// Where a held object sits: a short way in front of the camera, below it.
ObjectState hand_state(const ObjectState& held, const AgentPose& agent, const ViewConfig& view = {});

}  // namespace rearrange
