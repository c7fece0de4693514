#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "rearrange/episode.hpp"
#include "rearrange/rng.hpp"

namespace rearrange {

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kMinRoomCells = 12;  // 3 m
inline constexpr int kMaxRoomCells = 32;  // 8 m
inline constexpr int kMinPickupable = 8;
inline constexpr int kMaxPickupable = 24;
inline constexpr int kMinOpenable = 4;
inline constexpr int kMaxOpenable = 18;

/// Volumes below this count as touching, not overlapping (m³).
inline constexpr double kOverlapEpsilon = 1e-9;

/// Where a pickupable may rest: on a surface, on a free floor cell, or on
/// the floor under a table.
struct PlacementSpot {
  Vec3 base = Vec3::Zero();  // resting point; the object's center sits at base + (0, 0, half height)
  int surface = -1;          // index into RoomLayout::surfaces, or -1 for floor
  bool under_surface = false;
};

/// Room geometry precomputed for placement queries.
class RoomContext {
 public:
  explicit RoomContext(std::shared_ptr<const RoomLayout> room, ViewConfig view = {});

  const RoomLayout& room() const { return *room_; }
  const std::shared_ptr<const RoomLayout>& room_ptr() const { return room_; }
  const CellSet& reachable() const { return reachable_; }
  const std::vector<PlacementSpot>& surface_spots() const { return surface_spots_; }
  const std::vector<PlacementSpot>& floor_spots() const { return floor_spots_; }
  const std::vector<PlacementSpot>& under_spots() const { return under_spots_; }

  /// Some reachable agent pose sees `target`.
  bool viewable(const Vec3& target, bool under_surface) const;

  /// `box` stays inside the room and its surface, and clears walls and furniture.
  bool fits(const OrientedBox& box, const PlacementSpot& spot) const;

  /// Draws a spot, biased by the class's preferred placement.
  const PlacementSpot& sample_spot(Rng& rng, const ObjectClass& cls) const;

  /// State for `cls` resting at `spot` with the given yaw (radians).
  ObjectState place(const InstanceId& id, const ObjectClass& cls, const PlacementSpot& spot, double yaw) const;

 private:
  std::shared_ptr<const RoomLayout> room_;
  ViewConfig view_;
  CellSet reachable_;
  std::vector<PlacementSpot> surface_spots_;
  std::vector<PlacementSpot> floor_spots_;
  std::vector<PlacementSpot> under_spots_;
  std::vector<OrientedBox> solids_;  // furniture volumes that block placement
};

/// True when `box` overlaps any of `others` by more than kOverlapEpsilon.
bool overlaps_any(const OrientedBox& box, const std::vector<const ObjectState*>& others);

/// Procedural room: a rectangle of 3–8 m per side with category furniture
/// along the walls and in the interior, openable fixtures, and a default
/// placement for every pickupable instance. Deterministic in (seed, category).
RoomLayout generate_room(std::uint64_t seed, RoomCategory category, const Catalog& catalog, std::string room_id);

/// The five-step sampler: agent start, background shuffle, N and M, goal
/// state, shuffled start state. Retries on derived seeds, then throws
/// GenerationError.
RearrangementEpisode generate_rearrangement(const RoomContext& context, std::uint64_t seed, std::string episode_id);

RearrangementEpisode generate_rearrangement(std::shared_ptr<const RoomLayout> room, std::uint64_t seed,
                                            std::string episode_id);

}  // namespace rearrange
