#pragma once

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "rearrange/simulator.hpp"

namespace rearrange {

/// Breadth-first path over `cells` from `from` to the nearest member of
/// `to`, excluding `from` itself. Neighbours are expanded in ascending
/// (row, col) order, so ties break the same way every time. Empty when
/// `from` is already in `to`; absent when no member is reachable.
std::optional<std::vector<Cell>> shortest_path(const CellSet& cells, Cell from, const CellSet& to);
std::optional<std::vector<Cell>> shortest_path(const RoomLayout& room, Cell from, const CellSet& to);

inline constexpr int kExpertRetryBudget = 2;

struct ExpertState {
  enum class Phase { kGotoObject, kPickup, kGotoGoal, kPlace, kOpen };

  struct Target {
    InstanceId id;
    Phase phase = Phase::kGotoObject;
  };

  std::deque<InstanceId> deferred;
  std::map<InstanceId, int> attempts;  // failures per object; abandoned at kExpertRetryBudget
  std::optional<Target> current_target;
  std::vector<Cell> cached_path;
  std::set<InstanceId> unreachable;  // walkthrough targets no pose can see
  std::optional<Action> pending;     // last interaction, checked on the next call

  /// Agent poses that see a point of interest, and their cells.
  struct CachedPoses {
    Vec3 point;
    bool under_surface;
    std::vector<AgentPose> poses;
    CellSet cells;
  };
  std::map<std::pair<InstanceId, bool>, CachedPoses> pose_cache;  // keyed by (id, is_goal)

  bool abandoned(const InstanceId& id) const {
    const auto it = attempts.find(id);
    return it != attempts.end() && it->second >= kExpertRetryBudget;
  }
};

/// Privileged greedy planner. In the walkthrough it visits the nearest
/// unseen object until all are seen or the step budget is nearly spent. In
/// the unshuffle stage it repeatedly takes the misplaced object with the
/// shortest path, opens it or carries it to its goal, and finally emits
/// Done. Failed interactions count against a retry budget and defer the
/// object.
Action expert_action(const EpisodeRuntime& runtime, ExpertState& state);

}  // namespace rearrange
