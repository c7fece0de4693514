#include "rearrange/expert.hpp"

#include <climits>
#include <cstdlib>

namespace rearrange {

namespace {

constexpr Cell kSteps[4] = {{0, -1}, {-1, 0}, {1, 0}, {0, 1}};  // ascending (row, col)

using Phase = ExpertState::Phase;

// BFS distances from `from` over `cells`; -1 where unreachable.
std::vector<int> distances(const CellSet& cells, Cell from) {
  std::vector<int> dist(std::size_t(cells.width()) * cells.depth(), -1);
  if (!cells.contains(from)) return dist;
  std::deque<Cell> frontier{from};
  dist[std::size_t(from.row) * cells.width() + from.col] = 0;
  while (!frontier.empty()) {
    const Cell c = frontier.front();
    frontier.pop_front();
    const int d = dist[std::size_t(c.row) * cells.width() + c.col];
    for (const Cell& s : kSteps) {
      const Cell n{c.col + s.col, c.row + s.row};
      if (!cells.contains(n)) continue;
      int& dn = dist[std::size_t(n.row) * cells.width() + n.col];
      if (dn < 0) {
        dn = d + 1;
        frontier.push_back(n);
      }
    }
  }
  return dist;
}

int distance_to(const std::vector<int>& dist, const CellSet& cells, const CellSet& targets) {
  int best = INT_MAX;
  for (const Cell& c : targets.cells()) {
    const int d = dist[std::size_t(c.row) * cells.width() + c.col];
    if (d >= 0 && d < best) best = d;
  }
  return best;
}

int turn_cost(int from, int to) {
  const int diff = ((to - from) % 360 + 360) % 360;
  return diff == 0 ? 0 : (diff == 180 ? 2 : 1);
}

int adjust_cost(const AgentPose& a, const AgentPose& b) {
  return turn_cost(a.yaw, b.yaw) + std::abs(a.pitch - b.pitch) / 30 + (a.standing != b.standing ? 1 : 0);
}

Action adjust_toward(const AgentPose& a, const AgentPose& b) {
  if (a.standing != b.standing) return {b.standing ? ActionKind::kStand : ActionKind::kCrouch, {}};
  if (a.yaw != b.yaw) {
    const int diff = ((b.yaw - a.yaw) % 360 + 360) % 360;
    return {diff == 270 ? ActionKind::kRotateLeft : ActionKind::kRotateRight, {}};
  }
  return {b.pitch > a.pitch ? ActionKind::kLookDown : ActionKind::kLookUp, {}};
}

Action move_toward(const AgentPose& agent, Cell next) {
  const int dc = next.col - agent.cell.col;
  const int dr = next.row - agent.cell.row;
  const int heading = dr == 1 ? 0 : (dc == 1 ? 90 : (dr == -1 ? 180 : 270));
  switch (((heading - agent.yaw) % 360 + 360) % 360) {
    case 0: return {ActionKind::kMoveAhead, {}};
    case 90: return {ActionKind::kMoveRight, {}};
    case 180: return {ActionKind::kMoveBack, {}};
    default: return {ActionKind::kMoveLeft, {}};
  }
}

class Planner {
 public:
  Planner(const EpisodeRuntime& rt, ExpertState& st)
      : rt_(rt), st_(st), live_(rt.live_scene()), goal_(rt.episode().s_star), view_(rt.config().view) {}

  Action act() {
    check_pending();
    return rt_.stage() == Stage::kWalkthrough ? walkthrough() : unshuffle();
  }

 private:
  const ExpertState::CachedPoses& poses_for(const InstanceId& id, bool is_goal) {
    const ObjectState& obj = is_goal ? *goal_.find(id) : live_.objects.at(id);
    const Vec3& p = obj.box().center();
    auto it = st_.pose_cache.find({id, is_goal});
    if (it == st_.pose_cache.end() || it->second.point != p || it->second.under_surface != obj.under_surface) {
      ExpertState::CachedPoses c{p, obj.under_surface, viewing_poses(rt_.reachable(), p, obj.under_surface, view_),
                                 CellSet(rt_.reachable().width(), rt_.reachable().depth())};
      for (const auto& pose : c.poses) c.cells.insert(pose.cell);
      it = st_.pose_cache.insert_or_assign({id, is_goal}, std::move(c)).first;
    }
    return it->second;
  }

  void fail(const InstanceId& id) {
    ++st_.attempts[id];
    st_.deferred.push_back(id);
    st_.current_target.reset();
    st_.cached_path.clear();
  }

  void check_pending() {
    if (!st_.pending) return;
    const Action done = *st_.pending;
    st_.pending.reset();
    if (!st_.current_target) return;
    const InstanceId id = st_.current_target->id;
    const bool ok = rt_.last_action_success();
    switch (done.kind) {
      case ActionKind::kPickup:
        if (ok && live_.held && live_.held->instance_id == id) {
          st_.current_target->phase = Phase::kGotoGoal;
        } else {
          fail(id);
        }
        break;
      case ActionKind::kOpen: {
        const ObjectState* now = live_.find(id);
        if (ok && now && now->openness == goal_.find(id)->openness) {
          st_.current_target.reset();
        } else {
          fail(id);
        }
        break;
      }
      case ActionKind::kPlaceObject: {
        const ObjectState* now = live_.find(id);
        if (ok && now && !live_.held && poses_approx_equal(*now, *goal_.find(id))) {
          st_.current_target.reset();
        } else {
          fail(id);
        }
        break;
      }
      default: break;
    }
  }

  // Next action toward any pose in `c`, or nothing when none is reachable.
  std::optional<Action> navigate(const ExpertState::CachedPoses& c) {
    const AgentPose& agent = live_.agent;
    if (c.cells.contains(agent.cell)) {
      const AgentPose* best = nullptr;
      for (const auto& pose : c.poses) {
        if (pose.cell == agent.cell && (best == nullptr || adjust_cost(agent, pose) < adjust_cost(agent, *best))) {
          best = &pose;
        }
      }
      st_.cached_path.clear();
      return adjust_toward(agent, *best);
    }
    auto path = shortest_path(rt_.reachable(), agent.cell, c.cells);
    if (!path || path->empty()) return std::nullopt;
    st_.cached_path = std::move(*path);
    return move_toward(agent, st_.cached_path.front());
  }

  std::optional<InstanceId> nearest(const std::vector<InstanceId>& candidates) {
    const std::vector<int> dist = distances(rt_.reachable(), live_.agent.cell);
    std::optional<InstanceId> best;
    std::pair<int, int> best_key{INT_MAX, INT_MAX};
    for (const auto& id : candidates) {
      const auto& c = poses_for(id, false);
      if (c.poses.empty()) continue;
      const int d = distance_to(dist, rt_.reachable(), c.cells);
      if (d == INT_MAX) continue;
      const bool deferred = std::find(st_.deferred.begin(), st_.deferred.end(), id) != st_.deferred.end();
      const std::pair<int, int> key{deferred ? 1 : 0, d};
      if (key < best_key) {
        best_key = key;
        best = id;
      }
    }
    return best;
  }

  Action walkthrough() {
    if (rt_.walkthrough_steps() >= rt_.config().walkthrough_cap - 1) return Action::done();
    for (int guard = 0; guard < 64; ++guard) {
      if (st_.current_target && rt_.seen_set().contains(st_.current_target->id)) st_.current_target.reset();
      if (!st_.current_target) {
        std::vector<InstanceId> unseen;
        for (const auto& [id, obj] : live_.objects) {
          if (!rt_.seen_set().contains(id) && !st_.unreachable.contains(id)) unseen.push_back(id);
        }
        const auto next = nearest(unseen);
        if (!next) return Action::done();
        st_.current_target = ExpertState::Target{*next, Phase::kGotoObject};
      }
      const auto& c = poses_for(st_.current_target->id, false);
      if (auto a = navigate(c)) return *a;
      st_.unreachable.insert(st_.current_target->id);
      st_.current_target.reset();
    }
    return Action::done();
  }

  Action unshuffle() {
    for (int guard = 0; guard < 64; ++guard) {
      if (live_.held) {
        const InstanceId id = live_.held->instance_id;
        if (!st_.current_target || st_.current_target->id != id) {
          st_.current_target = ExpertState::Target{id, Phase::kGotoGoal};
        }
        const ObjectState& g = *goal_.find(id);
        const auto& c = poses_for(id, true);
        if (in_view(live_.agent, g.box().center(), g.under_surface, view_) || c.poses.empty()) {
          st_.current_target->phase = Phase::kPlace;
          st_.pending = Action::place();
          return *st_.pending;
        }
        if (auto a = navigate(c)) return *a;
        st_.current_target->phase = Phase::kPlace;
        st_.pending = Action::place();
        return *st_.pending;
      }

      const std::set<InstanceId> wrong = misplaced(live_, goal_, view_);
      if (st_.current_target && (!wrong.contains(st_.current_target->id) || st_.abandoned(st_.current_target->id))) {
        st_.current_target.reset();
      }
      if (!st_.current_target) {
        std::vector<InstanceId> candidates;
        for (const auto& id : wrong) {
          const ObjectState* obj = live_.find(id);
          if (st_.abandoned(id) || obj == nullptr || obj->broken) continue;
          if (!obj->cls->pickupable && !obj->cls->openness_tracked()) continue;
          candidates.push_back(id);
        }
        const auto next = nearest(candidates);
        if (!next) return Action::done();
        const bool opens = live_.objects.at(*next).cls->openness_tracked();
        st_.current_target = ExpertState::Target{*next, opens ? Phase::kOpen : Phase::kGotoObject};
      }
      const InstanceId id = st_.current_target->id;
      const ObjectState& obj = live_.objects.at(id);
      if (in_view(live_.agent, obj.box().center(), obj.under_surface, view_)) {
        if (obj.cls->openness_tracked()) {
          st_.pending = Action::open(obj.cls->name);
        } else {
          st_.current_target->phase = Phase::kPickup;
          st_.pending = Action::pickup(obj.cls->name);
        }
        return *st_.pending;
      }
      if (auto a = navigate(poses_for(id, false))) return *a;
      fail(id);
    }
    return Action::done();
  }

  const EpisodeRuntime& rt_;
  ExpertState& st_;
  const SceneState& live_;
  const SceneState& goal_;
  const ViewConfig& view_;
};

}  // namespace

std::optional<std::vector<Cell>> shortest_path(const CellSet& cells, Cell from, const CellSet& to) {
  if (to.contains(from)) return std::vector<Cell>{};
  if (!cells.contains(from)) return std::nullopt;
  const int w = cells.width();
  std::vector<int> parent(std::size_t(w) * cells.depth(), -1);
  auto idx = [w](Cell c) { return std::size_t(c.row) * w + c.col; };
  parent[idx(from)] = static_cast<int>(idx(from));
  std::deque<Cell> frontier{from};
  while (!frontier.empty()) {
    const Cell c = frontier.front();
    frontier.pop_front();
    for (const Cell& s : kSteps) {
      const Cell n{c.col + s.col, c.row + s.row};
      if (!cells.contains(n) || parent[idx(n)] >= 0) continue;
      parent[idx(n)] = static_cast<int>(idx(c));
      if (to.contains(n)) {
        std::vector<Cell> path{n};
        for (Cell p = c; !(p == from); p = {parent[idx(p)] % w, parent[idx(p)] / w}) path.push_back(p);
        std::reverse(path.begin(), path.end());
        return path;
      }
      frontier.push_back(n);
    }
  }
  return std::nullopt;
}

std::optional<std::vector<Cell>> shortest_path(const RoomLayout& room, Cell from, const CellSet& to) {
  return shortest_path(reachable_cells(room), from, to);
}

Action expert_action(const EpisodeRuntime& runtime, ExpertState& state) {
  if (!runtime.active()) throw ContractViolation("expert_action needs an active episode");
  return Planner(runtime, state).act();
}

}  // namespace rearrange
