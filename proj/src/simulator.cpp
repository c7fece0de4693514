#include "rearrange/simulator.hpp"
#include "rearrange/generator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rearrange {

namespace {

Cell step_cell(Cell c, int yaw) {
  switch (((yaw % 360) + 360) % 360) {
    case 0: return {c.col, c.row + 1};
    case 90: return {c.col + 1, c.row};
    case 180: return {c.col, c.row - 1};
    default: return {c.col - 1, c.row};
  }
}

double vertical_reach(const OrientedBox& box) {
  Vec3 lo, hi;
  box.world_bounds(lo, hi);
  return 0.5 * (hi.z() - lo.z());
}

bool fits_on(const OrientedBox& box, const Rect& rect) {
  Vec3 lo, hi;
  box.world_bounds(lo, hi);
  return rect.contains(lo.x(), lo.y()) && rect.contains(hi.x(), hi.y());
}

constexpr double kLatticeStep = 0.125;

}  // namespace

std::string_view to_string(EpisodeMode mode) {
  return mode == EpisodeMode::kOnePhase ? "one-phase" : "two-phase";
}

std::string_view to_string(Stage stage) {
  return stage == Stage::kWalkthrough ? "walkthrough" : "unshuffle";
}

EpisodeMode parse_episode_mode(std::string_view name) {
  if (name == "one-phase" || name == "one_phase") return EpisodeMode::kOnePhase;
  if (name == "two-phase" || name == "two_phase") return EpisodeMode::kTwoPhase;
  throw std::invalid_argument("unknown mode: " + std::string(name));
}

EpisodeRuntime::EpisodeRuntime(SimulatorConfig config) : config_(std::move(config)) {
  if (config_.walkthrough_cap < 1 || config_.unshuffle_cap < 1) {
    throw std::invalid_argument("step caps must be positive");
  }
}

Observation EpisodeRuntime::reset(std::shared_ptr<const RearrangementEpisode> episode, EpisodeMode mode) {
  if (!episode) throw std::invalid_argument("reset: no episode");
  episode->validate();
  episode_ = std::move(episode);
  mode_ = mode;
  reachable_ = reachable_cells(*episode_->room);
  walkthrough_steps_ = 0;
  unshuffle_steps_ = 0;
  seen_.clear();
  touched_.clear();
  done_ = false;
  last_success_ = true;
  metrics_.reset();
  if (mode == EpisodeMode::kTwoPhase) {
    stage_ = Stage::kWalkthrough;
    live_ = episode_->s_star;
    twin_.reset();
    mark_seen(live_);
  } else {
    stage_ = Stage::kUnshuffle;
    live_ = episode_->s0;
    twin_ = episode_->s_star;
    mark_seen(*twin_);
  }
  live_.agent = episode_->start_agent;
  if (twin_) twin_->agent = episode_->start_agent;
  energy_ = scene_energy(live_, episode_->s_star, config_.view);
  return observe();
}

int EpisodeRuntime::mark_seen(const SceneState& scene) {
  int added = 0;
  for (const auto& id : visible_objects(scene, config_.view)) {
    if (seen_.insert(id).second) ++added;
  }
  return added;
}

StepResult EpisodeRuntime::step(const Action& action) {
  if (!episode_) throw ContractViolation("step before reset");
  if (done_) throw ContractViolation("step after the episode finished");

  StepResult result;
  result.info.stage = stage_;
  result.info.action = action.name();

  bool ok = false;
  if (action.is_navigation()) {
    ok = exec_navigation(action);
  } else if (action.kind == ActionKind::kDone) {
    ok = true;
  } else if (stage_ == Stage::kUnshuffle) {
    switch (action.kind) {
      case ActionKind::kPickup: ok = exec_pickup(action.target); break;
      case ActionKind::kOpen: ok = exec_open(action.target); break;
      case ActionKind::kPlaceObject: ok = exec_place(); break;
      default: break;
    }
  }
  last_success_ = ok;

  const bool is_done = action.kind == ActionKind::kDone;
  if (stage_ == Stage::kWalkthrough) {
    ++walkthrough_steps_;
    const int newly = mark_seen(live_);
    const bool at_end = is_done || walkthrough_steps_ >= config_.walkthrough_cap;
    result.reward = walkthrough_rewards(newly, static_cast<int>(seen_.size()),
                                        static_cast<int>(episode_->s_star.instance_ids().size()), at_end,
                                        config_.rewards);
    if (at_end) {
      stage_ = Stage::kUnshuffle;
      live_ = episode_->s0;
      live_.agent = episode_->start_agent;
      energy_ = scene_energy(live_, episode_->s_star, config_.view);
      result.info.stage_changed = true;
    }
  } else {
    ++unshuffle_steps_;
    if (twin_) mark_seen(*twin_);
    const double e = scene_energy(live_, episode_->s_star, config_.view);
    result.reward = energy_ - e;
    energy_ = e;
    if (is_done || unshuffle_steps_ >= config_.unshuffle_cap) {
      result.reward += -e;
      done_ = true;
      metrics_ = episode_metrics(episode_->s0, live_, episode_->s_star, touched_, config_.view);
      result.info.metrics = metrics_;
    }
  }
  result.done = done_;
  result.info.action_success = ok;
  result.info.walkthrough_steps = walkthrough_steps_;
  result.info.unshuffle_steps = unshuffle_steps_;
  result.observation = observe();
  return result;
}

bool EpisodeRuntime::exec_navigation(const Action& action) {
  AgentPose next = live_.agent;
  switch (action.kind) {
    case ActionKind::kMoveAhead:
    case ActionKind::kMoveRight:
    case ActionKind::kMoveBack:
    case ActionKind::kMoveLeft: {
      // Heading offsets for MoveAhead, MoveLeft, MoveRight, MoveBack.
      static constexpr int kOffsets[4] = {0, 270, 90, 180};
      const Cell target = step_cell(next.cell, next.yaw + kOffsets[static_cast<int>(action.kind)]);
      if (!reachable_.contains(target)) return false;
      next.cell = target;
      break;
    }
    case ActionKind::kRotateLeft: next.yaw = (next.yaw + 270) % 360; break;
    case ActionKind::kRotateRight: next.yaw = (next.yaw + 90) % 360; break;
    case ActionKind::kLookUp:
      if (next.pitch - 30 < kPitches.front()) return false;
      next.pitch -= 30;
      break;
    case ActionKind::kLookDown:
      if (next.pitch + 30 > kPitches.back()) return false;
      next.pitch += 30;
      break;
    case ActionKind::kStand:
      if (next.standing) return false;
      next.standing = true;
      break;
    case ActionKind::kCrouch:
      if (!next.standing) return false;
      next.standing = false;
      break;
    default: return false;
  }
  live_.agent = next;
  if (twin_) {
    twin_->agent = next;
    twin_->agent.holding.reset();
  }
  return true;
}

bool EpisodeRuntime::exec_pickup(const std::string& cls) {
  if (live_.held) return false;
  for (const auto& id : visible_objects(live_, config_.view)) {
    const ObjectState& obj = live_.objects.at(id);
    if (obj.cls->name != cls || !obj.cls->pickupable) continue;
    auto node = live_.objects.extract(id);
    live_.held = std::move(node.mapped());
    live_.agent.holding = id;
    touched_.insert(id);
    return true;
  }
  return false;
}

bool EpisodeRuntime::exec_open(const std::string& cls) {
  for (const auto& id : visible_objects(live_, config_.view)) {
    ObjectState& obj = live_.objects.at(id);
    if (obj.cls->name != cls || !obj.cls->openness_tracked()) continue;
    const ObjectState* goal = episode_->s_star.find(id);
    if (obj.openness == goal->openness) continue;
    obj.openness = goal->openness;
    touched_.insert(id);
    return true;
  }
  return false;
}

bool EpisodeRuntime::exec_place() {
  if (!live_.held) return false;
  ObjectState held = std::move(*live_.held);
  live_.held.reset();
  live_.agent.holding.reset();
  touched_.insert(held.instance_id);
  const ObjectState& goal = *episode_->s_star.find(held.instance_id);
  if (in_view(live_.agent, goal.box().center(), goal.under_surface, config_.view)) {
    ObjectState placed = goal;
    placed.broken = held.broken;
    live_.objects.emplace(placed.instance_id, std::move(placed));
  } else {
    fallback_place(std::move(held));
  }
  return true;
}

void EpisodeRuntime::fallback_place(ObjectState held) {
  const RoomLayout& room = *episode_->room;
  const Vec3 cam = camera_point(live_.agent, config_.view);
  const Pose rest = held.pose();
  const double reach = vertical_reach(held.box());

  double best = std::numeric_limits<double>::infinity();
  std::optional<ObjectState> chosen;
  for (const auto& surface : room.surfaces) {
    const Rect& r = surface.rect;
    const int nx = static_cast<int>(std::floor((r.x1 - r.x0) / kLatticeStep + 1e-9));
    const int ny = static_cast<int>(std::floor((r.y1 - r.y0) / kLatticeStep + 1e-9));
    for (int j = 0; j <= ny; ++j) {
      for (int i = 0; i <= nx; ++i) {
        const Vec3 p(r.x0 + i * kLatticeStep, r.y0 + j * kLatticeStep, surface.height + reach);
        const double d = (p - cam).norm();
        if (d >= best || !in_view(live_.agent, p, false, config_.view)) continue;
        ObjectState candidate = held;
        Pose pose = rest;
        pose.position = p;
        candidate.set_pose(pose);
        if (!fits_on(candidate.box(), r)) continue;
        const bool free = std::none_of(live_.objects.begin(), live_.objects.end(), [&](const auto& kv) {
          return intersection_volume(candidate.box(), kv.second.box()) > kOverlapEpsilon;
        });
        if (!free) continue;
        candidate.under_surface = false;
        best = d;
        chosen = std::move(candidate);
      }
    }
  }
  if (!chosen) {
    Cell drop = step_cell(live_.agent.cell, live_.agent.yaw);
    if (room.blocked(drop)) drop = live_.agent.cell;
    Pose pose = rest;
    pose.position = cell_center(drop, reach);
    held.set_pose(pose);
    held.under_surface = false;
    if (held.cls->fragile) held.broken = true;
    chosen = std::move(held);
  }
  live_.objects.emplace(chosen->instance_id, std::move(*chosen));
}

SceneView EpisodeRuntime::view_of(const SceneState& scene) const {
  SceneView v;
  const Vec3 cam = camera_point(scene.agent, config_.view);
  for (const auto& id : visible_objects(scene, config_.view)) {
    const ObjectState& obj = scene.objects.at(id);
    const Vec3 offset = obj.box().center() - cam;
    v.visible.push_back({obj.cls->name, offset, obj.openness, offset.norm()});
  }
  const RoomLayout& room = *scene.room;
  const int half = kLocalOccupancySpan / 2;
  std::size_t k = 0;
  for (int dr = half; dr >= -half; --dr) {
    for (int dc = -half; dc <= half; ++dc) {
      v.occupancy[k++] = room.blocked({scene.agent.cell.col + dc, scene.agent.cell.row + dr});
    }
  }
  return v;
}

Observation EpisodeRuntime::observe() const {
  if (!episode_) throw ContractViolation("observe before reset");
  Observation o;
  o.stage = stage_;
  const AgentPose& a = live_.agent;
  o.position_dx = (a.cell.col - episode_->start_agent.cell.col) * kCellSize;
  o.position_dy = (a.cell.row - episode_->start_agent.cell.row) * kCellSize;
  o.yaw = a.yaw;
  o.pitch = a.pitch;
  o.standing = a.standing;
  if (live_.held) o.holding_class = live_.held->cls->name;
  SceneView v = view_of(live_);
  o.visible = std::move(v.visible);
  o.local_occupancy = v.occupancy;
  if (mode_ == EpisodeMode::kOnePhase && stage_ == Stage::kUnshuffle && twin_) o.walkthrough_view = view_of(*twin_);
  o.last_action_success = last_success_;
  return o;
}

}  // namespace rearrange
