#pragma once

#include <array>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rearrange/action.hpp"
#include "rearrange/episode.hpp"
#include "rearrange/metrics.hpp"

namespace rearrange {

enum class EpisodeMode { kOnePhase, kTwoPhase };
enum class Stage { kWalkthrough, kUnshuffle };

std::string_view to_string(EpisodeMode mode);
std::string_view to_string(Stage stage);
/// Accepts "one-phase" / "two-phase" (and the underscore spellings).
EpisodeMode parse_episode_mode(std::string_view name);

inline constexpr int kLocalOccupancySpan = 7;

struct VisibleEntry {
  std::string cls;
  Vec3 offset = Vec3::Zero();  // object center minus camera point, world frame
  std::optional<double> openness;
  double distance = 0.0;

  bool operator==(const VisibleEntry&) const = default;
};

/// 7×7 blocked-cell window around the agent. Rows run from +3 cells north
/// to −3, columns from −3 cells west to +3; cells outside the room are blocked.
using LocalOccupancy = std::array<bool, kLocalOccupancySpan * kLocalOccupancySpan>;

struct SceneView {
  std::vector<VisibleEntry> visible;
  LocalOccupancy occupancy{};

  bool operator==(const SceneView&) const = default;
};

struct Observation {
  Stage stage = Stage::kWalkthrough;
  double position_dx = 0.0;  // meters from the start cell along +x
  double position_dy = 0.0;  // and along +y
  int yaw = 0;
  int pitch = 0;
  bool standing = true;
  std::optional<std::string> holding_class;
  std::vector<VisibleEntry> visible;
  LocalOccupancy local_occupancy{};
  std::optional<SceneView> walkthrough_view;  // one-phase unshuffle only
  bool last_action_success = true;

  bool operator==(const Observation&) const = default;
};

struct StepInfo {
  Stage stage = Stage::kWalkthrough;  // stage the action ran in
  std::string action;
  bool action_success = false;
  bool stage_changed = false;
  int walkthrough_steps = 0;
  int unshuffle_steps = 0;
  std::optional<MetricsReport> metrics;  // present once the episode is done
};

struct StepResult {
  Observation observation;
  double reward = 0.0;
  bool done = false;
  StepInfo info;
};

struct SimulatorConfig {
  int walkthrough_cap = 250;
  int unshuffle_cap = 500;
  ViewConfig view;
  RewardConfig rewards;
};

/// Runs one episode at a time. Single writer: calls must be sequential, but
/// the object can move between threads between calls.
class EpisodeRuntime {
 public:
  explicit EpisodeRuntime(SimulatorConfig config = {});

  /// Two-phase starts in the walkthrough with the goal state on stage;
  /// one-phase starts in the unshuffle stage with the goal state as a twin.
  Observation reset(std::shared_ptr<const RearrangementEpisode> episode, EpisodeMode mode);

  /// Throws ContractViolation before reset or after the episode is done.
  StepResult step(const Action& action);

  bool active() const { return episode_ != nullptr && !done_; }
  bool done() const { return done_; }
  bool last_action_success() const { return last_success_; }
  EpisodeMode mode() const { return mode_; }
  Stage stage() const { return stage_; }
  const RearrangementEpisode& episode() const { return *episode_; }
  const SceneState& live_scene() const { return live_; }
  const std::optional<SceneState>& walkthrough_twin() const { return twin_; }
  const CellSet& reachable() const { return reachable_; }
  int walkthrough_steps() const { return walkthrough_steps_; }
  int unshuffle_steps() const { return unshuffle_steps_; }
  const std::set<InstanceId>& seen_set() const { return seen_; }
  const std::set<InstanceId>& touched_set() const { return touched_; }
  const std::optional<MetricsReport>& metrics() const { return metrics_; }
  const SimulatorConfig& config() const { return config_; }
  Observation observe() const;

 private:
  bool exec_navigation(const Action& action);
  bool exec_pickup(const std::string& cls);
  bool exec_open(const std::string& cls);
  bool exec_place();
  void fallback_place(ObjectState held);
  int mark_seen(const SceneState& scene);
  SceneView view_of(const SceneState& scene) const;

  SimulatorConfig config_;
  std::shared_ptr<const RearrangementEpisode> episode_;
  EpisodeMode mode_ = EpisodeMode::kTwoPhase;
  Stage stage_ = Stage::kWalkthrough;
  SceneState live_;
  std::optional<SceneState> twin_;
  CellSet reachable_;
  int walkthrough_steps_ = 0;
  int unshuffle_steps_ = 0;
  std::set<InstanceId> seen_;
  std::set<InstanceId> touched_;
  double energy_ = 0.0;
  bool done_ = false;
  bool last_success_ = true;
  std::optional<MetricsReport> metrics_;
};

}  // namespace rearrange
