#pragma once

#include <set>
#include <stdexcept>

#include "rearrange/scene.hpp"

namespace rearrange {

inline constexpr double kIouMatchThreshold = 0.5;
inline constexpr double kOpennessTolerance = 0.2;

/// A caller broke a documented precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Approximate pose equality. Broken objects never match; pickupables match
/// at IOU ≥ 0.5; openable-only classes match within 0.2 openness; anything
/// else is static and always matches.
bool poses_approx_equal(const ObjectState& a, const ObjectState& b);

/// Distance in [0, 1] between two states of one object.
///   broken on either side            → 1
///   openable-only                    → 0 if |Δo| ≤ 0.2 else 1
///   pickupable, IOU > 0              → 0.5·max(0, 0.5 − IOU)
///   pickupable, disjoint             → 0.5 + 0.5·min(d/2, 1), d = min corner distance
/// Note the jump from 0.5 to at most 0.25 when the boxes first overlap.
double energy(const ObjectState& a, const ObjectState& b);

/// Per-instance state used for scoring: placed state, or the hand pose for
/// the held instance.
ObjectState scoring_state(const SceneState& scene, const InstanceId& id, const ViewConfig& view = {});

/// Σ energy(scene_i, goal_i) over the goal's instances, in id order.
double scene_energy(const SceneState& scene, const SceneState& goal, const ViewConfig& view = {});

/// Instances of `scene` not approximately equal to `goal`.
std::set<InstanceId> misplaced(const SceneState& scene, const SceneState& goal, const ViewConfig& view = {});

struct MetricsReport {
  int success = 0;
  double fixed_strict = 0.0;
  double energy_remaining_prop = 0.0;
  int num_changed = 0;
  int misplaced_start = 0;
  int misplaced_end = 0;
  int newly_misplaced = 0;

  bool operator==(const MetricsReport&) const = default;
};

MetricsReport episode_metrics(const SceneState& s0, const SceneState& s_end, const SceneState& s_star,
                              const std::set<InstanceId>& touched, const ViewConfig& view = {});

/// E(prev) − E(curr) against the goal.
double unshuffle_step_reward(const SceneState& prev, const SceneState& curr, const SceneState& s_star,
                             const ViewConfig& view = {});

/// −E(curr) against the goal.
double unshuffle_end_penalty(const SceneState& curr, const SceneState& s_star, const ViewConfig& view = {});

struct RewardConfig {
  double k_new = 0.1;   // per newly seen object in the walkthrough
  double k_prop = 5.0;  // times the seen fraction, at walkthrough end
};

double walkthrough_rewards(int newly_seen, int seen_total, int object_total, bool at_end,
                           const RewardConfig& config = {});

}  // namespace rearrange
