#include "rearrange/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace rearrange {

namespace {

void require_same_instance(const ObjectState& a, const ObjectState& b) {
  if (a.instance_id != b.instance_id || a.cls != b.cls || a.cls == nullptr) {
    throw ContractViolation("compared states belong to different instances: " + a.instance_id + " vs " +
                            b.instance_id);
  }
}

void require_same_instances(const SceneState& a, const SceneState& b) {
  if (a.instance_ids() != b.instance_ids()) {
    throw ContractViolation("scene states enumerate different instance sets");
  }
}

}  // namespace

bool poses_approx_equal(const ObjectState& a, const ObjectState& b) {
  require_same_instance(a, b);
  if (a.broken || b.broken) return false;
  if (a.cls->pickupable) return iou(a.box(), b.box()) >= kIouMatchThreshold;
  if (a.cls->openable) return std::abs(*a.openness - *b.openness) <= kOpennessTolerance;
  return true;
}

double energy(const ObjectState& a, const ObjectState& b) {
  require_same_instance(a, b);
  if (a.broken || b.broken) return 1.0;
  if (a.cls->pickupable) {
    const double overlap = iou(a.box(), b.box());
    if (overlap > 0.0) return 0.5 * std::max(0.0, 0.5 - overlap);
    const double d = min_corner_distance(a.box(), b.box());
    return 0.5 + 0.5 * std::min(d / 2.0, 1.0);
  }
  if (a.cls->openable) return std::abs(*a.openness - *b.openness) <= kOpennessTolerance ? 0.0 : 1.0;
  return 0.0;
}

ObjectState scoring_state(const SceneState& scene, const InstanceId& id, const ViewConfig& view) {
  if (const auto it = scene.objects.find(id); it != scene.objects.end()) return it->second;
  if (scene.held && scene.held->instance_id == id) return hand_state(*scene.held, scene.agent, view);
  throw ContractViolation("instance " + id + " is not in the scene");
}

double scene_energy(const SceneState& scene, const SceneState& goal, const ViewConfig& view) {
  double total = 0.0;
  for (const auto& id : goal.instance_ids()) {
    total += energy(scoring_state(scene, id, view), *goal.find(id));
  }
  return total;
}

std::set<InstanceId> misplaced(const SceneState& scene, const SceneState& goal, const ViewConfig& view) {
  std::set<InstanceId> out;
  for (const auto& id : goal.instance_ids()) {
    if (!poses_approx_equal(scoring_state(scene, id, view), *goal.find(id))) out.insert(id);
  }
  return out;
}

MetricsReport episode_metrics(const SceneState& s0, const SceneState& s_end, const SceneState& s_star,
                              const std::set<InstanceId>& touched, const ViewConfig& view) {
  require_same_instances(s0, s_star);
  require_same_instances(s_end, s_star);
  const auto m_start = misplaced(s0, s_star, view);
  const auto m_end = misplaced(s_end, s_star, view);

  MetricsReport r;
  r.misplaced_start = static_cast<int>(m_start.size());
  r.misplaced_end = static_cast<int>(m_end.size());
  r.newly_misplaced = static_cast<int>(std::count_if(
      m_end.begin(), m_end.end(), [&](const InstanceId& id) { return !m_start.contains(id); }));
  r.success = m_end.empty() ? 1 : 0;
  if (r.newly_misplaced > 0) {
    r.fixed_strict = 0.0;
  } else if (m_start.empty()) {
    r.fixed_strict = 1.0;
  } else {
    r.fixed_strict = 1.0 - static_cast<double>(m_end.size()) / static_cast<double>(m_start.size());
  }
  const double start_energy = scene_energy(s0, s_star, view);
  r.energy_remaining_prop = start_energy == 0.0 ? 0.0 : scene_energy(s_end, s_star, view) / start_energy;
  r.num_changed = static_cast<int>(touched.size());
  return r;
}

double unshuffle_step_reward(const SceneState& prev, const SceneState& curr, const SceneState& s_star,
                             const ViewConfig& view) {
  return scene_energy(prev, s_star, view) - scene_energy(curr, s_star, view);
}

double unshuffle_end_penalty(const SceneState& curr, const SceneState& s_star, const ViewConfig& view) {
  return -scene_energy(curr, s_star, view);
}

double walkthrough_rewards(int newly_seen, int seen_total, int object_total, bool at_end,
                           const RewardConfig& config) {
  if (seen_total < 0 || seen_total > object_total) {
    throw ContractViolation("walkthrough_rewards: seen_total outside [0, object_total]");
  }
  double reward = config.k_new * newly_seen;
  if (at_end && object_total > 0) {
    reward += config.k_prop * static_cast<double>(seen_total) / static_cast<double>(object_total);
  }
  return reward;
}

}  // namespace rearrange
