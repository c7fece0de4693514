#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "rearrange/scene.hpp"

namespace rearrange {

inline constexpr int kMaxSampledObjects = 5;

class InvalidEpisodeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// One rearrangement: the goal state the walkthrough shows, the shuffled
/// state the unshuffle stage starts from, and a shared start pose.
struct RearrangementEpisode {
  std::string episode_id;
  std::shared_ptr<const RoomLayout> room;
  AgentPose start_agent;
  SceneState s0;
  SceneState s_star;
  std::vector<InstanceId> opened_sample;  // openable-only instances, size 0 or 1
  std::vector<InstanceId> moved_sample;   // pickupable instances
  std::uint64_t seed = 0;

  /// Checks sample sizes, the shared start pose, absence of broken objects,
  /// identical instance sets, and that every sampled object is misplaced.
  /// Throws InvalidEpisodeError.
  void validate() const;

  bool operator==(const RearrangementEpisode& other) const;
};

}  // namespace rearrange
