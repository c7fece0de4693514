#include "rearrange/episode.hpp"

#include "rearrange/metrics.hpp"

namespace rearrange {

namespace {

void check_state(const RearrangementEpisode& ep, const SceneState& s, const char* name) {
  if (s.room != ep.room && !(s.room && ep.room && *s.room == *ep.room)) {
    throw InvalidEpisodeError(ep.episode_id + ": " + name + " belongs to another room");
  }
  if (s.agent != ep.start_agent) throw InvalidEpisodeError(ep.episode_id + ": " + name + " start pose differs");
  if (s.held) throw InvalidEpisodeError(ep.episode_id + ": " + name + " starts with a held object");
  for (const auto& [id, obj] : s.objects) {
    if (obj.broken) throw InvalidEpisodeError(ep.episode_id + ": " + name + " has broken object " + id);
  }
}

}  // namespace

void RearrangementEpisode::validate() const {
  if (!room) throw InvalidEpisodeError(episode_id + ": no room");
  const std::size_t n = opened_sample.size();
  const std::size_t total = n + moved_sample.size();
  if (n > 1) throw InvalidEpisodeError(episode_id + ": more than one opened object");
  if (total < 1 || total > static_cast<std::size_t>(kMaxSampledObjects)) {
    throw InvalidEpisodeError(episode_id + ": N+M outside [1, 5]");
  }
  check_state(*this, s0, "s0");
  check_state(*this, s_star, "s*");
  if (s0.instance_ids() != s_star.instance_ids()) {
    throw InvalidEpisodeError(episode_id + ": s0 and s* hold different instances");
  }
  const CellSet reach = reachable_cells(*room);
  if (!reach.contains(start_agent.cell)) throw InvalidEpisodeError(episode_id + ": start cell unreachable");
  auto check_sampled = [&](const InstanceId& id, bool want_pickupable) {
    const ObjectState* a = s0.find(id);
    const ObjectState* b = s_star.find(id);
    if (a == nullptr || b == nullptr) throw InvalidEpisodeError(episode_id + ": unknown sampled object " + id);
    if (a->cls->pickupable != want_pickupable || (!want_pickupable && !a->cls->openable)) {
      throw InvalidEpisodeError(episode_id + ": sampled object " + id + " has the wrong kind");
    }
    if (poses_approx_equal(*a, *b)) throw InvalidEpisodeError(episode_id + ": sampled object " + id + " is in place");
  };
  for (const auto& id : opened_sample) check_sampled(id, false);
  for (const auto& id : moved_sample) check_sampled(id, true);
}

bool RearrangementEpisode::operator==(const RearrangementEpisode& other) const {
  const bool rooms_equal = room == other.room || (room && other.room && *room == *other.room);
  return rooms_equal && episode_id == other.episode_id && start_agent == other.start_agent && s0 == other.s0 &&
         s_star == other.s_star && opened_sample == other.opened_sample && moved_sample == other.moved_sample &&
         seed == other.seed;
}

}  // namespace rearrange
