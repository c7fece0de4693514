#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>

#include "rearrange/generator.hpp"
#include "rearrange/metrics.hpp"

namespace rearrange {

namespace {

constexpr int kEpisodeAttempts = 8;
constexpr int kSpotAttempts = 200;

class Sampler {
 public:
  Sampler(const RoomContext& ctx, std::uint64_t seed) : ctx_(ctx), rng_(seed) {}

  // Moves `obj` to a fresh viewable spot clear of everything in `scene`
  // except itself. `avoid` rejects spots approximately equal to it.
  bool relocate(ObjectState& obj, const SceneState& scene, const ObjectState* avoid) {
    std::vector<const ObjectState*> others;
    others.reserve(scene.objects.size());
    for (const auto& [id, o] : scene.objects) {
      if (id != obj.instance_id) others.push_back(&o);
    }
    for (int attempt = 0; attempt < kSpotAttempts; ++attempt) {
      const PlacementSpot& spot = ctx_.sample_spot(rng_, *obj.cls);
      const double yaw = rng_.uniform(0.0, 2.0 * std::numbers::pi);
      ObjectState moved = ctx_.place(obj.instance_id, *obj.cls, spot, yaw);
      moved.openness = obj.openness;
      if (!ctx_.fits(moved.box(), spot) || overlaps_any(moved.box(), others)) continue;
      if (avoid != nullptr && poses_approx_equal(moved, *avoid)) continue;
      if (!ctx_.viewable(moved.box().center(), moved.under_surface)) continue;
      obj = std::move(moved);
      return true;
    }
    return false;
  }

  double openness_away_from(double other) {
    for (;;) {
      const double o = q9(rng_.uniform());
      if (std::abs(o - other) > kOpennessTolerance) return o;
    }
  }

  std::optional<RearrangementEpisode> sample(const std::string& episode_id, std::uint64_t seed) {
    const RoomLayout& room = ctx_.room();
    RearrangementEpisode ep;
    ep.episode_id = episode_id;
    ep.room = ctx_.room_ptr();
    ep.seed = seed;

    // 1. Agent start on a reachable cell.
    const std::vector<Cell> cells = ctx_.reachable().cells();
    ep.start_agent.cell = rng_.pick(cells);
    ep.start_agent.yaw = kYaws[static_cast<std::size_t>(rng_.uniform_int(0, 3))];

    // 2. Background shuffle of every pickupable, placed one after another.
    SceneState base;
    base.room = ep.room;
    base.agent = ep.start_agent;
    for (const auto& o : room.objects) {
      if (!o.cls->pickupable) base.objects.emplace(o.instance_id, o);
    }
    std::vector<InstanceId> pickupables, openables;
    for (const auto& o : room.objects) {
      if (o.cls->pickupable) {
        pickupables.push_back(o.instance_id);
      } else if (o.cls->openness_tracked()) {
        openables.push_back(o.instance_id);
      }
    }
    for (const auto& o : room.objects) {
      if (!o.cls->pickupable) continue;
      ObjectState s = o;
      if (!relocate(s, base, nullptr)) {
        if (overlaps_with(o, base)) return std::nullopt;
        s = o;
      }
      base.objects.emplace(s.instance_id, std::move(s));
    }

    // 3. N ∈ {0, 1}, M ∈ {1 − N, …, 5 − N}.
    const int n = openables.empty() ? 0 : rng_.uniform_int(0, 1);
    const int m = std::min<int>(rng_.uniform_int(1 - n, kMaxSampledObjects - n), pickupables.size());
    if (n + m < 1) return std::nullopt;
    rng_.shuffle(openables);
    rng_.shuffle(pickupables);
    ep.opened_sample.assign(openables.begin(), openables.begin() + n);
    ep.moved_sample.assign(pickupables.begin(), pickupables.begin() + m);
    std::sort(ep.opened_sample.begin(), ep.opened_sample.end());
    std::sort(ep.moved_sample.begin(), ep.moved_sample.end());

    // 4. Goal state: open the N, move the M.
    SceneState goal = base;
    for (const auto& id : ep.opened_sample) goal.objects.at(id).openness = q9(rng_.uniform());
    for (const auto& id : ep.moved_sample) {
      ObjectState& s = goal.objects.at(id);
      const ObjectState background = s;
      if (!relocate(s, goal, &background)) return std::nullopt;
    }

    // 5. Start state: fresh openness and positions, each away from the goal.
    SceneState start = goal;
    for (const auto& id : ep.opened_sample) {
      start.objects.at(id).openness = openness_away_from(*goal.objects.at(id).openness);
    }
    for (const auto& id : ep.moved_sample) {
      if (!relocate(start.objects.at(id), start, &goal.objects.at(id))) return std::nullopt;
    }

    ep.s_star = std::move(goal);
    ep.s0 = std::move(start);
    return ep;
  }

 private:
  static bool overlaps_with(const ObjectState& o, const SceneState& scene) {
    std::vector<const ObjectState*> others;
    for (const auto& [id, s] : scene.objects) others.push_back(&s);
    return overlaps_any(o.box(), others);
  }

  const RoomContext& ctx_;
  Rng rng_;
};

}  // namespace

RearrangementEpisode generate_rearrangement(const RoomContext& context, std::uint64_t seed, std::string episode_id) {
  const bool any_pickupable = std::any_of(context.room().objects.begin(), context.room().objects.end(),
                                          [](const ObjectState& o) { return o.cls->pickupable; });
  if (!any_pickupable) throw GenerationError("room " + context.room().room_id + " has no pickupable objects");
  std::uint64_t attempt_seed = seed;
  for (int attempt = 0; attempt < kEpisodeAttempts; ++attempt) {
    Sampler sampler(context, attempt_seed);
    if (auto ep = sampler.sample(episode_id, seed)) {
      ep->validate();
      return std::move(*ep);
    }
    attempt_seed = splitmix64(attempt_seed);
  }
  throw GenerationError("episode " + episode_id + ": no valid rearrangement after " +
                        std::to_string(kEpisodeAttempts) + " attempts");
}

RearrangementEpisode generate_rearrangement(std::shared_ptr<const RoomLayout> room, std::uint64_t seed,
                                            std::string episode_id) {
  const RoomContext context(std::move(room));
  return generate_rearrangement(context, seed, std::move(episode_id));
}

}  // namespace rearrange
