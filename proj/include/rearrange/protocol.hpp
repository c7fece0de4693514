#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>

#include "rearrange/dataset.hpp"
#include "rearrange/expert.hpp"
#include "rearrange/rng.hpp"
#include "rearrange/serialization.hpp"

namespace rearrange {

struct ProtocolOptions {
  EpisodeMode default_mode = EpisodeMode::kTwoPhase;
  bool allow_expert = false;
  SimulatorConfig simulator;
};

/// Summary of an episode played over the protocol.
struct SessionEpisode {
  std::string episode_id;
  EpisodeMode mode = EpisodeMode::kTwoPhase;
  MetricsReport metrics;
  int walkthrough_steps = 0;
  int unshuffle_steps = 0;
  double walkthrough_reward = 0.0;
  double unshuffle_reward = 0.0;
  std::uint64_t trajectory_digest = 0;
};

/// Folds one step into a trajectory digest.
std::uint64_t fold_step(std::uint64_t digest, const std::string& action, const StepResult& result);

/// One protocol connection: newline-delimited JSON requests in, exactly one
/// response line out per request.
///
/// Requests:  {"cmd":"reset","episode":id[,"mode":"one-phase"|"two-phase"]}
///            {"cmd":"step","action":name[,"arg":class]}
///            {"cmd":"actions"}  {"cmd":"expert_action"}  {"cmd":"close"}
/// Responses: {"ok":true,...} or {"ok":false,"error":code,"message":text} with
/// codes bad_request, parse_error, no_episode, unknown_episode,
/// unknown_action, forbidden, internal.
class Session {
 public:
  using EpisodeHook = std::function<void(const SessionEpisode&)>;

  Session(std::shared_ptr<const DatasetFile> dataset, ProtocolOptions options,
          const Catalog& catalog = shipped_catalog());

  /// Handles one request line; the response has no trailing newline.
  std::string handle(std::string_view line);
  bool closed() const { return closed_; }
  void on_episode_end(EpisodeHook hook) { hook_ = std::move(hook); }

 private:
  Json dispatch(const Json& request);
  Json do_reset(const Json& request);
  Json do_step(const Json& request);
  Json do_expert();

  std::shared_ptr<const DatasetFile> dataset_;
  ProtocolOptions options_;
  const Catalog& catalog_;
  EpisodeRuntime runtime_;
  ExpertState expert_;
  bool has_episode_ = false;
  bool closed_ = false;
  SessionEpisode current_;
  EpisodeHook hook_;
};

Json error_response(std::string_view code, std::string_view message);

/// Reads request lines until EOF or close, writing one response per line.
void serve_stream(Session& session, std::istream& in, std::ostream& out);

}  // namespace rearrange
