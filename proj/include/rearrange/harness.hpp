#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "rearrange/protocol.hpp"

namespace rearrange {

/// An in-process policy.
class Agent {
 public:
  virtual ~Agent() = default;
  virtual std::string name() const = 0;
  /// Called after reset with a per-episode seed.
  virtual void begin(const EpisodeRuntime& runtime, std::uint64_t seed) = 0;
  virtual Action act(const EpisodeRuntime& runtime, const Observation& observation) = 0;
};

/// Always Done: ends the walkthrough and then the episode at once.
std::unique_ptr<Agent> make_noop_agent();
/// Uniform over the 84 actions.
std::unique_ptr<Agent> make_random_agent(const Catalog& catalog = shipped_catalog());
std::unique_ptr<Agent> make_expert_agent();
/// noop, random or expert.
std::unique_ptr<Agent> make_agent(const std::string& name, const Catalog& catalog = shipped_catalog());

struct ResultRow {
  std::string episode_id;
  std::string agent;
  EpisodeMode mode = EpisodeMode::kTwoPhase;
  bool failed = false;
  std::string error;
  MetricsReport metrics;
  int walkthrough_steps = 0;
  int unshuffle_steps = 0;
  double walkthrough_reward = 0.0;
  double unshuffle_reward = 0.0;
  double wall_ms = 0.0;
  std::uint64_t trajectory_digest = 0;
};

/// Plays one episode to completion.
ResultRow run_episode(std::shared_ptr<const RearrangementEpisode> episode, EpisodeMode mode, Agent& agent,
                      std::uint64_t policy_seed, const SimulatorConfig& config = {});

struct Aggregate {
  int episodes = 0;  // completed rows
  int failed = 0;
  double success = 0.0;
  double fixed_strict = 0.0;
  double energy_remaining_prop = 0.0;
  double num_changed = 0.0;
  std::uint64_t digest = 0;  // over the rows' trajectory digests, in order
};

/// Means over non-failed rows, computed from the values as written to CSV.
Aggregate aggregate(const std::vector<ResultRow>& rows);
Json to_json(const Aggregate& agg);

std::string csv_header();
std::string to_csv_line(const ResultRow& row);
std::string to_csv(const std::vector<ResultRow>& rows);
/// Parses rows written by to_csv; throws std::runtime_error naming the line.
std::vector<ResultRow> parse_csv(std::string_view text);

/// Episodes of `split`, keeping only the first `limit` per room when limit > 0.
std::vector<std::shared_ptr<const RearrangementEpisode>> select_episodes(const DatasetFile& dataset, Split split,
                                                                         int limit);

struct RunOptions {
  EpisodeMode mode = EpisodeMode::kTwoPhase;
  std::uint64_t policy_seed = 0;
  SimulatorConfig simulator;
};

std::vector<ResultRow> run_agent(const std::vector<std::shared_ptr<const RearrangementEpisode>>& episodes,
                                 Agent& agent, const RunOptions& options);

/// Starts `command` through /bin/sh with REARRANGE_EPISODES (comma-separated
/// ids) and REARRANGE_MODE set, and serves the wire protocol on its stdin and
/// stdout. Episodes the agent never finishes come back as failed rows.
std::vector<ResultRow> run_extern(std::shared_ptr<const DatasetFile> dataset,
                                  const std::vector<std::shared_ptr<const RearrangementEpisode>>& episodes,
                                  const std::string& command, const RunOptions& options);

}  // namespace rearrange
