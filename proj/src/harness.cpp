#include "rearrange/harness.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <sstream>

namespace rearrange {

namespace {

constexpr std::uint64_t kDigestBasis = 0xcbf29ce484222325ULL;

class NoopAgent : public Agent {
 public:
  std::string name() const override { return "noop"; }
  void begin(const EpisodeRuntime&, std::uint64_t) override {}
  Action act(const EpisodeRuntime&, const Observation&) override { return Action::done(); }
};

class RandomAgent : public Agent {
 public:
  explicit RandomAgent(const Catalog& catalog) : actions_(all_actions(catalog)) {}
  std::string name() const override { return "random"; }
  void begin(const EpisodeRuntime&, std::uint64_t seed) override { rng_ = Rng(seed); }
  Action act(const EpisodeRuntime&, const Observation&) override { return rng_.pick(actions_); }

 private:
  std::vector<Action> actions_;
  Rng rng_{0};
};

class ExpertAgent : public Agent {
 public:
  std::string name() const override { return "expert"; }
  void begin(const EpisodeRuntime&, std::uint64_t) override { state_ = ExpertState{}; }
  Action act(const EpisodeRuntime& rt, const Observation&) override { return expert_action(rt, state_); }

 private:
  ExpertState state_;
};

std::string fmt9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

std::string sanitize(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ' ';
  }
  return s;
}

double now_ms() {
  using namespace std::chrono;
  return duration<double, std::milli>(steady_clock::now().time_since_epoch()).count();
}

}  // namespace

std::unique_ptr<Agent> make_noop_agent() { return std::make_unique<NoopAgent>(); }
std::unique_ptr<Agent> make_random_agent(const Catalog& catalog) { return std::make_unique<RandomAgent>(catalog); }
std::unique_ptr<Agent> make_expert_agent() { return std::make_unique<ExpertAgent>(); }

std::unique_ptr<Agent> make_agent(const std::string& name, const Catalog& catalog) {
  if (name == "noop") return make_noop_agent();
  if (name == "random") return make_random_agent(catalog);
  if (name == "expert") return make_expert_agent();
  throw std::invalid_argument("unknown agent: " + name);
}

ResultRow run_episode(std::shared_ptr<const RearrangementEpisode> episode, EpisodeMode mode, Agent& agent,
                      std::uint64_t policy_seed, const SimulatorConfig& config) {
  ResultRow row;
  row.episode_id = episode->episode_id;
  row.agent = agent.name();
  row.mode = mode;
  row.trajectory_digest = kDigestBasis;
  const double start = now_ms();
  try {
    EpisodeRuntime rt(config);
    Observation obs = rt.reset(episode, mode);
    agent.begin(rt, derive_seed(policy_seed, {fnv1a64(episode->episode_id)}));
    while (!rt.done()) {
      const Stage stage = rt.stage();
      const Action a = agent.act(rt, obs);
      const StepResult r = rt.step(a);
      (stage == Stage::kWalkthrough ? row.walkthrough_reward : row.unshuffle_reward) += r.reward;
      row.trajectory_digest = fold_step(row.trajectory_digest, r.info.action, r);
      obs = r.observation;
    }
    row.metrics = *rt.metrics();
    row.walkthrough_steps = rt.walkthrough_steps();
    row.unshuffle_steps = rt.unshuffle_steps();
  } catch (const std::exception& e) {
    row.failed = true;
    row.error = e.what();
  }
  row.wall_ms = now_ms() - start;
  return row;
}

Aggregate aggregate(const std::vector<ResultRow>& rows) {
  Aggregate agg;
  std::uint64_t digest = kDigestBasis;
  for (const auto& r : rows) {
    digest = fnv1a64(hex64(r.trajectory_digest) + (r.failed ? "!" : ";"), digest);
    if (r.failed) {
      ++agg.failed;
      continue;
    }
    ++agg.episodes;
    agg.success += r.metrics.success;
    agg.fixed_strict += q9(r.metrics.fixed_strict);
    agg.energy_remaining_prop += q9(r.metrics.energy_remaining_prop);
    agg.num_changed += r.metrics.num_changed;
  }
  if (agg.episodes > 0) {
    agg.success /= agg.episodes;
    agg.fixed_strict /= agg.episodes;
    agg.energy_remaining_prop /= agg.episodes;
    agg.num_changed /= agg.episodes;
  }
  agg.digest = digest;
  return agg;
}

Json to_json(const Aggregate& agg) {
  return {{"episodes", agg.episodes},
          {"failed", agg.failed},
          {"success", agg.success},
          {"fixed_strict", agg.fixed_strict},
          {"energy_remaining_prop", agg.energy_remaining_prop},
          {"num_changed", agg.num_changed},
          {"digest", hex64(agg.digest)}};
}

std::string csv_header() {
  return "episode_id,agent,mode,status,success,fixed_strict,energy_remaining_prop,num_changed,misplaced_start,"
         "misplaced_end,newly_misplaced,walkthrough_steps,unshuffle_steps,walkthrough_reward,unshuffle_reward,"
         "wall_ms,trajectory_digest,error";
}

std::string to_csv_line(const ResultRow& r) {
  std::ostringstream s;
  const auto& m = r.metrics;
  s << r.episode_id << ',' << r.agent << ',' << to_string(r.mode) << ',' << (r.failed ? "failed" : "ok") << ','
    << m.success << ',' << fmt9(m.fixed_strict) << ',' << fmt9(m.energy_remaining_prop) << ',' << m.num_changed
    << ',' << m.misplaced_start << ',' << m.misplaced_end << ',' << m.newly_misplaced << ',' << r.walkthrough_steps
    << ',' << r.unshuffle_steps << ',' << fmt9(r.walkthrough_reward) << ',' << fmt9(r.unshuffle_reward) << ','
    << fmt9(r.wall_ms) << ',' << hex64(r.trajectory_digest) << ',' << sanitize(r.error);
  return s.str();
}

std::string to_csv(const std::vector<ResultRow>& rows) {
  std::string out = csv_header() + "\n";
  for (const auto& r : rows) out += to_csv_line(r) + "\n";
  return out;
}

std::vector<ResultRow> parse_csv(std::string_view text) {
  std::vector<ResultRow> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1) {
      if (line != csv_header()) throw std::runtime_error("line 1: unexpected CSV header");
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::size_t pos = 0;
    for (;;) {
      const std::size_t comma = line.find(',', pos);
      f.push_back(line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (f.size() != 18) {
      throw std::runtime_error("line " + std::to_string(lineno) + ": expected 18 fields, got " +
                               std::to_string(f.size()));
    }
    try {
      ResultRow r;
      r.episode_id = f[0];
      r.agent = f[1];
      r.mode = parse_episode_mode(f[2]);
      if (f[3] != "ok" && f[3] != "failed") throw std::invalid_argument("bad status " + f[3]);
      r.failed = f[3] == "failed";
      r.metrics.success = std::stoi(f[4]);
      r.metrics.fixed_strict = std::stod(f[5]);
      r.metrics.energy_remaining_prop = std::stod(f[6]);
      r.metrics.num_changed = std::stoi(f[7]);
      r.metrics.misplaced_start = std::stoi(f[8]);
      r.metrics.misplaced_end = std::stoi(f[9]);
      r.metrics.newly_misplaced = std::stoi(f[10]);
      r.walkthrough_steps = std::stoi(f[11]);
      r.unshuffle_steps = std::stoi(f[12]);
      r.walkthrough_reward = std::stod(f[13]);
      r.unshuffle_reward = std::stod(f[14]);
      r.wall_ms = std::stod(f[15]);
      r.trajectory_digest = std::stoull(f[16], nullptr, 16);
      r.error = f[17];
      rows.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw std::runtime_error("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (lineno == 0) throw std::runtime_error("line 1: empty CSV");
  return rows;
}

std::vector<std::shared_ptr<const RearrangementEpisode>> select_episodes(const DatasetFile& dataset, Split split,
                                                                         int limit) {
  std::vector<std::shared_ptr<const RearrangementEpisode>> out;
  const auto it = dataset.splits.find(split);
  if (it == dataset.splits.end()) return out;
  std::map<std::string, int> per_room;
  for (const auto& ep : it->second) {
    if (limit > 0 && per_room[ep->room->room_id]++ >= limit) continue;
    out.push_back(ep);
  }
  return out;
}

std::vector<ResultRow> run_agent(const std::vector<std::shared_ptr<const RearrangementEpisode>>& episodes,
                                 Agent& agent, const RunOptions& options) {
  std::vector<ResultRow> rows;
  rows.reserve(episodes.size());
  for (const auto& ep : episodes) rows.push_back(run_episode(ep, options.mode, agent, options.policy_seed, options.simulator));
  return rows;
}

std::vector<ResultRow> run_extern(std::shared_ptr<const DatasetFile> dataset,
                                  const std::vector<std::shared_ptr<const RearrangementEpisode>>& episodes,
                                  const std::string& command, const RunOptions& options) {
  std::string ids;
  for (const auto& ep : episodes) {
    if (!ids.empty()) ids += ',';
    ids += ep->episode_id;
  }
  int to_child[2], from_child[2];
  if (pipe(to_child) != 0 || pipe(from_child) != 0) throw std::runtime_error("run_extern: pipe failed");
  const pid_t pid = fork();
  if (pid < 0) throw std::runtime_error("run_extern: fork failed");
  if (pid == 0) {
    dup2(to_child[0], STDIN_FILENO);
    dup2(from_child[1], STDOUT_FILENO);
    close(to_child[0]);
    close(to_child[1]);
    close(from_child[0]);
    close(from_child[1]);
    setenv("REARRANGE_EPISODES", ids.c_str(), 1);
    setenv("REARRANGE_MODE", std::string(to_string(options.mode)).c_str(), 1);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(to_child[0]);
  close(from_child[1]);
  signal(SIGPIPE, SIG_IGN);

  ProtocolOptions popts;
  popts.default_mode = options.mode;
  popts.simulator = options.simulator;
  Session session(dataset, popts);
  std::map<std::string, ResultRow> finished;
  double last = now_ms();
  session.on_episode_end([&](const SessionEpisode& e) {
    ResultRow r;
    r.episode_id = e.episode_id;
    r.agent = "extern";
    r.mode = e.mode;
    r.metrics = e.metrics;
    r.walkthrough_steps = e.walkthrough_steps;
    r.unshuffle_steps = e.unshuffle_steps;
    r.walkthrough_reward = e.walkthrough_reward;
    r.unshuffle_reward = e.unshuffle_reward;
    r.trajectory_digest = e.trajectory_digest;
    const double t = now_ms();
    r.wall_ms = t - last;
    last = t;
    finished.insert_or_assign(e.episode_id, std::move(r));
  });

  std::FILE* in = fdopen(from_child[0], "r");
  std::string line;
  char buf[4096];
  bool writable = true;
  while (!session.closed() && std::fgets(buf, sizeof buf, in) != nullptr) {
    line += buf;
    if (line.empty() || line.back() != '\n') continue;
    line.pop_back();
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") != std::string::npos && writable) {
      const std::string resp = session.handle(line) + "\n";
      std::size_t off = 0;
      while (off < resp.size()) {
        const ssize_t n = write(to_child[1], resp.data() + off, resp.size() - off);
        if (n <= 0) {
          writable = false;
          break;
        }
        off += static_cast<std::size_t>(n);
      }
    }
    line.clear();
  }
  close(to_child[1]);
  std::fclose(in);
  int status = 0;
  waitpid(pid, &status, 0);

  std::vector<ResultRow> rows;
  for (const auto& ep : episodes) {
    if (auto it = finished.find(ep->episode_id); it != finished.end()) {
      rows.push_back(it->second);
    } else {
      ResultRow r;
      r.episode_id = ep->episode_id;
      r.agent = "extern";
      r.mode = options.mode;
      r.failed = true;
      r.error = "agent did not finish the episode";
      rows.push_back(std::move(r));
    }
  }
  return rows;
}

}  // namespace rearrange
