#include "rearrange/protocol.hpp"

#include <cstdio>
#include <istream>
#include <ostream>

namespace rearrange {

namespace {

constexpr std::uint64_t kDigestBasis = 0xcbf29ce484222325ULL;

struct ProtocolError {
  std::string code;
  std::string message;
};

const Json& require(const Json& req, const char* key) {
  const auto it = req.find(key);
  if (it == req.end()) throw ProtocolError{"bad_request", std::string("missing field \"") + key + "\""};
  return *it;
}

std::string require_string(const Json& req, const char* key) {
  const Json& v = require(req, key);
  if (!v.is_string()) throw ProtocolError{"bad_request", std::string("field \"") + key + "\" must be a string"};
  return v.get<std::string>();
}

std::string dump_line(const Json& j) { return j.dump(-1, ' ', false, Json::error_handler_t::replace); }

}  // namespace

std::uint64_t fold_step(std::uint64_t digest, const std::string& action, const StepResult& result) {
  char reward[32];
  std::snprintf(reward, sizeof reward, "%.9g", result.reward);
  std::string record = action;
  record += '|';
  record += reward;
  record += result.done ? "|1|" : "|0|";
  record += to_json(result.observation).dump();
  return fnv1a64(record, digest);
}

Json error_response(std::string_view code, std::string_view message) {
  return {{"ok", false}, {"error", std::string(code)}, {"message", std::string(message)}};
}

Session::Session(std::shared_ptr<const DatasetFile> dataset, ProtocolOptions options, const Catalog& catalog)
    : dataset_(std::move(dataset)), options_(options), catalog_(catalog), runtime_(options.simulator) {}

std::string Session::handle(std::string_view line) {
  Json request;
  try {
    request = Json::parse(line);
  } catch (const Json::parse_error& e) {
    return dump_line(error_response("parse_error", e.what()));
  }
  try {
    return dump_line(dispatch(request));
  } catch (const ProtocolError& e) {
    return dump_line(error_response(e.code, e.message));
  } catch (const std::exception& e) {
    return dump_line(error_response("internal", e.what()));
  }
}

Json Session::dispatch(const Json& request) {
  if (!request.is_object()) throw ProtocolError{"bad_request", "request must be a JSON object"};
  const std::string cmd = require_string(request, "cmd");
  if (cmd == "reset") return do_reset(request);
  if (cmd == "step") return do_step(request);
  if (cmd == "expert_action") return do_expert();
  if (cmd == "actions") {
    Json names = Json::array();
    for (const auto& a : all_actions(catalog_)) names.push_back(a.name());
    return {{"ok", true}, {"actions", names}};
  }
  if (cmd == "close") {
    closed_ = true;
    return {{"ok", true}};
  }
  throw ProtocolError{"bad_request", "unknown cmd \"" + cmd + "\""};
}

Json Session::do_reset(const Json& request) {
  const std::string id = require_string(request, "episode");
  EpisodeMode mode = options_.default_mode;
  if (request.contains("mode")) {
    try {
      mode = parse_episode_mode(require_string(request, "mode"));
    } catch (const std::invalid_argument& e) {
      throw ProtocolError{"bad_request", e.what()};
    }
  }
  auto episode = dataset_ ? dataset_->find_episode(id) : nullptr;
  if (!episode) throw ProtocolError{"unknown_episode", "no episode \"" + id + "\""};
  const Observation obs = runtime_.reset(episode, mode);
  expert_ = ExpertState{};
  has_episode_ = true;
  current_ = SessionEpisode{};
  current_.episode_id = id;
  current_.mode = mode;
  current_.trajectory_digest = kDigestBasis;
  return {{"ok", true}, {"observation", to_json(obs)}, {"reward", 0.0}, {"done", false}};
}

Json Session::do_step(const Json& request) {
  const std::string name = require_string(request, "action");
  std::optional<std::string> arg;
  if (request.contains("arg") && !request.at("arg").is_null()) arg = require_string(request, "arg");
  Action action;
  try {
    action = parse_action(name, arg, catalog_);
  } catch (const UnknownActionError& e) {
    throw ProtocolError{"unknown_action", e.what()};
  }
  if (!has_episode_ || !runtime_.active()) throw ProtocolError{"no_episode", "no active episode; send reset first"};
  const Stage stage = runtime_.stage();
  const StepResult r = runtime_.step(action);
  (stage == Stage::kWalkthrough ? current_.walkthrough_reward : current_.unshuffle_reward) += r.reward;
  current_.trajectory_digest = fold_step(current_.trajectory_digest, r.info.action, r);
  Json info = {{"stage", std::string(to_string(r.info.stage))},
               {"action", r.info.action},
               {"action_success", r.info.action_success},
               {"stage_changed", r.info.stage_changed},
               {"walkthrough_steps", r.info.walkthrough_steps},
               {"unshuffle_steps", r.info.unshuffle_steps}};
  Json out = {{"ok", true}, {"observation", to_json(r.observation)}, {"reward", r.reward}, {"done", r.done},
              {"info", info}};
  if (r.done) {
    out["metrics"] = to_json(*r.info.metrics);
    current_.metrics = *r.info.metrics;
    current_.walkthrough_steps = r.info.walkthrough_steps;
    current_.unshuffle_steps = r.info.unshuffle_steps;
    has_episode_ = false;
    if (hook_) hook_(current_);
  }
  return out;
}

Json Session::do_expert() {
  if (!options_.allow_expert) throw ProtocolError{"forbidden", "expert actions are disabled on this server"};
  if (!has_episode_ || !runtime_.active()) throw ProtocolError{"no_episode", "no active episode; send reset first"};
  const Action a = expert_action(runtime_, expert_);
  Json out = {{"ok", true}, {"action", a.name()}};
  return out;
}

void serve_stream(Session& session, std::istream& in, std::ostream& out) {
  std::string line;
  while (!session.closed() && std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    out << session.handle(line) << '\n';
    out.flush();
  }
}

}  // namespace rearrange
