#include <CLI11.hpp>

#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <thread>

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "rearrange/harness.hpp"

namespace fs = std::filesystem;
using namespace rearrange;

namespace {

constexpr int kExitIo = 2;
constexpr int kExitFlags = 3;

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

void configure_logging() {
  spdlog::set_default_logger(spdlog::stderr_logger_mt("rearrange"));
  spdlog::set_level(spdlog::level::warn);
  if (const char* level = std::getenv("REARRANGE_LOG")) spdlog::set_level(spdlog::level::from_str(level));
}

fs::path summary_path(const fs::path& csv) {
  fs::path p = csv;
  return p.replace_extension(".summary.json");
}

struct GenerateArgs {
  int rooms_per_category = 30;
  int episodes_per_room = 50;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_generate(const GenerateArgs& a) {
  if (a.rooms_per_category < 1 || a.episodes_per_room < 1) {
    std::cerr << "error: --rooms-per-category and --episodes-per-room must be positive\n";
    return kExitFlags;
  }
  DatasetConfig cfg{a.rooms_per_category, a.episodes_per_room, a.seed};
  spdlog::info("generating {} rooms per category, {} episodes per room, seed {}", cfg.rooms_per_category,
               cfg.episodes_per_room, cfg.master_seed);
  const DatasetFile ds = build_dataset(cfg);
  const std::string text = dataset_to_json(ds);
  try {
    write_file(a.out, text);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  std::cout << "rooms " << ds.rooms.size() << "\n";
  for (Split s : kSplits) std::cout << to_string(s) << " " << ds.split_size(s) << "\n";
  std::cout << "digest " << hex64(fnv1a64(text)) << "\n";
  return 0;
}

struct RunArgs {
  std::string dataset;
  std::string split = "val";
  std::string agent = "expert";
  std::string agent_cmd;
  std::string mode = "two-phase";
  int limit = 0;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_run(const RunArgs& a) {
  Split split;
  RunOptions opts;
  try {
    split = parse_split(a.split);
    opts.mode = parse_episode_mode(a.mode);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFlags;
  }
  if (a.agent == "extern" && a.agent_cmd.empty()) {
    std::cerr << "error: --agent extern needs --agent-cmd\n";
    return kExitFlags;
  }
  opts.policy_seed = a.seed;
  std::shared_ptr<const DatasetFile> ds;
  try {
    ds = std::make_shared<const DatasetFile>(load_dataset(a.dataset));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  const auto episodes = select_episodes(*ds, split, a.limit);
  spdlog::info("running {} on {} {} episodes", a.agent, episodes.size(), to_string(split));
  std::vector<ResultRow> rows;
  if (a.agent == "extern") {
    rows = run_extern(ds, episodes, a.agent_cmd, opts);
  } else {
    std::unique_ptr<Agent> agent;
    try {
      agent = make_agent(a.agent);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitFlags;
    }
    rows = run_agent(episodes, *agent, opts);
  }
  for (const auto& r : rows) {
    if (r.failed) spdlog::warn("{} failed: {}", r.episode_id, r.error);
  }
  const Json summary = to_json(aggregate(rows));
  try {
    if (!a.out.empty()) {
      write_file(a.out, to_csv(rows));
      write_file(summary_path(a.out), summary.dump(2) + "\n");
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int cmd_eval(const std::string& csv) {
  std::vector<ResultRow> rows;
  try {
    rows = parse_csv(read_file(csv));
  } catch (const DatasetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << csv << ": " << e.what() << "\n";
    return kExitFlags;
  }
  std::cout << to_json(aggregate(rows)).dump(2) << "\n";
  return 0;
}

bool write_all(int fd, const std::string& s) {
  std::size_t off = 0;
  while (off < s.size()) {
    const ssize_t n = ::send(fd, s.data() + off, s.size() - off, MSG_NOSIGNAL);
    if (n <= 0) return false;
    off += static_cast<std::size_t>(n);
  }
  return true;
}

void serve_connection(int fd, std::shared_ptr<const DatasetFile> ds, ProtocolOptions opts) {
  Session session(ds, opts);
  std::string buffer;
  char chunk[4096];
  while (!session.closed()) {
    const ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
    if (n <= 0) break;
    buffer.append(chunk, static_cast<std::size_t>(n));
    std::size_t nl;
    while (!session.closed() && (nl = buffer.find('\n')) != std::string::npos) {
      std::string line = buffer.substr(0, nl);
      buffer.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      if (!write_all(fd, session.handle(line) + "\n")) {
        ::close(fd);
        return;
      }
    }
  }
  ::close(fd);
}

int serve_tcp(int port, std::shared_ptr<const DatasetFile> ds, const ProtocolOptions& opts) {
  const int srv = ::socket(AF_INET, SOCK_STREAM, 0);
  if (srv < 0) {
    std::perror("socket");
    return kExitIo;
  }
  const int one = 1;
  ::setsockopt(srv, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(static_cast<std::uint16_t>(port));
  if (::bind(srv, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(srv, 16) != 0) {
    std::perror("bind");
    ::close(srv);
    return kExitIo;
  }
  spdlog::info("listening on 127.0.0.1:{}", port);
  for (;;) {
    const int fd = ::accept(srv, nullptr, nullptr);
    if (fd < 0) continue;
    std::thread(serve_connection, fd, ds, opts).detach();
  }
}

struct ServeArgs {
  std::string dataset;
  std::string mode = "two-phase";
  std::string transport = "stdio";
  bool allow_expert = false;
};

int cmd_serve(const ServeArgs& a) {
  ProtocolOptions opts;
  opts.allow_expert = a.allow_expert;
  int port = -1;
  try {
    opts.default_mode = parse_episode_mode(a.mode);
    if (a.transport.rfind("tcp:", 0) == 0) {
      port = std::stoi(a.transport.substr(4));
      if (port < 0 || port > 65535) throw std::invalid_argument("port out of range");
    } else if (a.transport != "stdio") {
      throw std::invalid_argument("unknown transport " + a.transport);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFlags;
  }
  std::shared_ptr<const DatasetFile> ds;
  try {
    ds = std::make_shared<const DatasetFile>(load_dataset(a.dataset));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  if (port >= 0) return serve_tcp(port, ds, opts);
  std::ios::sync_with_stdio(false);
  Session session(ds, opts);
  serve_stream(session, std::cin, std::cout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();
  CLI::App app{"Room rearrangement simulator and evaluation harness"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Generate a dataset of rooms and episodes");
  g->add_option("--rooms-per-category", gen.rooms_per_category, "Rooms per room category")->capture_default_str();
  g->add_option("--episodes-per-room", gen.episodes_per_room, "Episodes per room")->capture_default_str();
  g->add_option("--seed", gen.seed, "Master seed")->capture_default_str();
  g->add_option("--out", gen.out, "Output path (.json or .json.gz)")->required();

  RunArgs run;
  auto* r = app.add_subcommand("run", "Evaluate an agent on a dataset split");
  r->add_option("--dataset", run.dataset)->required();
  r->add_option("--split", run.split)->check(CLI::IsMember({"train", "val", "test"}))->capture_default_str();
  r->add_option("--agent", run.agent)
      ->check(CLI::IsMember({"noop", "random", "expert", "extern"}))
      ->capture_default_str();
  r->add_option("--agent-cmd", run.agent_cmd, "Shell command speaking the wire protocol (extern agent)");
  r->add_option("--mode", run.mode)->capture_default_str();
  r->add_option("--limit", run.limit, "Episodes per room, 0 for all")->check(CLI::NonNegativeNumber);
  r->add_option("--seed", run.seed, "Policy seed")->capture_default_str();
  r->add_option("--out", run.out, "CSV path; the summary goes next to it");

  std::string eval_csv;
  auto* e = app.add_subcommand("eval", "Recompute the aggregate from a results CSV");
  e->add_option("csv", eval_csv)->required();

  ServeArgs serve;
  auto* s = app.add_subcommand("serve", "Serve the wire protocol");
  s->add_option("--dataset", serve.dataset)->required();
  s->add_option("--mode", serve.mode, "Default episode mode")->capture_default_str();
  s->add_option("--transport", serve.transport, "stdio or tcp:PORT")->capture_default_str();
  s->add_flag("--allow-expert", serve.allow_expert, "Enable the expert_action command");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::CallForAllHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::ParseError& ex) {
    app.exit(ex);
    return kExitFlags;
  }

  try {
    if (*g) return cmd_generate(gen);
    if (*r) return cmd_run(run);
    if (*e) return cmd_eval(eval_csv);
    if (*s) return cmd_serve(serve);
  } catch (const std::exception& ex) {
    spdlog::error("{}", ex.what());
    return 1;
  }
  return 0;
}
