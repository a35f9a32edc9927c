#include "raidenv/protocol.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace raidenv {

using nlohmann::json;

std::string_view to_string(EnvMode mode) { return mode == EnvMode::Playtest ? "playtest" : "generate"; }

EnvMode parse_env_mode(std::string_view name) {
  if (name == "playtest") return EnvMode::Playtest;
  if (name == "generate") return EnvMode::Generate;
  throw std::invalid_argument("unknown env mode '" + std::string(name) + "' (playtest|generate)");
}

namespace {

struct ProtocolError {
  std::string code;
  std::string message;
};

json error_response(const std::string& code, const std::string& message) {
  return json{{"ok", false}, {"error", code}, {"message", message}};
}

std::uint64_t read_seed(const json& req) {
  if (!req.contains("seed")) return 0;
  const json& s = req["seed"];
  if (!s.is_number_unsigned()) throw ProtocolError{"malformed", "seed must be a nonnegative integer"};
  return s.get<std::uint64_t>();
}

}  // namespace

EnvSession::EnvSession(ScenarioConfig scenario, SessionOptions options)
    : scenario_(std::move(scenario)), opts_(options) {
  if (opts_.eval_episodes < 1) throw std::invalid_argument("eval_episodes must be >= 1");
  if (opts_.horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  gen_cfg_.bounds = scenario_.param_bounds;
  gen_cfg_.delta = opts_.delta;
  gen_cfg_.horizon = opts_.horizon;
}

std::string EnvSession::handle(std::string_view line) {
  json resp;
  json req;
  try {
    req = json::parse(line);
  } catch (const json::parse_error&) {
    return error_response("malformed", "request is not valid JSON").dump();
  }
  try {
    resp = dispatch(req);
  } catch (const ProtocolError& e) {
    resp = error_response(e.code, e.message);
  } catch (const json::exception& e) {
    resp = error_response("malformed", e.what());
  } catch (const std::exception& e) {
    resp = error_response("runtime", e.what());
  }
  if (req.is_object() && req.contains("id")) resp["id"] = req["id"];
  return resp.dump();
}

json EnvSession::dispatch(const json& req) {
  if (!req.is_object() || !req.contains("cmd") || !req["cmd"].is_string())
    throw ProtocolError{"malformed", "request needs a string field 'cmd'"};
  const std::string cmd = req["cmd"].get<std::string>();

  if (cmd == "close") {
    closed_ = true;
    return json{{"ok", true}, {"cmd", "close"}};
  }
  if (closed_) throw ProtocolError{"closed", "session is closed"};
  if (cmd == "hello") return hello(req);
  if (!greeted_) throw ProtocolError{"handshake_required", "send hello first"};
  if (cmd == "reset") return reset(req);
  if (cmd == "step") return step(req);
  throw ProtocolError{"malformed", "unknown cmd '" + cmd + "'"};
}

json EnvSession::hello(const json& req) {
  if (!req.contains("version") || !req["version"].is_number_integer())
    throw ProtocolError{"malformed", "hello needs an integer 'version'"};
  if (req["version"].get<long long>() != kProtocolVersion) {
    finished_ = true;
    closed_ = true;
    json r = error_response("version_mismatch", "server speaks protocol version 1");
    r["version"] = kProtocolVersion;
    return r;
  }
  greeted_ = true;
  json r{{"ok", true}, {"cmd", "hello"}, {"version", kProtocolVersion}, {"mode", to_string(opts_.mode)}};
  if (opts_.mode == EnvMode::Playtest) {
    r["n_agents"] = scenario_.players.size();
    r["obs_size"] = observation_size(scenario_);
    json counts = json::array();
    for (const ClassSpec& p : scenario_.players) counts.push_back(kLocomotionCount + p.skills.size());
    r["n_actions"] = counts;
  } else {
    r["state_size"] = kGenParamCount;
    r["levels"] = 5;
    r["horizon"] = opts_.horizon;
  }
  return r;
}

json EnvSession::reset(const json& req) {
  const std::uint64_t seed = read_seed(req);
  if (opts_.mode == EnvMode::Playtest) {
    EngineOptions eo;
    combat_.reset();
    combat_.emplace(init_episode(scenario_, seed, eo));
    json r = playtest_payload({});
    r["cmd"] = "reset";
    return r;
  }
  if (!req.contains("target") || !req["target"].is_number())
    throw ProtocolError{"malformed", "generate reset needs a numeric 'target'"};
  const double target = req["target"].get<double>();
  if (!(target >= 0.0 && target <= 1.0)) throw ProtocolError{"malformed", "target must be in [0, 1]"};
  gen_seed_ = seed;
  CounterRng rng(hash_seed({seed}));
  gen_.reset();
  gen_.emplace(gen_env_reset(gen_cfg_, scenario_.players.front().skills.front(), target, rng,
                             [this](const SkillSpec& s, int e) {
                               return evaluate_skill(scenario_, s, opts_.eval_agent, opts_.eval_episodes,
                                                     hash_seed({gen_seed_, static_cast<std::uint64_t>(e)}));
                             }));
  json r = generate_payload(0.0);
  r["cmd"] = "reset";
  return r;
}

json EnvSession::step(const json& req) {
  if (opts_.mode == EnvMode::Playtest) {
    if (!combat_) throw ProtocolError{"not_initialized", "reset before step"};
    CombatState& st = *combat_;
    if (st.done) throw ProtocolError{"episode_done", "episode finished; reset to start another"};
    const int n = st.n_players();
    if (!req.contains("actions") || !req["actions"].is_array() || static_cast<int>(req["actions"].size()) != n)
      throw ProtocolError{"malformed", "step needs 'actions', one integer per player"};
    std::vector<int> actions(n, kStay);
    for (int i = 0; i < n; ++i) {
      const json& a = req["actions"][i];
      if (!a.is_number_integer()) throw ProtocolError{"malformed", "actions must be integers"};
      const long long v = a.get<long long>();
      if (v < 0 || v >= action_count(st, i))
        throw ProtocolError{"malformed", "action " + std::to_string(v) + " out of range for agent " + std::to_string(i)};
      actions[i] = static_cast<int>(v);
    }
    std::vector<Event> events;
    ::raidenv::step(st, actions, events);
    json r = playtest_payload(events);
    r["cmd"] = "step";
    return r;
  }
  if (!gen_) throw ProtocolError{"not_initialized", "reset before step"};
  if (gen_->t >= gen_->horizon) throw ProtocolError{"episode_done", "episode finished; reset to start another"};
  if (!req.contains("action") || !req["action"].is_array() || req["action"].size() != kGenParamCount)
    throw ProtocolError{"malformed", "step needs 'action', four integers in 0..4"};
  std::array<int, kGenParamCount> wire{};
  for (std::size_t i = 0; i < kGenParamCount; ++i) {
    const json& a = req["action"][i];
    if (!a.is_number_integer() || a.get<long long>() < 0 || a.get<long long>() > 4)
      throw ProtocolError{"malformed", "action components must be integers in 0..4"};
    wire[i] = a.get<int>();
  }
  const GenStepResult res =
      gen_env_step(*gen_, decode_gen_action(wire), gen_cfg_, [this](const SkillSpec& s, int e) {
        return evaluate_skill(scenario_, s, opts_.eval_agent, opts_.eval_episodes,
                              hash_seed({gen_seed_, static_cast<std::uint64_t>(e)}));
      });
  json r = generate_payload(res.reward);
  r["cmd"] = "step";
  return r;
}

json EnvSession::playtest_payload(const std::vector<Event>& events) {
  const CombatState& st = *combat_;
  const int n = st.n_players();
  json agents = json::array();
  json obs = json::array();
  for (int i = 0; i < n; ++i) {
    if (!st.chars[i].alive) continue;
    agents.push_back(i);
    obs.push_back(observe(st, i));
  }
  const RewardLedger ledger = compute_rewards(events, n, st.done, st.win, scenario_.reward_coefficients);
  json rewards = json::array();
  for (int i = 0; i < n; ++i) rewards.push_back(ledger.agent_reward(i));
  json info{{"tick", st.tick}, {"win", st.win}, {"boss_hp", st.boss().hp}};
  return json{{"ok", true},      {"agents", agents},           {"obs", obs}, {"rewards", rewards},
              {"group_reward", ledger.group()}, {"done", st.done}, {"info", info}};
}

json EnvSession::generate_payload(double reward) {
  const GenEpisode& ep = *gen_;
  const GenState s = ep.state(gen_cfg_.bounds);
  json info{{"t", ep.t},
            {"win_rate", ep.win_rate},
            {"distance", ep.distance},
            {"evaluations", ep.evaluations},
            {"skill", {{"cool_time", ep.skill.cool_time},
                       {"range", ep.skill.range},
                       {"damage", ep.skill.coefficient},
                       {"cast_time", ep.skill.cast_time}}}};
  return json{{"ok", true},
              {"obs", std::vector<double>(s.begin(), s.end())},
              {"reward", reward},
              {"done", ep.t >= ep.horizon},
              {"info", info}};
}

int serve_stream(EnvSession& session, std::istream& in, std::ostream& out) {
  int count = 0;
  std::string line;
  while (!session.finished() && std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    out << session.handle(line) << '\n';
    out.flush();
    ++count;
  }
  return count;
}

namespace {

void write_all(int fd, const std::string& s) {
  std::size_t off = 0;
  while (off < s.size()) {
    const ssize_t w = ::write(fd, s.data() + off, s.size() - off);
    if (w < 0) {
      if (errno == EINTR) continue;
      throw std::runtime_error(std::string("socket write: ") + std::strerror(errno));
    }
    off += static_cast<std::size_t>(w);
  }
}

struct Fd {
  int fd = -1;
  ~Fd() {
    if (fd >= 0) ::close(fd);
  }
};

}  // namespace

int serve_socket(EnvSession& session, int port) {
  if (port < 1 || port > 65535) throw std::invalid_argument("port must be in 1..65535");
  Fd listener{::socket(AF_INET, SOCK_STREAM, 0)};
  if (listener.fd < 0) throw std::runtime_error(std::string("socket: ") + std::strerror(errno));
  int yes = 1;
  ::setsockopt(listener.fd, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(static_cast<std::uint16_t>(port));
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  if (::bind(listener.fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0)
    throw std::runtime_error(std::string("bind: ") + std::strerror(errno));
  if (::listen(listener.fd, 1) < 0) throw std::runtime_error(std::string("listen: ") + std::strerror(errno));
  Fd client{::accept(listener.fd, nullptr, nullptr)};
  if (client.fd < 0) throw std::runtime_error(std::string("accept: ") + std::strerror(errno));

  int count = 0;
  std::string buf;
  char chunk[4096];
  while (!session.finished()) {
    const ssize_t r = ::read(client.fd, chunk, sizeof chunk);
    if (r < 0) {
      if (errno == EINTR) continue;
      throw std::runtime_error(std::string("socket read: ") + std::strerror(errno));
    }
    if (r == 0) break;
    buf.append(chunk, static_cast<std::size_t>(r));
    std::size_t nl;
    while (!session.finished() && (nl = buf.find('\n')) != std::string::npos) {
      std::string line = buf.substr(0, nl);
      buf.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      write_all(client.fd, session.handle(line) + "\n");
      ++count;
    }
  }
  return count;
}

}  // namespace raidenv
