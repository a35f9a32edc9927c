#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "raidenv/agents.hpp"
#include "raidenv/combat.hpp"
#include "raidenv/content.hpp"
#include "raidenv/generators.hpp"

namespace raidenv {

// Newline-delimited JSON environment protocol, see docs/protocol.md.
inline constexpr int kProtocolVersion = 1;

enum class EnvMode { Playtest, Generate };
std::string_view to_string(EnvMode mode);
EnvMode parse_env_mode(std::string_view name);

struct SessionOptions {
  EnvMode mode = EnvMode::Playtest;
  // generate mode: the evaluator plays eval_episodes with eval_agent per step
  int eval_episodes = 100;
  AgentKind eval_agent = AgentKind::Heuristic;
  double delta = kDefaultDelta;
  int horizon = kDefaultHorizon;
};

class EnvSession {
 public:
  EnvSession(ScenarioConfig scenario, SessionOptions options);

  // One request line in, one response line out (without the newline).
  std::string handle(std::string_view line);

  bool finished() const { return finished_; }  // refused at handshake
  bool closed() const { return closed_; }

 private:
  nlohmann::json dispatch(const nlohmann::json& req);
  nlohmann::json hello(const nlohmann::json& req);
  nlohmann::json reset(const nlohmann::json& req);
  nlohmann::json step(const nlohmann::json& req);
  nlohmann::json playtest_payload(const std::vector<Event>& events);
  nlohmann::json generate_payload(double reward);

  ScenarioConfig scenario_;
  SessionOptions opts_;
  bool greeted_ = false;
  bool finished_ = false;
  bool closed_ = false;

  std::optional<CombatState> combat_;
  std::optional<GenEpisode> gen_;
  GenConfig gen_cfg_;
  std::uint64_t gen_seed_ = 0;
};

// Serves requests from `in` until EOF or a refused handshake. Returns the number of requests.
int serve_stream(EnvSession& session, std::istream& in, std::ostream& out);

// Accepts one TCP client on 127.0.0.1:port and serves it. Throws on socket errors.
int serve_socket(EnvSession& session, int port);

}  // namespace raidenv
