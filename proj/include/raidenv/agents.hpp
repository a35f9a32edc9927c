#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "raidenv/combat.hpp"

namespace raidenv {

// ---------------------------------------------------------------------------
// Observations (layout in docs/observation_spec.md)
// ---------------------------------------------------------------------------

inline constexpr int kProjectileSlots = 8;
inline constexpr int kEntityBlock = 9 + kMaxSkills;  // alive, x, y, vx, vy, cos, sin, hp, cast, cooldowns
inline constexpr int kProjectileBlock = 4;           // dx, dy, speed, live
inline constexpr int kSkillBlock = 3;                // range, coefficient, cast_time (scaled)

int observation_size(const ScenarioConfig& scenario);

class DeadAgent : public std::runtime_error {
 public:
  explicit DeadAgent(int id) : std::runtime_error("DeadAgent(" + std::to_string(id) + ")"), id_(id) {}
  int id() const { return id_; }

 private:
  int id_;
};

std::vector<double> observe(const CombatState& state, int agent);
void observe_into(const CombatState& state, int agent, std::vector<double>& out);

// ---------------------------------------------------------------------------
// Playtesting policies
// ---------------------------------------------------------------------------

int action_count(const CombatState& state, int agent);

// Heuristic playtester: hold the maximum skill range, circle the boss, attack
// whenever a skill is usable.
int pt_hr_decide(const CombatState& state, int agent, CounterRng& rng);

// Uniform over all 7 + n_skills actions.
int pt_rd_decide(CounterRng& rng, int action_count);

enum class AgentKind { Heuristic, Random };
std::string_view to_string(AgentKind kind);
AgentKind parse_agent(std::string_view name);

Policy make_policy(AgentKind kind);
std::vector<Policy> make_policies(AgentKind kind, std::size_t n_players);

// ---------------------------------------------------------------------------
// Rewards
// ---------------------------------------------------------------------------

// Rewards are counted in integer units of 1 / (1024 * 1000): damage lies on a
// 1/1024 grid and coefficients are whole thousandths, so sums are exact.
inline constexpr std::int64_t kRewardUnitsPerPoint = 1024 * 1000;
using RewardUnits = std::int64_t;

inline double to_reward(RewardUnits u) { return static_cast<double>(u) / static_cast<double>(kRewardUnitsPerPoint); }

// Reward for `damage` at coefficient `coeff` (thousandths), exactly.
RewardUnits reward_units(double damage, double coeff);

struct RewardLedger {
  std::vector<RewardUnits> damage_reward;       // per player, normal hits
  std::vector<RewardUnits> back_attack_reward;  // per player, back-attack hits
  RewardUnits group_reward = 0;

  double agent_reward(int agent) const { return to_reward(damage_reward[agent] + back_attack_reward[agent]); }
  double group() const { return to_reward(group_reward); }
  void add(const RewardLedger& other);
};

RewardLedger compute_rewards(const std::vector<Event>& events, int n_players, bool done, bool win,
                             const RewardCoefficients& coeffs = {});

}  // namespace raidenv
