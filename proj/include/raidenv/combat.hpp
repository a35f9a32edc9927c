#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "raidenv/content.hpp"
#include "raidenv/rng.hpp"

namespace raidenv {

// Action codes: 0..6 locomotion, 7 + k executes owned skill k.
enum Locomotion : int {
  kStay = 0,
  kMoveForward = 1,
  kMoveBackward = 2,
  kTurnRight = 3,
  kTurnLeft = 4,
  kMoveLeft = 5,
  kMoveRight = 6,
};
inline constexpr int kLocomotionCount = 7;
inline constexpr int kMaxSkills = 3;

constexpr int execute_skill(int k) { return kLocomotionCount + k; }
constexpr bool is_execute(int action) { return action >= kLocomotionCount; }
constexpr int skill_of(int action) { return action - kLocomotionCount; }

std::string action_name(int action);

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

struct Character {
  int id = 0;
  bool is_boss = false;
  Vec2 pos;
  Vec2 vel;
  double facing = 0.0;  // radians
  Vec2 dir{1.0, 0.0};   // (cos facing, sin facing)
  double hp = 0.0;
  double max_hp = 0.0;
  double mp = 0.0;
  double max_mp = 0.0;
  bool alive = true;
  bool moving = false;
  int n_skills = 0;
  std::array<double, kMaxSkills> cooldown{};
  std::array<int, kMaxSkills> charges{};
  // Active cast; cast_skill < 0 when idle.
  int cast_skill = -1;
  int cast_target = -1;
  double cast_remaining = 0.0;
  bool cast_fresh = false;
  double damage_dealt = 0.0;        // all applied damage
  double back_attack_damage = 0.0;  // the back-attack part of damage_dealt

  bool casting() const { return cast_skill >= 0; }
};

struct Projectile {
  int id = 0;
  int source = 0;
  int target = 0;
  int skill = 0;
  Vec2 pos;
  double speed = 0.0;
  int spawn_tick = 0;
};

enum class EventKind : int {
  Move,
  CastStart,
  CastComplete,
  CastCancel,
  ProjectileSpawn,
  Hit,
  BackAttackHit,
  Death,
  RejectedAction,
  EpisodeEnd,
};

std::string_view to_string(EventKind kind);

enum class RejectReason : int {
  None,
  NoSuchSkill,
  Unsupported,
  Cooldown,
  Casting,
  Moving,
  Mana,
  OutOfRange,
  NoTarget,
};

std::string_view to_string(RejectReason reason);

struct Event {
  int tick = 0;
  EventKind kind = EventKind::Move;
  int agent = -1;
  int target = -1;
  int skill = -1;
  double amount = 0.0;  // damage for hits, remaining hp for deaths
  double x = 0.0;
  double y = 0.0;
  bool crit = false;
  bool evaded = false;
  bool parried = false;
  bool win = false;
  int projectile = -1;
  RejectReason reason = RejectReason::None;
};

struct TracePoint {
  int tick;
  int agent;
  double x;
  double y;
};

struct EngineOptions {
  bool record_moves = true;   // emit move events
  bool record_trace = false;  // record living player positions per tick
};

// Everything resolved for one episode: sampled content applied, boss last.
struct CombatState {
  const ScenarioConfig* scenario = nullptr;
  std::vector<ClassSpec> classes;  // index = character id
  std::vector<Character> chars;    // players 0..n-1, boss n
  std::vector<Projectile> projectiles;
  std::map<std::string, double> sampled;  // content_sampling draws
  int tick = 0;
  int max_ticks = 0;
  int next_projectile_id = 0;
  bool done = false;
  bool win = false;
  CounterRng combat_rng;
  CounterRng policy_rng;
  std::uint64_t seed = 0;
  EngineOptions options;
  std::vector<TracePoint> trace;
  // cached from the scenario
  double turn_step = 0.0;      // radians per tick
  double cos_half_turn = 1.0;  // facing tolerance
  double cos_rear = 0.5;       // rear-cone boundary

  int n_players() const { return static_cast<int>(chars.size()) - 1; }
  int boss_id() const { return n_players(); }
  Character& boss() { return chars.back(); }
  const Character& boss() const { return chars.back(); }
  const SkillSpec& skill(int agent, int k) const { return classes[agent].skills[k]; }
};

struct DamageRoll {
  double damage = 0.0;
  bool evaded = false;
  bool parried = false;
  bool crit = false;
};

// Damage is quantized to multiples of 1/1024 HP so ledgers reconcile exactly.
inline constexpr double kDamageQuantum = 1.0 / 1024.0;
double quantize_damage(double raw);

// Draws exactly three uniforms in the order evasion, parry, crit.
DamageRoll compute_damage(const StatBlock& attacker, const SkillSpec& skill, const StatBlock& defender,
                          CounterRng& rng);

bool is_back_attack(Vec2 attacker, Vec2 boss, Vec2 boss_dir, double rear_half_angle_deg = 60.0);

struct BossDecision {
  int action = kStay;
  int target = -1;
};

BossDecision boss_policy(const CombatState& state);

CombatState init_episode(const ScenarioConfig& scenario, std::uint64_t seed, EngineOptions options = {});

struct StepResult {
  bool done = false;
  bool win = false;
};

// Advances one tick. `actions` holds one code per player (ignored for dead
// players). `events` is cleared and refilled with this tick's events.
StepResult step(CombatState& state, const std::vector<int>& actions, std::vector<Event>& events);

// A player policy: chooses an action for `agent` given the state.
using Policy = std::function<int(const CombatState&, int agent, CounterRng& rng)>;

struct EpisodeOutcome {
  bool win = false;
  int duration_ticks = 0;
  double boss_max_hp = 0.0;
  double boss_final_hp = 0.0;
  std::vector<double> damage_by_agent;
  std::vector<double> back_attack_damage_by_agent;
  std::vector<TracePoint> position_trace;
};

struct EpisodeLog {
  std::vector<Event> events;
  EpisodeOutcome outcome;
};

struct RunOptions {
  EngineOptions engine{};
  bool keep_events = true;
};

// One policy per player.
EpisodeLog run_episode(const ScenarioConfig& scenario, const std::vector<Policy>& policies, std::uint64_t seed,
                       RunOptions options = {});

// Newline-delimited JSON, one event per line, fixed field order.
std::string export_log(const std::vector<Event>& events);
std::string event_line(const Event& e);
std::string sha256_hex(std::string_view bytes);
std::string log_hash(const std::vector<Event>& events);

}  // namespace raidenv
