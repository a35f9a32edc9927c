#pragma once

#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

namespace raidenv {

// ---------------------------------------------------------------------------
// Validation results
// ---------------------------------------------------------------------------

enum class ErrorKind { OutOfRange, UnknownField, InvalidEnum, InvalidType, MissingField, ParseError, Empty };

std::string_view to_string(ErrorKind kind);

struct ContentError {
  ErrorKind kind;
  std::string path;     // dotted path, e.g. "players[1].skills[0].range"
  std::string message;
};

// Either a valid record or a nonempty list of errors, never both.
template <typename T>
class Validated {
 public:
  Validated(T value) : state_(std::move(value)) {}
  Validated(std::vector<ContentError> errors) : state_(std::move(errors)) {
    if (std::get<1>(state_).empty()) throw std::logic_error("Validated: empty error list");
  }

  bool ok() const { return state_.index() == 0; }
  explicit operator bool() const { return ok(); }

  const T& value() const& { return std::get<0>(state_); }
  T&& value() && { return std::get<0>(std::move(state_)); }
  const std::vector<ContentError>& errors() const { return std::get<1>(state_); }

 private:
  std::variant<T, std::vector<ContentError>> state_;
};

// Thrown by loaders that cannot return a Validated (e.g. CLI paths).
class ContentException : public std::runtime_error {
 public:
  explicit ContentException(std::vector<ContentError> errors);
  const std::vector<ContentError>& errors() const { return errors_; }

 private:
  std::vector<ContentError> errors_;
};

std::string format_errors(const std::vector<ContentError>& errors);

// ---------------------------------------------------------------------------
// Character statistics
// ---------------------------------------------------------------------------

/// The 17 character statistics. Integer-typed stats are stored as int.
/// The combat engine reads health_point, mana_point, spell_power,
/// attack_power, movement_speed, armor, evasion, parry and critical; the rest
/// are carried for content authoring.
struct StatBlock {
  int health_point = 100;
  int mana_point = 100;
  int spell_power = 50;
  double movement_speed = 2.0;
  int attack_power = 10;
  int attack_range = 1;
  double attack_speed = 1.0;
  int armor = 0;
  int evasion = 0;
  double parry = 0.0;
  int strength = 10;
  int agility = 10;
  int intelligence = 10;
  int critical = 0;
  int haste = 0;
  int versatility = 0;
  int mastery = 0;

  bool operator==(const StatBlock&) const = default;
};

inline constexpr std::size_t kStatCount = 17;

// ---------------------------------------------------------------------------
// Skills
// ---------------------------------------------------------------------------

enum class TriggerType { Active, Passive };
enum class HitType { Melee, Skill };
enum class TargetType { Target, NonTarget, Region };

/// The 17 skill parameters.
struct SkillSpec {
  std::string name = "skill";
  TriggerType trigger_type = TriggerType::Active;
  int magic_school = 0;
  HitType hit_type = HitType::Skill;
  TargetType target_type = TargetType::Target;
  double projectile_speed = 0.0;
  bool affect_ally = false;
  bool affect_enemy = true;
  double cool_time = 3.0;
  double cast_time = 1.0;
  double cost = 0.0;
  double range = 10.0;
  int charge = 1;
  bool cast_on_moving = false;
  bool cast_on_casting = false;
  bool cast_on_channeling = false;
  double coefficient = 0.75;

  bool operator==(const SkillSpec&) const = default;
};

inline constexpr std::size_t kSkillParamCount = 17;

struct ClassSpec {
  StatBlock stats;
  std::vector<SkillSpec> skills;  // 1..3

  bool operator==(const ClassSpec&) const = default;
};

// ---------------------------------------------------------------------------
// Generated parameters and their bounds
// ---------------------------------------------------------------------------

/// The four balanced skill parameters in generator-state order.
enum class GenParam : int { CoolTime = 0, Range = 1, Damage = 2, CastTime = 3 };
inline constexpr std::size_t kGenParamCount = 4;
inline constexpr std::array<GenParam, 4> kGenParams{GenParam::CoolTime, GenParam::Range, GenParam::Damage,
                                                    GenParam::CastTime};

std::string_view to_string(GenParam p);
double get_param(const SkillSpec& skill, GenParam p);
void set_param(SkillSpec& skill, GenParam p, double value);

struct Interval {
  double min = 0.0;
  double max = 1.0;
  double span() const { return max - min; }
  bool contains(double v) const { return v >= min && v <= max; }
  bool operator==(const Interval&) const = default;
};

struct ParamBounds {
  std::array<Interval, kGenParamCount> bounds{{{0.5, 60.0}, {1.0, 20.0}, {0.5, 1.0}, {0.5, 1.5}}};

  const Interval& operator[](GenParam p) const { return bounds[static_cast<int>(p)]; }
  Interval& operator[](GenParam p) { return bounds[static_cast<int>(p)]; }
  bool operator==(const ParamBounds&) const = default;
};

using GenState = std::array<double, kGenParamCount>;

class BoundsError : public std::domain_error {
 public:
  BoundsError(GenParam param, double value, const std::string& what)
      : std::domain_error(what), param_(param), value_(value) {}
  GenParam param() const { return param_; }
  double value() const { return value_; }

 private:
  GenParam param_;
  double value_;
};

/// Min-max scales the four generated parameters into [0,1]. A zero-span
/// interval scales to 0. Throws BoundsError when a value lies outside bounds.
GenState scale_params(const SkillSpec& skill, const ParamBounds& bounds);

/// Inverse of scale_params. Throws BoundsError for components outside [0,1].
std::array<double, kGenParamCount> unscale_params(const GenState& state, const ParamBounds& bounds);

// ---------------------------------------------------------------------------
// Scenario
// ---------------------------------------------------------------------------

/// Reward coefficients. Each must be a whole number of thousandths so that
/// reward accounting stays exact (see RewardUnits).
struct RewardCoefficients {
  double damage = 0.01;
  double back_attack = 0.012;
  double group_win = 1.0;
  bool operator==(const RewardCoefficients&) const = default;
};

enum class OrbitMode { PerTick, PerEpisode };

struct ScenarioConfig {
  std::string name = "scenario";
  double arena_radius = 20.0;
  double tick_dt = 0.05;
  double episode_time_limit = 60.0;
  double turn_rate_deg = 120.0;
  double rear_half_angle_deg = 60.0;
  ClassSpec boss;
  double boss_hp_multiplier = 10.0;
  std::vector<ClassSpec> players;
  // Skill parameter name -> values drawn uniformly at episode reset.
  std::map<std::string, std::vector<double>> content_sampling;
  RewardCoefficients reward_coefficients;
  ParamBounds param_bounds;
  OrbitMode orbit_mode = OrbitMode::PerTick;

  /// Boss effective HP: first player's health_point times the multiplier.
  double boss_max_hp() const;
  int max_ticks() const;
  bool operator==(const ScenarioConfig&) const = default;
};

// ---------------------------------------------------------------------------
// Validation and loading
// ---------------------------------------------------------------------------

Validated<StatBlock> validate_stat_block(const nlohmann::json& raw, const std::string& path = "stats");
Validated<SkillSpec> validate_skill(const nlohmann::json& raw, const std::string& path = "skill");
Validated<ParamBounds> validate_param_bounds(const nlohmann::json& raw, const std::string& path = "param_bounds");

/// Range-checks an already-typed skill (used on generated content).
std::vector<ContentError> check_skill(const SkillSpec& skill, const std::string& path = "skill");

/// Parses and fully validates a scenario document (JSON, schema_version 1).
Validated<ScenarioConfig> load_scenario(std::string_view document);
ScenarioConfig load_scenario_or_throw(std::string_view document);
ScenarioConfig load_scenario_file(const std::string& path);

nlohmann::json to_json(const StatBlock& stats);
nlohmann::json to_json(const SkillSpec& skill);
nlohmann::json to_json(const ScenarioConfig& scenario);

/// The bundled benchmark scenario document (3 identical players, one skill each).
std::string_view benchmark_default_document();
const ScenarioConfig& benchmark_default();

/// Applies one value to the named parameter of every player skill.
/// Accepted names: cool_time, range, cast_time, coefficient (alias damage), cost, projectile_speed.
void apply_player_param(ScenarioConfig& scenario, std::string_view param, double value);
void apply_player_skill(ScenarioConfig& scenario, const SkillSpec& skill);
bool is_samplable_param(std::string_view param);

}  // namespace raidenv
