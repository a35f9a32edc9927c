#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "raidenv/agents.hpp"
#include "raidenv/content.hpp"
#include "raidenv/rng.hpp"

namespace raidenv {

inline constexpr double kDefaultDelta = 0.0008;
inline constexpr int kDefaultHorizon = 50;

// One delta level per parameter in GenState order, each in [-2, 2].
struct GenAction {
  std::array<int, kGenParamCount> levels{};
  bool operator==(const GenAction&) const = default;
};

// Wire encoding 0..4 maps to levels -2..2.
GenAction decode_gen_action(const std::array<int, kGenParamCount>& wire);
std::array<int, kGenParamCount> encode_gen_action(const GenAction& action);

// Adds level * delta * span to each generated parameter and clamps to bounds.
SkillSpec apply_action(const SkillSpec& skill, const GenAction& action, const ParamBounds& bounds,
                       double delta = kDefaultDelta);

// Evaluates a skill: returns W_c for the given evaluation index.
using Evaluator = std::function<double(const SkillSpec& skill, int eval_index)>;

struct GenConfig {
  ParamBounds bounds;
  double delta = kDefaultDelta;
  int horizon = kDefaultHorizon;
  bool common_random_numbers = false;  // every evaluation reuses eval index 0
};

struct GenEpisode {
  double target = 0.0;
  SkillSpec skill;
  double win_rate = 0.0;  // p_t
  double distance = 0.0;  // l_t = |g - p_t|
  int t = 0;
  int horizon = kDefaultHorizon;
  int evaluations = 0;

  GenState state(const ParamBounds& bounds) const { return scale_params(skill, bounds); }
};

// Draws the four generated parameters uniformly within bounds (other fields from `base`).
SkillSpec sample_initial_skill(const SkillSpec& base, const ParamBounds& bounds, CounterRng& rng);

GenEpisode gen_env_reset(const GenConfig& cfg, const SkillSpec& base, double target, CounterRng& rng,
                         const Evaluator& evaluator);

struct GenStepResult {
  double reward = 0.0;
  bool done = false;
};

GenStepResult gen_env_step(GenEpisode& ep, const GenAction& action, const GenConfig& cfg, const Evaluator& evaluator);

// Heuristic generator: nudges one random parameter toward easier content when
// the measured win rate is below target, toward harder content otherwise.
struct HrStep {
  int selection = 0;  // 0 range, 1 cool_time, 2 cast_time, 3 damage
  bool easier = false;
  SkillSpec skill;
};
HrStep pcg_hr_step(double w_c, double w_t, const SkillSpec& skill, const ParamBounds& bounds, CounterRng& rng);
SkillSpec pcg_hr_decide(double w_c, double w_t, const SkillSpec& skill, const ParamBounds& bounds, CounterRng& rng);

GenAction pcg_rd_decide(CounterRng& rng);

enum class GenMethod { Heuristic, Random, External };
std::string_view to_string(GenMethod m);
GenMethod parse_method(std::string_view name);

// External policies see the scaled state, target and current estimate.
using ExternalGenPolicy =
    std::function<GenAction(const GenState& state, double target, double win_rate, int t)>;

struct GeneratedSkill {
  SkillSpec skill;
  double target = 0.0;
  std::optional<double> last_win_rate;  // in-loop estimate of the final skill, when measured
  int evaluations = 0;
};

// One rollout from a fresh initial skill. Random rollouts never call `eval`.
GeneratedSkill generate_one(GenMethod method, double target, const GenConfig& cfg, const SkillSpec& base,
                            CounterRng& rng, const Evaluator& eval, const ExternalGenPolicy& external = {});

// Runs one generator rollout per sample. Sample i draws its decisions from
// rng_for(i) and evaluates through evaluator_for(i).
std::vector<GeneratedSkill> sample_skills(GenMethod method, double target, int count, const GenConfig& cfg,
                                          const SkillSpec& base,
                                          const std::function<CounterRng(int sample)>& rng_for,
                                          const std::function<Evaluator(int sample)>& evaluator_for,
                                          const ExternalGenPolicy& external = {}, int workers = 1);

// Win rate of `skill` applied to every player of `scenario`.
double evaluate_skill(const ScenarioConfig& scenario, const SkillSpec& skill, AgentKind agent, int episodes,
                      std::uint64_t base_seed);

}  // namespace raidenv
