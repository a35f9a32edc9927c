#include "raidenv/generators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "raidenv/metrics.hpp"
#include "raidenv/parallel.hpp"

namespace raidenv {

GenAction decode_gen_action(const std::array<int, kGenParamCount>& wire) {
  GenAction a;
  for (std::size_t i = 0; i < kGenParamCount; ++i) {
    if (wire[i] < 0 || wire[i] > 4) throw std::invalid_argument("generator action component must be in 0..4");
    a.levels[i] = wire[i] - 2;
  }
  return a;
}

std::array<int, kGenParamCount> encode_gen_action(const GenAction& action) {
  std::array<int, kGenParamCount> w{};
  for (std::size_t i = 0; i < kGenParamCount; ++i) w[i] = action.levels[i] + 2;
  return w;
}

SkillSpec apply_action(const SkillSpec& skill, const GenAction& action, const ParamBounds& bounds, double delta) {
  SkillSpec out = skill;
  for (GenParam p : kGenParams) {
    const int level = action.levels[static_cast<int>(p)];
    if (level < -2 || level > 2) throw std::invalid_argument("generator delta level must be in [-2, 2]");
    if (level == 0) continue;
    const Interval& iv = bounds[p];
    const double v = get_param(skill, p) + level * delta * iv.span();
    set_param(out, p, std::clamp(v, iv.min, iv.max));
  }
  return out;
}

SkillSpec sample_initial_skill(const SkillSpec& base, const ParamBounds& bounds, CounterRng& rng) {
  SkillSpec s = base;
  for (GenParam p : kGenParams) {
    const Interval& iv = bounds[p];
    set_param(s, p, iv.min + rng.uniform01() * iv.span());
  }
  return s;
}

GenEpisode gen_env_reset(const GenConfig& cfg, const SkillSpec& base, double target, CounterRng& rng,
                         const Evaluator& evaluator) {
  if (!(target >= 0.0 && target <= 1.0)) throw std::invalid_argument("target win rate must be in [0, 1]");
  GenEpisode ep;
  ep.target = target;
  ep.horizon = cfg.horizon;
  ep.skill = sample_initial_skill(base, cfg.bounds, rng);
  ep.win_rate = evaluator(ep.skill, 0);
  ep.evaluations = 1;
  ep.distance = std::fabs(target - ep.win_rate);
  return ep;
}

GenStepResult gen_env_step(GenEpisode& ep, const GenAction& action, const GenConfig& cfg, const Evaluator& evaluator) {
  if (ep.t >= ep.horizon) throw std::logic_error("gen_env_step called on a finished episode");
  const double before = ep.distance;
  ep.skill = apply_action(ep.skill, action, cfg.bounds, cfg.delta);
  ep.win_rate = evaluator(ep.skill, cfg.common_random_numbers ? 0 : ep.evaluations);
  ep.evaluations += 1;
  ep.distance = std::fabs(ep.target - ep.win_rate);
  ep.t += 1;
  return {before - ep.distance, ep.t >= ep.horizon};
}

HrStep pcg_hr_step(double w_c, double w_t, const SkillSpec& skill, const ParamBounds& bounds, CounterRng& rng) {
  HrStep r;
  r.selection = static_cast<int>(rng.uniform_int(4));
  r.easier = w_c < w_t;
  const double sign = r.easier ? 1.0 : -1.0;
  r.skill = skill;
  auto nudge = [&](GenParam p, double delta) {
    const Interval& iv = bounds[p];
    set_param(r.skill, p, std::clamp(get_param(skill, p) + delta, iv.min, iv.max));
  };
  switch (r.selection) {
    case 0: nudge(GenParam::Range, sign * 1.5); break;
    case 1: nudge(GenParam::CoolTime, -sign * 10.0); break;
    case 2: nudge(GenParam::CastTime, -sign * 0.33); break;
    default: nudge(GenParam::Damage, sign * 0.33); break;
  }
  return r;
}

SkillSpec pcg_hr_decide(double w_c, double w_t, const SkillSpec& skill, const ParamBounds& bounds, CounterRng& rng) {
  return pcg_hr_step(w_c, w_t, skill, bounds, rng).skill;
}

GenAction pcg_rd_decide(CounterRng& rng) {
  GenAction a;
  for (int& l : a.levels) l = static_cast<int>(rng.uniform_int(5)) - 2;
  return a;
}

std::string_view to_string(GenMethod m) {
  switch (m) {
    case GenMethod::Heuristic: return "heuristic";
    case GenMethod::Random: return "random";
    case GenMethod::External: return "external";
  }
  return "?";
}

GenMethod parse_method(std::string_view name) {
  if (name == "heuristic" || name == "pcg-hr" || name == "hr") return GenMethod::Heuristic;
  if (name == "random" || name == "pcg-rd" || name == "rd") return GenMethod::Random;
  if (name == "external") return GenMethod::External;
  throw std::invalid_argument("unknown generator method '" + std::string(name) + "' (heuristic|random|external)");
}

GeneratedSkill generate_one(GenMethod method, double target, const GenConfig& cfg, const SkillSpec& base,
                            CounterRng& rng, const Evaluator& eval, const ExternalGenPolicy& external) {
  GeneratedSkill g;
  g.target = target;
  if (method == GenMethod::Random) {
    // random actions ignore feedback, so only the final skill is evaluated (by the caller)
    SkillSpec s = sample_initial_skill(base, cfg.bounds, rng);
    for (int t = 0; t < cfg.horizon; ++t) s = apply_action(s, pcg_rd_decide(rng), cfg.bounds, cfg.delta);
    g.skill = s;
  } else if (method == GenMethod::Heuristic) {
    SkillSpec s = sample_initial_skill(base, cfg.bounds, rng);
    double w = eval(s, 0);
    int n_eval = 1;
    for (int t = 0; t < cfg.horizon; ++t) {
      s = pcg_hr_decide(w, target, s, cfg.bounds, rng);
      w = eval(s, cfg.common_random_numbers ? 0 : n_eval);
      ++n_eval;
    }
    g.skill = s;
    g.last_win_rate = w;
    g.evaluations = n_eval;
  } else {
    if (!external) throw std::invalid_argument("external method needs a policy");
    GenEpisode ep = gen_env_reset(cfg, base, target, rng, eval);
    while (ep.t < ep.horizon) gen_env_step(ep, external(ep.state(cfg.bounds), target, ep.win_rate, ep.t), cfg, eval);
    g.skill = ep.skill;
    g.last_win_rate = ep.win_rate;
    g.evaluations = ep.evaluations;
  }
  return g;
}

std::vector<GeneratedSkill> sample_skills(GenMethod method, double target, int count, const GenConfig& cfg,
                                          const SkillSpec& base, const std::function<CounterRng(int)>& rng_for,
                                          const std::function<Evaluator(int)>& evaluator_for,
                                          const ExternalGenPolicy& external, int workers) {
  if (count < 1) throw std::invalid_argument("sample_skills: count must be >= 1");
  if (method == GenMethod::External && !external) throw std::invalid_argument("external method needs a policy");
  std::vector<GeneratedSkill> out(count);
  parallel_for(static_cast<std::size_t>(count), workers, [&](std::size_t i) {
    const int sample = static_cast<int>(i);
    CounterRng rng = rng_for(sample);
    const Evaluator eval = method == GenMethod::Random ? Evaluator{} : evaluator_for(sample);
    out[i] = generate_one(method, target, cfg, base, rng, eval, external);
  });
  return out;
}

double evaluate_skill(const ScenarioConfig& scenario, const SkillSpec& skill, AgentKind agent, int episodes,
                      std::uint64_t base_seed) {
  ScenarioConfig sc = scenario;
  apply_player_skill(sc, skill);
  return estimate_win_rate(sc, agent, episodes, base_seed).mean;
}

}  // namespace raidenv
