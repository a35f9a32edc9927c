#include "raidenv/agents.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace raidenv {

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }
double clamp11(double v) { return std::clamp(v, -1.0, 1.0); }

bool usable(const SkillSpec& s) {
  return s.trigger_type == TriggerType::Active && s.target_type == TargetType::Target && s.affect_enemy;
}

double scaled(double v, const Interval& iv) { return iv.span() > 0.0 ? clamp01((v - iv.min) / iv.span()) : 0.0; }

void entity_block(const CombatState& st, const Character& self, const Character& c, bool is_self, double* out) {
  const double r = st.scenario->arena_radius;
  if (!c.alive) {
    std::fill(out, out + kEntityBlock, 0.0);
    return;
  }
  out[0] = 1.0;
  if (is_self) {
    out[1] = clamp11(c.pos.x / r);
    out[2] = clamp11(c.pos.y / r);
  } else {
    out[1] = clamp11((c.pos.x - self.pos.x) / (2.0 * r));
    out[2] = clamp11((c.pos.y - self.pos.y) / (2.0 * r));
  }
  out[3] = clamp11(c.vel.x / 2.0);
  out[4] = clamp11(c.vel.y / 2.0);
  out[5] = c.dir.x;
  out[6] = c.dir.y;
  out[7] = c.max_hp > 0.0 ? clamp01(c.hp / c.max_hp) : 0.0;
  const auto& skills = st.classes[c.id].skills;
  if (c.casting()) {
    const double ct = skills[c.cast_skill].cast_time;
    out[8] = ct > 0.0 ? clamp01(c.cast_remaining / ct) : 0.0;
  } else {
    out[8] = 0.0;
  }
  for (int k = 0; k < kMaxSkills; ++k) {
    double v = 0.0;
    if (k < c.n_skills && skills[k].cool_time > 0.0) v = clamp01(c.cooldown[k] / skills[k].cool_time);
    out[9 + k] = v;
  }
}

}  // namespace

int observation_size(const ScenarioConfig& sc) {
  const int entities = static_cast<int>(sc.players.size()) + 1;
  return entities * kEntityBlock + kProjectileSlots * kProjectileBlock + kMaxSkills * kSkillBlock;
}

void observe_into(const CombatState& st, int agent, std::vector<double>& out) {
  if (agent < 0 || agent >= st.n_players() || !st.chars[agent].alive) throw DeadAgent(agent);
  const ScenarioConfig& sc = *st.scenario;
  out.assign(observation_size(sc), 0.0);
  double* p = out.data();
  const Character& self = st.chars[agent];
  entity_block(st, self, self, true, p);
  p += kEntityBlock;
  for (int i = 0; i < st.n_players(); ++i) {
    if (i == agent) continue;
    entity_block(st, self, st.chars[i], false, p);
    p += kEntityBlock;
  }
  entity_block(st, self, st.boss(), false, p);
  p += kEntityBlock;

  // newest projectiles, oldest of them first
  const auto& pr = st.projectiles;
  const std::size_t first = pr.size() > kProjectileSlots ? pr.size() - kProjectileSlots : 0;
  const double r = sc.arena_radius;
  for (std::size_t j = first; j < pr.size(); ++j) {
    p[0] = clamp11((pr[j].pos.x - self.pos.x) / (2.0 * r));
    p[1] = clamp11((pr[j].pos.y - self.pos.y) / (2.0 * r));
    p[2] = clamp01(pr[j].speed / 50.0);
    p[3] = 1.0;
    p += kProjectileBlock;
  }
  p = out.data() + observation_size(sc) - kMaxSkills * kSkillBlock;
  const auto& skills = st.classes[agent].skills;
  for (int k = 0; k < self.n_skills; ++k) {
    p[0] = scaled(skills[k].range, sc.param_bounds[GenParam::Range]);
    p[1] = scaled(skills[k].coefficient, sc.param_bounds[GenParam::Damage]);
    p[2] = scaled(skills[k].cast_time, sc.param_bounds[GenParam::CastTime]);
    p += kSkillBlock;
  }
}

std::vector<double> observe(const CombatState& st, int agent) {
  std::vector<double> out;
  observe_into(st, agent, out);
  return out;
}

// ---------------------------------------------------------------------------

int action_count(const CombatState& st, int agent) { return kLocomotionCount + st.chars[agent].n_skills; }

int pt_hr_decide(const CombatState& st, int agent, CounterRng& rng) {
  const ScenarioConfig& sc = *st.scenario;
  const Character& c = st.chars[agent];
  const Character& boss = st.boss();
  const auto& skills = st.classes[agent].skills;

  // One orbit coin per decision; per-episode mode fixes it from the episode seed.
  int orbit;
  if (sc.orbit_mode == OrbitMode::PerTick) {
    orbit = static_cast<int>(rng.uniform_int(2));
  } else {
    CounterRng fixed(hash_seed({st.seed, 0x0b17ULL, static_cast<std::uint64_t>(agent)}));
    orbit = static_cast<int>(fixed.uniform_int(2));
  }
  if (!c.alive || !boss.alive) return kStay;

  const double dx = boss.pos.x - c.pos.x;
  const double dy = boss.pos.y - c.pos.y;
  const double d = std::sqrt(dx * dx + dy * dy);

  double keep = 0.0;
  for (int k = 0; k < c.n_skills; ++k)
    if (usable(skills[k])) keep = std::max(keep, skills[k].range);

  if (c.casting()) {
    if (!skills[c.cast_skill].cast_on_moving) return kStay;
  } else {
    int candidates[kMaxSkills];
    int n = 0;
    for (int k = 0; k < c.n_skills; ++k) {
      const SkillSpec& s = skills[k];
      if (usable(s) && d < s.range && c.charges[k] > 0 && c.mp >= s.cost) candidates[n++] = k;
    }
    if (n > 0) {
      const int k = n == 1 ? candidates[0] : candidates[rng.uniform_int(static_cast<std::uint64_t>(n))];
      const SkillSpec& s = skills[k];
      // stop for a tick before a cast that movement would interrupt
      if (c.moving && s.cast_time > 0.0 && !s.cast_on_moving) return kStay;
      return execute_skill(k);
    }
  }

  if (d > 0.0) {
    const double cos_err = (dx * c.dir.x + dy * c.dir.y) / d;
    if (cos_err < st.cos_half_turn) {
      const double cross = c.dir.x * dy - c.dir.y * dx;
      return cross > 0.0 ? kTurnLeft : kTurnRight;
    }
  }
  if (d >= keep) return kMoveForward;
  if (d < keep - 1.0) return kMoveBackward;
  return orbit == 0 ? kMoveLeft : kMoveRight;  // clockwise : counterclockwise
}

int pt_rd_decide(CounterRng& rng, int count) {
  if (count < 1) throw std::invalid_argument("action count must be >= 1");
  return static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(count)));
}

std::string_view to_string(AgentKind kind) { return kind == AgentKind::Heuristic ? "heuristic" : "random"; }

AgentKind parse_agent(std::string_view name) {
  if (name == "heuristic" || name == "pt-hr" || name == "hr") return AgentKind::Heuristic;
  if (name == "random" || name == "pt-rd" || name == "rd") return AgentKind::Random;
  throw std::invalid_argument("unknown agent '" + std::string(name) + "' (heuristic|random)");
}

Policy make_policy(AgentKind kind) {
  if (kind == AgentKind::Heuristic) return pt_hr_decide;
  return [](const CombatState& st, int agent, CounterRng& rng) { return pt_rd_decide(rng, action_count(st, agent)); };
}

std::vector<Policy> make_policies(AgentKind kind, std::size_t n_players) {
  return std::vector<Policy>(n_players, make_policy(kind));
}

// ---------------------------------------------------------------------------

RewardUnits reward_units(double damage, double coeff) {
  const auto k = static_cast<RewardUnits>(std::llround(damage * 1024.0));
  const auto c = static_cast<RewardUnits>(std::llround(coeff * 1000.0));
  return k * c;
}

void RewardLedger::add(const RewardLedger& o) {
  if (damage_reward.size() < o.damage_reward.size()) {
    damage_reward.resize(o.damage_reward.size(), 0);
    back_attack_reward.resize(o.back_attack_reward.size(), 0);
  }
  for (std::size_t i = 0; i < o.damage_reward.size(); ++i) {
    damage_reward[i] += o.damage_reward[i];
    back_attack_reward[i] += o.back_attack_reward[i];
  }
  group_reward += o.group_reward;
}

RewardLedger compute_rewards(const std::vector<Event>& events, int n_players, bool done, bool win,
                             const RewardCoefficients& coeffs) {
  RewardLedger r;
  r.damage_reward.assign(n_players, 0);
  r.back_attack_reward.assign(n_players, 0);
  for (const Event& e : events) {
    if (e.agent < 0 || e.agent >= n_players || e.target != n_players) continue;
    if (e.kind == EventKind::Hit) r.damage_reward[e.agent] += reward_units(e.amount, coeffs.damage);
    else if (e.kind == EventKind::BackAttackHit)
      r.back_attack_reward[e.agent] += reward_units(e.amount, coeffs.back_attack);
  }
  if (done && win) r.group_reward = static_cast<RewardUnits>(std::llround(coeffs.group_win * 1000.0)) * 1024;
  return r;
}

}  // namespace raidenv
