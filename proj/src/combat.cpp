#include "raidenv/combat.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

namespace raidenv {

namespace {

constexpr double kSnap = 1e-9;

double deg2rad(double d) { return d * std::numbers::pi / 180.0; }

double dist(Vec2 a, Vec2 b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

double wrap_angle(double a) {
  while (a > std::numbers::pi) a -= 2.0 * std::numbers::pi;
  while (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
  return a;
}

void set_facing(Character& c, double facing) {
  c.facing = wrap_angle(facing);
  c.dir = {std::cos(c.facing), std::sin(c.facing)};
}

bool skill_supported(const SkillSpec& s) {
  return s.trigger_type == TriggerType::Active && s.target_type == TargetType::Target && s.affect_enemy;
}

struct Ctx {
  CombatState& st;
  std::vector<Event>& ev;
  const ScenarioConfig& sc;
  double dt;

  void push(Event e) {
    e.tick = st.tick;
    ev.push_back(e);
  }

  bool active(int id) const { return st.chars[id].alive && st.chars[id].hp > 0.0; }

  void cancel_cast(Character& c) {
    push({.kind = EventKind::CastCancel, .agent = c.id, .target = c.cast_target, .skill = c.cast_skill});
    c.cast_skill = -1;
    c.cast_target = -1;
    c.cast_remaining = 0.0;
    c.cast_fresh = false;
  }

  void locomote(Character& c, int action) {
    const double turn = st.turn_step;
    const double step = st.classes[c.id].stats.movement_speed * dt;
    const Vec2 before = c.pos;
    Vec2 d{0.0, 0.0};
    switch (action) {
      case kTurnRight: set_facing(c, c.facing - turn); break;
      case kTurnLeft: set_facing(c, c.facing + turn); break;
      case kMoveForward: d = {c.dir.x, c.dir.y}; break;
      case kMoveBackward: d = {-c.dir.x, -c.dir.y}; break;
      case kMoveLeft: d = {-c.dir.y, c.dir.x}; break;
      case kMoveRight: d = {c.dir.y, -c.dir.x}; break;
      default: break;
    }
    const bool translate = action == kMoveForward || action == kMoveBackward || action == kMoveLeft ||
                           action == kMoveRight;
    if (translate) {
      c.pos.x += d.x * step;
      c.pos.y += d.y * step;
      const double r = std::sqrt(c.pos.x * c.pos.x + c.pos.y * c.pos.y);
      if (r > sc.arena_radius) {
        c.pos.x *= sc.arena_radius / r;
        c.pos.y *= sc.arena_radius / r;
      }
    }
    c.moving = translate;
    c.vel = {(c.pos.x - before.x) / dt, (c.pos.y - before.y) / dt};
    if (translate && c.casting() && !st.classes[c.id].skills[c.cast_skill].cast_on_moving) cancel_cast(c);
    if (action != kStay && st.options.record_moves)
      push({.kind = EventKind::Move, .agent = c.id, .amount = c.facing, .x = c.pos.x, .y = c.pos.y});
  }

  RejectReason check_execute(const Character& c, int k, int target, bool was_moving) const {
    if (k < 0 || k >= c.n_skills) return RejectReason::NoSuchSkill;
    const SkillSpec& s = st.classes[c.id].skills[k];
    if (!skill_supported(s)) return RejectReason::Unsupported;
    if (target < 0 || !active(target)) return RejectReason::NoTarget;
    const bool instant = s.cast_time <= 0.0;
    if (c.casting() && !s.cast_on_casting) return RejectReason::Casting;
    // Only a skill with a cast time can be disturbed by movement.
    if (was_moving && !instant && !s.cast_on_moving) return RejectReason::Moving;
    if (c.charges[k] <= 0) return RejectReason::Cooldown;
    if (c.mp < s.cost) return RejectReason::Mana;
    if (dist(c.pos, st.chars[target].pos) > s.range) return RejectReason::OutOfRange;
    return RejectReason::None;
  }

  void resolve_hit(int source, int target, int k) {
    Character& src = st.chars[source];
    Character& dst = st.chars[target];
    const SkillSpec& s = st.classes[source].skills[k];
    const DamageRoll roll = compute_damage(st.classes[source].stats, s, st.classes[target].stats, st.combat_rng);
    const double applied = std::min(roll.damage, dst.hp);
    dst.hp -= applied;
    bool back = false;
    if (dst.is_boss) {
      const double dx = src.pos.x - dst.pos.x;
      const double dy = src.pos.y - dst.pos.y;
      const double n = std::sqrt(dx * dx + dy * dy);
      back = n > 0.0 && -(dx * dst.dir.x + dy * dst.dir.y) / n >= st.cos_rear - 1e-12;
    }
    src.damage_dealt += applied;
    if (back) src.back_attack_damage += applied;
    push({.kind = back ? EventKind::BackAttackHit : EventKind::Hit,
          .agent = source,
          .target = target,
          .skill = k,
          .amount = applied,
          .crit = roll.crit,
          .evaded = roll.evaded,
          .parried = roll.parried});
  }

  void complete_cast(Character& c, int k, int target) {
    const SkillSpec& s = st.classes[c.id].skills[k];
    c.mp -= s.cost;
    if (c.mp < 0.0) c.mp = 0.0;
    c.charges[k] -= 1;
    if (c.cooldown[k] <= 0.0) c.cooldown[k] = s.cool_time;
    push({.kind = EventKind::CastComplete, .agent = c.id, .target = target, .skill = k});
    if (!active(target)) return;
    if (s.projectile_speed <= 0.0) {
      resolve_hit(c.id, target, k);
      return;
    }
    Projectile p{st.next_projectile_id++, c.id, target, k, c.pos, s.projectile_speed, st.tick};
    st.projectiles.push_back(p);
    push({.kind = EventKind::ProjectileSpawn,
          .agent = c.id,
          .target = target,
          .skill = k,
          .x = p.pos.x,
          .y = p.pos.y,
          .projectile = p.id});
  }

  void execute(Character& c, int k, int target) {
    const SkillSpec& s = st.classes[c.id].skills[k];
    const bool instant = s.cast_time <= 0.0;
    if (c.casting()) {
      if (instant) {
        // Fires alongside the running cast.
        push({.kind = EventKind::CastStart, .agent = c.id, .target = target, .skill = k});
        complete_cast(c, k, target);
        return;
      }
      cancel_cast(c);
    }
    c.cast_skill = k;
    c.cast_target = target;
    c.cast_remaining = s.cast_time;
    c.cast_fresh = true;
    push({.kind = EventKind::CastStart, .agent = c.id, .target = target, .skill = k});
  }
};

}  // namespace

std::string action_name(int action) {
  switch (action) {
    case kStay: return "stay";
    case kMoveForward: return "move_forward";
    case kMoveBackward: return "move_backward";
    case kTurnRight: return "turn_right";
    case kTurnLeft: return "turn_left";
    case kMoveLeft: return "move_left";
    case kMoveRight: return "move_right";
    default: return "execute_skill(" + std::to_string(skill_of(action)) + ")";
  }
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Move: return "move";
    case EventKind::CastStart: return "cast_start";
    case EventKind::CastComplete: return "cast_complete";
    case EventKind::CastCancel: return "cast_cancel";
    case EventKind::ProjectileSpawn: return "projectile_spawn";
    case EventKind::Hit: return "hit";
    case EventKind::BackAttackHit: return "back_attack_hit";
    case EventKind::Death: return "death";
    case EventKind::RejectedAction: return "rejected_action";
    case EventKind::EpisodeEnd: return "episode_end";
  }
  return "?";
}

std::string_view to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::None: return "none";
    case RejectReason::NoSuchSkill: return "no_such_skill";
    case RejectReason::Unsupported: return "unsupported";
    case RejectReason::Cooldown: return "cooldown";
    case RejectReason::Casting: return "casting";
    case RejectReason::Moving: return "moving";
    case RejectReason::Mana: return "mana";
    case RejectReason::OutOfRange: return "out_of_range";
    case RejectReason::NoTarget: return "no_target";
  }
  return "?";
}

double quantize_damage(double raw) { return std::round(raw * 1024.0) / 1024.0; }

DamageRoll compute_damage(const StatBlock& attacker, const SkillSpec& skill, const StatBlock& defender,
                          CounterRng& rng) {
  const double u_evade = rng.uniform01();
  const double u_parry = rng.uniform01();
  const double u_crit = rng.uniform01();
  DamageRoll r;
  if (u_evade < defender.evasion / 100.0) {
    r.evaded = true;
    return r;
  }
  if (u_parry < defender.parry / 100.0) {
    r.parried = true;
    return r;
  }
  const double base = skill.hit_type == HitType::Melee ? attacker.attack_power : attacker.spell_power;
  double dmg = skill.coefficient * base;
  if (u_crit < attacker.critical / 100.0) {
    r.crit = true;
    dmg *= 2.0;
  }
  dmg *= 1.0 - defender.armor / 100.0;
  r.damage = quantize_damage(dmg);
  return r;
}

bool is_back_attack(Vec2 attacker, Vec2 boss, Vec2 boss_dir, double rear_half_angle_deg) {
  const double dx = attacker.x - boss.x;
  const double dy = attacker.y - boss.y;
  const double n = std::sqrt(dx * dx + dy * dy);
  if (n == 0.0) return false;
  // cos of the angle between (attacker - boss) and -facing
  const double c = -(dx * boss_dir.x + dy * boss_dir.y) / (n * std::sqrt(boss_dir.x * boss_dir.x + boss_dir.y * boss_dir.y));
  return c >= std::cos(deg2rad(rear_half_angle_deg)) - 1e-12;
}

BossDecision boss_policy(const CombatState& st) {
  const Character& b = st.boss();
  BossDecision d;
  double best = 0.0;
  for (int i = 0; i < st.n_players(); ++i) {
    const Character& p = st.chars[i];
    if (!p.alive || p.hp <= 0.0) continue;
    const double di = dist(b.pos, p.pos);
    if (d.target < 0 || di < best) {
      d.target = i;
      best = di;
    }
  }
  if (d.target < 0) return d;

  int pick = -1;
  for (int k = 0; k < b.n_skills; ++k) {
    const SkillSpec& s = st.classes[b.id].skills[k];
    if (!skill_supported(s) || b.charges[k] <= 0 || best > s.range || b.mp < s.cost) continue;
    if (b.casting() && !s.cast_on_casting) continue;
    if (pick < 0 || s.range > st.classes[b.id].skills[pick].range) pick = k;
  }
  if (pick >= 0) {
    d.action = execute_skill(pick);
    return d;
  }

  const Vec2 to{st.chars[d.target].pos.x - b.pos.x, st.chars[d.target].pos.y - b.pos.y};
  if (best == 0.0) {
    d.action = kStay;
    return d;
  }
  const double cos_err = (to.x * b.dir.x + to.y * b.dir.y) / best;
  if (cos_err < st.cos_half_turn) {
    const double cross = b.dir.x * to.y - b.dir.y * to.x;
    d.action = cross > 0.0 ? kTurnLeft : kTurnRight;
  } else {
    d.action = kMoveForward;
  }
  return d;
}

CombatState init_episode(const ScenarioConfig& sc, std::uint64_t seed, EngineOptions options) {
  if (sc.players.empty()) throw std::invalid_argument("scenario has no players");
  CombatState st;
  st.scenario = &sc;
  st.seed = seed;
  st.options = options;
  st.max_ticks = sc.max_ticks();
  st.turn_step = deg2rad(sc.turn_rate_deg) * sc.tick_dt;
  st.cos_half_turn = std::cos(0.5 * st.turn_step);
  st.cos_rear = std::cos(deg2rad(sc.rear_half_angle_deg));
  const CounterRng root(hash_seed({seed}));
  st.combat_rng = root.split(0);
  st.policy_rng = root.split(1);

  st.classes = sc.players;
  st.classes.push_back(sc.boss);
  if (!sc.content_sampling.empty()) {
    CounterRng sampler = root.split(2);
    ScenarioConfig tmp;
    tmp.players.assign(st.classes.begin(), st.classes.end() - 1);
    for (const auto& [param, values] : sc.content_sampling) {
      const double v = values[sampler.uniform_int(values.size())];
      apply_player_param(tmp, param, v);
      st.sampled[param] = v;
    }
    std::copy(tmp.players.begin(), tmp.players.end(), st.classes.begin());
  }

  const int n = static_cast<int>(sc.players.size());
  st.chars.resize(n + 1);
  for (int i = 0; i <= n; ++i) {
    Character& c = st.chars[i];
    const ClassSpec& cls = st.classes[i];
    c.id = i;
    c.is_boss = i == n;
    c.max_hp = c.is_boss ? sc.boss_max_hp() : cls.stats.health_point;
    c.hp = c.max_hp;
    c.max_mp = cls.stats.mana_point;
    c.mp = c.max_mp;
    c.n_skills = static_cast<int>(std::min<std::size_t>(cls.skills.size(), kMaxSkills));
    for (int k = 0; k < c.n_skills; ++k) c.charges[k] = cls.skills[k].charge;
    if (c.is_boss) {
      c.pos = {0.0, 0.0};
      set_facing(c, 0.0);
    } else {
      const double a = deg2rad(90.0 + 360.0 * i / n);
      c.pos = {0.75 * sc.arena_radius * std::cos(a), 0.75 * sc.arena_radius * std::sin(a)};
      set_facing(c, a + std::numbers::pi);
    }
  }
  st.projectiles.reserve(16);
  return st;
}

StepResult step(CombatState& st, const std::vector<int>& actions, std::vector<Event>& events) {
  if (st.done) throw std::logic_error("step called on a finished episode");
  const ScenarioConfig& sc = *st.scenario;
  events.clear();
  Ctx ctx{st, events, sc, sc.tick_dt};
  const int n = st.n_players();
  const int nb = n + 1;

  auto finish = [&](bool win) {
    st.done = true;
    st.win = win;
    ctx.push({.kind = EventKind::EpisodeEnd, .amount = static_cast<double>(st.tick + 1), .win = win});
  };
  auto process_deaths = [&] {
    bool any = false;
    for (int i = 0; i < nb; ++i) {
      Character& c = st.chars[i];
      if (c.alive && c.hp <= 0.0) {
        c.hp = 0.0;
        c.alive = false;
        c.moving = false;
        c.vel = {0.0, 0.0};
        c.cast_skill = -1;
        c.cast_target = -1;
        c.cast_remaining = 0.0;
        ctx.push({.kind = EventKind::Death, .agent = i, .x = c.pos.x, .y = c.pos.y});
        any = true;
      }
    }
    if (any)
      std::erase_if(st.projectiles,
                  [&](const Projectile& p) { return !st.chars[p.source].alive || !st.chars[p.target].alive; });
  };
  auto terminal = [&]() -> int {  // 1 win, 0 loss, -1 running
    if (!st.boss().alive) return 1;
    bool any = false;
    for (int i = 0; i < n; ++i) any = any || st.chars[i].alive;
    return any ? -1 : 0;
  };

  // 1. characters brought to zero outside the step loop
  process_deaths();
  if (int t = terminal(); t >= 0) {
    finish(t == 1);
    ++st.tick;
    return {st.done, st.win};
  }

  const BossDecision boss = boss_policy(st);

  // 2. cooldowns
  for (int i = 0; i < nb; ++i) {
    Character& c = st.chars[i];
    if (!c.alive) continue;
    for (int k = 0; k < c.n_skills; ++k) {
      const SkillSpec& s = st.classes[i].skills[k];
      if (c.charges[k] >= s.charge) continue;
      c.cooldown[k] -= ctx.dt;
      if (c.cooldown[k] <= kSnap) {
        c.charges[k] += 1;
        c.cooldown[k] = c.charges[k] < s.charge ? s.cool_time : 0.0;
      }
    }
  }

  // 3. locomotion; 4. execute requests. Executors skip locomotion, so their
  // `moving` flag still holds the previous tick when legality is checked.
  auto action_of = [&](int i) {
    return i == n ? boss.action : (i < static_cast<int>(actions.size()) ? actions[i] : int{kStay});
  };

  for (int i = 0; i < nb; ++i) {
    Character& c = st.chars[i];
    if (!c.alive) continue;
    const int a = action_of(i);
    if (a < 0) throw std::invalid_argument("negative action code");
    if (!is_execute(a)) ctx.locomote(c, a);
  }
  for (int i = 0; i < nb; ++i) {
    Character& c = st.chars[i];
    if (!c.alive) continue;
    const int a = action_of(i);
    if (!is_execute(a)) continue;
    const int k = skill_of(a);
    const int target = i == n ? boss.target : n;
    const RejectReason why = ctx.check_execute(c, k, target, c.moving);
    ctx.locomote(c, kStay);
    if (why != RejectReason::None) {
      ctx.push({.kind = EventKind::RejectedAction, .agent = i, .target = target, .skill = k, .reason = why});
      continue;
    }
    ctx.execute(c, k, target);
  }

  // 5. cast progress; 6. completion
  for (int i = 0; i < nb; ++i) {
    Character& c = st.chars[i];
    if (!ctx.active(i) || !c.casting()) continue;
    if (c.cast_fresh) {
      c.cast_fresh = false;
    } else {
      c.cast_remaining -= ctx.dt;
    }
    if (c.cast_remaining <= kSnap) {
      const int k = c.cast_skill;
      const int target = c.cast_target;
      c.cast_skill = -1;
      c.cast_target = -1;
      c.cast_remaining = 0.0;
      ctx.complete_cast(c, k, target);
    }
  }

  // 7. projectiles spawned on earlier ticks
  for (Projectile& p : st.projectiles) {
    if (p.spawn_tick == st.tick || p.speed <= 0.0) continue;
    if (!ctx.active(p.source) || !ctx.active(p.target)) {
      p.speed = -1.0;  // removed below
      continue;
    }
    const Vec2 tp = st.chars[p.target].pos;
    const double d = dist(p.pos, tp);
    const double reach = p.speed * ctx.dt;
    if (d <= reach) {
      p.pos = tp;
      p.speed = -1.0;
      ctx.resolve_hit(p.source, p.target, p.skill);
    } else {
      p.pos.x += (tp.x - p.pos.x) / d * reach;
      p.pos.y += (tp.y - p.pos.y) / d * reach;
    }
  }
  std::erase_if(st.projectiles, [](const Projectile& p) { return p.speed < 0.0; });

  // 8. deaths; 9. termination
  process_deaths();
  if (int t = terminal(); t >= 0) finish(t == 1);
  else if (st.tick + 1 >= st.max_ticks) finish(false);

  if (st.options.record_trace) {
    for (int i = 0; i < n; ++i)
      if (st.chars[i].alive) st.trace.push_back({st.tick, i, st.chars[i].pos.x, st.chars[i].pos.y});
  }
  ++st.tick;
  return {st.done, st.win};
}

EpisodeLog run_episode(const ScenarioConfig& sc, const std::vector<Policy>& policies, std::uint64_t seed,
                       RunOptions options) {
  if (policies.size() != sc.players.size()) throw std::invalid_argument("need one policy per player");
  CombatState st = init_episode(sc, seed, options.engine);
  EpisodeLog log;
  std::vector<Event> batch;
  batch.reserve(32);
  std::vector<int> actions(sc.players.size(), kStay);
  while (!st.done) {
    for (std::size_t i = 0; i < actions.size(); ++i)
      actions[i] = st.chars[i].alive ? policies[i](st, static_cast<int>(i), st.policy_rng) : kStay;
    step(st, actions, batch);
    if (options.keep_events) log.events.insert(log.events.end(), batch.begin(), batch.end());
  }
  EpisodeOutcome& o = log.outcome;
  o.win = st.win;
  o.duration_ticks = st.tick;
  o.boss_max_hp = st.boss().max_hp;
  o.boss_final_hp = st.boss().hp;
  for (int i = 0; i < st.n_players(); ++i) {
    o.damage_by_agent.push_back(st.chars[i].damage_dealt);
    o.back_attack_damage_by_agent.push_back(st.chars[i].back_attack_damage);
  }
  o.position_trace = std::move(st.trace);
  return log;
}

// ---------------------------------------------------------------------------

namespace {

void append_num(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

void append_field(std::string& out, const char* key, int v) {
  out += ",\"";
  out += key;
  out += "\":";
  out += std::to_string(v);
}

void append_field(std::string& out, const char* key, double v) {
  out += ",\"";
  out += key;
  out += "\":";
  append_num(out, v);
}

void append_flag(std::string& out, const char* key, bool v) {
  out += ",\"";
  out += key;
  out += v ? "\":true" : "\":false";
}

}  // namespace

std::string event_line(const Event& e) {
  std::string out = "{\"tick\":" + std::to_string(e.tick) + ",\"kind\":\"" + std::string(to_string(e.kind)) + "\"";
  switch (e.kind) {
    case EventKind::Move:
      append_field(out, "agent", e.agent);
      append_field(out, "x", e.x);
      append_field(out, "y", e.y);
      append_field(out, "facing", e.amount);
      break;
    case EventKind::CastStart:
    case EventKind::CastComplete:
    case EventKind::CastCancel:
      append_field(out, "agent", e.agent);
      append_field(out, "skill", e.skill);
      append_field(out, "target", e.target);
      break;
    case EventKind::ProjectileSpawn:
      append_field(out, "agent", e.agent);
      append_field(out, "skill", e.skill);
      append_field(out, "target", e.target);
      append_field(out, "projectile", e.projectile);
      append_field(out, "x", e.x);
      append_field(out, "y", e.y);
      break;
    case EventKind::Hit:
    case EventKind::BackAttackHit:
      append_field(out, "agent", e.agent);
      append_field(out, "skill", e.skill);
      append_field(out, "target", e.target);
      append_field(out, "damage", e.amount);
      append_flag(out, "crit", e.crit);
      append_flag(out, "evaded", e.evaded);
      append_flag(out, "parried", e.parried);
      break;
    case EventKind::Death:
      append_field(out, "agent", e.agent);
      append_field(out, "x", e.x);
      append_field(out, "y", e.y);
      break;
    case EventKind::RejectedAction:
      append_field(out, "agent", e.agent);
      append_field(out, "skill", e.skill);
      out += ",\"reason\":\"" + std::string(to_string(e.reason)) + "\"";
      break;
    case EventKind::EpisodeEnd:
      append_flag(out, "win", e.win);
      append_field(out, "duration_ticks", static_cast<int>(e.amount));
      break;
  }
  out += "}\n";
  return out;
}

std::string export_log(const std::vector<Event>& events) {
  std::string out;
  out.reserve(events.size() * 64);
  for (const Event& e : events) out += event_line(e);
  return out;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

std::string log_hash(const std::vector<Event>& events) { return sha256_hex(export_log(events)); }

}  // namespace raidenv
