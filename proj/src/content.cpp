#include "raidenv/content.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace raidenv {

// Generated at build time from data/benchmark_default.json.
extern const char* const kBenchmarkDefaultJson;

namespace {

using nlohmann::json;

std::string join_path(const std::string& base, std::string_view field) {
  if (base.empty()) return std::string(field);
  return base + "." + std::string(field);
}

std::string fmt_num(double v) {
  std::ostringstream ss;
  ss << v;
  return ss.str();
}

void push(std::vector<ContentError>& out, ErrorKind kind, std::string path, std::string msg) {
  out.push_back(ContentError{kind, std::move(path), std::move(msg)});
}

void push_range(std::vector<ContentError>& out, const std::string& path, double v, double lo, double hi) {
  push(out, ErrorKind::OutOfRange, path,
       "value " + fmt_num(v) + " outside [" + fmt_num(lo) + ", " + fmt_num(hi) + "]");
}

// Reads a number; integer fields reject fractional values.
std::optional<double> read_number(const json& v, bool integral, const std::string& path,
                                  std::vector<ContentError>& errors) {
  if (!v.is_number()) {
    push(errors, ErrorKind::InvalidType, path, "expected a number");
    return std::nullopt;
  }
  double d = v.get<double>();
  if (!std::isfinite(d)) {
    push(errors, ErrorKind::InvalidType, path, "expected a finite number");
    return std::nullopt;
  }
  if (integral && std::floor(d) != d) {
    push(errors, ErrorKind::InvalidType, path, "expected an integer, got " + fmt_num(d));
    return std::nullopt;
  }
  return d;
}

// --- StatBlock field table -------------------------------------------------

struct StatField {
  std::string_view name;
  std::variant<int StatBlock::*, double StatBlock::*> member;
  double lo;
  double hi;
};

const std::array<StatField, kStatCount>& stat_fields() {
  static const std::array<StatField, kStatCount> fields{{
      {"health_point", &StatBlock::health_point, 0, 1000},
      {"mana_point", &StatBlock::mana_point, 0, 100},
      {"spell_power", &StatBlock::spell_power, 0, 100},
      {"movement_speed", &StatBlock::movement_speed, 1, 2},
      {"attack_power", &StatBlock::attack_power, 0, 100},
      {"attack_range", &StatBlock::attack_range, 1, 10},
      {"attack_speed", &StatBlock::attack_speed, 1, 2},
      {"armor", &StatBlock::armor, 0, 100},
      {"evasion", &StatBlock::evasion, 0, 100},
      {"parry", &StatBlock::parry, 0, 100},
      {"strength", &StatBlock::strength, 1, 100},
      {"agility", &StatBlock::agility, 1, 100},
      {"intelligence", &StatBlock::intelligence, 1, 100},
      {"critical", &StatBlock::critical, 0, 100},
      {"haste", &StatBlock::haste, 0, 100},
      {"versatility", &StatBlock::versatility, 0, 100},
      {"mastery", &StatBlock::mastery, 0, 100},
  }};
  return fields;
}

// --- SkillSpec field table -------------------------------------------------

struct NumericSkillField {
  std::string_view name;
  std::variant<int SkillSpec::*, double SkillSpec::*> member;
  double lo;
  double hi;
};

const std::array<NumericSkillField, 8>& numeric_skill_fields() {
  static const std::array<NumericSkillField, 8> fields{{
      {"magic_school", &SkillSpec::magic_school, 0, 9},
      {"projectile_speed", &SkillSpec::projectile_speed, 0, 50},
      {"cool_time", &SkillSpec::cool_time, 0, 60},
      {"cast_time", &SkillSpec::cast_time, 0, 2},
      {"cost", &SkillSpec::cost, 0, 100},
      {"range", &SkillSpec::range, 1, 20},
      {"charge", &SkillSpec::charge, 1, 3},
      {"coefficient", &SkillSpec::coefficient, 0, 2},
  }};
  return fields;
}

const std::array<std::pair<std::string_view, bool SkillSpec::*>, 5>& flag_skill_fields() {
  static const std::array<std::pair<std::string_view, bool SkillSpec::*>, 5> fields{{
      {"affect_ally", &SkillSpec::affect_ally},
      {"affect_enemy", &SkillSpec::affect_enemy},
      {"cast_on_moving", &SkillSpec::cast_on_moving},
      {"cast_on_casting", &SkillSpec::cast_on_casting},
      {"cast_on_channeling", &SkillSpec::cast_on_channeling},
  }};
  return fields;
}

constexpr std::array<std::string_view, 2> kTriggerLabels{"active", "passive"};
constexpr std::array<std::string_view, 2> kHitLabels{"melee", "skill"};
constexpr std::array<std::string_view, 3> kTargetLabels{"target", "non_target", "region"};

// Enumerations accept either their label or their integer index.
template <std::size_t N>
std::optional<int> read_enum(const json& v, const std::array<std::string_view, N>& labels, const std::string& path,
                             std::vector<ContentError>& errors) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    for (std::size_t i = 0; i < N; ++i)
      if (labels[i] == s) return static_cast<int>(i);
    push(errors, ErrorKind::InvalidEnum, path, "unknown label '" + s + "'");
    return std::nullopt;
  }
  if (v.is_number_integer() || v.is_number_unsigned()) {
    const auto i = v.get<long long>();
    if (i >= 0 && i < static_cast<long long>(N)) return static_cast<int>(i);
    push(errors, ErrorKind::InvalidEnum, path, "enum index " + std::to_string(i) + " outside [0, " +
                                                   std::to_string(N - 1) + "]");
    return std::nullopt;
  }
  push(errors, ErrorKind::InvalidEnum, path, "expected a label or integer index");
  return std::nullopt;
}

bool is_thousandths(double v) {
  const double scaled = v * 1000.0;
  return std::isfinite(v) && std::fabs(scaled - std::round(scaled)) < 1e-9;
}

const json* find(const json& obj, std::string_view key) {
  auto it = obj.find(std::string(key));
  return it == obj.end() ? nullptr : &*it;
}

void reject_unknown(const json& obj, std::initializer_list<std::string_view> known, const std::string& path,
                    std::vector<ContentError>& errors) {
  for (const auto& [key, _] : obj.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end())
      push(errors, ErrorKind::UnknownField, join_path(path, key), "unknown field '" + key + "'");
  }
}

std::optional<double> read_positive(const json& doc, std::string_view key, double fallback, const std::string& path,
                                    std::vector<ContentError>& errors) {
  const json* v = find(doc, key);
  if (!v) return fallback;
  auto d = read_number(*v, false, join_path(path, key), errors);
  if (d && *d <= 0.0) {
    push(errors, ErrorKind::OutOfRange, join_path(path, key), "must be > 0, got " + fmt_num(*d));
    return std::nullopt;
  }
  return d;
}

Validated<ClassSpec> validate_class(const json& raw, const std::string& path) {
  std::vector<ContentError> errors;
  ClassSpec cls;
  if (!raw.is_object()) {
    push(errors, ErrorKind::InvalidType, path, "expected an object");
    return errors;
  }
  reject_unknown(raw, {"stats", "skills", "hp_multiplier"}, path, errors);
  if (const json* s = find(raw, "stats")) {
    auto stats = validate_stat_block(*s, join_path(path, "stats"));
    if (stats) cls.stats = stats.value();
    else errors.insert(errors.end(), stats.errors().begin(), stats.errors().end());
  }
  const json* skills = find(raw, "skills");
  if (!skills || !skills->is_array() || skills->empty() || skills->size() > 3) {
    push(errors, skills ? ErrorKind::OutOfRange : ErrorKind::MissingField, join_path(path, "skills"),
         "a class owns between 1 and 3 skills");
  } else {
    for (std::size_t i = 0; i < skills->size(); ++i) {
      auto sk = validate_skill((*skills)[i], join_path(path, "skills") + "[" + std::to_string(i) + "]");
      if (sk) cls.skills.push_back(sk.value());
      else errors.insert(errors.end(), sk.errors().begin(), sk.errors().end());
    }
  }
  if (!errors.empty()) return errors;
  return cls;
}

}  // namespace

// ---------------------------------------------------------------------------

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::UnknownField: return "UnknownField";
    case ErrorKind::InvalidEnum: return "InvalidEnum";
    case ErrorKind::InvalidType: return "InvalidType";
    case ErrorKind::MissingField: return "MissingField";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::Empty: return "Empty";
  }
  return "?";
}

std::string format_errors(const std::vector<ContentError>& errors) {
  std::string out;
  for (const auto& e : errors) {
    if (!out.empty()) out += "\n";
    out += std::string(to_string(e.kind)) + " at " + e.path + ": " + e.message;
  }
  return out;
}

ContentException::ContentException(std::vector<ContentError> errors)
    : std::runtime_error(format_errors(errors)), errors_(std::move(errors)) {}

std::string_view to_string(GenParam p) {
  switch (p) {
    case GenParam::CoolTime: return "cool_time";
    case GenParam::Range: return "range";
    case GenParam::Damage: return "damage";
    case GenParam::CastTime: return "cast_time";
  }
  return "?";
}

double get_param(const SkillSpec& skill, GenParam p) {
  switch (p) {
    case GenParam::CoolTime: return skill.cool_time;
    case GenParam::Range: return skill.range;
    case GenParam::Damage: return skill.coefficient;
    case GenParam::CastTime: return skill.cast_time;
  }
  return 0.0;
}

void set_param(SkillSpec& skill, GenParam p, double value) {
  switch (p) {
    case GenParam::CoolTime: skill.cool_time = value; break;
    case GenParam::Range: skill.range = value; break;
    case GenParam::Damage: skill.coefficient = value; break;
    case GenParam::CastTime: skill.cast_time = value; break;
  }
}

GenState scale_params(const SkillSpec& skill, const ParamBounds& bounds) {
  GenState out{};
  for (GenParam p : kGenParams) {
    const Interval& iv = bounds[p];
    const double v = get_param(skill, p);
    if (!iv.contains(v))
      throw BoundsError(p, v, "OutOfBounds(" + std::string(to_string(p)) + "): " + fmt_num(v) + " outside [" +
                                  fmt_num(iv.min) + ", " + fmt_num(iv.max) + "]");
    out[static_cast<int>(p)] = iv.span() > 0.0 ? (v - iv.min) / iv.span() : 0.0;
  }
  return out;
}

std::array<double, kGenParamCount> unscale_params(const GenState& state, const ParamBounds& bounds) {
  std::array<double, kGenParamCount> out{};
  for (GenParam p : kGenParams) {
    const double s = state[static_cast<int>(p)];
    if (!(s >= 0.0 && s <= 1.0))
      throw BoundsError(p, s, "OutOfUnitInterval(" + std::string(to_string(p)) + "): " + fmt_num(s));
    const Interval& iv = bounds[p];
    out[static_cast<int>(p)] = iv.min + s * iv.span();
  }
  return out;
}

double ScenarioConfig::boss_max_hp() const {
  const double hp = players.empty() ? 0.0 : players.front().stats.health_point * boss_hp_multiplier;
  // HP lives on the 1/1024 damage grid.
  return std::round(hp * 1024.0) / 1024.0;
}

int ScenarioConfig::max_ticks() const {
  return static_cast<int>(std::ceil(episode_time_limit / tick_dt - 1e-9));
}

// ---------------------------------------------------------------------------

Validated<StatBlock> validate_stat_block(const json& raw, const std::string& path) {
  std::vector<ContentError> errors;
  StatBlock out;
  if (!raw.is_object()) {
    push(errors, ErrorKind::InvalidType, path, "expected an object");
    return errors;
  }
  for (const auto& [key, value] : raw.items()) {
    const auto& fields = stat_fields();
    auto it = std::find_if(fields.begin(), fields.end(), [&](const StatField& f) { return f.name == key; });
    const std::string fpath = join_path(path, key);
    if (it == fields.end()) {
      push(errors, ErrorKind::UnknownField, fpath, "unknown field '" + key + "'");
      continue;
    }
    const bool integral = std::holds_alternative<int StatBlock::*>(it->member);
    auto d = read_number(value, integral, fpath, errors);
    if (!d) continue;
    if (*d < it->lo || *d > it->hi) {
      push_range(errors, fpath, *d, it->lo, it->hi);
      continue;
    }
    if (integral) out.*std::get<int StatBlock::*>(it->member) = static_cast<int>(*d);
    else out.*std::get<double StatBlock::*>(it->member) = *d;
  }
  if (!errors.empty()) return errors;
  return out;
}

Validated<SkillSpec> validate_skill(const json& raw, const std::string& path) {
  std::vector<ContentError> errors;
  SkillSpec out;
  if (!raw.is_object()) {
    push(errors, ErrorKind::InvalidType, path, "expected an object");
    return errors;
  }
  for (const auto& [key, value] : raw.items()) {
    const std::string fpath = join_path(path, key);
    if (key == "name") {
      if (value.is_string()) out.name = value.get<std::string>();
      else push(errors, ErrorKind::InvalidType, fpath, "expected a string");
      continue;
    }
    if (key == "trigger_type") {
      if (auto e = read_enum(value, kTriggerLabels, fpath, errors)) out.trigger_type = static_cast<TriggerType>(*e);
      continue;
    }
    if (key == "hit_type") {
      if (auto e = read_enum(value, kHitLabels, fpath, errors)) out.hit_type = static_cast<HitType>(*e);
      continue;
    }
    if (key == "target_type") {
      if (auto e = read_enum(value, kTargetLabels, fpath, errors)) out.target_type = static_cast<TargetType>(*e);
      continue;
    }
    const auto& flags = flag_skill_fields();
    auto fl = std::find_if(flags.begin(), flags.end(), [&](const auto& f) { return f.first == key; });
    if (fl != flags.end()) {
      if (value.is_boolean()) out.*(fl->second) = value.get<bool>();
      else push(errors, ErrorKind::InvalidType, fpath, "expected true/false");
      continue;
    }
    const auto& nums = numeric_skill_fields();
    auto nf = std::find_if(nums.begin(), nums.end(), [&](const auto& f) { return f.name == key; });
    if (nf == nums.end()) {
      push(errors, ErrorKind::UnknownField, fpath, "unknown field '" + key + "'");
      continue;
    }
    const bool integral = std::holds_alternative<int SkillSpec::*>(nf->member);
    if (key == "magic_school") {
      // magic_school is an enumeration of ten schools indexed 0..9.
      if (!value.is_number_integer() && !value.is_number_unsigned()) {
        push(errors, ErrorKind::InvalidEnum, fpath, "expected an integer index in [0, 9]");
        continue;
      }
      const auto i = value.get<long long>();
      if (i < 0 || i > 9) {
        push(errors, ErrorKind::InvalidEnum, fpath, "enum index " + std::to_string(i) + " outside [0, 9]");
        continue;
      }
      out.magic_school = static_cast<int>(i);
      continue;
    }
    auto d = read_number(value, integral, fpath, errors);
    if (!d) continue;
    if (*d < nf->lo || *d > nf->hi) {
      push_range(errors, fpath, *d, nf->lo, nf->hi);
      continue;
    }
    if (integral) out.*std::get<int SkillSpec::*>(nf->member) = static_cast<int>(*d);
    else out.*std::get<double SkillSpec::*>(nf->member) = *d;
  }
  if (!errors.empty()) return errors;
  return out;
}

std::vector<ContentError> check_skill(const SkillSpec& skill, const std::string& path) {
  std::vector<ContentError> errors;
  for (const auto& f : numeric_skill_fields()) {
    const double v = std::holds_alternative<int SkillSpec::*>(f.member)
                         ? static_cast<double>(skill.*std::get<int SkillSpec::*>(f.member))
                         : skill.*std::get<double SkillSpec::*>(f.member);
    if (!(v >= f.lo && v <= f.hi)) push_range(errors, join_path(path, f.name), v, f.lo, f.hi);
  }
  return errors;
}

Validated<ParamBounds> validate_param_bounds(const json& raw, const std::string& path) {
  std::vector<ContentError> errors;
  ParamBounds out;
  if (!raw.is_object()) {
    push(errors, ErrorKind::InvalidType, path, "expected an object");
    return errors;
  }
  // Limits each generated parameter may take (skill field ranges).
  const std::array<Interval, kGenParamCount> limits{{{0, 60}, {1, 20}, {0, 2}, {0, 2}}};
  for (const auto& [key, value] : raw.items()) {
    const std::string fpath = join_path(path, key);
    std::optional<GenParam> param;
    for (GenParam p : kGenParams)
      if (to_string(p) == key || (p == GenParam::Damage && key == "coefficient")) param = p;
    if (!param) {
      push(errors, ErrorKind::UnknownField, fpath, "unknown field '" + key + "'");
      continue;
    }
    if (!value.is_array() || value.size() != 2 || !value[0].is_number() || !value[1].is_number()) {
      push(errors, ErrorKind::InvalidType, fpath, "expected [min, max]");
      continue;
    }
    const Interval iv{value[0].get<double>(), value[1].get<double>()};
    const Interval& lim = limits[static_cast<int>(*param)];
    if (!(iv.min < iv.max)) {
      push(errors, ErrorKind::OutOfRange, fpath, "min must be < max");
      continue;
    }
    if (iv.min < lim.min || iv.max > lim.max) {
      push(errors, ErrorKind::OutOfRange, fpath,
           "bounds must lie within [" + fmt_num(lim.min) + ", " + fmt_num(lim.max) + "]");
      continue;
    }
    out[*param] = iv;
  }
  if (!errors.empty()) return errors;
  return out;
}

// ---------------------------------------------------------------------------

bool is_samplable_param(std::string_view param) {
  return param == "cool_time" || param == "range" || param == "cast_time" || param == "coefficient" ||
         param == "damage" || param == "cost" || param == "projectile_speed";
}

void apply_player_param(ScenarioConfig& scenario, std::string_view param, double value) {
  for (auto& cls : scenario.players) {
    for (auto& sk : cls.skills) {
      if (param == "cool_time") sk.cool_time = value;
      else if (param == "range") sk.range = value;
      else if (param == "cast_time") sk.cast_time = value;
      else if (param == "coefficient" || param == "damage") sk.coefficient = value;
      else if (param == "cost") sk.cost = value;
      else if (param == "projectile_speed") sk.projectile_speed = value;
      else throw std::invalid_argument("not a samplable skill parameter: " + std::string(param));
    }
  }
}

void apply_player_skill(ScenarioConfig& scenario, const SkillSpec& skill) {
  for (auto& cls : scenario.players)
    for (auto& sk : cls.skills) sk = skill;
}

Validated<ScenarioConfig> load_scenario(std::string_view document) {
  std::vector<ContentError> errors;
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    push(errors, ErrorKind::ParseError, "byte " + std::to_string(e.byte), e.what());
    return errors;
  }
  if (!doc.is_object()) {
    push(errors, ErrorKind::InvalidType, "$", "scenario document must be a JSON object");
    return errors;
  }
  reject_unknown(doc,
                 {"schema_version", "name", "arena_radius", "tick_dt", "episode_time_limit", "turn_rate_deg",
                  "rear_half_angle_deg", "boss", "players", "content_sampling", "reward_coefficients",
                  "param_bounds", "orbit_mode"},
                 "", errors);

  const json* version = find(doc, "schema_version");
  if (!version) push(errors, ErrorKind::MissingField, "schema_version", "schema_version is required");
  else if (!version->is_number_integer() || version->get<long long>() != 1)
    push(errors, ErrorKind::OutOfRange, "schema_version", "only schema_version 1 is supported");

  ScenarioConfig sc;
  if (const json* n = find(doc, "name")) {
    if (n->is_string()) sc.name = n->get<std::string>();
    else push(errors, ErrorKind::InvalidType, "name", "expected a string");
  }
  if (auto v = read_positive(doc, "arena_radius", sc.arena_radius, "", errors)) sc.arena_radius = *v;
  if (auto v = read_positive(doc, "tick_dt", sc.tick_dt, "", errors)) sc.tick_dt = *v;
  if (auto v = read_positive(doc, "episode_time_limit", sc.episode_time_limit, "", errors))
    sc.episode_time_limit = *v;
  if (auto v = read_positive(doc, "turn_rate_deg", sc.turn_rate_deg, "", errors)) sc.turn_rate_deg = *v;
  if (auto v = read_positive(doc, "rear_half_angle_deg", sc.rear_half_angle_deg, "", errors)) {
    if (*v > 180.0) push(errors, ErrorKind::OutOfRange, "rear_half_angle_deg", "must be <= 180");
    else sc.rear_half_angle_deg = *v;
  }

  if (const json* b = find(doc, "boss")) {
    auto boss = validate_class(*b, "boss");
    if (boss) sc.boss = boss.value();
    else errors.insert(errors.end(), boss.errors().begin(), boss.errors().end());
    if (b->is_object()) {
      if (const json* m = find(*b, "hp_multiplier")) {
        auto d = read_number(*m, false, "boss.hp_multiplier", errors);
        if (d && *d < 0.0) push(errors, ErrorKind::OutOfRange, "boss.hp_multiplier", "must be >= 0");
        else if (d) sc.boss_hp_multiplier = *d;
      }
    }
  } else {
    push(errors, ErrorKind::MissingField, "boss", "boss is required");
  }

  const json* players = find(doc, "players");
  if (!players || !players->is_array() || players->empty()) {
    push(errors, players ? ErrorKind::Empty : ErrorKind::MissingField, "players",
         "at least one player class is required (players, empty)");
  } else {
    for (std::size_t i = 0; i < players->size(); ++i) {
      const json& p = (*players)[i];
      const std::string ppath = "players[" + std::to_string(i) + "]";
      if (p.is_object() && find(p, "hp_multiplier"))
        push(errors, ErrorKind::UnknownField, ppath + ".hp_multiplier", "only the boss has hp_multiplier");
      auto cls = validate_class(p, ppath);
      if (cls) sc.players.push_back(cls.value());
      else errors.insert(errors.end(), cls.errors().begin(), cls.errors().end());
    }
  }

  if (const json* cs = find(doc, "content_sampling")) {
    if (!cs->is_object()) {
      push(errors, ErrorKind::InvalidType, "content_sampling", "expected an object");
    } else {
      for (const auto& [key, values] : cs->items()) {
        const std::string cpath = "content_sampling." + key;
        if (!is_samplable_param(key)) {
          push(errors, ErrorKind::UnknownField, cpath, "not a samplable skill parameter");
          continue;
        }
        if (!values.is_array() || values.empty()) {
          push(errors, ErrorKind::Empty, cpath, "expected a nonempty array of values");
          continue;
        }
        std::vector<double> set;
        for (std::size_t i = 0; i < values.size(); ++i) {
          auto d = read_number(values[i], false, cpath + "[" + std::to_string(i) + "]", errors);
          if (!d) continue;
          // Range-check against the skill field.
          SkillSpec probe;
          const std::string name = key == "damage" ? "coefficient" : key;
          for (const auto& f : numeric_skill_fields())
            if (f.name == name && (*d < f.lo || *d > f.hi))
              push_range(errors, cpath + "[" + std::to_string(i) + "]", *d, f.lo, f.hi);
          set.push_back(*d);
        }
        sc.content_sampling[key == "damage" ? "coefficient" : key] = std::move(set);
      }
    }
  }

  if (const json* rc = find(doc, "reward_coefficients")) {
    if (!rc->is_object()) {
      push(errors, ErrorKind::InvalidType, "reward_coefficients", "expected an object");
    } else {
      reject_unknown(*rc, {"damage", "back_attack", "group_win"}, "reward_coefficients", errors);
      auto read_coeff = [&](std::string_view key, double& dst) {
        const json* v = find(*rc, key);
        if (!v) return;
        const std::string kpath = "reward_coefficients." + std::string(key);
        auto d = read_number(*v, false, kpath, errors);
        if (!d) return;
        if (*d < 0.0 || !is_thousandths(*d))
          push(errors, ErrorKind::OutOfRange, kpath, "must be a nonnegative multiple of 0.001");
        else dst = *d;
      };
      read_coeff("damage", sc.reward_coefficients.damage);
      read_coeff("back_attack", sc.reward_coefficients.back_attack);
      read_coeff("group_win", sc.reward_coefficients.group_win);
    }
  }

  if (const json* pb = find(doc, "param_bounds")) {
    auto b = validate_param_bounds(*pb);
    if (b) sc.param_bounds = b.value();
    else errors.insert(errors.end(), b.errors().begin(), b.errors().end());
  }

  if (const json* om = find(doc, "orbit_mode")) {
    if (om->is_string() && om->get<std::string>() == "per_tick") sc.orbit_mode = OrbitMode::PerTick;
    else if (om->is_string() && om->get<std::string>() == "per_episode") sc.orbit_mode = OrbitMode::PerEpisode;
    else push(errors, ErrorKind::InvalidEnum, "orbit_mode", "expected 'per_tick' or 'per_episode'");
  }

  if (!errors.empty()) return errors;
  return sc;
}

ScenarioConfig load_scenario_or_throw(std::string_view document) {
  auto r = load_scenario(document);
  if (!r) throw ContentException(r.errors());
  return std::move(r).value();
}

ScenarioConfig load_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ContentException({ContentError{ErrorKind::ParseError, path, "cannot open scenario file"}});
  std::stringstream ss;
  ss << in.rdbuf();
  return load_scenario_or_throw(ss.str());
}

// ---------------------------------------------------------------------------

json to_json(const StatBlock& stats) {
  json j = json::object();
  for (const auto& f : stat_fields()) {
    if (std::holds_alternative<int StatBlock::*>(f.member))
      j[std::string(f.name)] = stats.*std::get<int StatBlock::*>(f.member);
    else
      j[std::string(f.name)] = stats.*std::get<double StatBlock::*>(f.member);
  }
  return j;
}

json to_json(const SkillSpec& skill) {
  json j = json::object();
  j["name"] = skill.name;
  j["trigger_type"] = kTriggerLabels[static_cast<int>(skill.trigger_type)];
  j["hit_type"] = kHitLabels[static_cast<int>(skill.hit_type)];
  j["target_type"] = kTargetLabels[static_cast<int>(skill.target_type)];
  for (const auto& [name, member] : flag_skill_fields()) j[std::string(name)] = skill.*member;
  for (const auto& f : numeric_skill_fields()) {
    if (std::holds_alternative<int SkillSpec::*>(f.member))
      j[std::string(f.name)] = skill.*std::get<int SkillSpec::*>(f.member);
    else
      j[std::string(f.name)] = skill.*std::get<double SkillSpec::*>(f.member);
  }
  return j;
}

namespace {
json class_json(const ClassSpec& cls) {
  json j;
  j["stats"] = to_json(cls.stats);
  j["skills"] = json::array();
  for (const auto& s : cls.skills) j["skills"].push_back(to_json(s));
  return j;
}
}  // namespace

json to_json(const ScenarioConfig& sc) {
  json j;
  j["schema_version"] = 1;
  j["name"] = sc.name;
  j["arena_radius"] = sc.arena_radius;
  j["tick_dt"] = sc.tick_dt;
  j["episode_time_limit"] = sc.episode_time_limit;
  j["turn_rate_deg"] = sc.turn_rate_deg;
  j["rear_half_angle_deg"] = sc.rear_half_angle_deg;
  j["boss"] = class_json(sc.boss);
  j["boss"]["hp_multiplier"] = sc.boss_hp_multiplier;
  j["players"] = json::array();
  for (const auto& p : sc.players) j["players"].push_back(class_json(p));
  if (!sc.content_sampling.empty()) j["content_sampling"] = sc.content_sampling;
  j["reward_coefficients"] = {{"damage", sc.reward_coefficients.damage},
                              {"back_attack", sc.reward_coefficients.back_attack},
                              {"group_win", sc.reward_coefficients.group_win}};
  json pb = json::object();
  for (GenParam p : kGenParams) pb[std::string(to_string(p))] = {sc.param_bounds[p].min, sc.param_bounds[p].max};
  j["param_bounds"] = pb;
  j["orbit_mode"] = sc.orbit_mode == OrbitMode::PerTick ? "per_tick" : "per_episode";
  return j;
}

std::string_view benchmark_default_document() { return kBenchmarkDefaultJson; }

const ScenarioConfig& benchmark_default() {
  static const ScenarioConfig sc = load_scenario_or_throw(kBenchmarkDefaultJson);
  return sc;
}

}  // namespace raidenv
