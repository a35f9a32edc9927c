#include <cmath>

#include "doctest.h"
#include "raidenv/content.hpp"
#include "raidenv/rng.hpp"
#include "support.hpp"

using namespace raidenv;
using nlohmann::json;

namespace {

bool has_error(const std::vector<ContentError>& errs, ErrorKind kind, const std::string& path) {
  for (const auto& e : errs)
    if (e.kind == kind && e.path == path) return true;
  return false;
}

}  // namespace

TEST_CASE("stat block: defaults and boundaries") {
  auto all_default = validate_stat_block(json{{"health_point", 100}});
  REQUIRE(all_default.ok());
  CHECK(all_default.value() == StatBlock{});

  auto slow = validate_stat_block(json{{"movement_speed", 1.0}});
  REQUIRE(slow.ok());
  CHECK(slow.value().movement_speed == 1.0);

  auto hp = validate_stat_block(json{{"health_point", 2000}});
  REQUIRE_FALSE(hp.ok());
  REQUIRE(hp.errors().size() == 1);
  CHECK(hp.errors()[0].kind == ErrorKind::OutOfRange);
  CHECK(hp.errors()[0].path == "stats.health_point");
  CHECK(hp.errors()[0].message.find("2000") != std::string::npos);
  CHECK(hp.errors()[0].message.find("[0, 1000]") != std::string::npos);
}

TEST_CASE("stat block: unknown fields and fractional integers are rejected") {
  auto r = validate_stat_block(json{{"luck", 3}, {"armor", 12.5}});
  REQUIRE_FALSE(r.ok());
  CHECK(has_error(r.errors(), ErrorKind::UnknownField, "stats.luck"));
  CHECK(r.errors().size() == 2);
}

TEST_CASE("skill validation examples") {
  auto edge = validate_skill(json{{"range", 20}, {"cool_time", 0}});
  REQUIRE(edge.ok());
  CHECK(edge.value().range == 20.0);
  CHECK(edge.value().cool_time == 0.0);

  auto far = validate_skill(json{{"range", 25}});
  REQUIRE_FALSE(far.ok());
  CHECK(has_error(far.errors(), ErrorKind::OutOfRange, "skill.range"));
  CHECK(far.errors()[0].message.find("[1, 20]") != std::string::npos);

  auto charge = validate_skill(json{{"charge", 0}});
  REQUIRE_FALSE(charge.ok());
  CHECK(has_error(charge.errors(), ErrorKind::OutOfRange, "skill.charge"));

  auto bad_enum = validate_skill(json{{"target_type", "cone"}});
  REQUIRE_FALSE(bad_enum.ok());
  CHECK(has_error(bad_enum.errors(), ErrorKind::InvalidEnum, "skill.target_type"));

  auto by_index = validate_skill(json{{"hit_type", 0}, {"trigger_type", "passive"}});
  REQUIRE(by_index.ok());
  CHECK(by_index.value().hit_type == HitType::Melee);
  CHECK(by_index.value().trigger_type == TriggerType::Passive);

  auto unknown = validate_skill(json{{"colour", "red"}});
  REQUIRE_FALSE(unknown.ok());
  CHECK(has_error(unknown.errors(), ErrorKind::UnknownField, "skill.colour"));
}

TEST_CASE("validation is total: ok xor nonempty errors") {
  const std::vector<json> inputs{json::object(), json::array(), json(3), json{{"range", "far"}},
                                 json{{"cost", -1}}, json{{"coefficient", 2.0}}};
  for (const auto& in : inputs) {
    auto r = validate_skill(in);
    CHECK((r.ok() || !r.errors().empty()));
  }
  CHECK_THROWS_AS(Validated<int>(std::vector<ContentError>{}), std::logic_error);
}

TEST_CASE("scale_params examples") {
  const ParamBounds b;
  SkillSpec s;
  s.cool_time = 0.5;
  s.range = 10.5;
  s.coefficient = 0.75;
  s.cast_time = 1.5;
  const GenState g = scale_params(s, b);
  CHECK(g[0] == 0.0);
  CHECK(g[1] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(g[2] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(g[3] == 1.0);

  s.range = 1.0;
  CHECK(scale_params(s, b)[1] == 0.0);
  s.range = 20.0;
  CHECK(scale_params(s, b)[1] == 1.0);

  s.range = 25.0;
  try {
    scale_params(s, b);
    FAIL("expected BoundsError");
  } catch (const BoundsError& e) {
    CHECK(e.param() == GenParam::Range);
    CHECK(e.value() == 25.0);
  }
}

TEST_CASE("unscale_params endpoints and errors") {
  const ParamBounds b;
  const auto lo = unscale_params({0, 0, 0, 0}, b);
  const auto hi = unscale_params({1, 1, 1, 1}, b);
  for (GenParam p : kGenParams) {
    CHECK(lo[static_cast<int>(p)] == b[p].min);
    CHECK(hi[static_cast<int>(p)] == b[p].max);
  }
  CHECK_THROWS_AS(unscale_params({0, 1.5, 0, 0}, b), BoundsError);
  CHECK_THROWS_AS(unscale_params({0, 0, -0.1, 0}, b), BoundsError);
}

TEST_CASE("scale/unscale round trip on 1000 random draws") {
  const ParamBounds b;
  CounterRng rng(42);
  for (int i = 0; i < 1000; ++i) {
    GenState s{rng.uniform01(), rng.uniform01(), rng.uniform01(), rng.uniform01()};
    const auto raw = unscale_params(s, b);
    SkillSpec sk;
    for (GenParam p : kGenParams) set_param(sk, p, raw[static_cast<int>(p)]);
    const GenState back = scale_params(sk, b);
    for (int j = 0; j < 4; ++j) CHECK(std::fabs(back[j] - s[j]) <= 1e-9);

    // and from raw values
    SkillSpec r;
    r.cool_time = 0.5 + rng.uniform01() * 59.5;
    r.range = 1.0 + rng.uniform01() * 19.0;
    r.coefficient = 0.5 + rng.uniform01() * 0.5;
    r.cast_time = 0.5 + rng.uniform01();
    const auto again = unscale_params(scale_params(r, b), b);
    for (GenParam p : kGenParams) CHECK(std::fabs(again[static_cast<int>(p)] - get_param(r, p)) <= 1e-9);
  }
}

TEST_CASE("degenerate bounds scale to zero") {
  ParamBounds b;
  for (auto& iv : b.bounds) iv.max = iv.min;
  SkillSpec s;
  for (GenParam p : kGenParams) set_param(s, p, b[p].min);
  const GenState g = scale_params(s, b);
  for (double v : g) CHECK(v == 0.0);
}

TEST_CASE("bundled benchmark scenario") {
  const ScenarioConfig& sc = benchmark_default();
  CHECK(sc.players.size() == 3);
  CHECK(sc.boss_hp_multiplier == 10.0);
  REQUIRE(sc.boss.skills.size() == 2);
  CHECK(sc.boss.skills[0].range == 6.0);
  CHECK(sc.boss.skills[1].range == 12.0);
  CHECK(sc.boss_max_hp() == 10.0 * sc.players[0].stats.health_point);
  for (const auto& p : sc.players) {
    CHECK(p.stats.health_point == 100);
    CHECK(p.stats.spell_power == 50);
    CHECK(p.stats.evasion == 0);
    CHECK(p.stats.parry == 0.0);
    CHECK(p.stats.critical == 0);
  }
  CHECK(sc.param_bounds == ParamBounds{});
  CHECK(sc.max_ticks() == 1200);

  // self-consistency: the serialized form re-validates to the same record
  auto again = load_scenario(to_json(sc).dump());
  REQUIRE(again.ok());
  CHECK(again.value() == sc);

  // the embedded document is the file under data/
  auto from_doc = load_scenario(benchmark_default_document());
  REQUIRE(from_doc.ok());
  CHECK(from_doc.value() == sc);
}

TEST_CASE("scenario loading errors carry paths") {
  json doc = testsupport::duel_document();
  doc.erase("players");
  auto r = load_scenario(doc.dump());
  REQUIRE_FALSE(r.ok());
  CHECK(has_error(r.errors(), ErrorKind::MissingField, "players"));

  doc = testsupport::duel_document();
  doc["players"] = json::array();
  r = load_scenario(doc.dump());
  REQUIRE_FALSE(r.ok());
  CHECK(has_error(r.errors(), ErrorKind::Empty, "players"));

  doc = testsupport::duel_document();
  doc["players"][0]["skills"][0]["range"] = 30;
  doc["boss"]["stats"]["evasion"] = 101;
  doc["gravity"] = 9.8;
  r = load_scenario(doc.dump());
  REQUIRE_FALSE(r.ok());
  CHECK(has_error(r.errors(), ErrorKind::OutOfRange, "players[0].skills[0].range"));
  CHECK(has_error(r.errors(), ErrorKind::OutOfRange, "boss.stats.evasion"));
  CHECK(has_error(r.errors(), ErrorKind::UnknownField, "gravity"));

  r = load_scenario("{\"schema_version\": 1,");
  REQUIRE_FALSE(r.ok());
  CHECK(r.errors()[0].kind == ErrorKind::ParseError);

  doc = testsupport::duel_document();
  doc["reward_coefficients"] = {{"damage", 0.0105}};
  CHECK_FALSE(load_scenario(doc.dump()).ok());

  doc = testsupport::duel_document();
  doc["param_bounds"] = {{"range", {5.0, 5.0}}};
  CHECK_FALSE(load_scenario(doc.dump()).ok());

  CHECK_THROWS_AS(load_scenario_or_throw("[]"), ContentException);
  CHECK_THROWS_AS(load_scenario_file("/nonexistent/scenario.json"), ContentException);
}

TEST_CASE("content_sampling set is echoed") {
  json doc = testsupport::duel_document();
  doc["content_sampling"] = {{"range", {5, 9, 13}}};
  auto r = load_scenario(doc.dump());
  REQUIRE(r.ok());
  REQUIRE(r.value().content_sampling.count("range") == 1);
  CHECK(r.value().content_sampling.at("range") == std::vector<double>{5, 9, 13});

  doc["content_sampling"] = {{"range", {5, 25}}};
  auto bad = load_scenario(doc.dump());
  REQUIRE_FALSE(bad.ok());
  CHECK(has_error(bad.errors(), ErrorKind::OutOfRange, "content_sampling.range[1]"));

  doc["content_sampling"] = {{"charge", {1, 2}}};
  CHECK_FALSE(load_scenario(doc.dump()).ok());
}

TEST_CASE("apply_player_param touches every player skill") {
  ScenarioConfig sc = benchmark_default();
  apply_player_param(sc, "range", 17.0);
  apply_player_param(sc, "damage", 0.6);
  for (const auto& p : sc.players) {
    CHECK(p.skills[0].range == 17.0);
    CHECK(p.skills[0].coefficient == 0.6);
  }
  CHECK(sc.boss.skills[0].range == 6.0);
  CHECK_THROWS_AS(apply_player_param(sc, "charge", 2), std::invalid_argument);
}
