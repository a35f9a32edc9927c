#pragma once

#include <string>

#include "json.hpp"
#include "raidenv/content.hpp"

namespace testsupport {

// A one-player scenario with no randomness in combat; callers patch fields.
inline nlohmann::json duel_document() {
  return nlohmann::json::parse(R"({
    "schema_version": 1,
    "name": "duel",
    "arena_radius": 20.0,
    "tick_dt": 0.05,
    "episode_time_limit": 60.0,
    "turn_rate_deg": 120.0,
    "rear_half_angle_deg": 60.0,
    "boss": {
      "hp_multiplier": 10.0,
      "stats": {"health_point": 1000, "spell_power": 50, "movement_speed": 2.0},
      "skills": [
        {"name": "cleave", "range": 6.0, "cool_time": 3.0, "cast_time": 0.0, "coefficient": 0.5},
        {"name": "slam", "range": 12.0, "cool_time": 8.0, "cast_time": 0.0, "coefficient": 0.5}
      ]
    },
    "players": [
      {"stats": {"health_point": 100, "spell_power": 40, "movement_speed": 2.0},
       "skills": [{"name": "zap", "range": 20.0, "cool_time": 5.0, "cast_time": 0.0, "coefficient": 1.0}]}
    ]
  })");
}

inline raidenv::ScenarioConfig load(const nlohmann::json& doc) { return raidenv::load_scenario_or_throw(doc.dump()); }

}  // namespace testsupport
