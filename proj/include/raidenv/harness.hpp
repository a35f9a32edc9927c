#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "raidenv/agents.hpp"
#include "raidenv/content.hpp"
#include "raidenv/generators.hpp"
#include "raidenv/metrics.hpp"

namespace raidenv {

// Bad experiment configuration: reported before any episode runs (exit code 1).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class ExperimentMode { Playtest, Generate, Evaluate };
std::string_view to_string(ExperimentMode m);

struct ExperimentConfig {
  ExperimentMode mode = ExperimentMode::Playtest;
  std::string scenario_path;  // empty: bundled benchmark_default
  AgentKind agent = AgentKind::Heuristic;
  GenMethod method = GenMethod::Heuristic;
  std::vector<double> targets{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7};
  std::vector<double> ranges;  // playtest sweep over the player skill range; empty = scenario as is
  int episodes = 500;
  int samples = 100;
  std::optional<int> eval_episodes;  // default 100 for generate, 300 for evaluate
  int loop_episodes = 100;           // playtests per evaluation inside generation
  int rollout = kDefaultHorizon;
  double delta = kDefaultDelta;
  bool common_random_numbers = false;
  std::uint64_t seed = 0;
  int workers = 1;
  std::string out_dir;  // empty: nothing written
  std::vector<std::string> formats{"json"};
  bool logs = false;         // write full event logs (hashes are always reported)
  int grid_resolution = 20;  // occupancy grid cells per side
  std::string skills_path;   // evaluate: skills file written by generate

  int resolved_eval_episodes() const;
};

// Throws ConfigError describing every problem found.
void validate_config(const ExperimentConfig& cfg);

// Episode seeds are experiment_seed(...) + episode index.
std::uint64_t experiment_seed(std::uint64_t master, std::uint64_t target_index, std::uint64_t sample_index,
                              std::uint64_t eval_index);
inline constexpr std::uint64_t kFinalEvalIndex = 1ULL << 32;  // eval index of the post-generation measurement
inline constexpr std::uint64_t kReevalIndex = kFinalEvalIndex + 1;  // evaluate mode: fresh episodes
inline constexpr std::uint64_t kGeneratorStream = 0x67656eULL;

// ---------------------------------------------------------------------------

struct SettingResult {
  std::string label;
  std::optional<double> range;
  WinRateEstimate estimate;
  double mean_duration_ticks = 0.0;
  std::string log_hash;  // sha256 over the per-episode log hashes, in episode order
  OccupancyGrid occupancy;
};

struct PlaytestResult {
  std::vector<SettingResult> settings;
};

struct SampleRecord {
  int target_index = 0;
  int sample_index = 0;
  GeneratedSkill generated;
  double measured = 0.0;  // W_c
};

struct TargetSummary {
  double target = 0.0;
  int samples = 0;
  double mean_measured = 0.0;
  double sd_measured = 0.0;
  WinrateError error;
  std::optional<DiversityReport> diversity;  // empty when nothing passes the filter
};

struct GenerationResult {
  std::vector<SampleRecord> records;  // target-major order
  std::vector<TargetSummary> targets;
  TargetSummary pooled;
};

PlaytestResult run_playtest_experiment(const ExperimentConfig& cfg, const ScenarioConfig& scenario);
GenerationResult run_generation_experiment(const ExperimentConfig& cfg, const ScenarioConfig& scenario);
// Re-measures records read from a skills document.
GenerationResult run_evaluation_experiment(const ExperimentConfig& cfg, const ScenarioConfig& scenario,
                                           std::vector<SampleRecord> records);

GenerationResult summarize(const ExperimentConfig& cfg, const ScenarioConfig& scenario,
                           std::vector<SampleRecord> records);

// ---------------------------------------------------------------------------
// Reports

nlohmann::json config_json(const ExperimentConfig& cfg);
nlohmann::json report_json(const ExperimentConfig& cfg, const PlaytestResult& r);
nlohmann::json report_json(const ExperimentConfig& cfg, const GenerationResult& r);
nlohmann::json skills_json(const GenerationResult& r);
std::vector<SampleRecord> parse_skills(const nlohmann::json& doc);

// Sorted keys, floats with exactly six decimals.
std::string dump_fixed(const nlohmann::json& value);

// Writes <stem>.json, <stem>_<table>.csv and <stem>.md (per `formats`) from
// report["tables"]. Returns the paths written. Tables without rows produce
// header-only files and a warning on stderr.
std::vector<std::string> emit_report(const nlohmann::json& report, const std::string& out_dir,
                                     const std::string& stem, const std::vector<std::string>& formats);

// Loads the scenario and runs the configured experiment, writing reports
// into cfg.out_dir. Returns the report document.
nlohmann::json run_experiment(const ExperimentConfig& cfg);

}  // namespace raidenv
