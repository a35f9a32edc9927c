#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "raidenv/harness.hpp"
#include "support.hpp"

using namespace raidenv;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("raidenv_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

ExperimentConfig small_playtest() {
  ExperimentConfig c;
  c.mode = ExperimentMode::Playtest;
  c.episodes = 12;
  c.ranges = {5, 17};
  c.seed = 2024;
  c.grid_resolution = 8;
  c.formats = {"json", "csv", "md"};
  return c;
}

ExperimentConfig small_generate() {
  ExperimentConfig c;
  c.mode = ExperimentMode::Generate;
  c.targets = {0.2, 0.6};
  c.samples = 3;
  c.rollout = 4;
  c.loop_episodes = 4;
  c.eval_episodes = 6;
  c.seed = 5;
  c.formats = {"json", "csv", "md"};
  return c;
}

}  // namespace

TEST_CASE("config validation fails before any episode runs") {
  ExperimentConfig c = small_generate();
  c.samples = 0;
  CHECK_THROWS_AS(validate_config(c), ConfigError);
  CHECK_THROWS_AS(run_experiment(c), ConfigError);

  c = small_playtest();
  c.episodes = 0;
  c.ranges = {25};
  c.formats = {"xml"};
  try {
    validate_config(c);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("episodes") != std::string::npos);
    CHECK(msg.find("range") != std::string::npos);
    CHECK(msg.find("xml") != std::string::npos);
  }

  c = small_generate();
  c.targets = {1.2};
  CHECK_THROWS_AS(validate_config(c), ConfigError);
  c = small_generate();
  c.scenario_path = "/nonexistent/scenario.json";
  CHECK_THROWS_AS(run_experiment(c), ConfigError);
  c = small_generate();
  c.mode = ExperimentMode::Evaluate;
  CHECK_THROWS_AS(validate_config(c), ConfigError);

  CHECK(small_generate().resolved_eval_episodes() == 6);
  ExperimentConfig d;
  d.mode = ExperimentMode::Evaluate;
  CHECK(d.resolved_eval_episodes() == 300);
  d.mode = ExperimentMode::Generate;
  CHECK(d.resolved_eval_episodes() == 100);
  CHECK(d.episodes == 500);
  CHECK(d.loop_episodes == 100);
}

TEST_CASE("seed scheme") {
  CHECK(experiment_seed(1, 0, 0, 0) == hash_seed({1, 0, 0, 0}));
  CHECK(experiment_seed(1, 0, 0, 0) != experiment_seed(1, 0, 0, 1));
  CHECK(experiment_seed(1, 1, 0, 0) != experiment_seed(1, 0, 1, 0));
}

TEST_CASE("playtest reports are identical for 1 and 8 workers") {
  ExperimentConfig a = small_playtest();
  a.workers = 1;
  ExperimentConfig b = a;
  b.workers = 8;
  const ScenarioConfig& sc = benchmark_default();
  const PlaytestResult ra = run_playtest_experiment(a, sc);
  const PlaytestResult rb = run_playtest_experiment(b, sc);
  REQUIRE(ra.settings.size() == 2);
  CHECK(dump_fixed(report_json(a, ra)) == dump_fixed(report_json(a, rb)));
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(ra.settings[i].log_hash == rb.settings[i].log_hash);
    CHECK(ra.settings[i].estimate.wins == rb.settings[i].estimate.wins);
    CHECK(ra.settings[i].occupancy.cells == rb.settings[i].occupancy.cells);
  }
  CHECK(ra.settings[0].label == "range_5");
  CHECK(ra.settings[1].label == "range_17");
  // the grid holds mean living-player ticks per episode
  for (const auto& s : ra.settings) CHECK(s.occupancy.total() > 0.0);
}

TEST_CASE("report files are byte-identical across runs and worker counts") {
  const fs::path d1 = scratch_dir("rep1");
  const fs::path d2 = scratch_dir("rep2");
  ExperimentConfig a = small_generate();
  a.out_dir = d1.string();
  a.workers = 1;
  ExperimentConfig b = a;
  b.out_dir = d2.string();
  b.workers = 8;
  run_experiment(a);
  run_experiment(b);
  int files = 0;
  for (const auto& entry : fs::directory_iterator(d1)) {
    const fs::path other = d2 / entry.path().filename();
    REQUIRE(fs::exists(other));
    CHECK_MESSAGE(slurp(entry.path()) == slurp(other), entry.path().filename().string());
    ++files;
  }
  // report.json, report.md, three csv tables, skills.json
  CHECK(files == 6);
  const std::string md = slurp(d1 / "report.md");
  CHECK(md.find("## controllability") != std::string::npos);
  CHECK(md.find("| target | method | samples | mean_wc |") != std::string::npos);
}

TEST_CASE("generate then evaluate") {
  const fs::path d = scratch_dir("geneval");
  ExperimentConfig g = small_generate();
  g.out_dir = d.string();
  const json rep = run_experiment(g);
  CHECK(rep["kind"] == "generate");
  CHECK(rep["targets"].size() == 2);
  const json skills = json::parse(slurp(d / "skills.json"));
  REQUIRE(skills["skills"].size() == 6);
  for (const auto& s : skills["skills"]) CHECK(validate_skill(s["skill"]).ok());

  const std::vector<SampleRecord> recs = parse_skills(skills);
  REQUIRE(recs.size() == 6);
  CHECK(recs[4].target_index == 1);
  CHECK(recs[4].sample_index == 1);
  CHECK(recs[4].generated.target == 0.6);

  ExperimentConfig e = small_generate();
  e.mode = ExperimentMode::Evaluate;
  e.skills_path = (d / "skills.json").string();
  e.eval_episodes = 10;
  const json ev = run_experiment(e);
  CHECK(ev["kind"] == "evaluate");
  CHECK(ev["pooled"]["samples"] == 6);

  CHECK_THROWS_AS(parse_skills(json{{"skills", {{{"target", 0.3}}}}}), ConfigError);
  CHECK_THROWS_AS(parse_skills(json::array()), ConfigError);
}

TEST_CASE("random generator rollouts never evaluate in the loop") {
  ExperimentConfig c = small_generate();
  c.method = GenMethod::Random;
  const GenerationResult r = run_generation_experiment(c, benchmark_default());
  REQUIRE(r.records.size() == 6);
  for (const auto& rec : r.records) CHECK_FALSE(rec.generated.last_win_rate.has_value());
}

TEST_CASE("dump_fixed") {
  const json v = {{"b", 1.0 / 3.0}, {"a", {1, 2.5, -0.0000001}}, {"c", {{"z", true}, {"y", nullptr}}}, {"d", "x"}};
  CHECK(dump_fixed(v) ==
        "{\n"
        "  \"a\": [1, 2.500000, 0.000000],\n"
        "  \"b\": 0.333333,\n"
        "  \"c\": {\n"
        "    \"y\": null,\n"
        "    \"z\": true\n"
        "  },\n"
        "  \"d\": \"x\"\n"
        "}");
  CHECK(dump_fixed(json::array()) == "[]");
}

TEST_CASE("empty tables produce header-only files") {
  const fs::path d = scratch_dir("empty");
  json report = {{"kind", "playtest"},
                 {"tables", {{"win_rate", {{"columns", {"setting", "win_rate"}}, {"rows", json::array()}}}}}};
  const auto paths = emit_report(report, d.string(), "report", {"csv", "md", "json"});
  CHECK(paths.size() == 3);
  CHECK(slurp(d / "report_win_rate.csv") == "setting,win_rate\n");
  CHECK(slurp(d / "report.md") == "# report\n\nkind: playtest\n\n## win_rate\n\n| setting | win_rate |\n|---|---|\n");
  CHECK_THROWS_AS(emit_report(report, d.string(), "report", {"xml"}), ConfigError);
}

TEST_CASE("playtest logs are written on request and match the reported hash") {
  const fs::path d = scratch_dir("logs");
  ExperimentConfig c = small_playtest();
  c.episodes = 2;
  c.ranges = {9};
  c.logs = true;
  c.out_dir = d.string();
  const json rep = run_experiment(c);
  const std::string h0 = sha256_hex(slurp(d / "logs" / "range_9" / "episode_0.jsonl"));
  const std::string h1 = sha256_hex(slurp(d / "logs" / "range_9" / "episode_1.jsonl"));
  CHECK(rep["results"][0]["log_hash"] == sha256_hex(h0 + "\n" + h1 + "\n"));
}
