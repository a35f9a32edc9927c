#include "raidenv/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>

#include "raidenv/parallel.hpp"

namespace raidenv {

using nlohmann::json;
namespace fs = std::filesystem;

std::string_view to_string(ExperimentMode m) {
  switch (m) {
    case ExperimentMode::Playtest: return "playtest";
    case ExperimentMode::Generate: return "generate";
    case ExperimentMode::Evaluate: return "evaluate";
  }
  return "?";
}

int ExperimentConfig::resolved_eval_episodes() const {
  if (eval_episodes) return *eval_episodes;
  return mode == ExperimentMode::Evaluate ? 300 : 100;
}

void validate_config(const ExperimentConfig& cfg) {
  std::vector<std::string> problems;
  auto need = [&](bool ok, const std::string& msg) {
    if (!ok) problems.push_back(msg);
  };
  need(cfg.episodes >= 1, "episodes must be >= 1");
  need(cfg.samples >= 1, "samples must be >= 1");
  need(cfg.resolved_eval_episodes() >= 1, "eval episodes must be >= 1");
  need(cfg.loop_episodes >= 1, "rollout evaluation episodes must be >= 1");
  need(cfg.rollout >= 1, "rollout must be >= 1");
  need(std::isfinite(cfg.delta) && cfg.delta >= 0.0, "delta must be a finite value >= 0");
  need(cfg.workers >= 1, "workers must be >= 1");
  need(cfg.grid_resolution >= 1, "grid resolution must be >= 1");
  need(!cfg.targets.empty(), "at least one target is required");
  for (double t : cfg.targets) need(t >= 0.0 && t <= 1.0, "target " + std::to_string(t) + " outside [0, 1]");
  for (double r : cfg.ranges) need(r >= 1.0 && r <= 20.0, "range " + std::to_string(r) + " outside [1, 20]");
  for (const std::string& f : cfg.formats)
    need(f == "json" || f == "csv" || f == "md", "unknown format '" + f + "' (json|csv|md)");
  if (cfg.mode != ExperimentMode::Playtest)
    need(cfg.method != GenMethod::External, "external generators connect through env-serve");
  if (cfg.mode == ExperimentMode::Evaluate) need(!cfg.skills_path.empty(), "evaluate needs a skills file");
  if (problems.empty()) return;
  std::string msg;
  for (const auto& p : problems) msg += (msg.empty() ? "" : "; ") + p;
  throw ConfigError(msg);
}

std::uint64_t experiment_seed(std::uint64_t master, std::uint64_t target_index, std::uint64_t sample_index,
                              std::uint64_t eval_index) {
  return hash_seed({master, target_index, sample_index, eval_index});
}

namespace {

std::string number_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / (static_cast<double>(v.size()) - 1.0));
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace

// ---------------------------------------------------------------------------

PlaytestResult run_playtest_experiment(const ExperimentConfig& cfg, const ScenarioConfig& scenario) {
  validate_config(cfg);
  struct Setting {
    std::string label;
    std::optional<double> range;
    ScenarioConfig sc;
  };
  std::vector<Setting> settings;
  if (cfg.ranges.empty()) {
    settings.push_back({"default", std::nullopt, scenario});
  } else {
    for (double r : cfg.ranges) {
      Setting s{"range_" + number_label(r), r, scenario};
      apply_player_param(s.sc, "range", r);
      settings.push_back(std::move(s));
    }
  }

  struct EpisodeSummary {
    bool win = false;
    int duration = 0;
    std::string hash;
    std::vector<double> cells;
  };
  const std::size_t n_ep = static_cast<std::size_t>(cfg.episodes);
  std::vector<EpisodeSummary> eps(settings.size() * n_ep);
  const std::vector<Policy> policies = make_policies(cfg.agent, scenario.players.size());
  RunOptions opts;
  opts.engine.record_trace = true;

  parallel_for(eps.size(), cfg.workers, [&](std::size_t idx) {
    const std::size_t si = idx / n_ep;
    const std::size_t e = idx % n_ep;
    const Setting& s = settings[si];
    const std::uint64_t seed = experiment_seed(cfg.seed, si, 0, 0) + e;
    const EpisodeLog log = run_episode(s.sc, policies, seed, opts);
    EpisodeSummary& out = eps[idx];
    out.win = log.outcome.win;
    out.duration = log.outcome.duration_ticks;
    out.hash = log_hash(log.events);
    out.cells = occupancy_grid({log.outcome.position_trace}, cfg.grid_resolution, s.sc.arena_radius).cells;
    if (cfg.logs && !cfg.out_dir.empty())
      write_file(fs::path(cfg.out_dir) / "logs" / s.label / ("episode_" + std::to_string(e) + ".jsonl"),
                 export_log(log.events));
  });

  PlaytestResult result;
  for (std::size_t si = 0; si < settings.size(); ++si) {
    SettingResult r;
    r.label = settings[si].label;
    r.range = settings[si].range;
    int wins = 0;
    double dur = 0.0;
    std::string hashes;
    std::vector<double> cells(static_cast<std::size_t>(cfg.grid_resolution) * cfg.grid_resolution, 0.0);
    for (std::size_t e = 0; e < n_ep; ++e) {
      const EpisodeSummary& s = eps[si * n_ep + e];
      wins += s.win ? 1 : 0;
      dur += s.duration;
      hashes += s.hash;
      hashes += '\n';
      for (std::size_t c = 0; c < cells.size(); ++c) cells[c] += s.cells[c];
    }
    r.estimate = make_estimate(wins, cfg.episodes, experiment_seed(cfg.seed, si, 0, 0));
    r.mean_duration_ticks = dur / cfg.episodes;
    r.log_hash = sha256_hex(hashes);
    r.occupancy.resolution = cfg.grid_resolution;
    r.occupancy.radius = settings[si].sc.arena_radius;
    r.occupancy.episodes = cfg.episodes;
    for (double& c : cells) c /= cfg.episodes;
    r.occupancy.cells = std::move(cells);
    result.settings.push_back(std::move(r));
  }
  return result;
}

// ---------------------------------------------------------------------------

GenerationResult summarize(const ExperimentConfig& /*cfg*/, const ScenarioConfig& scenario,
                           std::vector<SampleRecord> records) {
  GenerationResult out;
  std::map<int, std::vector<const SampleRecord*>> groups;
  for (const SampleRecord& r : records) groups[r.target_index].push_back(&r);

  auto summary_of = [&](const std::vector<const SampleRecord*>& rs) {
    TargetSummary t;
    t.samples = static_cast<int>(rs.size());
    std::vector<ControllabilitySample> cs;
    std::vector<double> measured;
    for (const SampleRecord* r : rs) {
      cs.push_back({r->generated.target, r->measured, r->generated.skill});
      measured.push_back(r->measured);
    }
    t.mean_measured = mean_of(measured);
    t.sd_measured = sd_of(measured);
    t.error = winrate_error(cs);
    try {
      t.diversity = diversity_report(cs, scenario.param_bounds, 0.1);
    } catch (const EmptyAfterFilter&) {
      t.diversity.reset();
    }
    return t;
  };

  std::vector<const SampleRecord*> all;
  for (auto& [ti, rs] : groups) {
    TargetSummary t = summary_of(rs);
    t.target = rs.front()->generated.target;
    out.targets.push_back(std::move(t));
    all.insert(all.end(), rs.begin(), rs.end());
  }
  if (!all.empty()) out.pooled = summary_of(all);
  out.records = std::move(records);
  return out;
}

GenerationResult run_generation_experiment(const ExperimentConfig& cfg, const ScenarioConfig& scenario) {
  validate_config(cfg);
  GenConfig gc;
  gc.bounds = scenario.param_bounds;
  gc.delta = cfg.delta;
  gc.horizon = cfg.rollout;
  gc.common_random_numbers = cfg.common_random_numbers;
  const SkillSpec base = scenario.players.front().skills.front();
  const int eval_eps = cfg.resolved_eval_episodes();
  const std::size_t n_s = static_cast<std::size_t>(cfg.samples);

  std::vector<SampleRecord> records(cfg.targets.size() * n_s);
  parallel_for(records.size(), cfg.workers, [&](std::size_t idx) {
    const std::uint64_t ti = idx / n_s;
    const std::uint64_t si = idx % n_s;
    CounterRng rng(experiment_seed(cfg.seed, ti, si, kGeneratorStream));
    const Evaluator eval = [&](const SkillSpec& s, int e) {
      return evaluate_skill(scenario, s, cfg.agent, cfg.loop_episodes,
                            experiment_seed(cfg.seed, ti, si, static_cast<std::uint64_t>(e)));
    };
    SampleRecord& r = records[idx];
    r.target_index = static_cast<int>(ti);
    r.sample_index = static_cast<int>(si);
    r.generated = generate_one(cfg.method, cfg.targets[ti], gc, base, rng, eval);
    r.measured = evaluate_skill(scenario, r.generated.skill, cfg.agent, eval_eps,
                                experiment_seed(cfg.seed, ti, si, kFinalEvalIndex));
  });
  return summarize(cfg, scenario, std::move(records));
}

GenerationResult run_evaluation_experiment(const ExperimentConfig& cfg, const ScenarioConfig& scenario,
                                           std::vector<SampleRecord> records) {
  validate_config(cfg);
  if (records.empty()) throw ConfigError("skills file holds no skills");
  const int eval_eps = cfg.resolved_eval_episodes();
  parallel_for(records.size(), cfg.workers, [&](std::size_t i) {
    SampleRecord& r = records[i];
    r.measured = evaluate_skill(scenario, r.generated.skill, cfg.agent, eval_eps,
                                experiment_seed(cfg.seed, static_cast<std::uint64_t>(r.target_index),
                                                static_cast<std::uint64_t>(r.sample_index), kReevalIndex));
  });
  return summarize(cfg, scenario, std::move(records));
}

// ---------------------------------------------------------------------------
// Reports

json config_json(const ExperimentConfig& cfg) {
  json j{{"mode", to_string(cfg.mode)},
         {"scenario", cfg.scenario_path.empty() ? "benchmark_default" : cfg.scenario_path},
         {"agent", to_string(cfg.agent)},
         {"seed", cfg.seed}};
  if (cfg.mode == ExperimentMode::Playtest) {
    j["episodes"] = cfg.episodes;
    j["ranges"] = cfg.ranges;
    j["grid_resolution"] = cfg.grid_resolution;
  } else {
    j["method"] = to_string(cfg.method);
    j["eval_episodes"] = cfg.resolved_eval_episodes();
    if (cfg.mode == ExperimentMode::Generate) {
      j["targets"] = cfg.targets;
      j["samples"] = cfg.samples;
      j["rollout"] = cfg.rollout;
      j["rollout_episodes"] = cfg.loop_episodes;
      j["delta"] = cfg.delta;
      j["common_random_numbers"] = cfg.common_random_numbers;
    } else {
      j["skills"] = cfg.skills_path;
    }
  }
  return j;
}

namespace {

json table(std::vector<std::string> columns, json rows, bool markdown = true) {
  return json{{"columns", std::move(columns)}, {"rows", std::move(rows)}, {"markdown", markdown}};
}

json diversity_json(const std::optional<DiversityReport>& d) {
  if (!d) return nullptr;
  return json{{"retained", d->retained},
              {"range_sd", d->range_sd},
              {"cool_time_sd", d->cool_sd},
              {"cast_time_sd", d->cast_sd},
              {"damage_sd", d->damage_sd},
              {"pca_sd", d->pca_sd},
              {"pca_component", d->pca_component}};
}

json summary_json(const TargetSummary& t) {
  return json{{"target", t.target},
              {"samples", t.samples},
              {"mean_measured", t.mean_measured},
              {"sd_measured", t.sd_measured},
              {"mean_abs_error", t.error.mean_abs_error},
              {"sd_abs_error", t.error.sd},
              {"diversity", diversity_json(t.diversity)}};
}

}  // namespace

json report_json(const ExperimentConfig& cfg, const PlaytestResult& r) {
  json results = json::array();
  json occupancy = json::object();
  json wr_rows = json::array();
  json occ_rows = json::array();
  for (const SettingResult& s : r.settings) {
    results.push_back({{"label", s.label},
                       {"range", s.range ? json(*s.range) : json(nullptr)},
                       {"episodes", s.estimate.n},
                       {"wins", s.estimate.wins},
                       {"win_rate", s.estimate.mean},
                       {"sample_sd", s.estimate.sample_sd},
                       {"mean_duration_ticks", s.mean_duration_ticks},
                       {"log_hash", s.log_hash}});
    json grid = json::array();
    for (int row = 0; row < s.occupancy.resolution; ++row) {
      json line = json::array();
      for (int col = 0; col < s.occupancy.resolution; ++col) {
        line.push_back(s.occupancy.at(row, col));
        occ_rows.push_back({s.label, row, col, s.occupancy.at(row, col)});
      }
      grid.push_back(std::move(line));
    }
    occupancy[s.label] = {{"resolution", s.occupancy.resolution}, {"radius", s.occupancy.radius}, {"cells", grid}};
    wr_rows.push_back({s.label, to_string(cfg.agent), s.estimate.n, s.estimate.wins, s.estimate.mean,
                       s.estimate.sample_sd, s.log_hash});
  }
  json tables{
      {"win_rate", table({"setting", "agent", "episodes", "wins", "win_rate", "sd", "log_hash"}, wr_rows)},
      {"occupancy", table({"setting", "row", "col", "visits_per_episode"}, occ_rows, false)}};
  return json{{"kind", "playtest"},
              {"config", config_json(cfg)},
              {"results", results},
              {"occupancy", occupancy},
              {"tables", tables}};
}

json report_json(const ExperimentConfig& cfg, const GenerationResult& r) {
  const std::string method = to_string(cfg.method).data();
  json per_target = json::array();
  json ctrl_rows = json::array();
  json div_rows = json::array();
  auto add_rows = [&](const json& label, const TargetSummary& t) {
    ctrl_rows.push_back({label, method, t.samples, t.mean_measured, t.sd_measured, t.error.mean_abs_error, t.error.sd});
    if (t.diversity) {
      const DiversityReport& d = *t.diversity;
      div_rows.push_back({label, method, d.retained, d.range_sd, d.cool_sd, d.cast_sd, d.damage_sd, d.pca_sd});
    } else {
      div_rows.push_back({label, method, 0, nullptr, nullptr, nullptr, nullptr, nullptr});
    }
  };
  for (const TargetSummary& t : r.targets) {
    per_target.push_back(summary_json(t));
    add_rows(t.target, t);
  }
  if (!r.targets.empty()) add_rows("mean", r.pooled);

  json skill_rows = json::array();
  for (const SampleRecord& s : r.records) {
    skill_rows.push_back({s.generated.target, s.sample_index, s.generated.skill.cool_time, s.generated.skill.range,
                          s.generated.skill.coefficient, s.generated.skill.cast_time, s.measured,
                          s.generated.last_win_rate ? json(*s.generated.last_win_rate) : json(nullptr)});
  }
  json tables{
      {"controllability",
       table({"target", "method", "samples", "mean_wc", "sd_wc", "mean_abs_error", "sd_abs_error"}, ctrl_rows)},
      {"diversity",
       table({"target", "method", "retained", "range_sd", "cool_time_sd", "cast_time_sd", "damage_sd", "pca_sd"},
             div_rows)},
      {"skills",
       table({"target", "sample", "cool_time", "range", "damage", "cast_time", "measured", "last_in_loop"},
             skill_rows, false)}};
  return json{{"kind", to_string(cfg.mode)},
              {"config", config_json(cfg)},
              {"targets", per_target},
              {"pooled", r.targets.empty() ? json(nullptr) : summary_json(r.pooled)},
              {"tables", tables}};
}

json skills_json(const GenerationResult& r) {
  json arr = json::array();
  for (const SampleRecord& s : r.records) {
    json e{{"target_index", s.target_index},
           {"sample_index", s.sample_index},
           {"target", s.generated.target},
           {"skill", to_json(s.generated.skill)},
           {"measured", s.measured}};
    if (s.generated.last_win_rate) e["last_in_loop"] = *s.generated.last_win_rate;
    arr.push_back(std::move(e));
  }
  return json{{"schema_version", 1}, {"skills", arr}};
}

std::vector<SampleRecord> parse_skills(const json& doc) {
  if (!doc.is_object() || !doc.contains("skills") || !doc["skills"].is_array())
    throw ConfigError("skills document needs a 'skills' array");
  std::vector<SampleRecord> out;
  for (std::size_t i = 0; i < doc["skills"].size(); ++i) {
    const json& e = doc["skills"][i];
    const std::string path = "skills[" + std::to_string(i) + "]";
    if (!e.is_object()) throw ConfigError(path + " must be an object");
    for (const char* key : {"target_index", "sample_index"})
      if (!e.contains(key) || !e[key].is_number_unsigned()) throw ConfigError(path + "." + key + " must be an integer >= 0");
    if (!e.contains("target") || !e["target"].is_number()) throw ConfigError(path + ".target must be a number");
    if (!e.contains("skill")) throw ConfigError(path + ".skill is missing");
    auto skill = validate_skill(e["skill"], path + ".skill");
    if (!skill) throw ConfigError(format_errors(skill.errors()));
    SampleRecord r;
    r.target_index = e["target_index"].get<int>();
    r.sample_index = e["sample_index"].get<int>();
    r.generated.target = e["target"].get<double>();
    if (!(r.generated.target >= 0.0 && r.generated.target <= 1.0)) throw ConfigError(path + ".target outside [0, 1]");
    r.generated.skill = skill.value();
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::string fixed6(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string s = buf;
  if (s == "-0.000000") s = "0.000000";
  return s;
}

void dump_into(const json& v, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (v.type()) {
    case json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {  // std::map: keys already sorted
        if (!first) out += ",\n";
        first = false;
        out += inner + json(it.key()).dump() + ": ";
        dump_into(it.value(), out, indent + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      const bool flat = std::none_of(v.begin(), v.end(), [](const json& e) { return e.is_structured(); });
      if (flat) {
        out += "[";
        for (std::size_t i = 0; i < v.size(); ++i) {
          if (i) out += ", ";
          dump_into(v[i], out, indent + 1);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",\n";
        out += inner;
        dump_into(v[i], out, indent + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case json::value_t::number_float: out += fixed6(v.get<double>()); return;
    default: out += v.dump(); return;
  }
}

std::string cell_text(const json& c) {
  if (c.is_null()) return "";
  if (c.is_string()) return c.get<std::string>();
  if (c.is_number_float()) return fixed6(c.get<double>());
  return c.dump();
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return q + "\"";
}

}  // namespace

std::string dump_fixed(const json& value) {
  std::string out;
  dump_into(value, out, 0);
  return out;
}

std::vector<std::string> emit_report(const json& report, const std::string& out_dir, const std::string& stem,
                                     const std::vector<std::string>& formats) {
  std::vector<std::string> written;
  const fs::path dir(out_dir);
  const json tables = report.contains("tables") ? report["tables"] : json::object();
  for (auto it = tables.begin(); it != tables.end(); ++it)
    if (it.value()["rows"].empty())
      std::cerr << "warning: table '" << it.key() << "' has no rows; writing header only\n";

  for (const std::string& f : formats) {
    if (f == "json") {
      const fs::path p = dir / (stem + ".json");
      write_file(p, dump_fixed(report) + "\n");
      written.push_back(p.string());
    } else if (f == "csv") {
      for (auto it = tables.begin(); it != tables.end(); ++it) {
        std::string text;
        const json& cols = it.value()["columns"];
        for (std::size_t i = 0; i < cols.size(); ++i) text += (i ? "," : "") + csv_escape(cols[i].get<std::string>());
        text += "\n";
        for (const json& row : it.value()["rows"]) {
          for (std::size_t i = 0; i < row.size(); ++i) text += (i ? "," : "") + csv_escape(cell_text(row[i]));
          text += "\n";
        }
        const fs::path p = dir / (stem + "_" + it.key() + ".csv");
        write_file(p, text);
        written.push_back(p.string());
      }
    } else if (f == "md") {
      std::string text = "# " + stem + "\n";
      if (report.contains("kind")) text += "\nkind: " + report["kind"].get<std::string>() + "\n";
      for (auto it = tables.begin(); it != tables.end(); ++it) {
        if (!it.value().value("markdown", true)) continue;
        text += "\n## " + it.key() + "\n\n";
        const json& cols = it.value()["columns"];
        text += "|";
        for (const json& c : cols) text += " " + c.get<std::string>() + " |";
        text += "\n|";
        for (std::size_t i = 0; i < cols.size(); ++i) text += "---|";
        text += "\n";
        for (const json& row : it.value()["rows"]) {
          text += "|";
          for (const json& c : row) text += " " + cell_text(c) + " |";
          text += "\n";
        }
      }
      const fs::path p = dir / (stem + ".md");
      write_file(p, text);
      written.push_back(p.string());
    } else {
      throw ConfigError("unknown format '" + f + "'");
    }
  }
  return written;
}

// ---------------------------------------------------------------------------

json run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  ScenarioConfig scenario;
  try {
    scenario = cfg.scenario_path.empty() ? benchmark_default() : load_scenario_file(cfg.scenario_path);
  } catch (const ContentException& e) {
    throw ConfigError(format_errors(e.errors()));
  }

  std::vector<SampleRecord> input;
  if (cfg.mode == ExperimentMode::Evaluate) {
    std::ifstream f(cfg.skills_path);
    if (!f) throw ConfigError("cannot open skills file " + cfg.skills_path);
    json doc;
    try {
      doc = json::parse(f);
    } catch (const json::parse_error& e) {
      throw ConfigError("skills file: " + std::string(e.what()));
    }
    input = parse_skills(doc);
  }

  json report;
  if (cfg.mode == ExperimentMode::Playtest) {
    report = report_json(cfg, run_playtest_experiment(cfg, scenario));
  } else {
    const GenerationResult r = cfg.mode == ExperimentMode::Generate
                                   ? run_generation_experiment(cfg, scenario)
                                   : run_evaluation_experiment(cfg, scenario, std::move(input));
    report = report_json(cfg, r);
    if (!cfg.out_dir.empty() && cfg.mode == ExperimentMode::Generate)
      write_file(fs::path(cfg.out_dir) / "skills.json", skills_json(r).dump(2) + "\n");
  }
  if (!cfg.out_dir.empty()) emit_report(report, cfg.out_dir, "report", cfg.formats);
  return report;
}

}  // namespace raidenv
