// raidenv command line: playtest, generate, evaluate, env-serve, report.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "raidenv/harness.hpp"
#include "raidenv/protocol.hpp"

using namespace raidenv;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

struct Flags {
  ExperimentConfig cfg;
  std::string agent = "heuristic";
  std::string method = "heuristic";
  std::vector<double> targets;
  std::string format = "json";
  int eval_episodes = 0;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--scenario", f.cfg.scenario_path, "scenario JSON (default: bundled benchmark_default)");
  sub->add_option("--seed", f.cfg.seed, "master seed");
  sub->add_option("--workers", f.cfg.workers, "worker threads");
  sub->add_option("--out", f.cfg.out_dir, "output directory");
  sub->add_option("--format", f.format, "report formats, comma separated: json,csv,md");
  sub->add_option("--agent", f.agent, "playtesting agent: heuristic|random");
}

void finish_flags(Flags& f) {
  f.cfg.agent = parse_agent(f.agent);
  f.cfg.method = parse_method(f.method);
  if (!f.targets.empty()) f.cfg.targets = f.targets;
  if (f.eval_episodes > 0) f.cfg.eval_episodes = f.eval_episodes;
  else if (f.eval_episodes < 0) throw ConfigError("eval episodes must be >= 1");
  f.cfg.formats.clear();
  std::string cur;
  for (char c : f.format + ",") {
    if (c == ',') {
      if (!cur.empty()) f.cfg.formats.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
}

void print_summary(const nlohmann::json& report) {
  if (!report.contains("tables")) return;
  const auto& tables = report["tables"];
  const char* key = tables.contains("win_rate") ? "win_rate" : "controllability";
  if (!tables.contains(key)) return;
  const auto& t = tables[key];
  for (std::size_t i = 0; i < t["columns"].size(); ++i) std::cout << (i ? "\t" : "") << t["columns"][i].get<std::string>();
  std::cout << "\n";
  for (const auto& row : t["rows"]) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) std::cout << "\t";
      const auto& c = row[i];
      if (c.is_number_float()) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6f", c.get<double>());
        std::cout << buf;
      } else if (c.is_string()) std::cout << c.get<std::string>();
      else std::cout << c.dump();
    }
    std::cout << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"raidenv: boss-raid playtesting and skill generation"};
  app.require_subcommand(1);

  Flags play;
  play.cfg.mode = ExperimentMode::Playtest;
  auto* p = app.add_subcommand("playtest", "run playtesting episodes and report win rates");
  add_common(p, play);
  p->add_option("--episodes", play.cfg.episodes, "episodes per setting");
  p->add_option("--ranges", play.cfg.ranges, "player skill ranges to sweep");
  p->add_option("--grid", play.cfg.grid_resolution, "occupancy grid resolution");
  p->add_flag("--logs", play.cfg.logs, "write every episode's event log under <out>/logs");

  Flags gen;
  gen.cfg.mode = ExperimentMode::Generate;
  auto* g = app.add_subcommand("generate", "generate skills toward target win rates");
  add_common(g, gen);
  g->add_option("--method", gen.method, "generator: heuristic|random");
  g->add_option("--target", gen.targets, "target win rates (default 0.1 .. 0.7)");
  g->add_option("--samples", gen.cfg.samples, "skills per target");
  g->add_option("--eval-episodes", gen.eval_episodes, "episodes measuring each final skill (default 100)");
  g->add_option("--rollout", gen.cfg.rollout, "generator steps per sample");
  g->add_option("--rollout-episodes", gen.cfg.loop_episodes, "episodes per evaluation inside a rollout");
  g->add_option("--delta", gen.cfg.delta, "action step as a fraction of each parameter span");
  g->add_flag("--crn", gen.cfg.common_random_numbers, "reuse one seed set for every in-rollout evaluation");

  Flags ev;
  ev.cfg.mode = ExperimentMode::Evaluate;
  auto* e = app.add_subcommand("evaluate", "re-measure generated skills");
  add_common(e, ev);
  e->add_option("--skills", ev.cfg.skills_path, "skills.json written by generate")->required();
  e->add_option("--eval-episodes", ev.eval_episodes, "episodes per skill (default 300)");

  std::string serve_mode = "playtest";
  std::string transport = "stdio";
  std::string serve_scenario;
  std::string serve_agent = "heuristic";
  int port = 5555;
  int serve_eval = 100;
  int serve_horizon = kDefaultHorizon;
  double serve_delta = kDefaultDelta;
  auto* s = app.add_subcommand("env-serve", "serve the environment protocol to an external learner");
  s->add_option("--mode", serve_mode, "playtest|generate");
  s->add_option("--transport", transport, "stdio|socket");
  s->add_option("--port", port, "TCP port for the socket transport (127.0.0.1)");
  s->add_option("--scenario", serve_scenario, "scenario JSON");
  s->add_option("--agent", serve_agent, "playtesting agent for generate-mode evaluation");
  s->add_option("--eval-episodes", serve_eval, "episodes per generate-mode evaluation");
  s->add_option("--rollout", serve_horizon, "generate-mode horizon");
  s->add_option("--delta", serve_delta, "generate-mode action step");

  std::string report_in;
  std::string report_out;
  std::string report_format = "md";
  auto* r = app.add_subcommand("report", "re-emit an existing report.json as csv/md/json");
  r->add_option("input", report_in, "report.json")->required();
  r->add_option("--out", report_out, "output directory (default: next to the input)");
  r->add_option("--format", report_format, "formats, comma separated");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    Flags* chosen = p->parsed() ? &play : g->parsed() ? &gen : e->parsed() ? &ev : nullptr;
    if (chosen) {
      finish_flags(*chosen);
      const nlohmann::json report = run_experiment(chosen->cfg);
      print_summary(report);
      return kExitOk;
    }
    if (s->parsed()) {
      SessionOptions so;
      so.mode = parse_env_mode(serve_mode);
      so.eval_agent = parse_agent(serve_agent);
      so.eval_episodes = serve_eval;
      so.horizon = serve_horizon;
      so.delta = serve_delta;
      if (transport != "stdio" && transport != "socket") throw ConfigError("transport must be stdio or socket");
      ScenarioConfig sc;
      try {
        sc = serve_scenario.empty() ? benchmark_default() : load_scenario_file(serve_scenario);
      } catch (const ContentException& ce) {
        throw ConfigError(format_errors(ce.errors()));
      }
      EnvSession session(sc, so);
      if (transport == "stdio") serve_stream(session, std::cin, std::cout);
      else serve_socket(session, port);
      return kExitOk;
    }
    if (r->parsed()) {
      std::ifstream f(report_in);
      if (!f) throw ConfigError("cannot open " + report_in);
      nlohmann::json doc;
      try {
        doc = nlohmann::json::parse(f);
      } catch (const nlohmann::json::parse_error& pe) {
        throw ConfigError(std::string("report: ") + pe.what());
      }
      Flags tmp;
      tmp.format = report_format;
      finish_flags(tmp);
      std::string dir = report_out;
      if (dir.empty()) {
        const auto slash = report_in.find_last_of('/');
        dir = slash == std::string::npos ? "." : report_in.substr(0, slash);
      }
      for (const auto& path : emit_report(doc, dir, "report", tmp.cfg.formats)) std::cout << path << "\n";
      return kExitOk;
    }
  } catch (const ConfigError& ce) {
    std::cerr << "error: " << ce.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& ia) {
    std::cerr << "error: " << ia.what() << "\n";
    return kExitValidation;
  } catch (const ContentException& ce) {
    std::cerr << "error: " << ce.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& ex) {
    std::cerr << "runtime error: " << ex.what() << "\n";
    return kExitRuntime;
  }
  return kExitRuntime;
}
