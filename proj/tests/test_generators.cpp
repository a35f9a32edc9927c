#include <cmath>
#include <map>

#include "doctest.h"
#include "raidenv/generators.hpp"
#include "support.hpp"

using namespace raidenv;

namespace {

SkillSpec mid_skill() {
  SkillSpec s;
  s.cool_time = 30.0;
  s.range = 10.0;
  s.coefficient = 0.75;
  s.cast_time = 1.0;
  return s;
}

GenAction levels(int a, int b, int c, int d) { return GenAction{{a, b, c, d}}; }

// Stub evaluator: a smooth function of the skill plus seeded noise.
Evaluator stub_evaluator(std::uint64_t seed) {
  return [seed](const SkillSpec& s, int e) {
    CounterRng r(hash_seed({seed, static_cast<std::uint64_t>(e)}));
    const double base = 0.5 + 0.02 * (s.range - 10.0) - 0.005 * (s.cool_time - 30.0) + 0.3 * (s.coefficient - 0.75);
    return std::clamp(base + 0.1 * (r.uniform01() - 0.5), 0.0, 1.0);
  };
}

}  // namespace

TEST_CASE("apply_action") {
  const ParamBounds b;
  const SkillSpec s = mid_skill();
  CHECK(apply_action(s, levels(0, 0, 0, 0), b) == s);

  // range 10 plus one delta step over span 19
  const SkillSpec up = apply_action(s, levels(0, 1, 0, 0), b, 0.0008);
  CHECK(std::fabs(up.range - 10.0152) <= 1e-12);
  CHECK(up.cool_time == s.cool_time);
  CHECK(up.name == s.name);
  CHECK(up.projectile_speed == s.projectile_speed);

  SkillSpec top = s;
  top.range = 20.0;
  CHECK(apply_action(top, levels(0, 2, 0, 0), b).range == 20.0);
  SkillSpec bottom = s;
  bottom.cool_time = 0.5;
  CHECK(apply_action(bottom, levels(-2, 0, 0, 0), b).cool_time == 0.5);

  const SkillSpec big = apply_action(s, levels(-2, 2, 1, -1), b, 0.1);
  CHECK(std::fabs(big.cool_time - (30.0 - 0.2 * 59.5)) <= 1e-12);
  CHECK(std::fabs(big.range - (10.0 + 0.2 * 19.0)) <= 1e-12);
  CHECK(std::fabs(big.coefficient - (0.75 + 0.1 * 0.5)) <= 1e-12);
  CHECK(std::fabs(big.cast_time - (1.0 - 0.1 * 1.0)) <= 1e-12);

  CHECK_THROWS_AS(apply_action(s, levels(3, 0, 0, 0), b), std::invalid_argument);
}

TEST_CASE("action wire encoding") {
  const GenAction a = decode_gen_action({0, 1, 2, 4});
  CHECK(a == levels(-2, -1, 0, 2));
  CHECK(encode_gen_action(a) == std::array<int, 4>{0, 1, 2, 4});
  CHECK_THROWS_AS(decode_gen_action({5, 0, 0, 0}), std::invalid_argument);
}

TEST_CASE("gen_env_reset") {
  GenConfig cfg;
  SUBCASE("degenerate bounds give a fixed initial skill") {
    for (auto& iv : cfg.bounds.bounds) iv.max = iv.min;
    CounterRng r1(1);
    CounterRng r2(2);
    const GenEpisode a = gen_env_reset(cfg, SkillSpec{}, 0.3, r1, stub_evaluator(0));
    const GenEpisode b = gen_env_reset(cfg, SkillSpec{}, 0.3, r2, stub_evaluator(0));
    CHECK(a.skill == b.skill);
    CHECK(a.skill.cool_time == 0.5);
    CHECK(a.skill.range == 1.0);
  }
  SUBCASE("target stored, distance set") {
    CounterRng r(5);
    const GenEpisode ep = gen_env_reset(cfg, SkillSpec{}, 0.3, r, [](const SkillSpec&, int) { return 0.55; });
    CHECK(ep.target == 0.3);
    CHECK(ep.win_rate == 0.55);
    CHECK(std::fabs(ep.distance - 0.25) <= 1e-15);
    CHECK(ep.t == 0);
    CHECK(ep.evaluations == 1);
  }
  SUBCASE("fixed seed gives the same initial skill") {
    CounterRng r1(17);
    CounterRng r2(17);
    CHECK(gen_env_reset(cfg, SkillSpec{}, 0.5, r1, stub_evaluator(1)).skill ==
          gen_env_reset(cfg, SkillSpec{}, 0.5, r2, stub_evaluator(1)).skill);
  }
  SUBCASE("initial skills are in bounds and valid") {
    CounterRng r(3);
    for (int i = 0; i < 200; ++i) {
      const SkillSpec s = sample_initial_skill(benchmark_default().players[0].skills[0], cfg.bounds, r);
      CHECK(check_skill(s).empty());
      for (GenParam p : kGenParams) CHECK(cfg.bounds[p].contains(get_param(s, p)));
    }
  }
  CounterRng r(1);
  CHECK_THROWS_AS(gen_env_reset(cfg, SkillSpec{}, 1.5, r, stub_evaluator(0)), std::invalid_argument);
}

TEST_CASE("gen_env_step rewards") {
  GenConfig cfg;
  cfg.horizon = 3;
  std::vector<double> script{0.7, 0.6, 0.6, 0.2};
  int calls = 0;
  const Evaluator ev = [&](const SkillSpec&, int) { return script[calls++]; };
  CounterRng r(1);
  GenEpisode ep = gen_env_reset(cfg, mid_skill(), 0.3, r, ev);
  CHECK(std::fabs(ep.distance - 0.4) <= 1e-15);
  GenStepResult s = gen_env_step(ep, levels(0, 1, 0, 0), cfg, ev);
  CHECK(std::fabs(s.reward - 0.1) <= 1e-12);
  CHECK_FALSE(s.done);
  s = gen_env_step(ep, levels(0, 0, 0, 0), cfg, ev);
  CHECK(s.reward == 0.0);
  s = gen_env_step(ep, levels(0, 0, 0, 0), cfg, ev);
  CHECK(s.done);
  CHECK(ep.t == 3);
  CHECK_THROWS_AS(gen_env_step(ep, levels(0, 0, 0, 0), cfg, ev), std::logic_error);
}

TEST_CASE("telescoping over 100 random generator episodes") {
  GenConfig cfg;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    CounterRng r(hash_seed({seed, 1}));
    const Evaluator ev = stub_evaluator(seed);
    GenEpisode ep = gen_env_reset(cfg, SkillSpec{}, 0.1 + 0.1 * (seed % 7), r, ev);
    const double l0 = ep.distance;
    double sum = 0.0;
    while (ep.t < ep.horizon) sum += gen_env_step(ep, pcg_rd_decide(r), cfg, ev).reward;
    CHECK(std::fabs(sum - (l0 - ep.distance)) <= 1e-12);
    CHECK(check_skill(ep.skill).empty());
  }
}

TEST_CASE("PCG-HR step examples") {
  const ParamBounds b;
  // find rng seeds that select each branch
  std::map<int, std::uint64_t> seed_for;
  for (std::uint64_t k = 0; seed_for.size() < 4; ++k) {
    CounterRng r(k);
    seed_for.emplace(static_cast<int>(r.uniform_int(4)), k);
  }
  auto run = [&](double wc, double wt, const SkillSpec& s, int sel) {
    CounterRng r(seed_for.at(sel));
    const HrStep h = pcg_hr_step(wc, wt, s, b, r);
    REQUIRE(h.selection == sel);
    return h;
  };
  const SkillSpec s = mid_skill();
  CHECK(run(0.2, 0.5, s, 0).skill.range == 11.5);
  CHECK(run(0.2, 0.5, s, 1).skill.cool_time == 20.0);
  CHECK(std::fabs(run(0.2, 0.5, s, 2).skill.cast_time - 0.67) <= 1e-12);
  CHECK(std::fabs(run(0.2, 0.5, s, 3).skill.coefficient - 1.0) <= 1e-12);
  CHECK(std::fabs(run(0.8, 0.5, s, 3).skill.coefficient - 0.5) <= 1e-12);
  CHECK(run(0.8, 0.5, s, 0).skill.range == 8.5);
  CHECK(run(0.8, 0.5, s, 1).skill.cool_time == 40.0);
  SkillSpec top = s;
  top.range = 20.0;
  CHECK(run(0.2, 0.5, top, 0).skill.range == 20.0);
  // equal win rates count as "not below target": harder
  CHECK_FALSE(run(0.5, 0.5, s, 0).easier);
}

TEST_CASE("PCG-HR direction property") {
  const ParamBounds b;
  CounterRng r(12);
  // sign of the easier direction for range, cool_time, cast_time, damage
  const double easier_sign[4] = {+1, -1, -1, +1};
  for (int i = 0; i < 2000; ++i) {
    SkillSpec s;
    s.range = 1.0 + 19.0 * r.uniform01();
    s.cool_time = 0.5 + 59.5 * r.uniform01();
    s.cast_time = 0.5 + r.uniform01();
    s.coefficient = 0.5 + 0.5 * r.uniform01();
    const double wc = r.uniform01();
    const double wt = r.uniform01();
    const HrStep h = pcg_hr_step(wc, wt, s, b, r);
    const GenParam p = std::array{GenParam::Range, GenParam::CoolTime, GenParam::CastTime, GenParam::Damage}[h.selection];
    const double moved = get_param(h.skill, p) - get_param(s, p);
    const double dir = (wc < wt ? 1.0 : -1.0) * easier_sign[h.selection];
    const double bound = dir > 0 ? b[p].max : b[p].min;
    CHECK((moved * dir > 0.0 || get_param(h.skill, p) == bound));
    CHECK(check_skill(h.skill).empty());
    for (GenParam q : kGenParams)
      if (q != p) CHECK(get_param(h.skill, q) == get_param(s, q));
  }
}

TEST_CASE("PCG-RD joint uniformity over 625 outcomes") {
  CounterRng r(625);
  std::vector<int> counts(625, 0);
  const int n = 625000;
  std::array<long long, 4> drift{};
  for (int i = 0; i < n; ++i) {
    const GenAction a = pcg_rd_decide(r);
    int idx = 0;
    for (int j = 0; j < 4; ++j) {
      idx = idx * 5 + a.levels[j] + 2;
      drift[j] += a.levels[j];
    }
    counts[idx]++;
  }
  const double p = 1.0 / 625.0;
  const double sigma = std::sqrt(n * p * (1.0 - p));
  double chi2 = 0.0;
  for (int c : counts) {
    CHECK(std::fabs(c - 1000.0) <= 4.0 * sigma);
    chi2 += (c - 1000.0) * (c - 1000.0) / 1000.0;
  }
  // chi2 with 624 degrees of freedom at 0.999
  CHECK(chi2 < 738.8907538179494);
  // symmetric levels: mean drift near zero (sd of one level is sqrt 2)
  for (long long d : drift) CHECK(std::fabs(static_cast<double>(d)) / n < 4.0 * std::sqrt(2.0 / n));

  CounterRng a(5);
  CounterRng b(5);
  CHECK(pcg_rd_decide(a) == pcg_rd_decide(b));
}

TEST_CASE("sample_skills") {
  GenConfig cfg;
  const SkillSpec base = benchmark_default().players[0].skills[0];
  auto rng_for = [](int i) { return CounterRng(hash_seed({77, static_cast<std::uint64_t>(i)})); };
  auto eval_for = [](int i) { return stub_evaluator(static_cast<std::uint64_t>(i)); };

  SUBCASE("random policy is reproducible") {
    const auto a = sample_skills(GenMethod::Random, 0.3, 3, cfg, base, rng_for, eval_for);
    const auto b = sample_skills(GenMethod::Random, 0.3, 3, cfg, base, rng_for, eval_for, {}, 3);
    REQUIRE(a.size() == 3);
    for (int i = 0; i < 3; ++i) {
      CHECK(a[i].skill == b[i].skill);
      CHECK(check_skill(a[i].skill).empty());
      CHECK_FALSE(a[i].last_win_rate.has_value());
    }
    CHECK_FALSE(a[0].skill == a[1].skill);
  }
  SUBCASE("random rollouts match stepping the environment") {
    // the shortcut that skips intermediate evaluations gives the same skill
    CounterRng r1 = rng_for(0);
    const GeneratedSkill g = generate_one(GenMethod::Random, 0.3, cfg, base, r1, {});
    CounterRng r2 = rng_for(0);
    SkillSpec s = sample_initial_skill(base, cfg.bounds, r2);
    for (int t = 0; t < cfg.horizon; ++t) s = apply_action(s, pcg_rd_decide(r2), cfg.bounds, cfg.delta);
    CHECK(g.skill == s);
  }
  SUBCASE("zero-delta external policy returns the initial skills") {
    const ExternalGenPolicy zero = [](const GenState&, double, double, int) { return GenAction{}; };
    const auto out = sample_skills(GenMethod::External, 0.3, 4, cfg, base, rng_for, eval_for, zero, 2);
    for (int i = 0; i < 4; ++i) {
      CounterRng r = rng_for(i);
      CHECK(out[i].skill == sample_initial_skill(base, cfg.bounds, r));
      CHECK(out[i].evaluations == cfg.horizon + 1);
    }
  }
  SUBCASE("heuristic evaluates once per step plus the initial skill") {
    int calls = 0;
    CounterRng r = rng_for(0);
    const GeneratedSkill g = generate_one(GenMethod::Heuristic, 0.3, cfg, base, r, [&](const SkillSpec& s, int e) {
      CHECK(e == calls);
      ++calls;
      return stub_evaluator(0)(s, e);
    });
    CHECK(calls == cfg.horizon + 1);
    CHECK(g.evaluations == calls);
    REQUIRE(g.last_win_rate.has_value());
  }
  SUBCASE("common random numbers reuse evaluation index 0") {
    GenConfig crn = cfg;
    crn.common_random_numbers = true;
    CounterRng r = rng_for(0);
    generate_one(GenMethod::Heuristic, 0.3, crn, base, r, [](const SkillSpec&, int e) {
      CHECK(e == 0);
      return 0.5;
    });
  }
  CHECK_THROWS_AS(sample_skills(GenMethod::Random, 0.3, 0, cfg, base, rng_for, eval_for), std::invalid_argument);
  CHECK_THROWS_AS(sample_skills(GenMethod::External, 0.3, 1, cfg, base, rng_for, eval_for), std::invalid_argument);
}

TEST_CASE("heuristic generator beats random on a smooth stub landscape") {
  GenConfig cfg;
  const SkillSpec base = benchmark_default().players[0].skills[0];
  auto rng_for = [](int i) { return CounterRng(hash_seed({9, static_cast<std::uint64_t>(i)})); };
  // deterministic landscape: easier content wins more
  auto land = [](const SkillSpec& s) {
    const double z = 0.15 * (s.range - 10.0) - 0.08 * (s.cool_time - 10.0) + 4.0 * (s.coefficient - 0.75) -
                     1.0 * (s.cast_time - 1.0);
    return 1.0 / (1.0 + std::exp(-z));
  };
  auto eval_for = [&](int) { return Evaluator([&](const SkillSpec& s, int) { return land(s); }); };
  const auto hr = sample_skills(GenMethod::Heuristic, 0.3, 100, cfg, base, rng_for, eval_for);
  const auto rd = sample_skills(GenMethod::Random, 0.3, 100, cfg, base, rng_for, eval_for);
  double e_hr = 0.0;
  double e_rd = 0.0;
  for (int i = 0; i < 100; ++i) {
    e_hr += std::fabs(0.3 - land(hr[i].skill));
    e_rd += std::fabs(0.3 - land(rd[i].skill));
  }
  CHECK(e_hr < e_rd);
}

TEST_CASE("method names") {
  CHECK(parse_method("heuristic") == GenMethod::Heuristic);
  CHECK(parse_method("random") == GenMethod::Random);
  CHECK(parse_method("external") == GenMethod::External);
  CHECK_THROWS_AS(parse_method("ppo"), std::invalid_argument);
}
