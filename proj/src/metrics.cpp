#include "raidenv/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "raidenv/parallel.hpp"

namespace raidenv {

WinRateEstimate make_estimate(int wins, int n, std::uint64_t base_seed) {
  WinRateEstimate e;
  e.n = n;
  e.wins = wins;
  e.base_seed = base_seed;
  e.mean = n > 0 ? static_cast<double>(wins) / n : 0.0;
  e.sample_sd = n > 1 ? std::sqrt(e.mean * (1.0 - e.mean) * n / (n - 1.0)) : 0.0;
  return e;
}

WinRateEstimate estimate_win_rate(const ScenarioConfig& sc, const std::vector<Policy>& policies, int n,
                                  std::uint64_t base_seed, int workers) {
  if (n < 1) throw std::invalid_argument("estimate_win_rate: n must be >= 1");
  RunOptions opts;
  opts.keep_events = false;
  opts.engine.record_moves = false;
  std::vector<char> won(n, 0);
  parallel_for(static_cast<std::size_t>(n), workers, [&](std::size_t i) {
    won[i] = run_episode(sc, policies, base_seed + i, opts).outcome.win ? 1 : 0;
  });
  return make_estimate(static_cast<int>(std::count(won.begin(), won.end(), 1)), n, base_seed);
}

WinRateEstimate estimate_win_rate(const ScenarioConfig& sc, AgentKind agent, int n, std::uint64_t base_seed,
                                  int workers) {
  return estimate_win_rate(sc, make_policies(agent, sc.players.size()), n, base_seed, workers);
}

double adjusted_score(double score_unseen, const std::vector<double>& population) {
  if (population.empty()) throw EmptyInput("adjusted_score: empty population");
  const double mean = std::accumulate(population.begin(), population.end(), 0.0) / population.size();
  if (!(mean > 0.0)) throw ZeroPopulationMean("adjusted_score: population mean must be > 0");
  return score_unseen / mean;
}

WinrateError winrate_error(const std::vector<ControllabilitySample>& samples) {
  if (samples.empty()) throw EmptyInput("winrate_error: no samples");
  WinrateError r;
  r.errors.reserve(samples.size());
  for (const auto& s : samples) {
    r.errors.push_back(std::fabs(s.target - s.measured));
    r.sum += r.errors.back();
  }
  const double n = static_cast<double>(samples.size());
  r.mean_abs_error = r.sum / n;
  if (samples.size() > 1) {
    double ss = 0.0;
    for (double e : r.errors) ss += (e - r.mean_abs_error) * (e - r.mean_abs_error);
    r.sd = std::sqrt(ss / (n - 1.0));
  }
  return r;
}

// ---------------------------------------------------------------------------

SymEigen4 jacobi_eigen4(const std::array<Row4, 4>& input) {
  std::array<Row4, 4> a = input;
  std::array<Row4, 4> v{};
  for (int i = 0; i < 4; ++i) v[i][i] = 1.0;

  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    double diag = 0.0;
    for (int p = 0; p < 4; ++p) {
      diag += a[p][p] * a[p][p];
      for (int q = p + 1; q < 4; ++q) off += a[p][q] * a[p][q];
    }
    if (off == 0.0 || off < 1e-34 * diag) break;
    for (int p = 0; p < 3; ++p) {
      for (int q = p + 1; q < 4; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < 4; ++k) {
          const double akp = a[k][p];
          const double akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < 4; ++k) {
          const double apk = a[p][k];
          const double aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (int k = 0; k < 4; ++k) {
          const double vkp = v[k][p];
          const double vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }

  std::array<int, 4> order{0, 1, 2, 3};
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return a[i][i] > a[j][j]; });
  SymEigen4 out{};
  for (int r = 0; r < 4; ++r) {
    const int col = order[r];
    out.values[r] = a[col][col];
    Row4 vec{v[0][col], v[1][col], v[2][col], v[3][col]};
    double norm = std::sqrt(vec[0] * vec[0] + vec[1] * vec[1] + vec[2] * vec[2] + vec[3] * vec[3]);
    for (double& x : vec) x /= norm;
    for (double x : vec) {
      if (std::fabs(x) > 1e-12) {
        if (x < 0.0)
          for (double& y : vec) y = -y;
        break;
      }
    }
    out.vectors[r] = vec;
  }
  return out;
}

PcaResult pca_project(const std::vector<Row4>& m, int k) {
  if (m.size() < 2) throw std::invalid_argument("pca_project: need at least 2 rows");
  if (k < 1 || k > 4) throw std::invalid_argument("pca_project: k must be in [1, 4]");
  const double n = static_cast<double>(m.size());
  Row4 mean{};
  for (const auto& row : m)
    for (int j = 0; j < 4; ++j) mean[j] += row[j];
  for (double& x : mean) x /= n;

  std::array<Row4, 4> cov{};
  for (const auto& row : m) {
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j) cov[i][j] += (row[i] - mean[i]) * (row[j] - mean[j]);
  }
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j) {
      cov[i][j] /= n - 1.0;
      cov[j][i] = cov[i][j];
    }

  PcaResult r;
  r.projections.assign(m.size(), std::vector<double>(k, 0.0));
  double trace = 0.0;
  for (int i = 0; i < 4; ++i) trace += cov[i][i];
  if (!(trace > 0.0)) {
    r.degenerate = true;
    for (int c = 0; c < k; ++c) {
      Row4 e{};
      e[c] = 1.0;
      r.components.push_back(e);
      r.explained_variance.push_back(0.0);
    }
    return r;
  }

  const SymEigen4 eig = jacobi_eigen4(cov);
  for (int c = 0; c < k; ++c) {
    r.components.push_back(eig.vectors[c]);
    r.explained_variance.push_back(std::max(0.0, eig.values[c]));
  }
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (int c = 0; c < k; ++c) {
      double p = 0.0;
      for (int j = 0; j < 4; ++j) p += (m[i][j] - mean[j]) * r.components[c][j];
      r.projections[i][c] = p;
    }
  }
  return r;
}

Row4 diversity_row(const SkillSpec& skill, const ParamBounds& bounds) {
  auto scale = [](double v, const Interval& iv) { return iv.span() > 0.0 ? (v - iv.min) / iv.span() : 0.0; };
  return {scale(skill.range, bounds[GenParam::Range]), scale(skill.cool_time, bounds[GenParam::CoolTime]),
          scale(skill.cast_time, bounds[GenParam::CastTime]), scale(skill.coefficient, bounds[GenParam::Damage])};
}

namespace {
double column_sd(const std::vector<Row4>& rows, int j) {
  if (rows.size() < 2) return 0.0;
  double mean = 0.0;
  for (const auto& r : rows) mean += r[j];
  mean /= rows.size();
  double ss = 0.0;
  for (const auto& r : rows) ss += (r[j] - mean) * (r[j] - mean);
  return std::sqrt(ss / (rows.size() - 1.0));
}
}  // namespace

DiversityReport diversity_report(const std::vector<ControllabilitySample>& samples, const ParamBounds& bounds,
                                 double threshold) {
  if (samples.empty()) throw EmptyInput("diversity_report: no samples");
  DiversityReport r;
  r.input_count = static_cast<int>(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    // the RMSE of a single sample is its absolute error
    if (std::fabs(samples[i].target - samples[i].measured) < threshold) {
      r.retained_indices.push_back(static_cast<int>(i));
      r.scaled.push_back(diversity_row(samples[i].skill, bounds));
    }
  }
  r.retained = static_cast<int>(r.retained_indices.size());
  if (r.retained == 0) throw EmptyAfterFilter("diversity_report: no sample within the error threshold");
  r.range_sd = column_sd(r.scaled, 0);
  r.cool_sd = column_sd(r.scaled, 1);
  r.cast_sd = column_sd(r.scaled, 2);
  r.damage_sd = column_sd(r.scaled, 3);
  if (r.retained >= 2) {
    const PcaResult p = pca_project(r.scaled, 1);
    r.pca_component = p.components[0];
    r.pca_sd = std::sqrt(p.explained_variance[0]);
  }
  return r;
}

// ---------------------------------------------------------------------------

double OccupancyGrid::total() const { return std::accumulate(cells.begin(), cells.end(), 0.0); }

OccupancyGrid occupancy_grid(const std::vector<std::vector<TracePoint>>& traces, int resolution, double radius) {
  if (resolution < 1) throw std::invalid_argument("occupancy_grid: resolution must be >= 1");
  if (!(radius > 0.0)) throw std::invalid_argument("occupancy_grid: radius must be > 0");
  OccupancyGrid g;
  g.resolution = resolution;
  g.radius = radius;
  g.episodes = static_cast<int>(traces.size());
  g.cells.assign(static_cast<std::size_t>(resolution) * resolution, 0.0);
  if (traces.empty()) {
    g.empty_input = true;
    return g;
  }
  auto bin = [&](double v) {
    const int b = static_cast<int>(std::floor((v + radius) / (2.0 * radius) * resolution));
    return std::clamp(b, 0, resolution - 1);
  };
  std::vector<long long> counts(g.cells.size(), 0);
  for (const auto& trace : traces)
    for (const TracePoint& p : trace) counts[static_cast<std::size_t>(bin(p.y)) * resolution + bin(p.x)] += 1;
  for (std::size_t i = 0; i < counts.size(); ++i) g.cells[i] = static_cast<double>(counts[i]) / g.episodes;
  return g;
}

OccupancyGrid occupancy_grid(const std::vector<EpisodeLog>& logs, int resolution, double radius) {
  std::vector<std::vector<TracePoint>> traces;
  traces.reserve(logs.size());
  for (const auto& l : logs) traces.push_back(l.outcome.position_trace);
  return occupancy_grid(traces, resolution, radius);
}

}  // namespace raidenv
