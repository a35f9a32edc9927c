#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "raidenv/agents.hpp"
#include "raidenv/content.hpp"

namespace raidenv {

class EmptyInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};
class ZeroPopulationMean : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};
class EmptyAfterFilter : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Win rate
// ---------------------------------------------------------------------------

struct WinRateEstimate {
  double mean = 0.0;
  double sample_sd = 0.0;
  int n = 0;
  int wins = 0;
  std::uint64_t base_seed = 0;
};

WinRateEstimate make_estimate(int wins, int n, std::uint64_t base_seed);

// Episodes use seeds base_seed .. base_seed + n - 1.
WinRateEstimate estimate_win_rate(const ScenarioConfig& scenario, const std::vector<Policy>& policies, int n,
                                  std::uint64_t base_seed, int workers = 1);
WinRateEstimate estimate_win_rate(const ScenarioConfig& scenario, AgentKind agent, int n, std::uint64_t base_seed,
                                  int workers = 1);

// ---------------------------------------------------------------------------
// Scores
// ---------------------------------------------------------------------------

double adjusted_score(double score_unseen, const std::vector<double>& population_scores);

struct ControllabilitySample {
  double target = 0.0;
  double measured = 0.0;
  SkillSpec skill;
};

struct WinrateError {
  double mean_abs_error = 0.0;
  double sd = 0.0;   // sample SD of the per-sample errors
  double sum = 0.0;  // unnormalized sum
  std::vector<double> errors;
};

WinrateError winrate_error(const std::vector<ControllabilitySample>& samples);

// ---------------------------------------------------------------------------
// PCA and diversity
// ---------------------------------------------------------------------------

using Row4 = std::array<double, 4>;

struct PcaResult {
  std::vector<Row4> components;            // top-k unit vectors
  std::vector<double> explained_variance;  // eigenvalues, descending
  std::vector<std::vector<double>> projections;  // n rows of k values
  bool degenerate = false;
};

// Sample covariance (n - 1). Eigenvectors by cyclic Jacobi rotation; the
// first nonzero entry of each component is made positive. Zero covariance
// gives zero projections and degenerate = true.
PcaResult pca_project(const std::vector<Row4>& matrix, int k = 1);

// Eigen-decomposition of a symmetric 4x4 matrix, eigenvalues descending.
struct SymEigen4 {
  std::array<double, 4> values;
  std::array<Row4, 4> vectors;
};
SymEigen4 jacobi_eigen4(const std::array<Row4, 4>& a);

// Columns in report order: range, cool_time, cast_time, damage.
Row4 diversity_row(const SkillSpec& skill, const ParamBounds& bounds);

struct DiversityReport {
  int input_count = 0;
  int retained = 0;
  std::vector<int> retained_indices;
  double range_sd = 0.0;
  double cool_sd = 0.0;
  double cast_sd = 0.0;
  double damage_sd = 0.0;
  double pca_sd = 0.0;
  Row4 pca_component{1.0, 0.0, 0.0, 0.0};
  std::vector<Row4> scaled;  // retained rows, min-max scaled
};

DiversityReport diversity_report(const std::vector<ControllabilitySample>& samples, const ParamBounds& bounds,
                                 double threshold = 0.1);

// ---------------------------------------------------------------------------
// Occupancy
// ---------------------------------------------------------------------------

struct OccupancyGrid {
  int resolution = 0;
  double radius = 0.0;
  int episodes = 0;
  std::vector<double> cells;  // row-major, row = y bin (from -R), col = x bin
  bool empty_input = false;

  double at(int row, int col) const { return cells[static_cast<std::size_t>(row) * resolution + col]; }
  double total() const;
};

OccupancyGrid occupancy_grid(const std::vector<std::vector<TracePoint>>& traces, int resolution, double radius);
OccupancyGrid occupancy_grid(const std::vector<EpisodeLog>& logs, int resolution, double radius);

}  // namespace raidenv
