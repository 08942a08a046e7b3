#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "orcurv/curvature.hpp"
#include "orcurv/graph.hpp"
#include "orcurv/paths.hpp"
#include "orcurv/sampling.hpp"

namespace orc {

/// Default repetition budget B in n_s = ceil(B / n).
inline constexpr std::size_t kDefaultBudget = 10 * (std::size_t{1} << 13);

struct ExperimentConfig {
  std::vector<SurfaceKind> surfaces{SurfaceKind::FlatTorus2D, SurfaceKind::UnitSphere2D,
                                    SurfaceKind::BolzaSurface};
  std::vector<std::size_t> n_list;
  double alpha = 0.16;
  double beta = 0.16;
  double c_eps = 1.0;
  double c_delta = 1.0;
  WeightScheme scheme = WeightScheme::ManifoldDistance;
  /// Explicit n_s; when unset n_s = ceil(budget / n).
  std::optional<std::size_t> repetitions;
  std::size_t budget = kDefaultBudget;
  std::uint64_t base_seed = 1;
  /// Fresh graphs drawn when the probe balls are disconnected.
  std::size_t max_retries = 5;
  CountMode mode = CountMode::FixedCount;
  SearchMethod method = SearchMethod::AStar;
  /// Worker threads; 0 = ORCURV_THREADS or all cores; 1 = deterministic serial run.
  int threads = 0;
  /// Write wall time into the `ms` column (0 otherwise, for byte-stable output).
  bool record_timing = true;
  /// File prefix for <output>_reps.csv, <output>_summary.csv, <output>_report.json.
  std::string output;

  /// Throws DomainError on empty or unsorted n_list, zero repetitions, bad exponents.
  void validate() const;
  std::size_t repetitions_for(std::size_t n) const;
};

/// Resolves 0 to ORCURV_THREADS (if set and positive) or the core count.
int resolve_worker_count(int requested);

enum class RepStatus { Ok, Unreachable };

struct RepetitionRow {
  SurfaceKind surface = SurfaceKind::FlatTorus2D;
  std::size_t n = 0;
  double alpha = 0.0;
  double beta = 0.0;
  double c_eps = 0.0;
  double c_delta = 0.0;
  WeightScheme scheme = WeightScheme::ManifoldDistance;
  std::uint64_t seed = 0;
  std::size_t rep = 0;
  double kappa = 0.0;
  double kappa_rescaled = 0.0;
  double delta = 0.0;
  double epsilon = 0.0;
  double wasserstein = 0.0;
  std::size_t ball_x = 0;
  std::size_t ball_y = 0;
  RepStatus status = RepStatus::Ok;
  double ms = 0.0;
  std::size_t retries = 0;
};

/// Aggregate over the successful repetitions of one (surface, n).
struct SweepRow {
  SurfaceKind surface = SurfaceKind::FlatTorus2D;
  std::size_t n = 0;
  double alpha = 0.0;
  double beta = 0.0;
  WeightScheme scheme = WeightScheme::ManifoldDistance;
  double mean = 0.0;    ///< mean kappa / delta^2
  double stddev = 0.0;  ///< sample standard deviation
  double std_error = 0.0;  ///< stddev / sqrt(n_s)
  std::size_t n_s = 0;
  std::size_t failures = 0;
  std::size_t retries = 0;
  double target = 0.0;
  double mean_ball_x = 0.0;
  double mean_ball_y = 0.0;
  double wall_ms = 0.0;
};

struct SweepResult {
  std::vector<RepetitionRow> reps;
  std::vector<SweepRow> rows;
};

/// Seed of repetition `rep` of (surface, n): hash(base_seed, surface, n, rep).
std::uint64_t repetition_seed(std::uint64_t base_seed, SurfaceKind surface, std::size_t n,
                              std::size_t rep);

/// One Monte Carlo repetition: sample, build, place probes, measure curvature.
RepetitionRow run_repetition(const ExperimentConfig& config, SurfaceKind surface, std::size_t n,
                             std::size_t rep, int inner_threads = 1);

/// Full sweep. Rows are ordered by (surface as listed, n, rep) regardless of threads.
/// Writes the output files when config.output is non-empty.
SweepResult run_sweep(const ExperimentConfig& config);

/// Per-(surface, n) statistics from repetition rows, in first-appearance order.
std::vector<SweepRow> aggregate(const std::vector<RepetitionRow>& reps);

struct ErrorPoint {
  std::size_t n = 0;
  double mean = 0.0;
  double std_error = 0.0;
  double target = 0.0;
  double error = 0.0;  ///< |mean - target|
};

struct SurfaceSummary {
  SurfaceKind surface = SurfaceKind::FlatTorus2D;
  std::vector<ErrorPoint> points;  ///< ascending n
  /// Error strictly decreases at every step; unset with fewer than two sizes.
  std::optional<bool> monotone_decreasing;
  /// Error at the largest n is below the error at the smallest n.
  std::optional<bool> endpoint_decreasing;
};

struct SweepReport {
  double alpha = 0.0;
  double beta = 0.0;
  WeightScheme scheme = WeightScheme::ManifoldDistance;
  RegimeReport regime;
  std::vector<SurfaceSummary> surfaces;
};

/// Error-versus-n table per surface plus the regime check. Throws
/// std::invalid_argument on empty input.
SweepReport summarize(const std::vector<SweepRow>& rows);

void write_repetitions_csv(const std::vector<RepetitionRow>& reps, std::ostream& out);
void write_summary_csv(const std::vector<SweepRow>& rows, std::ostream& out);
void write_report_json(const SweepReport& report, std::ostream& out);

/// Reads the key = value sweep file (see README). Unknown keys are errors.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(std::istream& in);

}  // namespace orc
