#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "orcurv/paths.hpp"

namespace orc {

/// Balanced transportation problem: move `source_mass` onto `sink_mass` at
/// minimum total cost. `cost` is row-major, rows = sources.
struct TransportProblem {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> cost;
  std::vector<double> source_mass;
  std::vector<double> sink_mass;

  double cost_at(std::size_t i, std::size_t j) const { return cost[i * cols + j]; }
};

enum class TransportStatus { Optimal, Infeasible };

struct TransportSolution {
  TransportStatus status = TransportStatus::Infeasible;
  double value = 0.0;
  /// rows x cols, row-major.
  std::vector<double> plan;
  /// Dual potentials: u_i + v_j <= cost_ij, equality wherever plan_ij > 0.
  std::vector<double> source_potential;
  std::vector<double> sink_potential;
  double dual_value = 0.0;
  std::size_t pivots = 0;

  double plan_at(std::size_t i, std::size_t j) const { return plan[i * sink_potential.size() + j]; }
};

/// Exact solve by the primal network simplex on the complete bipartite graph
/// (strongly feasible trees, block-search pricing). Returns Infeasible if the
/// marginals differ in total by more than 1e-12. Throws DomainError on negative
/// or non-finite masses or costs, or on shape mismatch.
TransportSolution solve_emd(const TransportProblem& problem);

/// Optimality certificate measured against a problem.
struct CertificateReport {
  double marginal_error = 0.0;      ///< max |row/col sum - mass|
  double min_plan_entry = 0.0;      ///< most negative plan entry (0 if none)
  double dual_infeasibility = 0.0;  ///< max(0, u_i + v_j - cost_ij)
  double slackness = 0.0;           ///< max |cost_ij - u_i - v_j| where plan_ij > 0
  double value_error = 0.0;         ///< |value - sum cost*plan|
  double duality_gap = 0.0;         ///< value - dual value

  bool holds(double tol) const;
};

CertificateReport check_certificate(const TransportProblem& problem, const TransportSolution& solution);

/// W between the uniform distributions on two balls, with `dmatrix` rows
/// indexed like `ball_x` members and columns like `ball_y` members. Solved with
/// integer-scaled masses (|B_y| per source, |B_x| per sink) so every basic flow
/// is exact.
double wasserstein_between_balls(const Ball& ball_x, const Ball& ball_y, const DistanceMatrix& dmatrix);

struct UniformTransport {
  double value = 0.0;
  /// m x k row-major, in units of 1 / (m * k).
  std::vector<double> flow;
  /// Duals with cost_ij - u_i - v_j >= 0, tight on the support. Filled by
  /// UniformTransportSolver only.
  std::vector<double> row_potential;
  std::vector<double> col_potential;
};

/// The same uniform-to-uniform problem on a raw m x k cost matrix. Costs are
/// not validated here.
UniformTransport uniform_transport(std::span<const double> cost, std::size_t m, std::size_t k);

/// Uniform transport that can be re-solved after cost changes, restarting the
/// simplex from the previous optimal basis. `cost_ceiling` must bound every
/// cost ever set (0: the initial maximum).
class UniformTransportSolver {
 public:
  UniformTransportSolver(std::vector<double> cost, std::size_t m, std::size_t k, double cost_ceiling = 0.0);
  ~UniformTransportSolver();
  UniformTransportSolver(const UniformTransportSolver&) = delete;
  UniformTransportSolver& operator=(const UniformTransportSolver&) = delete;

  void set_cost(std::size_t index, double cost);
  const std::vector<double>& cost() const;
  UniformTransport solve();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace orc
