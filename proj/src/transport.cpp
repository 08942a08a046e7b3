#include "orcurv/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <string>

#include "orcurv/errors.hpp"

namespace orc {

namespace {

/// Primal network simplex specialised to the complete bipartite transportation
/// graph. Node layout: sources [0, m), sinks [m, m + k), artificial root m + k.
/// Arc layout: (i, j) -> i * k + j, then one artificial arc per non-root node.
///
/// The tree is kept strongly feasible (every node can push flow to the root),
/// and the leaving arc is the last blocking arc met when walking the cycle from
/// the apex; this excludes cycling under degenerate pivots.
class NetworkSimplex {
 public:
  /// `cost` must outlive the solver. `cost_ceiling` bounds any cost set later.
  NetworkSimplex(std::span<const double> cost, std::size_t m, std::size_t k,
                 std::span<const double> supply, std::span<const double> demand, double cost_ceiling = 0.0)
      : m_(m), k_(k), nodes_(m + k + 1), root_(static_cast<int>(m + k)), real_arcs_(m * k),
        cost_(cost) {
    const std::size_t arcs = real_arcs_ + m + k;
    flow_.assign(arcs, 0.0);
    state_.assign(arcs, kLower);
    parent_.assign(nodes_, -1);
    pred_.assign(nodes_, -1);
    dir_.assign(nodes_, 0);
    depth_.assign(nodes_, 0);
    pi_.assign(nodes_, 0.0);
    first_child_.assign(nodes_, -1);
    next_sib_.assign(nodes_, -1);
    prev_sib_.assign(nodes_, -1);
    art_up_.assign(m + k, true);

    double max_cost = cost_ceiling;
    for (double c : cost_) max_cost = std::max(max_cost, std::abs(c));
    art_cost_ = (max_cost + 1.0) * static_cast<double>(nodes_);
    eps_ = 1e-12 * (max_cost + 1.0);

    for (std::size_t v = 0; v < m + k; ++v) {
      const std::size_t a = real_arcs_ + v;
      state_[a] = kTree;
      parent_[v] = root_;
      pred_[v] = static_cast<std::int64_t>(a);
      depth_[v] = 1;
      add_child(root_, static_cast<int>(v));
      if (v < m) {
        // source -> root
        flow_[a] = supply[v];
        dir_[v] = kUp;
        pi_[v] = -art_cost_;
      } else {
        // Zero-demand sinks point to the root so the tree stays strongly feasible.
        const double d = demand[v - m];
        if (d > 0.0) {
          flow_[a] = d;
          dir_[v] = kDown;
          art_up_[v] = false;
          pi_[v] = art_cost_;
        } else {
          dir_[v] = kUp;
          pi_[v] = -art_cost_;
        }
      }
    }
    block_ = std::max<std::size_t>(10, static_cast<std::size_t>(std::sqrt(static_cast<double>(arcs))));
  }

  /// Optimises from the current basis; call again after changing costs.
  std::size_t run() {
    std::size_t pivots = 0;
    recompute_potentials();
    for (;;) {
      while (find_entering()) {
        pivot();
        ++pivots;
      }
      // Potentials drift under incremental updates; rebuild them exactly and
      // price once more before declaring optimality.
      recompute_potentials();
      if (!find_entering()) break;
      pivot();
      ++pivots;
    }
    return pivots;
  }

  double flow(std::size_t i, std::size_t j) const { return flow_[i * k_ + j]; }
  double artificial_flow() const {
    double s = 0.0;
    for (std::size_t a = real_arcs_; a < flow_.size(); ++a) s += flow_[a];
    return s;
  }
  double potential(std::size_t v) const { return pi_[v]; }

 private:
  static constexpr signed char kUp = 1;     // pred arc points from node to parent
  static constexpr signed char kDown = -1;  // pred arc points from parent to node
  static constexpr signed char kTree = 0;
  static constexpr signed char kLower = 1;

  int arc_source(std::size_t a) const {
    if (a < real_arcs_) return static_cast<int>(a / k_);
    const std::size_t v = a - real_arcs_;
    return dir_is_up_art(v) ? static_cast<int>(v) : root_;
  }
  int arc_target(std::size_t a) const {
    if (a < real_arcs_) return static_cast<int>(m_ + a % k_);
    const std::size_t v = a - real_arcs_;
    return dir_is_up_art(v) ? root_ : static_cast<int>(v);
  }
  bool dir_is_up_art(std::size_t v) const { return art_up_[v]; }

  double arc_cost(std::size_t a) const { return a < real_arcs_ ? cost_[a] : art_cost_; }

  double reduced_cost(std::size_t a) const {
    return arc_cost(a) + pi_[arc_source(a)] - pi_[arc_target(a)];
  }

  bool find_entering() {
    const std::size_t arcs = flow_.size();
    double best = 0.0;
    std::size_t count = block_;
    std::size_t e = next_arc_;
    for (std::size_t scanned = 0; scanned < arcs; ++scanned) {
      if (state_[e] == kLower) {
        double c;
        if (e < real_arcs_) {
          const std::size_t i = e / k_;
          const std::size_t j = e - i * k_;
          c = cost_[e] + pi_[i] - pi_[m_ + j];
        } else {
          c = reduced_cost(e);
        }
        if (c < best) {
          best = c;
          in_arc_ = e;
        }
      }
      if (++e == arcs) e = 0;
      if (--count == 0) {
        if (best < -eps_) {
          next_arc_ = e;
          return true;
        }
        count = block_;
      }
    }
    if (best < -eps_) {
      next_arc_ = e;
      return true;
    }
    return false;
  }

  void pivot() {
    const int first = arc_source(in_arc_);
    const int second = arc_target(in_arc_);

    int u = first;
    int v = second;
    while (u != v) {
      if (depth_[u] > depth_[v]) {
        u = parent_[u];
      } else if (depth_[v] > depth_[u]) {
        v = parent_[v];
      } else {
        u = parent_[u];
        v = parent_[v];
      }
    }
    const int join = u;

    // Flow travels first -> second on the entering arc and returns second ->
    // join -> first through the tree. Only arcs traversed against their
    // direction can block (capacities are infinite).
    double delta = std::numeric_limits<double>::infinity();
    int u_out = -1;
    int side = 0;
    for (int w = first; w != join; w = parent_[w]) {
      if (dir_[w] == kUp) {
        const double d = std::max(0.0, flow_[pred_[w]]);
        if (d < delta) {
          delta = d;
          u_out = w;
          side = 1;
        }
      }
    }
    for (int w = second; w != join; w = parent_[w]) {
      if (dir_[w] == kDown) {
        const double d = std::max(0.0, flow_[pred_[w]]);
        if (d <= delta) {
          delta = d;
          u_out = w;
          side = 2;
        }
      }
    }
    if (u_out < 0) throw InternalError("transport simplex: unbounded pivot");

    if (delta > 0.0) {
      flow_[in_arc_] += delta;
      for (int w = first; w != join; w = parent_[w]) flow_[pred_[w]] -= dir_[w] * delta;
      for (int w = second; w != join; w = parent_[w]) flow_[pred_[w]] += dir_[w] * delta;
    }
    const std::int64_t out_arc = pred_[u_out];
    flow_[out_arc] = 0.0;
    state_[out_arc] = kLower;
    state_[in_arc_] = kTree;

    const int u_in = side == 1 ? first : second;
    const int v_in = side == 1 ? second : first;
    const double rc = reduced_cost(in_arc_);
    const double sigma = u_in == first ? -rc : rc;

    // Re-hang the detached subtree at u_in below v_in, reversing the path
    // u_in -> ... -> u_out.
    int cur = u_in;
    int new_parent = v_in;
    std::int64_t new_pred = static_cast<std::int64_t>(in_arc_);
    signed char new_dir = u_in == first ? kUp : kDown;
    for (;;) {
      const int old_parent = parent_[cur];
      const std::int64_t old_pred = pred_[cur];
      const signed char old_dir = dir_[cur];
      remove_child(old_parent, cur);
      parent_[cur] = new_parent;
      pred_[cur] = new_pred;
      dir_[cur] = new_dir;
      add_child(new_parent, cur);
      if (cur == u_out) break;
      new_parent = cur;
      new_pred = old_pred;
      new_dir = static_cast<signed char>(-old_dir);
      cur = old_parent;
    }

    stack_.clear();
    stack_.push_back(u_in);
    while (!stack_.empty()) {
      const int w = stack_.back();
      stack_.pop_back();
      depth_[w] = depth_[parent_[w]] + 1;
      pi_[w] += sigma;
      for (int c = first_child_[w]; c >= 0; c = next_sib_[c]) stack_.push_back(c);
    }
  }

  void recompute_potentials() {
    pi_[root_] = 0.0;
    depth_[root_] = 0;
    stack_.clear();
    for (int c = first_child_[root_]; c >= 0; c = next_sib_[c]) stack_.push_back(c);
    while (!stack_.empty()) {
      const int w = stack_.back();
      stack_.pop_back();
      const std::size_t a = static_cast<std::size_t>(pred_[w]);
      // Tree arcs have zero reduced cost.
      if (dir_[w] == kUp) {
        pi_[w] = pi_[parent_[w]] - arc_cost(a);
      } else {
        pi_[w] = pi_[parent_[w]] + arc_cost(a);
      }
      depth_[w] = depth_[parent_[w]] + 1;
      for (int c = first_child_[w]; c >= 0; c = next_sib_[c]) stack_.push_back(c);
    }
  }

  void add_child(int p, int c) {
    next_sib_[c] = first_child_[p];
    prev_sib_[c] = -1;
    if (first_child_[p] >= 0) prev_sib_[first_child_[p]] = c;
    first_child_[p] = c;
  }

  void remove_child(int p, int c) {
    if (prev_sib_[c] >= 0) {
      next_sib_[prev_sib_[c]] = next_sib_[c];
    } else {
      first_child_[p] = next_sib_[c];
    }
    if (next_sib_[c] >= 0) prev_sib_[next_sib_[c]] = prev_sib_[c];
    next_sib_[c] = prev_sib_[c] = -1;
  }

  std::size_t m_;
  std::size_t k_;
  std::size_t nodes_;
  int root_;
  std::size_t real_arcs_;
  std::span<const double> cost_;
  double art_cost_ = 0.0;
  double eps_ = 0.0;
  std::size_t block_ = 10;
  std::size_t next_arc_ = 0;
  std::size_t in_arc_ = 0;

  std::vector<double> flow_;
  std::vector<signed char> state_;
  std::vector<int> parent_;
  std::vector<std::int64_t> pred_;
  std::vector<signed char> dir_;
  std::vector<int> depth_;
  std::vector<double> pi_;
  std::vector<int> first_child_;
  std::vector<int> next_sib_;
  std::vector<int> prev_sib_;
  std::vector<int> stack_;
  /// Artificial arc of node v points v -> root (else root -> v).
  std::vector<bool> art_up_;
};

void validate(const TransportProblem& p) {
  if (p.rows == 0 || p.cols == 0) throw DomainError("transport problem has an empty side");
  if (p.cost.size() != p.rows * p.cols || p.source_mass.size() != p.rows ||
      p.sink_mass.size() != p.cols) {
    throw DomainError("transport problem shape mismatch");
  }
  for (double c : p.cost) {
    if (!std::isfinite(c) || c < 0.0) throw DomainError("transport costs must be finite and >= 0");
  }
  for (double a : p.source_mass) {
    if (!std::isfinite(a) || a < 0.0) throw DomainError("masses must be finite and >= 0");
  }
  for (double b : p.sink_mass) {
    if (!std::isfinite(b) || b < 0.0) throw DomainError("masses must be finite and >= 0");
  }
}

struct RawSolution {
  std::vector<double> flow;
  std::vector<double> pi;
  std::size_t pivots = 0;
};

RawSolution solve_raw(std::span<const double> cost, std::size_t m, std::size_t k,
                      std::span<const double> supply, std::span<const double> demand) {
  NetworkSimplex ns(cost, m, k, supply, demand);
  RawSolution raw;
  raw.pivots = ns.run();
  raw.flow.resize(m * k);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < k; ++j) raw.flow[i * k + j] = ns.flow(i, j);
  }
  raw.pi.resize(m + k);
  for (std::size_t v = 0; v < m + k; ++v) raw.pi[v] = ns.potential(v);
  return raw;
}

}  // namespace

TransportSolution solve_emd(const TransportProblem& problem) {
  validate(problem);
  const double total_a = std::accumulate(problem.source_mass.begin(), problem.source_mass.end(), 0.0);
  const double total_b = std::accumulate(problem.sink_mass.begin(), problem.sink_mass.end(), 0.0);
  TransportSolution sol;
  sol.source_potential.assign(problem.rows, 0.0);
  sol.sink_potential.assign(problem.cols, 0.0);
  if (std::abs(total_a - total_b) > 1e-12) {
    sol.status = TransportStatus::Infeasible;
    return sol;
  }

  const std::size_t m = problem.rows;
  const std::size_t k = problem.cols;
  RawSolution raw = solve_raw(problem.cost, m, k, problem.source_mass, problem.sink_mass);

  sol.status = TransportStatus::Optimal;
  sol.pivots = raw.pivots;
  sol.plan = std::move(raw.flow);
  for (auto& f : sol.plan) f = std::max(f, 0.0);
  for (std::size_t i = 0; i < m; ++i) sol.source_potential[i] = -raw.pi[i];
  for (std::size_t j = 0; j < k; ++j) sol.sink_potential[j] = raw.pi[m + j];

  // Shift the duals so that min_j v_j = 0; the dual objective is unchanged for
  // balanced marginals and the numbers stay small.
  const double shift = *std::min_element(sol.sink_potential.begin(), sol.sink_potential.end());
  for (auto& v : sol.sink_potential) v -= shift;
  for (auto& u : sol.source_potential) u += shift;

  double value = 0.0;
  for (std::size_t a = 0; a < sol.plan.size(); ++a) value += problem.cost[a] * sol.plan[a];
  sol.value = value;
  double dual = 0.0;
  for (std::size_t i = 0; i < m; ++i) dual += problem.source_mass[i] * sol.source_potential[i];
  for (std::size_t j = 0; j < k; ++j) dual += problem.sink_mass[j] * sol.sink_potential[j];
  sol.dual_value = dual;
  return sol;
}

bool CertificateReport::holds(double tol) const {
  return marginal_error <= tol && min_plan_entry >= -tol && dual_infeasibility <= tol &&
         slackness <= tol && value_error <= tol && std::abs(duality_gap) <= tol;
}

CertificateReport check_certificate(const TransportProblem& p, const TransportSolution& s) {
  CertificateReport r;
  const std::size_t m = p.rows;
  const std::size_t k = p.cols;
  std::vector<double> col(k, 0.0);
  double value = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      const double f = s.plan[i * k + j];
      const double c = p.cost[i * k + j];
      row += f;
      col[j] += f;
      value += c * f;
      r.min_plan_entry = std::min(r.min_plan_entry, f);
      const double red = c - s.source_potential[i] - s.sink_potential[j];
      r.dual_infeasibility = std::max(r.dual_infeasibility, -red);
      if (f > 1e-15) r.slackness = std::max(r.slackness, std::abs(red));
    }
    r.marginal_error = std::max(r.marginal_error, std::abs(row - p.source_mass[i]));
  }
  for (std::size_t j = 0; j < k; ++j) {
    r.marginal_error = std::max(r.marginal_error, std::abs(col[j] - p.sink_mass[j]));
  }
  r.value_error = std::abs(value - s.value);
  r.duality_gap = s.value - s.dual_value;
  return r;
}

double wasserstein_between_balls(const Ball& ball_x, const Ball& ball_y, const DistanceMatrix& dmatrix) {
  const std::size_t m = ball_x.size();
  const std::size_t k = ball_y.size();
  if (m == 0 || k == 0) throw DomainError("empty ball");
  if (dmatrix.rows() != m || dmatrix.cols() != k) {
    throw DomainError("distance matrix shape does not match the balls");
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (dmatrix.row_nodes()[i] != ball_x.members[i].node) {
      throw DomainError("distance matrix rows are not indexed like ball_x");
    }
  }
  for (std::size_t j = 0; j < k; ++j) {
    if (dmatrix.col_nodes()[j] != ball_y.members[j].node) {
      throw DomainError("distance matrix columns are not indexed like ball_y");
    }
  }
  for (double c : dmatrix.data()) {
    if (!std::isfinite(c) || c < 0.0) throw DomainError("distance matrix has invalid entries");
  }
  return uniform_transport(dmatrix.data(), m, k).value;
}

UniformTransport uniform_transport(std::span<const double> cost, std::size_t m, std::size_t k) {
  UniformTransportSolver solver(std::vector<double>(cost.begin(), cost.end()), m, k);
  return solver.solve();
}

struct UniformTransportSolver::Impl {
  std::vector<double> cost;
  std::size_t m, k;
  // mu_x = 1/m, mu_y = 1/k, scaled by m*k to integers.
  std::vector<double> supply, demand;
  NetworkSimplex simplex;

  Impl(std::vector<double> c, std::size_t rows, std::size_t cols, double ceiling)
      : cost(std::move(c)),
        m(rows),
        k(cols),
        supply(rows, static_cast<double>(cols)),
        demand(cols, static_cast<double>(rows)),
        simplex(cost, rows, cols, supply, demand, ceiling) {}
};

UniformTransportSolver::UniformTransportSolver(std::vector<double> cost, std::size_t m, std::size_t k,
                                               double cost_ceiling) {
  if (m == 0 || k == 0 || cost.size() != m * k) throw DomainError("cost matrix shape mismatch");
  impl_ = std::make_unique<Impl>(std::move(cost), m, k, cost_ceiling);
}

UniformTransportSolver::~UniformTransportSolver() = default;

void UniformTransportSolver::set_cost(std::size_t a, double c) {
  if (!(c >= 0.0) || !std::isfinite(c)) throw DomainError("transport costs must be finite and >= 0");
  impl_->cost.at(a) = c;
}

const std::vector<double>& UniformTransportSolver::cost() const { return impl_->cost; }

UniformTransport UniformTransportSolver::solve() {
  auto& s = *impl_;
  s.simplex.run();
  UniformTransport out;
  out.flow.resize(s.m * s.k);
  for (std::size_t i = 0; i < s.m; ++i)
    for (std::size_t j = 0; j < s.k; ++j) out.flow[i * s.k + j] = s.simplex.flow(i, j);
  for (std::size_t a = 0; a < out.flow.size(); ++a) out.value += s.cost[a] * out.flow[a];
  out.value /= static_cast<double>(s.m) * static_cast<double>(s.k);
  out.row_potential.resize(s.m);
  out.col_potential.resize(s.k);
  for (std::size_t i = 0; i < s.m; ++i) out.row_potential[i] = -s.simplex.potential(i);
  for (std::size_t j = 0; j < s.k; ++j) out.col_potential[j] = s.simplex.potential(s.m + j);
  return out;
}

}  // namespace orc
