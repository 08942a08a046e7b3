#include "orcurv/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "orcurv/curvature.hpp"
#include "orcurv/errors.hpp"
#include "orcurv/graph.hpp"
#include "orcurv/harness.hpp"
#include "orcurv/sampling.hpp"
#include "orcurv/transport.hpp"

namespace orc {

namespace {

// Bad arguments or unreadable inputs: exit code 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fmt_value(double x) {
  if (std::isfinite(x) && x == std::floor(x) && std::abs(x) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", x);
    return buf;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<double> parse_numbers(std::string_view line, const std::string& file, std::size_t lineno) {
  std::vector<double> values;
  std::string cell;
  std::stringstream ss{std::string(line)};
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto e = cell.find_last_not_of(" \t\r");
    cell = cell.substr(b, e - b + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(cell, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != cell.size()) {
      throw UsageError(file + ":" + std::to_string(lineno) + ": not a number: '" + cell + "'");
    }
    values.push_back(v);
  }
  return values;
}

std::vector<std::vector<double>> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[line.find_first_not_of(" \t")] == '#') {
      continue;
    }
    rows.push_back(parse_numbers(line, path, lineno));
  }
  return rows;
}

std::vector<double> read_vector(const std::string& path) {
  std::vector<double> v;
  for (const auto& row : read_csv(path)) v.insert(v.end(), row.begin(), row.end());
  return v;
}

struct GenerateArgs {
  std::string surface = "torus";
  std::size_t n = 1024;
  double alpha = 0.16, beta = 0.16, c_eps = 1.0, c_delta = 1.0;
  std::string scheme = "distance";
  std::string mode = "fixed";
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_generate(const GenerateArgs& a, std::ostream& out) {
  const Surface surface{parse_surface_kind(a.surface)};
  const WeightScheme scheme = parse_weight_scheme(a.scheme);
  const ScalingSchedule schedule{a.alpha, a.beta, a.c_eps, a.c_delta, a.n};
  schedule.validate();
  SamplerConfig sampler;
  if (a.mode == "fixed") {
    sampler.mode = CountMode::FixedCount;
    sampler.rate = static_cast<double>(a.n);
  } else if (a.mode == "poisson") {
    sampler.mode = CountMode::PoissonCount;
    sampler.rate = static_cast<double>(a.n) / surface.volume();
  } else {
    throw UsageError("--mode must be fixed or poisson");
  }
  sampler.seed = a.seed;
  const auto points = sample_points(surface, sampler);
  const GeoGraph g = build_rgg(surface, points, probe_pair(surface, schedule.delta()), schedule.epsilon(),
                               scheme, {}, a.seed);
  if (a.out.empty()) {
    write_edge_list(g, out);
  } else {
    write_edge_list(g, a.out);
  }
  return 0;
}

struct CurvatureArgs {
  std::string graph;
  std::string method = "mesoscopic";
  std::optional<NodeId> x, y;
  std::optional<double> delta;
};

int cmd_curvature(const CurvatureArgs& a, std::ostream& out) {
  GeoGraph g;
  try {
    g = read_edge_list(std::filesystem::path(a.graph));
  } catch (const ParseError& e) {
    throw UsageError(a.graph + ": " + e.what());
  } catch (const std::runtime_error& e) {
    throw UsageError(e.what());
  }
  NodeId x = 0, y = 0;
  if (a.x && a.y) {
    x = *a.x;
    y = *a.y;
  } else if (!a.x && !a.y && g.meta().surface && g.node_count() == g.meta().sampled + 2) {
    x = g.probe_x();
    y = g.probe_y();
  } else {
    throw UsageError("give both --x and --y (the graph file carries no probe pair)");
  }
  const auto n = static_cast<NodeId>(g.node_count());
  if (x < 0 || y < 0 || x >= n || y >= n) throw UsageError("node id out of range");

  if (a.method == "mesoscopic") {
    if (!a.delta) throw UsageError("--delta is required for the mesoscopic method");
    const CurvatureSample s = ollivier_mesoscopic(g, x, y, *a.delta);
    out << "kappa=" << fmt_value(s.kappa) << '\n'
        << "kappa_rescaled=" << fmt_value(s.kappa_rescaled) << '\n'
        << "W=" << fmt_value(s.wasserstein) << '\n'
        << "ball_x=" << s.ball_x_size << '\n'
        << "ball_y=" << s.ball_y_size << '\n';
  } else if (a.method == "classic") {
    out << fmt_value(ollivier_classic(g, x, y)) << '\n';
  } else if (a.method == "forman1") {
    out << fmt_value(forman(g, x, y, FormanOrder::F1)) << '\n';
  } else if (a.method == "forman2") {
    out << fmt_value(forman(g, x, y, FormanOrder::F2)) << '\n';
  } else {
    throw UsageError("--method must be mesoscopic, classic, forman1 or forman2");
  }
  return 0;
}

struct EmdArgs {
  std::string cost, mu, nu;
  bool plan = false;
};

int cmd_emd(const EmdArgs& a, std::ostream& out, std::ostream& err) {
  const auto cost = read_csv(a.cost);
  TransportProblem p;
  p.source_mass = read_vector(a.mu);
  p.sink_mass = read_vector(a.nu);
  p.rows = p.source_mass.size();
  p.cols = p.sink_mass.size();
  if (cost.size() != p.rows) {
    throw UsageError("cost has " + std::to_string(cost.size()) + " rows but mu has " +
                     std::to_string(p.rows) + " entries");
  }
  for (const auto& row : cost) {
    if (row.size() != p.cols) {
      throw UsageError("every cost row needs " + std::to_string(p.cols) + " entries (one per nu entry)");
    }
    p.cost.insert(p.cost.end(), row.begin(), row.end());
  }
  const TransportSolution s = solve_emd(p);
  if (s.status != TransportStatus::Optimal) {
    err << "orcurv emd: marginals do not balance; problem is infeasible\n";
    return 2;
  }
  out << fmt_value(s.value) << '\n';
  if (a.plan) {
    for (std::size_t i = 0; i < p.rows; ++i) {
      for (std::size_t j = 0; j < p.cols; ++j) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", s.plan_at(i, j));
        out << (j ? "," : "") << buf;
      }
      out << '\n';
    }
  }
  return 0;
}

struct SweepArgs {
  std::string config;
  std::optional<int> threads;
  std::string out;
};

int cmd_sweep(const SweepArgs& a, std::ostream& out) {
  if (!std::filesystem::exists(a.config)) throw UsageError("config file '" + a.config + "' not found");
  ExperimentConfig cfg;
  try {
    cfg = load_config(a.config);
    if (a.threads) cfg.threads = *a.threads;
    if (!a.out.empty()) cfg.output = a.out;
    cfg.validate();
  } catch (const ParseError& e) {
    throw UsageError(a.config + ": " + e.what());
  } catch (const DomainError& e) {
    throw UsageError(a.config + ": " + e.what());
  }
  const SweepResult r = run_sweep(cfg);
  write_summary_csv(r.rows, out);
  return 0;
}

struct RegimesArgs {
  double alpha = 0.0, beta = 0.0;
  std::string scheme = "distance";
};

int cmd_regimes(const RegimesArgs& a, std::ostream& out) {
  const WeightScheme scheme = parse_weight_scheme(a.scheme);
  const RegimeReport r = check_regime(a.alpha, a.beta, scheme);
  out << std::boolalpha << "weighted_ok=" << r.weighted_ok << '\n'
      << "weighted_equal_radii_ok=" << r.weighted_equal_radii_ok << '\n'
      << "unweighted_ok=" << r.unweighted_ok << '\n'
      << "scheme_ok=" << r.scheme_ok << '\n'
      << "density_class=" << density_tag(r.density_class) << '\n'
      << "degree_exponent=" << r.degree_exponent << '\n';
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ollivier curvature of random geometric graphs on constant-curvature surfaces", "orcurv"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Sample a random geometric graph with its probe pair");
  g->add_option("--surface", gen.surface, "torus, sphere or bolza")->capture_default_str();
  g->add_option("--n", gen.n, "number of sampled points")->capture_default_str()->check(CLI::PositiveNumber);
  g->add_option("--alpha", gen.alpha, "epsilon exponent")->capture_default_str();
  g->add_option("--beta", gen.beta, "delta exponent")->capture_default_str();
  g->add_option("--c-eps", gen.c_eps, "epsilon prefactor")->capture_default_str();
  g->add_option("--c-delta", gen.c_delta, "delta prefactor")->capture_default_str();
  g->add_option("--scheme", gen.scheme, "distance, epsilon or unit")->capture_default_str();
  g->add_option("--mode", gen.mode, "fixed or poisson")->capture_default_str();
  g->add_option("--seed", gen.seed, "random seed")->capture_default_str();
  g->add_option("-o,--out", gen.out, "output file (default: stdout)");

  CurvatureArgs curv;
  auto* c = app.add_subcommand("curvature", "Curvature of a node pair in an edge-list graph");
  c->add_option("--graph", curv.graph, "edge-list file")->required();
  c->add_option("--method", curv.method, "mesoscopic, classic, forman1 or forman2")->capture_default_str();
  c->add_option("--x", curv.x, "first node (default: probe x)");
  c->add_option("--y", curv.y, "second node (default: probe y)");
  c->add_option("--delta", curv.delta, "ball radius for the mesoscopic method");

  EmdArgs emd;
  auto* e = app.add_subcommand("emd", "Exact transport cost from CSV cost matrix and marginals");
  e->add_option("--cost", emd.cost, "cost matrix CSV, one row per source")->required();
  e->add_option("--mu", emd.mu, "source masses")->required();
  e->add_option("--nu", emd.nu, "sink masses")->required();
  e->add_flag("--plan", emd.plan, "also print the optimal plan");

  SweepArgs sw;
  auto* s = app.add_subcommand("sweep", "Run a convergence sweep from a config file");
  s->add_option("--config", sw.config, "sweep config file")->required();
  s->add_option("--threads", sw.threads, "worker threads (1 = deterministic serial run)")
      ->check(CLI::NonNegativeNumber);
  s->add_option("--out", sw.out, "output file prefix (overrides the config)");

  RegimesArgs reg;
  auto* r = app.add_subcommand("regimes", "Report which convergence regimes (alpha, beta) satisfies");
  r->add_option("--alpha", reg.alpha, "epsilon exponent")->required();
  r->add_option("--beta", reg.beta, "delta exponent")->required();
  r->add_option("--scheme", reg.scheme, "distance, epsilon or unit")->capture_default_str();

  const auto surfaces = CLI::IsMember({"torus", "sphere", "bolza"});
  const auto schemes = CLI::IsMember({"distance", "epsilon", "unit"});
  g->get_option("--surface")->check(surfaces);
  g->get_option("--scheme")->check(schemes);
  g->get_option("--mode")->check(CLI::IsMember({"fixed", "poisson"}));
  c->get_option("--method")->check(CLI::IsMember({"mesoscopic", "classic", "forman1", "forman2"}));
  r->get_option("--scheme")->check(schemes);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (g->parsed()) return cmd_generate(gen, out);
    if (c->parsed()) return cmd_curvature(curv, out);
    if (e->parsed()) return cmd_emd(emd, out, err);
    if (s->parsed()) return cmd_sweep(sw, out);
    if (r->parsed()) return cmd_regimes(reg, out);
  } catch (const UsageError& ex) {
    err << "orcurv: " << ex.what() << '\n';
    return 1;
  } catch (const std::exception& ex) {
    err << "orcurv: " << ex.what() << '\n';
    return 2;
  }
  return 1;
}

}  // namespace orc
