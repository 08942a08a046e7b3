#include "orcurv/harness.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "orcurv/errors.hpp"

namespace orc {

namespace {

std::string fmt17(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string_view status_tag(RepStatus s) { return s == RepStatus::Ok ? "ok" : "unreachable"; }

}  // namespace

void ExperimentConfig::validate() const {
  if (surfaces.empty()) throw DomainError("no surfaces configured");
  if (n_list.empty()) throw DomainError("n_list is empty");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] == 0) throw DomainError("n_list entries must be positive");
    if (i > 0 && n_list[i] <= n_list[i - 1]) throw DomainError("n_list must be strictly ascending");
  }
  if (repetitions && *repetitions == 0) throw DomainError("repetitions must be >= 1");
  if (!repetitions && budget == 0) throw DomainError("repetition budget must be >= 1");
  for (std::size_t n : n_list) {
    ScalingSchedule s{alpha, beta, c_eps, c_delta, n};
    s.validate();
    for (SurfaceKind k : surfaces) {
      if (!(s.delta() < injectivity_scale(Surface{k}))) {
        throw DomainError("delta_n = " + std::to_string(s.delta()) + " at n = " + std::to_string(n) +
                          " exceeds the injectivity scale of " + std::string(surface_tag(k)));
      }
    }
  }
}

std::size_t ExperimentConfig::repetitions_for(std::size_t n) const {
  if (repetitions) return *repetitions;
  return std::max<std::size_t>(1, (budget + n - 1) / n);
}

int resolve_worker_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("ORCURV_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return std::max(1, omp_get_num_procs());
}

std::uint64_t repetition_seed(std::uint64_t base_seed, SurfaceKind surface, std::size_t n,
                              std::size_t rep) {
  return derive_seed(base_seed, {static_cast<std::uint64_t>(surface) + 1, n, rep});
}

RepetitionRow run_repetition(const ExperimentConfig& config, SurfaceKind kind, std::size_t n,
                             std::size_t rep, int inner_threads) {
  const auto start = std::chrono::steady_clock::now();
  const Surface surface{kind};
  const ScalingSchedule schedule{config.alpha, config.beta, config.c_eps, config.c_delta, n};

  RepetitionRow row;
  row.surface = kind;
  row.n = n;
  row.alpha = config.alpha;
  row.beta = config.beta;
  row.c_eps = config.c_eps;
  row.c_delta = config.c_delta;
  row.scheme = config.scheme;
  row.rep = rep;
  row.epsilon = schedule.epsilon();
  row.delta = schedule.delta();

  const std::uint64_t first_seed = repetition_seed(config.base_seed, kind, n, rep);
  const ProbePair probe = probe_pair(surface, row.delta);
  SamplerConfig sampler;
  sampler.mode = config.mode;
  sampler.rate = config.mode == CountMode::FixedCount ? static_cast<double>(n)
                                                      : static_cast<double>(n) / surface.volume();
  MesoscopicOptions opts;
  opts.matrix.method = config.method;
  opts.matrix.threads = inner_threads;

  bool done = false;
  for (std::size_t attempt = 0; attempt <= config.max_retries && !done; ++attempt) {
    row.seed = attempt == 0 ? first_seed : derive_seed(first_seed, {attempt});
    row.retries = attempt;
    sampler.seed = row.seed;
    const auto points = sample_points(surface, sampler);
    const GeoGraph graph = build_rgg(surface, points, probe, row.epsilon, config.scheme,
                                     BuildOptions{NeighborSearch::CellGrid, inner_threads}, row.seed);
    try {
      const auto s = ollivier_mesoscopic(graph, graph.probe_x(), graph.probe_y(), row.delta, opts);
      row.kappa = s.kappa;
      row.kappa_rescaled = s.kappa_rescaled;
      row.wasserstein = s.wasserstein;
      row.ball_x = s.ball_x_size;
      row.ball_y = s.ball_y_size;
      row.status = RepStatus::Ok;
      done = true;
    } catch (const ProbeError&) {
      row.status = RepStatus::Unreachable;
    }
  }
  if (!done) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    row.kappa = row.kappa_rescaled = row.wasserstein = nan;
    row.ball_x = row.ball_y = 0;
  }
  if (config.record_timing) {
    row.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
  return row;
}

std::vector<SweepRow> aggregate(const std::vector<RepetitionRow>& reps) {
  std::vector<SweepRow> rows;
  std::map<std::pair<SurfaceKind, std::size_t>, std::size_t> index;
  std::vector<std::vector<const RepetitionRow*>> groups;
  for (const auto& r : reps) {
    const auto key = std::make_pair(r.surface, r.n);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, rows.size()).first;
      SweepRow row;
      row.surface = r.surface;
      row.n = r.n;
      row.alpha = r.alpha;
      row.beta = r.beta;
      row.scheme = r.scheme;
      row.target = ricci_target(Surface{r.surface}).value;
      rows.push_back(row);
      groups.emplace_back();
    }
    groups[it->second].push_back(&r);
  }
  for (std::size_t g = 0; g < rows.size(); ++g) {
    auto& row = rows[g];
    double sum = 0.0, bx = 0.0, by = 0.0;
    for (const auto* r : groups[g]) {
      row.retries += r->retries;
      row.wall_ms += r->ms;
      if (r->status != RepStatus::Ok) {
        ++row.failures;
        continue;
      }
      ++row.n_s;
      sum += r->kappa_rescaled;
      bx += static_cast<double>(r->ball_x);
      by += static_cast<double>(r->ball_y);
    }
    if (row.n_s == 0) {
      row.mean = row.stddev = row.std_error = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    const double ns = static_cast<double>(row.n_s);
    row.mean = sum / ns;
    row.mean_ball_x = bx / ns;
    row.mean_ball_y = by / ns;
    double ss = 0.0;
    for (const auto* r : groups[g]) {
      if (r->status == RepStatus::Ok) ss += (r->kappa_rescaled - row.mean) * (r->kappa_rescaled - row.mean);
    }
    row.stddev = row.n_s > 1 ? std::sqrt(ss / (ns - 1.0)) : 0.0;
    row.std_error = row.stddev / std::sqrt(ns);
  }
  return rows;
}

SweepResult run_sweep(const ExperimentConfig& config) {
  config.validate();

  struct Task {
    SurfaceKind surface;
    std::size_t n;
    std::size_t rep;
  };
  std::vector<Task> tasks;
  for (SurfaceKind s : config.surfaces) {
    for (std::size_t n : config.n_list) {
      for (std::size_t r = 0; r < config.repetitions_for(n); ++r) tasks.push_back({s, n, r});
    }
  }

  SweepResult result;
  result.reps.resize(tasks.size());
  const int workers = resolve_worker_count(config.threads);
  const auto count = static_cast<std::int64_t>(tasks.size());

  if (workers == 1) {
    for (std::int64_t t = 0; t < count; ++t) {
      result.reps[t] = run_repetition(config, tasks[t].surface, tasks[t].n, tasks[t].rep, 1);
    }
  } else {
    // Largest graphs first for load balance; results land in their own slot.
    std::vector<std::int64_t> order(tasks.size());
    for (std::int64_t t = 0; t < count; ++t) order[t] = t;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::int64_t a, std::int64_t b) { return tasks[a].n > tasks[b].n; });
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
    for (std::int64_t k = 0; k < count; ++k) {
      const auto& task = tasks[order[k]];
      try {
        result.reps[order[k]] = run_repetition(config, task.surface, task.n, task.rep, 1);
      } catch (...) {
#pragma omp critical(orc_sweep_failure)
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  }

  result.rows = aggregate(result.reps);

  if (!config.output.empty()) {
    const std::string prefix = config.output;
    std::ofstream reps(prefix + "_reps.csv");
    std::ofstream summary(prefix + "_summary.csv");
    std::ofstream report(prefix + "_report.json");
    if (!reps || !summary || !report) {
      throw std::runtime_error("cannot write sweep outputs with prefix '" + prefix + "'");
    }
    write_repetitions_csv(result.reps, reps);
    write_summary_csv(result.rows, summary);
    write_report_json(summarize(result.rows), report);
  }
  return result;
}

SweepReport summarize(const std::vector<SweepRow>& rows) {
  if (rows.empty()) throw std::invalid_argument("summarize needs at least one row");
  SweepReport report;
  report.alpha = rows.front().alpha;
  report.beta = rows.front().beta;
  report.scheme = rows.front().scheme;
  report.regime = check_regime(report.alpha, report.beta, report.scheme);

  for (const auto& row : rows) {
    auto it = std::find_if(report.surfaces.begin(), report.surfaces.end(),
                           [&](const SurfaceSummary& s) { return s.surface == row.surface; });
    if (it == report.surfaces.end()) {
      report.surfaces.push_back(SurfaceSummary{row.surface, {}, std::nullopt, std::nullopt});
      it = report.surfaces.end() - 1;
    }
    it->points.push_back({row.n, row.mean, row.std_error, row.target, std::abs(row.mean - row.target)});
  }
  for (auto& s : report.surfaces) {
    std::sort(s.points.begin(), s.points.end(),
              [](const ErrorPoint& a, const ErrorPoint& b) { return a.n < b.n; });
    if (s.points.size() < 2) continue;
    bool monotone = true;
    for (std::size_t i = 1; i < s.points.size(); ++i) {
      if (!(s.points[i].error < s.points[i - 1].error)) monotone = false;
    }
    s.monotone_decreasing = monotone;
    s.endpoint_decreasing = s.points.back().error < s.points.front().error;
  }
  return report;
}

void write_repetitions_csv(const std::vector<RepetitionRow>& reps, std::ostream& out) {
  out << "surface,n,alpha,beta,c_eps,c_delta,scheme,seed,rep,kappa,kappa_rescaled,delta,epsilon,W,"
         "ball_x,ball_y,status,ms\n";
  for (const auto& r : reps) {
    out << surface_tag(r.surface) << ',' << r.n << ',' << fmt17(r.alpha) << ',' << fmt17(r.beta)
        << ',' << fmt17(r.c_eps) << ',' << fmt17(r.c_delta) << ',' << scheme_tag(r.scheme) << ','
        << r.seed << ',' << r.rep << ',' << fmt17(r.kappa) << ',' << fmt17(r.kappa_rescaled) << ','
        << fmt17(r.delta) << ',' << fmt17(r.epsilon) << ',' << fmt17(r.wasserstein) << ','
        << r.ball_x << ',' << r.ball_y << ',' << status_tag(r.status) << ',' << fmt17(r.ms) << '\n';
  }
}

void write_summary_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
  out << "surface,n,alpha,beta,scheme,mean_kappa_rescaled,std,stderr,n_s,failures,retries,target,"
         "mean_ball_x,mean_ball_y,wall_ms\n";
  for (const auto& r : rows) {
    out << surface_tag(r.surface) << ',' << r.n << ',' << fmt17(r.alpha) << ',' << fmt17(r.beta)
        << ',' << scheme_tag(r.scheme) << ',' << fmt17(r.mean) << ',' << fmt17(r.stddev) << ','
        << fmt17(r.std_error) << ',' << r.n_s << ',' << r.failures << ',' << r.retries << ','
        << fmt17(r.target) << ',' << fmt17(r.mean_ball_x) << ',' << fmt17(r.mean_ball_y) << ','
        << fmt17(r.wall_ms) << '\n';
  }
}

void write_report_json(const SweepReport& report, std::ostream& out) {
  nlohmann::json j;
  j["alpha"] = report.alpha;
  j["beta"] = report.beta;
  j["scheme"] = std::string(scheme_tag(report.scheme));
  j["regime"] = {
      {"weighted_ok", report.regime.weighted_ok},
      {"weighted_equal_radii_ok", report.regime.weighted_equal_radii_ok},
      {"unweighted_ok", report.regime.unweighted_ok},
      {"scheme_ok", report.regime.scheme_ok},
      {"density_class", std::string(density_tag(report.regime.density_class))},
      {"degree_exponent", report.regime.degree_exponent},
  };
  auto& surfaces = j["surfaces"] = nlohmann::json::array();
  for (const auto& s : report.surfaces) {
    nlohmann::json js;
    js["surface"] = std::string(surface_tag(s.surface));
    auto& pts = js["points"] = nlohmann::json::array();
    for (const auto& p : s.points) {
      pts.push_back({{"n", p.n},
                     {"mean", p.mean},
                     {"stderr", p.std_error},
                     {"target", p.target},
                     {"error", p.error}});
    }
    js["monotone_decreasing"] =
        s.monotone_decreasing ? nlohmann::json(*s.monotone_decreasing) : nlohmann::json("n/a");
    js["endpoint_decreasing"] =
        s.endpoint_decreasing ? nlohmann::json(*s.endpoint_decreasing) : nlohmann::json("n/a");
    surfaces.push_back(js);
  }
  out << j.dump(2) << '\n';
}

}  // namespace orc
