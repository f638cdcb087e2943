#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "minimax/harness.hpp"
#include "minimax/schedules.hpp"
#include "minimax/version.hpp"

namespace minimax {

namespace {

using ordered_json = nlohmann::ordered_json;

}  // namespace

// ---------------------------------------------------------------------------
// Problem registry
// ---------------------------------------------------------------------------

std::unique_ptr<StochasticOracle> make_problem(const ProblemConfig& problem) {
  return std::visit(
      [](const auto& p) -> std::unique_ptr<StochasticOracle> {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, QuadraticProblem>) {
          return make_quadratic_saddle(p.spec, p.seed);
        } else if constexpr (std::is_same_v<T, WganProblem>) {
          const FeasibleSet gen =
              Box{Vec(2, -p.gen_halfwidth), Vec(2, p.gen_halfwidth)};
          const FeasibleSet disc =
              Box{Vec(2, -p.disc_halfwidth), Vec(2, p.disc_halfwidth)};
          return make_wgan_toy(p.real_mean, p.real_std, p.z_std, gen, disc);
        } else if constexpr (std::is_same_v<T, RobustSyntheticProblem>) {
          Vec flips = p.flip_rates;
          if (flips.empty()) flips.assign(p.domains, 0.05);
          if (static_cast<int>(flips.size()) != p.domains)
            throw std::invalid_argument("robust synthetic: one flip rate per domain");
          auto domains =
              make_synthetic_domains(p.domains, p.features, p.points_per_domain,
                                     p.separation, p.noise_sigma, flips, p.seed);
          return make_robust_multidomain(std::move(domains), p.x_halfwidth);
        } else {
          static_assert(std::is_same_v<T, RobustCsvProblem>);
          if (p.paths.empty())
            throw std::invalid_argument("robust csv: no domain files given");
          std::vector<DomainData> domains;
          for (const auto& path : p.paths) domains.push_back(load_domain_csv(path));
          return make_robust_multidomain(std::move(domains), p.x_halfwidth);
        }
      },
      problem);
}

std::string problem_name(const ProblemConfig& problem) {
  return std::visit(
      [](const auto& p) -> std::string {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, QuadraticProblem>) return "quadratic";
        if constexpr (std::is_same_v<T, WganProblem>) return "wgan";
        if constexpr (std::is_same_v<T, RobustSyntheticProblem>)
          return "robust_multidomain";
        if constexpr (std::is_same_v<T, RobustCsvProblem>) return "robust_multidomain";
      },
      problem);
}

std::vector<std::pair<std::string, std::string>> list_problems() {
  return {
      {"quadratic",
       "random quadratic saddle over boxes with Gaussian gradient noise; exact "
       "gradients and analytic regularized dual argmax"},
      {"wgan",
       "two-parameter generator vs quadratic discriminator moment-matching toy; "
       "closed-form expectation"},
      {"robust_multidomain",
       "simplex-weighted worst-case logistic regression over several domains "
       "(synthetic Gaussian data or CSV files, label in last column)"},
  };
}

// ---------------------------------------------------------------------------
// CSV persistence
// ---------------------------------------------------------------------------

const char* const kRunCsvHeader =
    "iter,gap_true,gap_regularized,gap_surrogate,rho,estimator_err_x,"
    "estimator_err_y,dist_to_target,grad_calls,wall_ms";

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_opt(const std::optional<double>& v) {
  return v ? fmt17(*v) : std::string();
}

std::optional<double> parse_opt(const std::string& field) {
  if (field.empty()) return std::nullopt;
  return std::stod(field);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

void write_run_csv(const std::string& path, const std::vector<RunRecord>& records) {
  std::ofstream out(path, std::ios::binary);  // fixed newlines across platforms
  if (!out) throw std::runtime_error("cannot write " + path);
  out << kRunCsvHeader << "\n";
  for (const auto& r : records) {
    out << r.iter << ',' << fmt_opt(r.gap_true) << ',' << fmt_opt(r.gap_regularized)
        << ',' << fmt17(r.gap_surrogate) << ',' << fmt17(r.rho) << ','
        << fmt_opt(r.estimator_err_x) << ',' << fmt_opt(r.estimator_err_y) << ','
        << fmt_opt(r.dist_to_target) << ',' << r.grad_calls << ',' << fmt17(r.wall_ms)
        << "\n";
  }
}

std::vector<RunRecord> read_run_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty csv " + path);
  if (line != kRunCsvHeader) throw std::runtime_error("unexpected csv header in " + path);
  std::vector<RunRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 10) throw std::runtime_error("bad csv row in " + path);
    RunRecord r;
    r.iter = std::stol(cells[0]);
    r.gap_true = parse_opt(cells[1]);
    r.gap_regularized = parse_opt(cells[2]);
    r.gap_surrogate = std::stod(cells[3]);
    r.rho = std::stod(cells[4]);
    r.estimator_err_x = parse_opt(cells[5]);
    r.estimator_err_y = parse_opt(cells[6]);
    r.dist_to_target = parse_opt(cells[7]);
    r.grad_calls = std::stol(cells[8]);
    r.wall_ms = std::stod(cells[9]);
    records.push_back(r);
  }
  return records;
}

namespace {

struct ColumnView {
  const char* name;
  std::optional<double> (*get)(const RunRecord&);
};

const ColumnView kAggColumns[] = {
    {"gap_true", [](const RunRecord& r) { return r.gap_true; }},
    {"gap_regularized", [](const RunRecord& r) { return r.gap_regularized; }},
    {"gap_surrogate",
     [](const RunRecord& r) { return std::optional<double>(r.gap_surrogate); }},
    {"rho", [](const RunRecord& r) { return std::optional<double>(r.rho); }},
    {"estimator_err_x", [](const RunRecord& r) { return r.estimator_err_x; }},
    {"estimator_err_y", [](const RunRecord& r) { return r.estimator_err_y; }},
    {"dist_to_target", [](const RunRecord& r) { return r.dist_to_target; }},
    {"grad_calls",
     [](const RunRecord& r) {
       return std::optional<double>(static_cast<double>(r.grad_calls));
     }},
    {"wall_ms", [](const RunRecord& r) { return std::optional<double>(r.wall_ms); }},
};

}  // namespace

void write_aggregate_csv(const std::string& path,
                         const std::vector<std::vector<RunRecord>>& runs) {
  if (runs.empty()) throw std::invalid_argument("aggregate: no runs");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);

  out << "iter";
  for (const auto& col : kAggColumns) out << ',' << col.name << "_mean" << ',' << col.name
                                          << "_std";
  out << "\n";

  // Runs are aligned by iteration index; aggregate the iterations present in
  // every run (early numeric failures shorten a run).
  for (std::size_t row = 0;; ++row) {
    bool present_in_all = true;
    for (const auto& run : runs)
      if (row >= run.size() || run[row].iter != runs.front()[row].iter) {
        present_in_all = false;
        break;
      }
    if (!present_in_all) break;
    out << runs.front()[row].iter;
    for (const auto& col : kAggColumns) {
      bool all_have = true;
      double mean = 0.0;
      for (const auto& run : runs) {
        const auto v = col.get(run[row]);
        if (!v) {
          all_have = false;
          break;
        }
        mean += *v;
      }
      if (!all_have) {
        out << ",,";
        continue;
      }
      mean /= static_cast<double>(runs.size());
      double var = 0.0;
      for (const auto& run : runs) {
        const double d = *col.get(run[row]) - mean;
        var += d * d;
      }
      var /= static_cast<double>(runs.size());
      out << ',' << fmt17(mean) << ',' << fmt17(std::sqrt(var));
    }
    out << "\n";
    if (row + 1 >= runs.front().size()) break;
  }
}

// ---------------------------------------------------------------------------
// Experiment driver
// ---------------------------------------------------------------------------

namespace {

int worker_count() {
  const char* env = std::getenv("MINIMAX_WORKERS");
  if (env == nullptr || *env == '\0') return 1;
  const int n = std::atoi(env);
  return n >= 1 ? n : 1;
}

ordered_json set_to_json(const FeasibleSet& set) {
  return std::visit(
      [](const auto& s) -> ordered_json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Box>)
          return {{"type", "box"}, {"lower", s.lower}, {"upper", s.upper}};
        if constexpr (std::is_same_v<T, Ball>)
          return {{"type", "ball"}, {"center", s.center}, {"radius", s.radius}};
        if constexpr (std::is_same_v<T, Simplex>)
          return {{"type", "simplex"}, {"dim", s.dim}};
        if constexpr (std::is_same_v<T, Unbounded>)
          return {{"type", "unbounded"}, {"dim", s.dim}, {"radius", s.radius}};
      },
      set);
}

ordered_json prox_to_json(const ProxTerm& term) {
  return std::visit(
      [](const auto& t) -> ordered_json {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, ZeroTerm>) return {{"type", "zero"}};
        if constexpr (std::is_same_v<T, L1Term>)
          return {{"type", "l1"}, {"weight", t.weight}};
        if constexpr (std::is_same_v<T, IndicatorTerm>)
          return {{"type", "indicator"}, {"set", set_to_json(t.set)}};
      },
      term);
}

ordered_json seq_to_json(const PowerSeq& s) {
  return {{"scale", s.scale}, {"shift", s.shift}, {"num13", s.num13},
          {"offset", s.offset}};
}

ordered_json schedule_to_json(const ScheduleConfig& sc, bool l_auto) {
  ordered_json j;
  j["mode"] = sc.mode == ScheduleMode::manual ? "manual" : "theorem";
  if (l_auto)
    j["L"] = "auto";
  else
    j["L"] = sc.L;
  j["beta"] = sc.beta;
  j["batch"] = sc.batch;
  if (sc.mode == ScheduleMode::theorem) {
    j["a1"] = sc.a1;
    j["a2"] = sc.a2;
    j["a4"] = sc.a4;
    j["a5"] = sc.a5;
    j["a6"] = sc.a6;
  } else if (sc.manual) {
    j["sequences"] = {{"eta", seq_to_json(sc.manual->eta)},
                      {"alpha", seq_to_json(sc.manual->alpha)},
                      {"rho", seq_to_json(sc.manual->rho)},
                      {"gamma", seq_to_json(sc.manual->gamma)},
                      {"theta", seq_to_json(sc.manual->theta)}};
  }
  return j;
}

ordered_json problem_to_json(const ProblemConfig& problem) {
  ordered_json j;
  j["name"] = problem_name(problem);
  return std::visit(
      [&](const auto& p) -> ordered_json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, QuadraticProblem>) {
          j["params"] = {{"dx", p.spec.dx},
                         {"dy", p.spec.dy},
                         {"a_min", p.spec.a_min},
                         {"a_max", p.spec.a_max},
                         {"c_min", p.spec.c_min},
                         {"c_max", p.spec.c_max},
                         {"b_scale", p.spec.b_scale},
                         {"noise", p.spec.noise},
                         {"box_halfwidth_x", p.spec.box_halfwidth_x},
                         {"box_halfwidth_y", p.spec.box_halfwidth_y},
                         {"seed", p.seed}};
        } else if constexpr (std::is_same_v<T, WganProblem>) {
          j["params"] = {{"real_mean", p.real_mean},
                         {"real_std", p.real_std},
                         {"z_std", p.z_std},
                         {"gen_halfwidth", p.gen_halfwidth},
                         {"disc_halfwidth", p.disc_halfwidth}};
        } else if constexpr (std::is_same_v<T, RobustSyntheticProblem>) {
          j["params"] = {{"synthetic",
                          ordered_json{{"domains", p.domains},
                                       {"features", p.features},
                                       {"points_per_domain", p.points_per_domain},
                                       {"separation", p.separation},
                                       {"noise_sigma", p.noise_sigma},
                                       {"flip_rates", p.flip_rates},
                                       {"seed", p.seed}}},
                         {"x_halfwidth", p.x_halfwidth}};
        } else {
          j["params"] = {{"csv_paths", p.paths}, {"x_halfwidth", p.x_halfwidth}};
        }
        return j;
      },
      problem);
}

ordered_json config_to_json(const ExperimentConfig& config) {
  ordered_json j;
  j["problem"] = problem_to_json(config.problem);
  j["solvers"] = ordered_json::array();
  for (const auto& entry : config.solvers) {
    ordered_json s;
    s["label"] = entry.label;
    switch (entry.spec.algorithm) {
      case Algorithm::formda: s["algorithm"] = "formda"; break;
      case Algorithm::formda_ns: s["algorithm"] = "formda_ns"; break;
      case Algorithm::sgda: s["algorithm"] = "sgda"; break;
    }
    if (entry.spec.algorithm == Algorithm::sgda) {
      s["batch"] = entry.spec.schedule.batch;
      s["sgda_alpha"] = entry.spec.sgda_alpha;
      s["sgda_beta"] = entry.spec.sgda_beta;
    } else {
      s["schedule"] = schedule_to_json(entry.spec.schedule, entry.schedule_L_auto);
      s["prox_x"] = prox_to_json(entry.spec.prox_x);
      s["prox_y"] = prox_to_json(entry.spec.prox_y);
      s["allow_unvalidated"] = entry.spec.allow_unvalidated;
    }
    s["stop_tolerance"] = entry.spec.stop_tolerance;
    j["solvers"].push_back(s);
  }
  j["seeds"] = config.seeds;
  j["max_iters"] = config.max_iters;
  j["gap_eval_stride"] = config.gap_eval_stride;
  j["eval_batch"] = config.eval_batch;
  j["output_dir"] = config.output_dir;
  j["record_wall_time"] = config.record_wall_time;
  if (config.x0 || config.y0) {
    ordered_json init;
    if (config.x0) init["x"] = *config.x0;
    if (config.y0) init["y"] = *config.y0;
    j["init"] = init;
  }
  return j;
}

}  // namespace

namespace {

// Empirical per-sample gradient variance at the starting point; the measured
// value is what the summary logs as the noise level delta^2 of the problem.
struct NoiseProbe {
  double x_block = 0.0;
  double y_block = 0.0;
  int samples = 0;
};

NoiseProbe probe_gradient_noise(const StochasticOracle& oracle, const Vec& x,
                                const Vec& y, int n) {
  NoiseProbe probe;
  probe.samples = n;
  RngStream rng = RngStream::child(0x6e6f6973, 0);
  Vec gx(oracle.dx()), gy(oracle.dy());
  Vec mx(oracle.dx(), 0.0), my(oracle.dy(), 0.0);
  std::vector<Vec> xs, ys;
  xs.reserve(n);
  ys.reserve(n);
  for (int t = 0; t < n; ++t) {
    oracle.sample_gradients(x, y, 1, rng, gx, gy);
    for (int i = 0; i < oracle.dx(); ++i) mx[i] += gx[i];
    for (int i = 0; i < oracle.dy(); ++i) my[i] += gy[i];
    xs.push_back(gx);
    ys.push_back(gy);
  }
  for (auto& v : mx) v /= n;
  for (auto& v : my) v /= n;
  for (int t = 0; t < n; ++t) {
    double dx2 = 0.0, dy2 = 0.0;
    for (int i = 0; i < oracle.dx(); ++i)
      dx2 += (xs[t][i] - mx[i]) * (xs[t][i] - mx[i]);
    for (int i = 0; i < oracle.dy(); ++i)
      dy2 += (ys[t][i] - my[i]) * (ys[t][i] - my[i]);
    probe.x_block += dx2 / n;
    probe.y_block += dy2 / n;
  }
  return probe;
}

}  // namespace

ExperimentSummary run_experiment(const ExperimentConfig& config) {
  const auto report = validate_config(config);
  if (!report.ok) {
    std::string msg = "experiment config invalid:";
    for (const auto& e : report.errors) msg += "\n  " + e;
    throw std::invalid_argument(msg);
  }

  const auto oracle = make_problem(config.problem);
  std::filesystem::create_directories(config.output_dir);

  // Materialize per-run specs (resolving auto L once against the oracle).
  struct Job {
    std::string label;
    SolverSpec spec;
    std::uint64_t seed;
    std::string csv_path;
    RunResult result;
  };
  std::vector<Job> jobs;
  for (const auto& entry : config.solvers) {
    SolverSpec spec = entry.spec;
    if (entry.schedule_L_auto)
      spec.schedule.L = smoothness_from_lipschitz(oracle->lipschitz_estimate());
    for (const auto seed : config.seeds) {
      Job job;
      job.label = entry.label;
      job.spec = spec;
      job.seed = seed;
      job.csv_path = config.output_dir + "/" + entry.label + "_seed" +
                     std::to_string(seed) + ".csv";
      jobs.push_back(std::move(job));
    }
  }

  const int workers = std::min<int>(worker_count(), static_cast<int>(jobs.size()));
  auto run_job = [&](Job& job) {
    job.result = run(job.spec, *oracle, job.seed, config.x0, config.y0);
    write_run_csv(job.csv_path, job.result.records);
  };
  if (workers <= 1) {
    for (auto& job : jobs) run_job(job);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&]() {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= jobs.size()) return;
          run_job(jobs[i]);
        }
      });
    for (auto& t : pool) t.join();
  }

  ExperimentSummary summary;
  for (const auto& entry : config.solvers) {
    std::vector<std::vector<RunRecord>> solver_runs;
    for (const auto& job : jobs)
      if (job.label == entry.label) solver_runs.push_back(job.result.records);
    const std::string agg_path =
        config.output_dir + "/" + entry.label + "_aggregate.csv";
    write_aggregate_csv(agg_path, solver_runs);
    summary.aggregate_paths.push_back(agg_path);
  }

  ordered_json jruns = ordered_json::array();
  for (const auto& job : jobs) {
    RunOutcome outcome;
    outcome.solver = job.label;
    outcome.seed = job.seed;
    outcome.stop_reason = to_string(job.result.reason);
    outcome.iterations = job.result.iterations;
    outcome.grad_calls = job.result.grad_calls;
    outcome.eval_grad_calls = job.result.eval_grad_calls;
    outcome.final_x = job.result.final_x;
    outcome.final_y = job.result.final_y;
    outcome.csv_path = job.csv_path;
    outcome.warnings = job.result.warnings;
    if (!job.result.records.empty()) {
      const auto& last = job.result.records.back();
      outcome.final_gap_true = last.gap_true;
      outcome.final_gap_surrogate = last.gap_surrogate;
      outcome.final_dist_to_target = last.dist_to_target;
      outcome.wall_ms = last.wall_ms;
    }
    summary.runs.push_back(outcome);

    ordered_json jr;
    jr["solver"] = outcome.solver;
    jr["seed"] = outcome.seed;
    jr["stop_reason"] = outcome.stop_reason;
    jr["iterations"] = outcome.iterations;
    if (outcome.final_gap_true) jr["final_gap_true"] = *outcome.final_gap_true;
    jr["final_gap_surrogate"] = outcome.final_gap_surrogate;
    if (outcome.final_dist_to_target)
      jr["final_dist_to_target"] = *outcome.final_dist_to_target;
    jr["grad_calls"] = outcome.grad_calls;
    jr["eval_grad_calls"] = outcome.eval_grad_calls;
    jr["wall_ms"] = outcome.wall_ms;
    jr["final_x"] = job.result.final_x;
    jr["final_y"] = job.result.final_y;
    jr["csv"] = outcome.csv_path;
    if (!outcome.warnings.empty()) jr["warnings"] = outcome.warnings;
    jruns.push_back(jr);
  }

  ordered_json jsummary;
  jsummary["library_version"] = MINIMAX_VERSION_STRING;
  jsummary["config"] = config_to_json(config);
  jsummary["workers"] = workers;
  {
    const Vec px = project(oracle->x_set(), config.x0.value_or(Vec(oracle->dx(), 0.0)));
    const Vec py = project(oracle->y_set(), config.y0.value_or(Vec(oracle->dy(), 0.0)));
    const NoiseProbe probe = probe_gradient_noise(*oracle, px, py, 2000);
    jsummary["measured_gradient_noise"] = {{"delta_sq_x", probe.x_block},
                                           {"delta_sq_y", probe.y_block},
                                           {"probe_samples", probe.samples},
                                           {"at", "initial point"}};
  }
  jsummary["runs"] = jruns;
  if (!report.warnings.empty()) jsummary["config_warnings"] = report.warnings;

  summary.summary_path = config.output_dir + "/summary.json";
  std::ofstream out(summary.summary_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + summary.summary_path);
  out << jsummary.dump(2) << "\n";
  return summary;
}

}  // namespace minimax
