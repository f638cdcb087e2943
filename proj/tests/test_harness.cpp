#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "json.hpp"
#include "minimax/harness.hpp"

using namespace minimax;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kQuadraticConfig = R"({
  "problem": {"name": "quadratic",
              "params": {"dx": 2, "dy": 2, "noise": 0.1, "seed": 3}},
  "solvers": [
    {"label": "momentum", "algorithm": "formda",
     "schedule": {"mode": "theorem", "L": 1.0, "beta": 0.16666, "batch": 8,
                  "a1": 0.05, "a2": 0.05, "a4": 0.009, "a5": 1.65, "a6": 15.4}},
    {"label": "baseline", "algorithm": "sgda", "batch": 8,
     "sgda_alpha": 0.05, "sgda_beta": 0.05}
  ],
  "seeds": [11, 12],
  "max_iters": 30,
  "gap_eval_stride": 10,
  "eval_batch": 100,
  "output_dir": "OUTDIR",
  "record_wall_time": false,
  "init": {"x": [1.0, -1.0], "y": [0.5, 0.5]}
})";

ExperimentConfig quadratic_config(const std::string& outdir) {
  std::string text = kQuadraticConfig;
  text.replace(text.find("OUTDIR"), 6, outdir);
  return parse_config(text);
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("config parsing accepts the schema and rejects unknown keys") {
  TempDir tmp("minimax_cfg");
  const auto cfg = quadratic_config(tmp.path.string());
  CHECK(problem_name(cfg.problem) == "quadratic");
  CHECK(cfg.solvers.size() == 2);
  CHECK(cfg.solvers[0].spec.algorithm == Algorithm::formda);
  CHECK(cfg.solvers[1].spec.algorithm == Algorithm::sgda);
  CHECK(cfg.seeds == std::vector<std::uint64_t>{11, 12});
  CHECK(cfg.max_iters == 30);
  CHECK_FALSE(cfg.record_wall_time);
  REQUIRE(cfg.x0.has_value());
  CHECK((*cfg.x0)[1] == -1.0);
  // Globals propagate into each solver spec.
  CHECK(cfg.solvers[0].spec.max_iters == 30);
  CHECK(cfg.solvers[0].spec.eval_batch == 100);

  CHECK_THROWS_WITH_AS(parse_config(R"({"problem": {"name": "quadratic"}, "solvers":
    [{"label": "x", "algorithm": "formda", "schedule": {"mode": "theorem"}}],
    "seeds": [1], "typo_key": 1})"),
                       doctest::Contains("typo_key"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config(R"({"problem": {"name": "nope"}, "solvers":
    [{"label": "x", "algorithm": "formda", "schedule": {}}], "seeds": [1]})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_config(R"({"problem": {"name": "quadratic"}, "solvers":
    [{"label": "x", "algorithm": "formda",
      "schedule": {"mode": "manual"}}], "seeds": [1]})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_config(R"({"problem": {"name": "quadratic"}, "solvers":
    [{"label": "x", "algorithm": "sgda", "schedule": {"mode": "theorem"}}],
    "seeds": [1]})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_config("not json"), std::invalid_argument);

  // Nonsmooth solver entries carry prox terms.
  const auto ns = parse_config(R"({
    "problem": {"name": "wgan"},
    "solvers": [{"label": "ns", "algorithm": "formda_ns", "allow_unvalidated": true,
      "schedule": {"mode": "manual", "beta": 0.01, "batch": 4, "sequences": {
        "eta": {}, "alpha": {"scale": 0.1}, "rho": {"num13": 2, "shift": 1.0},
        "gamma": {"num13": 12}, "theta": {"num13": 8}}},
      "prox_x": {"type": "l1", "weight": 0.25},
      "prox_y": {"type": "indicator",
                 "set": {"type": "box", "lower": [-1, -1], "upper": [1, 1]}}}],
    "seeds": [7]})");
  CHECK(ns.solvers[0].spec.algorithm == Algorithm::formda_ns);
  CHECK(std::get<L1Term>(ns.solvers[0].spec.prox_x).weight == 0.25);
  CHECK(std::holds_alternative<IndicatorTerm>(ns.solvers[0].spec.prox_y));
  CHECK(ns.solvers[0].spec.schedule.manual->alpha.scale == 0.1);
}

TEST_CASE("auto smoothness constant resolves against the problem") {
  TempDir tmp("minimax_auto");
  auto cfg = parse_config(R"({
    "problem": {"name": "quadratic", "params": {"noise": 0.05, "seed": 5}},
    "solvers": [{"label": "m", "algorithm": "formda", "allow_unvalidated": true,
      "schedule": {"mode": "theorem", "L": "auto", "beta": 0.002, "batch": 8,
                   "a1": 0.0001, "a2": 0.0001, "a4": 0.00005, "a5": 3.0, "a6": 41.0}}],
    "seeds": [1], "max_iters": 5, "output_dir": ")" +
                          (tmp.path / "o").string() + R"("})");
  CHECK(cfg.solvers[0].schedule_L_auto);
  const auto oracle = make_problem(cfg.problem);
  const double expected = smoothness_from_lipschitz(oracle->lipschitz_estimate());

  const auto summary = run_experiment(cfg);
  const auto j = nlohmann::json::parse(slurp(summary.summary_path));
  CHECK(j["config"]["solvers"][0]["schedule"]["L"] == "auto");  // echo keeps auto
  const auto records = read_run_csv(summary.runs[0].csv_path);
  // rho_1 = L (1+1)^{-2/13} with the resolved L.
  CHECK(records[0].rho ==
        doctest::Approx(expected * std::pow(2.0, -2.0 / 13.0)).epsilon(1e-12));
}

TEST_CASE("config validation mirrors the constraint rules") {
  TempDir tmp("minimax_val");
  auto cfg = quadratic_config(tmp.path.string());

  SUBCASE("well-formed config passes") {
    const auto report = validate_config(cfg);
    for (const auto& e : report.errors) MESSAGE(e);
    CHECK(report.ok);
  }
  SUBCASE("empty seed list fails") {
    cfg.seeds.clear();
    CHECK_FALSE(validate_config(cfg).ok);
  }
  SUBCASE("theorem-mode violation without override fails citing the constraint") {
    cfg.solvers[0].spec.schedule.beta = 1.0;  // > 1/(6L)
    const auto report = validate_config(cfg);
    CHECK_FALSE(report.ok);
    bool cited = false;
    for (const auto& e : report.errors)
      if (e.find("beta <= 1/(6L)") != std::string::npos) cited = true;
    CHECK(cited);
  }
  SUBCASE("override downgrades the violation to a warning") {
    cfg.solvers[0].spec.schedule.beta = 1.0;
    cfg.solvers[0].spec.allow_unvalidated = true;
    const auto report = validate_config(cfg);
    CHECK(report.ok);
    CHECK_FALSE(report.warnings.empty());
  }
  SUBCASE("manual schedules need the override flag") {
    cfg.solvers[0].spec.schedule.mode = ScheduleMode::manual;
    ManualSchedule m;
    cfg.solvers[0].spec.schedule.manual = m;
    CHECK_FALSE(validate_config(cfg).ok);
    cfg.solvers[0].spec.allow_unvalidated = true;
    const auto report = validate_config(cfg);
    CHECK(report.ok);
    CHECK_FALSE(report.warnings.empty());
  }
  SUBCASE("init dimension mismatch fails") {
    cfg.x0 = Vec{1.0, 2.0, 3.0};
    CHECK_FALSE(validate_config(cfg).ok);
  }
}

TEST_CASE("run csv round-trips records exactly") {
  TempDir tmp("minimax_csv");
  std::vector<RunRecord> records(3);
  records[0].iter = 1;
  records[0].gap_true = 0.12345678901234567;
  records[0].gap_surrogate = 3.3333333333333333e-11;
  records[0].rho = 0.891;
  records[0].estimator_err_x = 1e-300;
  records[0].grad_calls = 16;
  records[0].wall_ms = 0.25;
  records[1].iter = 10;
  records[1].gap_surrogate = 7.0 / 3.0;
  records[1].rho = 0.5;
  records[1].dist_to_target = 1.25;
  records[1].grad_calls = 328;
  records[2].iter = 20;
  records[2].gap_surrogate = -0.0;
  records[2].grad_calls = 648;

  const auto path = (tmp.path / "run.csv").string();
  write_run_csv(path, records);
  const auto back = read_run_csv(path);
  REQUIRE(back.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(back[i].iter == records[i].iter);
    CHECK(back[i].gap_true == records[i].gap_true);
    CHECK(back[i].gap_regularized == records[i].gap_regularized);
    CHECK(back[i].gap_surrogate == records[i].gap_surrogate);
    CHECK(back[i].rho == records[i].rho);
    CHECK(back[i].estimator_err_x == records[i].estimator_err_x);
    CHECK(back[i].estimator_err_y == records[i].estimator_err_y);
    CHECK(back[i].dist_to_target == records[i].dist_to_target);
    CHECK(back[i].grad_calls == records[i].grad_calls);
    CHECK(back[i].wall_ms == records[i].wall_ms);
  }
  // Header is pinned.
  const std::string text = slurp(path);
  CHECK(text.rfind(kRunCsvHeader, 0) == 0);
}

TEST_CASE("experiment run: files, aggregation, determinism") {
  TempDir tmp("minimax_exp");
  const auto cfg = quadratic_config((tmp.path / "a").string());
  const auto summary = run_experiment(cfg);

  REQUIRE(summary.runs.size() == 4);  // 2 solvers x 2 seeds
  for (const auto& run : summary.runs) {
    CHECK(fs::exists(run.csv_path));
    CHECK(run.stop_reason == "max_iters");
  }
  REQUIRE(summary.aggregate_paths.size() == 2);

  SUBCASE("aggregate equals an independent recomputation") {
    for (const auto& agg_path : summary.aggregate_paths) {
      // Gather this solver's per-run CSVs the pedestrian way.
      std::vector<std::vector<RunRecord>> runs;
      const std::string label =
          fs::path(agg_path).filename().string().find("momentum") != std::string::npos
              ? "momentum"
              : "baseline";
      for (const auto& run : summary.runs)
        if (run.solver == label) runs.push_back(read_run_csv(run.csv_path));
      REQUIRE(runs.size() == 2);

      std::ifstream agg(agg_path);
      std::string line;
      std::getline(agg, line);  // header
      std::size_t row = 0;
      while (std::getline(agg, line)) {
        std::stringstream ss(line);
        std::string cell;
        std::getline(ss, cell, ',');
        CHECK(std::stol(cell) == runs[0][row].iter);
        // gap_surrogate mean/std are columns 6 and 7 (0-based 5, 6).
        std::vector<std::string> cells;
        cells.push_back(cell);
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        const double m = (runs[0][row].gap_surrogate + runs[1][row].gap_surrogate) / 2.0;
        const double v = (std::pow(runs[0][row].gap_surrogate - m, 2) +
                          std::pow(runs[1][row].gap_surrogate - m, 2)) /
                         2.0;
        CHECK(std::stod(cells[5]) == doctest::Approx(m).epsilon(1e-12));
        CHECK(std::stod(cells[6]) == doctest::Approx(std::sqrt(v)).epsilon(1e-12));
        ++row;
      }
      CHECK(row == runs[0].size());
    }
  }

  SUBCASE("repeat run is byte-identical with wall time recording off") {
    auto cfg2 = quadratic_config((tmp.path / "b").string());
    const auto summary2 = run_experiment(cfg2);
    REQUIRE(summary2.runs.size() == summary.runs.size());
    for (std::size_t i = 0; i < summary.runs.size(); ++i)
      CHECK(slurp(summary.runs[i].csv_path) == slurp(summary2.runs[i].csv_path));
  }

  SUBCASE("summary json echoes the config") {
    const auto j = nlohmann::json::parse(slurp(summary.summary_path));
    CHECK(j.contains("library_version"));
    CHECK(j["config"]["problem"]["name"] == "quadratic");
    CHECK(j["config"]["seeds"].size() == 2);
    CHECK(j["runs"].size() == 4);
    // The measured noise level matches the problem's configured noise:
    // per-sample variance delta^2 * d per block with delta = 0.1, d = 2.
    CHECK(j["measured_gradient_noise"]["delta_sq_x"].get<double>() ==
          doctest::Approx(0.01 * 2).epsilon(0.15));
    // The echo reparses to the same experiment.
    const auto cfg_echo = parse_config(j["config"].dump());
    CHECK(cfg_echo.max_iters == cfg.max_iters);
    CHECK(cfg_echo.seeds == cfg.seeds);
  }
}

TEST_CASE("single run aggregates to itself with zero std") {
  TempDir tmp("minimax_single");
  auto cfg = quadratic_config((tmp.path / "x").string());
  cfg.seeds = {11};
  cfg.solvers.resize(1);
  cfg.max_iters = 10;
  cfg.gap_eval_stride = 1;
  for (auto& entry : cfg.solvers) entry.spec.max_iters = 10, entry.spec.gap_eval_stride = 1;
  const auto summary = run_experiment(cfg);
  const auto records = read_run_csv(summary.runs[0].csv_path);
  CHECK(records.size() == 10);

  std::ifstream agg(summary.aggregate_paths[0]);
  std::string line;
  std::getline(agg, line);
  std::size_t row = 0;
  while (std::getline(agg, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    CHECK(std::stod(cells[5]) == records[row].gap_surrogate);  // mean of one run
    CHECK(std::stod(cells[6]) == 0.0);                         // zero std
    ++row;
  }
  CHECK(row == records.size());
}

TEST_CASE("identical solver entries produce identical csv files") {
  TempDir tmp("minimax_twin");
  auto cfg = quadratic_config((tmp.path / "t").string());
  cfg.solvers[1] = cfg.solvers[0];
  cfg.solvers[1].label = "momentum_twin";
  cfg.seeds = {42};
  const auto summary = run_experiment(cfg);
  REQUIRE(summary.runs.size() == 2);
  CHECK(slurp(summary.runs[0].csv_path) == slurp(summary.runs[1].csv_path));
}

TEST_CASE("property suite passes, is seed-stable, and catches faults") {
  const auto report = property_suite(1);
  for (const auto& check : report.checks) {
    INFO(check.name, " ", check.detail);
    CHECK(check.pass);
  }
  CHECK(report.all_pass);

  // The pass/fail set is identical across a ten-seed sweep.
  for (std::uint64_t seed = 2; seed <= 11; ++seed) {
    const auto other = property_suite(seed);
    REQUIRE(other.checks.size() == report.checks.size());
    for (std::size_t i = 0; i < other.checks.size(); ++i) {
      CHECK(other.checks[i].name == report.checks[i].name);
      CHECK(other.checks[i].pass == report.checks[i].pass);
    }
  }

  // Corrupting projections must at least break nonexpansiveness.
  PropertyOptions faulty;
  faulty.corrupt_projection = true;
  const auto broken = property_suite(1, faulty);
  CHECK_FALSE(broken.all_pass);
  bool nonexpansive_failed = false;
  for (const auto& check : broken.checks)
    if (check.name.find("nonexpansive") != std::string::npos && !check.pass)
      nonexpansive_failed = true;
  CHECK(nonexpansive_failed);
}

TEST_CASE("csv-backed robust problem resolves through the registry") {
  TempDir tmp("minimax_csvprob");
  for (int m = 0; m < 2; ++m) {
    std::ofstream out(tmp.path / ("d" + std::to_string(m) + ".csv"));
    out << "0.5,1.0,1\n-0.5,1.0,0\n0.7,1.0,1\n-0.7,1.0,0\n";
  }
  RobustCsvProblem problem;
  problem.paths = {(tmp.path / "d0.csv").string(), (tmp.path / "d1.csv").string()};
  const auto oracle = make_problem(ProblemConfig{problem});
  CHECK(oracle->dx() == 2);
  CHECK(oracle->dy() == 2);
  CHECK(problem_name(ProblemConfig{problem}) == "robust_multidomain");
  CHECK(list_problems().size() == 3);
}
