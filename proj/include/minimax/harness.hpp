#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "minimax/oracle.hpp"
#include "minimax/solver.hpp"

namespace minimax {

// ---------------------------------------------------------------------------
// Problem registry
// ---------------------------------------------------------------------------

struct QuadraticProblem {
  QuadraticSpec spec;
  std::uint64_t seed = 7;
};

struct WganProblem {
  double real_mean = 0.0;
  double real_std = 0.1;
  double z_std = 1.0;
  double gen_halfwidth = 2.0;
  double disc_halfwidth = 2.0;
};

struct RobustSyntheticProblem {
  int domains = 3;
  int features = 5;
  int points_per_domain = 500;
  double separation = 2.0;
  double noise_sigma = 1.0;
  Vec flip_rates;  // one per domain; empty -> 0.05 each
  std::uint64_t seed = 11;
  double x_halfwidth = 1e3;
};

struct RobustCsvProblem {
  std::vector<std::string> paths;  // one file per domain, label in last column
  double x_halfwidth = 1e3;
};

using ProblemConfig =
    std::variant<QuadraticProblem, WganProblem, RobustSyntheticProblem, RobustCsvProblem>;

std::unique_ptr<StochasticOracle> make_problem(const ProblemConfig& problem);
std::string problem_name(const ProblemConfig& problem);

/// (name, one-line description) of every registered problem.
std::vector<std::pair<std::string, std::string>> list_problems();

// ---------------------------------------------------------------------------
// Experiment configuration
// ---------------------------------------------------------------------------

struct SolverEntry {
  std::string label;
  SolverSpec spec;
  bool schedule_L_auto = false;  // resolve L from the oracle's Lipschitz bound
};

struct ExperimentConfig {
  ProblemConfig problem = WganProblem{};
  std::vector<SolverEntry> solvers;
  std::vector<std::uint64_t> seeds;
  long max_iters = 1000;
  long gap_eval_stride = 10;
  int eval_batch = 1000;
  std::string output_dir = "out";
  bool record_wall_time = true;
  std::optional<Vec> x0;
  std::optional<Vec> y0;
};

/// Parses the JSON config file. Unknown keys anywhere are errors, as are
/// missing required keys; see README for the schema.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& json_text);

struct ConfigReport {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  bool ok = false;
};

/// Resolvability and constraint report: problem/solver names, seed list,
/// schedule constraints (manual schedules and failing theorem constraints
/// pass only with allow_unvalidated, and then carry a warning).
ConfigReport validate_config(const ExperimentConfig& config);

// ---------------------------------------------------------------------------
// Persistence
// ---------------------------------------------------------------------------

/// Fixed per-run CSV header.
extern const char* const kRunCsvHeader;

/// Values are written with 17 significant digits so parsing them reproduces
/// the in-memory doubles exactly; absent optionals are empty fields.
void write_run_csv(const std::string& path, const std::vector<RunRecord>& records);
std::vector<RunRecord> read_run_csv(const std::string& path);

/// Aggregate rows (mean and population std per column) over iterations
/// present in every run; optional columns aggregate only when present in all.
void write_aggregate_csv(const std::string& path,
                         const std::vector<std::vector<RunRecord>>& runs);

// ---------------------------------------------------------------------------
// Experiment driver
// ---------------------------------------------------------------------------

struct RunOutcome {
  std::string solver;
  std::uint64_t seed = 0;
  std::string stop_reason;
  long iterations = 0;
  std::optional<double> final_gap_true;
  double final_gap_surrogate = 0.0;
  std::optional<double> final_dist_to_target;
  long grad_calls = 0;
  long eval_grad_calls = 0;
  double wall_ms = 0.0;
  Vec final_x;
  Vec final_y;
  std::string csv_path;
  std::vector<std::string> warnings;
};

struct ExperimentSummary {
  std::vector<RunOutcome> runs;
  std::vector<std::string> aggregate_paths;
  std::string summary_path;
};

/// Runs every (solver, seed) pair, writes one CSV per run plus one aggregate
/// CSV per solver and a summary JSON echoing the full config. The
/// MINIMAX_WORKERS environment variable (default 1) caps concurrent runs.
ExperimentSummary run_experiment(const ExperimentConfig& config);

// ---------------------------------------------------------------------------
// Property suite
// ---------------------------------------------------------------------------

struct PropertyCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct PropertyReport {
  std::vector<PropertyCheck> checks;
  bool all_pass = true;
};

struct PropertyOptions {
  bool corrupt_projection = false;  // fault-injection hook for testing the suite
};

/// Runs the library's invariant suites (geometry, schedules, oracles, gap
/// decomposition, dual-argmax drift, transcription equivalence, determinism)
/// at reduced sizes. Deterministic for a given seed.
PropertyReport property_suite(std::uint64_t seed, const PropertyOptions& opts = {});

}  // namespace minimax
