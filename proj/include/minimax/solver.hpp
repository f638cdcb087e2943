#pragma once

#include <optional>
#include <string>
#include <vector>

#include "minimax/errors.hpp"
#include "minimax/geometry.hpp"
#include "minimax/oracle.hpp"
#include "minimax/rng.hpp"
#include "minimax/schedules.hpp"

namespace minimax {

struct IteratePair {
  Vec x;
  Vec y;
  long k = 1;
};

/// Variance-reduced gradient estimators plus the previous iterate needed by
/// the correction term. Empty before the first step.
struct MomentumState {
  Vec v;
  Vec w;
  Vec prev_x;
  Vec prev_y;
};

enum class Algorithm { formda, formda_ns, sgda };

struct SolverSpec {
  Algorithm algorithm = Algorithm::formda;
  ScheduleConfig schedule;
  ProxTerm prox_x = ZeroTerm{};  // formda_ns only
  ProxTerm prox_y = ZeroTerm{};  // formda_ns only
  long max_iters = 1000;
  double stop_tolerance = 0.0;
  long gap_eval_stride = 10;
  double sgda_alpha = 0.05;  // sgda only: fixed primal stepsize
  double sgda_beta = 0.05;   // sgda only: fixed dual stepsize
  int eval_batch = 1000;     // gap estimation batch when exact gradients are absent
  bool allow_unvalidated = false;
  bool record_wall_time = true;
};

/// Proposal points of one iteration (the projected/prox gradient step before
/// the momentum relaxation); the surrogate stationarity gap reads off them.
struct StepResult {
  Vec xt;
  Vec yt;
};

/// One momentum descent-ascent iteration. Draws one minibatch; for k >= 2 the
/// same batch evaluates the regularized gradients at the current point (with
/// sched_k.rho) and at the previous point (with sched_km1.rho). Updates the
/// iterate and momentum state in place and advances k. Throws numeric_failure
/// if a NaN or infinity appears.
StepResult formda_step(const StochasticOracle& oracle, IteratePair& it,
                       MomentumState& mom, const ScheduleAt& sched_k,
                       const ScheduleAt& sched_km1, double beta, int batch,
                       RngStream& rng);

/// formda_step with the projections replaced by proximity operators of the
/// given nonsmooth terms (prox stepsizes 1/alpha_k and 1/beta).
StepResult formda_ns_step(const StochasticOracle& oracle, IteratePair& it,
                          MomentumState& mom, const ProxTerm& prox_x,
                          const ProxTerm& prox_y, const ScheduleAt& sched_k,
                          const ScheduleAt& sched_km1, double beta, int batch,
                          RngStream& rng);

/// Plain stochastic gradient descent-ascent baseline: fresh minibatch of the
/// unregularized objective, fixed stepsizes, simultaneous projected updates.
StepResult sgda_step(const StochasticOracle& oracle, IteratePair& it, double alpha,
                     double beta, int batch, RngStream& rng);

enum class StopReason { tolerance, max_iters, numeric_failure };

std::string to_string(StopReason r);

struct RunRecord {
  long iter = 0;
  std::optional<double> gap_true;
  std::optional<double> gap_regularized;
  double gap_surrogate = 0.0;
  double rho = 0.0;
  std::optional<double> estimator_err_x;
  std::optional<double> estimator_err_y;
  std::optional<double> dist_to_target;
  long grad_calls = 0;
  double wall_ms = 0.0;
};

struct RunResult {
  std::vector<RunRecord> records;
  StopReason reason = StopReason::max_iters;
  long iterations = 0;
  long grad_calls = 0;
  long eval_grad_calls = 0;
  Vec final_x;
  Vec final_y;
  std::string failure_message;
  std::vector<std::string> warnings;
};

/// Drives the chosen algorithm for up to max_iters iterations, evaluating
/// metrics at iteration 1, every gap_eval_stride iterations, and at the last
/// iteration. Stops early when the reported gap (true gap when exact
/// gradients exist, surrogate otherwise) falls to stop_tolerance.
///
/// The trajectory stream is RngStream::child(seed, 0); metric evaluation at
/// iteration k uses RngStream::child(seed, k + 1), so recorded trajectories
/// do not depend on the evaluation stride. Identical (spec, oracle, seed,
/// start) replay bit-for-bit.
///
/// Starting points are projected onto the feasible sets; defaults are the
/// projections of the origin.
RunResult run(const SolverSpec& spec, const StochasticOracle& oracle, std::uint64_t seed,
              const std::optional<Vec>& x0 = std::nullopt,
              const std::optional<Vec>& y0 = std::nullopt);

}  // namespace minimax
