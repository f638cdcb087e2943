#include "minimax/solver.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "minimax/kernels.hpp"
#include "minimax/metrics.hpp"

namespace minimax {

namespace {

void check_finite(std::span<const double> v, long k, const char* what) {
  if (!kernels::all_finite(v)) throw numeric_failure(k, what);
}

StepResult momentum_core(const StochasticOracle& oracle, IteratePair& it,
                         MomentumState& mom, const ProxTerm& prox_x,
                         const ProxTerm& prox_y, const ScheduleAt& sched_k,
                         const ScheduleAt& sched_km1, double beta, int batch,
                         RngStream& rng) {
  const int dx = oracle.dx();
  const int dy = oracle.dy();
  Vec gx(dx), gy(dy);
  if (it.k == 1) {
    // gamma_0 = theta_0 = 1: the correction vanishes and the estimators are
    // plain minibatch gradients of the regularized objective at (x_1, y_1).
    oracle.sample_gradients(it.x, it.y, batch, rng, gx, gy);
    kernels::axpy(-sched_k.rho, it.y, gy);
    mom.v = gx;
    mom.w = gy;
  } else {
    Vec gxp(dx), gyp(dy);
    oracle.sample_gradients_pair(it.x, it.y, mom.prev_x, mom.prev_y, batch, rng, gx, gy,
                                 gxp, gyp);
    // Two regularization levels inside one step: rho_k at the current point,
    // rho_{k-1} at the previous one.
    kernels::axpy(-sched_k.rho, it.y, gy);
    kernels::axpy(-sched_km1.rho, mom.prev_y, gyp);
    kernels::momentum(mom.v, 1.0 - sched_km1.gamma, gx, gxp);
    kernels::momentum(mom.w, 1.0 - sched_km1.theta, gy, gyp);
  }
  check_finite(mom.v, it.k, "gradient estimator v");
  check_finite(mom.w, it.k, "gradient estimator w");

  StepResult out;
  out.xt.resize(dx);
  out.yt.resize(dy);
  Vec trial(std::max(dx, dy));

  std::span<double> trial_x(trial.data(), dx);
  kernels::axpby_to(trial_x, it.x, -sched_k.alpha, mom.v);
  prox_into(prox_x, oracle.x_set(), 1.0 / sched_k.alpha, trial_x, out.xt);

  std::span<double> trial_y(trial.data(), dy);
  kernels::axpby_to(trial_y, it.y, beta, mom.w);
  prox_into(prox_y, oracle.y_set(), 1.0 / beta, trial_y, out.yt);

  check_finite(out.xt, it.k, "primal proposal");
  check_finite(out.yt, it.k, "dual proposal");

  mom.prev_x = it.x;
  mom.prev_y = it.y;
  kernels::lerp(it.x, sched_k.eta, out.xt);
  kernels::lerp(it.y, sched_k.eta, out.yt);
  it.k += 1;
  return out;
}

}  // namespace

StepResult formda_step(const StochasticOracle& oracle, IteratePair& it,
                       MomentumState& mom, const ScheduleAt& sched_k,
                       const ScheduleAt& sched_km1, double beta, int batch,
                       RngStream& rng) {
  return momentum_core(oracle, it, mom, ZeroTerm{}, ZeroTerm{}, sched_k, sched_km1, beta,
                       batch, rng);
}

StepResult formda_ns_step(const StochasticOracle& oracle, IteratePair& it,
                          MomentumState& mom, const ProxTerm& prox_x,
                          const ProxTerm& prox_y, const ScheduleAt& sched_k,
                          const ScheduleAt& sched_km1, double beta, int batch,
                          RngStream& rng) {
  return momentum_core(oracle, it, mom, prox_x, prox_y, sched_k, sched_km1, beta, batch,
                       rng);
}

StepResult sgda_step(const StochasticOracle& oracle, IteratePair& it, double alpha,
                     double beta, int batch, RngStream& rng) {
  if (!(alpha > 0.0) || !(beta > 0.0))
    throw std::invalid_argument("sgda_step: stepsizes must be positive");
  const int dx = oracle.dx();
  const int dy = oracle.dy();
  Vec gx(dx), gy(dy);
  oracle.sample_gradients(it.x, it.y, batch, rng, gx, gy);
  check_finite(gx, it.k, "sampled x-gradient");
  check_finite(gy, it.k, "sampled y-gradient");

  StepResult out;
  out.xt.resize(dx);
  out.yt.resize(dy);
  Vec trial(std::max(dx, dy));
  std::span<double> trial_x(trial.data(), dx);
  kernels::axpby_to(trial_x, it.x, -alpha, gx);
  project_into(oracle.x_set(), trial_x, out.xt);
  std::span<double> trial_y(trial.data(), dy);
  kernels::axpby_to(trial_y, it.y, beta, gy);
  project_into(oracle.y_set(), trial_y, out.yt);

  check_finite(out.xt, it.k, "primal iterate");
  check_finite(out.yt, it.k, "dual iterate");
  it.x = out.xt;
  it.y = out.yt;
  it.k += 1;
  return out;
}

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::tolerance: return "tolerance";
    case StopReason::max_iters: return "max_iters";
    case StopReason::numeric_failure: return "numeric-failure";
  }
  return "unknown";
}

RunResult run(const SolverSpec& spec, const StochasticOracle& oracle, std::uint64_t seed,
              const std::optional<Vec>& x0, const std::optional<Vec>& y0) {
  if (spec.max_iters < 1) throw std::invalid_argument("run: max_iters must be >= 1");
  if (spec.gap_eval_stride < 1)
    throw std::invalid_argument("run: gap_eval_stride must be >= 1");
  if (spec.schedule.batch < 1) throw std::invalid_argument("run: batch must be >= 1");

  RunResult result;
  const bool is_sgda = spec.algorithm == Algorithm::sgda;
  if (!is_sgda) {
    if (spec.schedule.mode == ScheduleMode::theorem) {
      const auto report = validate_constraints(spec.schedule);
      if (!report.ok) {
        if (!spec.allow_unvalidated)
          throw std::invalid_argument(
              "run: schedule fails theorem constraints (set allow_unvalidated to "
              "override)");
        result.warnings.push_back("schedule constraints not satisfied; override active");
      }
    } else {
      if (!spec.allow_unvalidated)
        throw std::invalid_argument(
            "run: manual schedules are outside the validated family (set "
            "allow_unvalidated)");
      result.warnings.push_back("manual schedule in use; theorem guarantees void");
    }
  }

  const int dx = oracle.dx();
  const int dy = oracle.dy();
  IteratePair it;
  {
    Vec sx = x0.value_or(Vec(dx, 0.0));
    Vec sy = y0.value_or(Vec(dy, 0.0));
    if (static_cast<int>(sx.size()) != dx || static_cast<int>(sy.size()) != dy)
      throw std::invalid_argument("run: starting point dimension mismatch");
    it.x = project(oracle.x_set(), sx);
    it.y = project(oracle.y_set(), sy);
    it.k = 1;
  }
  MomentumState mom;

  RngStream traj = RngStream::child(seed, 0);
  const int b = spec.schedule.batch;
  const bool exact = oracle.has_exact();
  const auto target = oracle.target_x();
  const auto t_start = std::chrono::steady_clock::now();

  Vec gx(dx), gy(dy);
  Vec diff_x(dx), diff_y(dy);
  ScheduleAt sched_km1{1.0, spec.sgda_alpha, 0.0, 1.0, 1.0};

  for (long k = 1; k <= spec.max_iters; ++k) {
    ScheduleAt sched_k;
    if (is_sgda)
      sched_k = ScheduleAt{1.0, spec.sgda_alpha, 0.0, 1.0, 1.0};
    else
      sched_k = schedule_at(spec.schedule, k);

    const Vec x_at_k = it.x;
    const Vec y_at_k = it.y;

    StepResult step;
    bool failed = false;
    std::string failure;
    try {
      if (is_sgda)
        step = sgda_step(oracle, it, spec.sgda_alpha, spec.sgda_beta, b, traj);
      else
        step = momentum_core(oracle, it, mom, spec.prox_x, spec.prox_y, sched_k,
                             sched_km1, spec.schedule.beta, b, traj);
    } catch (const numeric_failure& e) {
      failed = true;
      failure = e.what();
    }

    if (is_sgda)
      result.grad_calls += 2L * b;
    else
      result.grad_calls += (k == 1) ? 2L * b : 4L * b;

    const bool checkpoint =
        failed || k == 1 || (k % spec.gap_eval_stride == 0) || k == spec.max_iters;
    if (checkpoint) {
      RunRecord rec;
      rec.iter = k;
      rec.rho = sched_k.rho;
      rec.grad_calls = result.grad_calls;

      const double beta_step = is_sgda ? spec.sgda_beta : spec.schedule.beta;
      if (!failed) {
        // Surrogate gap: estimator residual read off the proposal points.
        kernels::scaled_sub_to(diff_x, x_at_k, step.xt, 1.0 / sched_k.alpha);
        kernels::scaled_sub_to(diff_y, y_at_k, step.yt, 1.0 / beta_step);
        rec.gap_surrogate =
            std::sqrt(kernels::sumsq(diff_x) + kernels::sumsq(diff_y));
      } else {
        rec.gap_surrogate = std::nan("");
      }

      if (!failed) {
        const GapVariant true_variant =
            spec.algorithm == Algorithm::formda_ns ? GapVariant::prox : GapVariant::true_g;
        if (exact) {
          oracle.exact_gradients(x_at_k, y_at_k, gx, gy);
          auto g_true = stationarity_gap(gx, gy, x_at_k, y_at_k, oracle.x_set(),
                                         oracle.y_set(), sched_k.alpha, beta_step,
                                         true_variant, std::nullopt, spec.prox_x,
                                         spec.prox_y);
          rec.gap_true = g_true.norm;
          if (!is_sgda) {
            auto g_reg = stationarity_gap(gx, gy, x_at_k, y_at_k, oracle.x_set(),
                                          oracle.y_set(), sched_k.alpha, beta_step,
                                          GapVariant::regularized, sched_k.rho,
                                          spec.prox_x, spec.prox_y);
            rec.gap_regularized = g_reg.norm;
            // Estimator error against the regularized exact gradients.
            kernels::axpy(-sched_k.rho, y_at_k, gy);
            kernels::scaled_sub_to(diff_x, mom.v, gx, 1.0);
            kernels::scaled_sub_to(diff_y, mom.w, gy, 1.0);
            rec.estimator_err_x = std::sqrt(kernels::sumsq(diff_x));
            rec.estimator_err_y = std::sqrt(kernels::sumsq(diff_y));
          }
        } else if (spec.eval_batch > 0) {
          RngStream eval_rng = RngStream::child(seed, static_cast<std::uint64_t>(k) + 1);
          oracle.sample_gradients(x_at_k, y_at_k, spec.eval_batch, eval_rng, gx, gy);
          result.eval_grad_calls += 2L * spec.eval_batch;
          auto g_true = stationarity_gap(gx, gy, x_at_k, y_at_k, oracle.x_set(),
                                         oracle.y_set(), sched_k.alpha, beta_step,
                                         true_variant, std::nullopt, spec.prox_x,
                                         spec.prox_y);
          rec.gap_true = g_true.norm;
        }
        if (target) {
          kernels::scaled_sub_to(diff_x, x_at_k, *target, 1.0);
          rec.dist_to_target = std::sqrt(kernels::sumsq(diff_x));
        }
      }

      if (spec.record_wall_time) {
        rec.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t_start)
                          .count();
      }
      result.records.push_back(rec);
      result.iterations = k;
      // The solution point associated with the final record.
      result.final_x = x_at_k;
      result.final_y = y_at_k;

      if (failed) {
        result.reason = StopReason::numeric_failure;
        result.failure_message = failure;
        return result;
      }

      const double reported = exact ? rec.gap_true.value_or(rec.gap_surrogate)
                                    : rec.gap_surrogate;
      if (reported <= spec.stop_tolerance) {
        result.reason = StopReason::tolerance;
        return result;
      }
    }

    sched_km1 = sched_k;
  }
  result.reason = StopReason::max_iters;
  result.iterations = spec.max_iters;
  return result;
}

}  // namespace minimax
