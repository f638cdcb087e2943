#include "minimax/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "minimax/kernels.hpp"

namespace minimax {

StationarityGap stationarity_gap(std::span<const double> gx, std::span<const double> gy,
                                 std::span<const double> x, std::span<const double> y,
                                 const FeasibleSet& x_set, const FeasibleSet& y_set,
                                 double alpha, double beta, GapVariant variant,
                                 std::optional<double> rho, const ProxTerm& prox_x,
                                 const ProxTerm& prox_y) {
  if (!(alpha > 0.0) || !(beta > 0.0))
    throw std::invalid_argument("stationarity_gap: stepsizes must be positive");
  if (variant == GapVariant::regularized && !rho)
    throw std::invalid_argument("stationarity_gap: regularized variant needs rho");

  const std::size_t dx = x.size();
  const std::size_t dy = y.size();
  Vec gy_eff(gy.begin(), gy.end());
  if (variant == GapVariant::regularized) kernels::axpy(-*rho, y, gy_eff);

  Vec trial_x(dx), moved_x(dx);
  kernels::axpby_to(trial_x, x, -alpha, gx);
  Vec trial_y(dy), moved_y(dy);
  kernels::axpby_to(trial_y, y, beta, gy_eff);

  if (variant == GapVariant::prox) {
    prox_into(prox_x, x_set, 1.0 / alpha, trial_x, moved_x);
    prox_into(prox_y, y_set, 1.0 / beta, trial_y, moved_y);
  } else {
    project_into(x_set, trial_x, moved_x);
    project_into(y_set, trial_y, moved_y);
  }

  StationarityGap gap;
  gap.variant = variant;
  gap.x_block.resize(dx);
  gap.y_block.resize(dy);
  kernels::scaled_sub_to(gap.x_block, x, moved_x, 1.0 / alpha);
  kernels::scaled_sub_to(gap.y_block, y, moved_y, 1.0 / beta);
  gap.norm = std::sqrt(kernels::sumsq(gap.x_block) + kernels::sumsq(gap.y_block));
  return gap;
}

StationarityGap oracle_gap(const StochasticOracle& oracle, std::span<const double> x,
                           std::span<const double> y, double alpha, double beta,
                           GapVariant variant, std::optional<double> rho,
                           const ProxTerm& prox_x, const ProxTerm& prox_y,
                           int eval_batch, RngStream* rng) {
  Vec gx(oracle.dx()), gy(oracle.dy());
  if (oracle.has_exact()) {
    oracle.exact_gradients(x, y, gx, gy);
  } else {
    if (eval_batch < 1 || rng == nullptr)
      throw std::invalid_argument(
          "oracle_gap: need eval_batch and rng without exact gradients");
    oracle.sample_gradients(x, y, eval_batch, *rng, gx, gy);
  }
  return stationarity_gap(gx, gy, x, y, oracle.x_set(), oracle.y_set(), alpha, beta,
                          variant, rho, prox_x, prox_y);
}

DecompositionCheck gap_decomposition_check(const StochasticOracle& oracle,
                                           std::span<const double> x,
                                           std::span<const double> y, double alpha,
                                           double beta, double rho) {
  Vec gx(oracle.dx()), gy(oracle.dy());
  oracle.exact_gradients(x, y, gx, gy);
  const auto g_true = stationarity_gap(gx, gy, x, y, oracle.x_set(), oracle.y_set(),
                                       alpha, beta, GapVariant::true_g);
  const auto g_reg = stationarity_gap(gx, gy, x, y, oracle.x_set(), oracle.y_set(),
                                      alpha, beta, GapVariant::regularized, rho);
  DecompositionCheck check;
  check.lhs = g_true.norm;
  check.rhs = g_reg.norm + rho * std::sqrt(kernels::sumsq(y));
  check.holds = check.lhs <= check.rhs + 1e-10;
  return check;
}

namespace {

// Feasible grid over a set, visited in lexicographic index order.
struct GridSpec {
  Vec lo;       // per-axis window start
  Vec step;     // per-axis spacing
  std::vector<int> counts;
  bool simplex = false;  // points must satisfy sum <= 1 (last coord implied)
};

// Enumerates candidate points; for the simplex the free coordinates are the
// first dim-1 and the last is 1 - sum.
template <typename F>
void for_each_grid_point(const GridSpec& g, int dim, F&& visit) {
  const int free_dims = g.simplex ? dim - 1 : dim;
  Vec y(dim, 0.0);
  std::vector<int> idx(std::max(free_dims, 1), 0);
  if (free_dims == 0) {  // 1-d simplex: the single point (1)
    y[0] = 1.0;
    visit(y);
    return;
  }
  while (true) {
    double sum = 0.0;
    for (int a = 0; a < free_dims; ++a) {
      y[a] = g.lo[a] + g.step[a] * idx[a];
      sum += y[a];
    }
    bool feasible = true;
    if (g.simplex) {
      if (y[0] < -1e-12) feasible = false;
      for (int a = 0; a < free_dims; ++a)
        if (y[a] < -1e-12) feasible = false;
      if (sum > 1.0 + 1e-12) feasible = false;
      if (feasible) y[dim - 1] = std::max(1.0 - sum, 0.0);
    }
    if (feasible) visit(y);
    int a = free_dims - 1;
    while (a >= 0) {
      if (++idx[a] < g.counts[a]) break;
      idx[a] = 0;
      --a;
    }
    if (a < 0) break;
  }
}

struct GridSearch {
  Vec best_y;
  double best = -std::numeric_limits<double>::infinity();
};

double regularized_value(const StochasticOracle& oracle, std::span<const double> x,
                         std::span<const double> y, double rho) {
  return oracle.exact_value(x, y) - 0.5 * rho * kernels::sumsq(y);
}

void search(const StochasticOracle& oracle, std::span<const double> x, double rho,
            const GridSpec& grid, const FeasibleSet& y_set, GridSearch& out) {
  const int dim = dimension(y_set);
  const bool is_ball = std::holds_alternative<Ball>(y_set);
  for_each_grid_point(grid, dim, [&](const Vec& y) {
    if (is_ball && !contains(y_set, y, 1e-12)) return;
    const double v = regularized_value(oracle, x, y, rho);
    if (v > out.best) {  // strict: ties keep the first (lexicographically
      out.best = v;      // smallest) grid index
      out.best_y = y;
    }
  });
}

}  // namespace

BruteForceEnvelope brute_force_phi(const StochasticOracle& oracle,
                                   std::span<const double> x, double rho,
                                   int resolution) {
  const FeasibleSet& y_set = oracle.y_set();
  const int dy = dimension(y_set);
  if (dy > 3)
    throw unsupported_dimension("brute_force_phi: dual dimension above 3");
  if (rho < 0.0) throw std::invalid_argument("brute_force_phi: negative rho");
  if (resolution < 2) throw std::invalid_argument("brute_force_phi: resolution < 2");

  // Coarse pass over the whole set.
  GridSpec coarse;
  double h_coarse = 0.0;
  const bool simplex = std::holds_alternative<Simplex>(y_set);
  if (simplex) {
    const int free_dims = std::max(dy - 1, 1);
    coarse.simplex = true;
    coarse.lo.assign(free_dims, 0.0);
    coarse.step.assign(free_dims, 1.0 / (resolution - 1));
    coarse.counts.assign(free_dims, resolution);
    h_coarse = 1.0 / (resolution - 1);
  } else {
    Vec lo(dy), hi(dy);
    if (const auto* box = std::get_if<Box>(&y_set)) {
      lo = box->lower;
      hi = box->upper;
    } else if (const auto* ball = std::get_if<Ball>(&y_set)) {
      for (int i = 0; i < dy; ++i) {
        lo[i] = ball->center[i] - ball->radius;
        hi[i] = ball->center[i] + ball->radius;
      }
    } else {
      const auto& ub = std::get<Unbounded>(y_set);
      if (!(ub.radius > 0.0))
        throw std::invalid_argument("brute_force_phi: unbounded set without a radius");
      lo.assign(dy, -ub.radius);
      hi.assign(dy, ub.radius);
    }
    coarse.lo = lo;
    coarse.counts.assign(dy, resolution);
    coarse.step.resize(dy);
    for (int i = 0; i < dy; ++i) {
      coarse.step[i] = (hi[i] - lo[i]) / (resolution - 1);
      h_coarse = std::max(h_coarse, coarse.step[i]);
    }
  }

  GridSearch gs;
  search(oracle, x, rho, coarse, y_set, gs);
  if (gs.best_y.empty())
    throw std::invalid_argument("brute_force_phi: no feasible grid point");

  // One local refinement at a tenth of the coarse spacing. The window is wide
  // enough to contain the true argmax: under rho-strong concavity the coarse
  // argmax lies within sqrt(2*slack/rho) of it.
  const double sqrt_d = std::sqrt(static_cast<double>(dy));
  const double curvature = oracle.lipschitz_estimate() + rho;
  const double coarse_slack = 0.5 * curvature * (h_coarse * sqrt_d) * (h_coarse * sqrt_d);
  const double coarse_pos =
      rho > 0.0 ? std::sqrt(2.0 * coarse_slack / rho) + h_coarse * sqrt_d
                : 2.0 * h_coarse * sqrt_d;
  const double window = std::max(h_coarse, coarse_pos);
  const double h_ref = h_coarse / 10.0;

  GridSpec fine;
  fine.simplex = simplex;
  const int free_dims = simplex ? std::max(dy - 1, 1) : dy;
  fine.lo.resize(free_dims);
  fine.step.assign(free_dims, h_ref);
  fine.counts.resize(free_dims);
  for (int a = 0; a < free_dims; ++a) {
    double wlo = gs.best_y[a] - window;
    double whi = gs.best_y[a] + window;
    if (simplex) {
      wlo = std::max(wlo, 0.0);
      whi = std::min(whi, 1.0);
    } else if (const auto* box = std::get_if<Box>(&y_set)) {
      wlo = std::max(wlo, box->lower[a]);
      whi = std::min(whi, box->upper[a]);
    } else if (const auto* ball = std::get_if<Ball>(&y_set)) {
      wlo = std::max(wlo, ball->center[a] - ball->radius);
      whi = std::min(whi, ball->center[a] + ball->radius);
    }
    fine.lo[a] = wlo;
    const int count = static_cast<int>(std::floor((whi - wlo) / h_ref)) + 1;
    fine.counts[a] = std::clamp(count, 1, 401);
  }
  search(oracle, x, rho, fine, y_set, gs);

  BruteForceEnvelope env;
  env.phi = gs.best;
  env.ystar = gs.best_y;
  env.h_coarse = h_coarse;
  env.h_refined = h_ref;
  env.value_slack = 0.5 * curvature * (h_ref * sqrt_d) * (h_ref * sqrt_d);
  env.pos_slack = rho > 0.0
                      ? std::sqrt(2.0 * env.value_slack / rho) + h_ref * sqrt_d
                      : std::numeric_limits<double>::infinity();
  return env;
}

DriftCheck ystar_drift_check(const StochasticOracle& oracle,
                                   std::span<const double> x,
                                   std::span<const double> xbar, double rho_k,
                                   double rho_kp1, int resolution) {
  if (!(rho_kp1 > 0.0) || rho_k < rho_kp1)
    throw std::invalid_argument("drift check: need rho_k >= rho_kp1 > 0");

  DriftCheck check;
  check.at_x = brute_force_phi(oracle, x, rho_k, resolution);
  check.at_xbar = brute_force_phi(oracle, xbar, rho_kp1, resolution);
  const Vec& y1 = check.at_x.ystar;     // y*_k(x)
  const Vec& y2 = check.at_xbar.ystar;  // y*_{k+1}(xbar)

  Vec d(y1.size());
  kernels::scaled_sub_to(d, y2, y1, 1.0);
  check.lhs = kernels::sumsq(d);

  Vec dx(x.size());
  kernels::scaled_sub_to(dx, xbar, x, 1.0);
  const double big_l = oracle.lipschitz_estimate();
  const double ratio = (rho_k - rho_kp1) / rho_kp1;
  check.rhs = (big_l * big_l) / (rho_kp1 * rho_kp1) * kernels::sumsq(dx) +
              ratio * (kernels::sumsq(y2) - kernels::sumsq(y1));

  // Grid slack: first-order perturbation of both sides by the argmax
  // position errors.
  const double e1 = check.at_x.pos_slack;
  const double e2 = check.at_xbar.pos_slack;
  const double n1 = std::sqrt(kernels::sumsq(y1));
  const double n2 = std::sqrt(kernels::sumsq(y2));
  const double lhs_err = (2.0 * std::sqrt(check.lhs) + e1 + e2) * (e1 + e2);
  const double rhs_err = ratio * (2.0 * n1 * e1 + e1 * e1 + 2.0 * n2 * e2 + e2 * e2);
  check.slack = lhs_err + rhs_err;
  check.holds = check.lhs <= check.rhs + check.slack + 1e-10;
  return check;
}

double finite_difference_check(const StochasticOracle& oracle, std::span<const double> x,
                               std::span<const double> y, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite_difference_check: h <= 0");
  Vec gx(oracle.dx()), gy(oracle.dy());
  oracle.exact_gradients(x, y, gx, gy);

  double max_rel = 0.0;
  Vec xp(x.begin(), x.end()), yp(y.begin(), y.end());
  for (int i = 0; i < oracle.dx(); ++i) {
    xp[i] = x[i] + h;
    const double fp = oracle.exact_value(xp, y);
    xp[i] = x[i] - h;
    const double fm = oracle.exact_value(xp, y);
    xp[i] = x[i];
    const double fd = (fp - fm) / (2.0 * h);
    max_rel = std::max(max_rel, std::fabs(fd - gx[i]) / std::max(1.0, std::fabs(gx[i])));
  }
  for (int i = 0; i < oracle.dy(); ++i) {
    yp[i] = y[i] + h;
    const double fp = oracle.exact_value(x, yp);
    yp[i] = y[i] - h;
    const double fm = oracle.exact_value(x, yp);
    yp[i] = y[i];
    const double fd = (fp - fm) / (2.0 * h);
    max_rel = std::max(max_rel, std::fabs(fd - gy[i]) / std::max(1.0, std::fabs(gy[i])));
  }
  return max_rel;
}

}  // namespace minimax
