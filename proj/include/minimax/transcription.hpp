#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "minimax/oracle.hpp"
#include "minimax/rng.hpp"
#include "minimax/schedules.hpp"

// Straight-line restatements of the update rules, written with plain loops and
// no vector-kernel or geometry helpers. Solver trajectories are required to
// reproduce these bit for bit; keep these free of any solver-module code.

namespace minimax::transcript {

struct Trajectory {
  std::vector<Vec> xs, ys;  // iterates after each step
  std::vector<Vec> vs, ws;  // estimators at each step
};

/// Nonsmooth term for the transcription: weight < 0 means plain projection,
/// weight >= 0 an l1 penalty of that weight.
struct TermSpec {
  double l1_weight = -1.0;
};

namespace detail {

inline void box_bounds(const FeasibleSet& set, Vec& lo, Vec& hi, bool& is_box) {
  if (const auto* box = std::get_if<Box>(&set)) {
    lo = box->lower;
    hi = box->upper;
    is_box = true;
  } else if (std::holds_alternative<Unbounded>(set)) {
    is_box = false;
  } else {
    throw std::invalid_argument("transcript: only box/unbounded sets supported");
  }
}

inline double clamp1(double t, double lo, double hi) {
  const double a = (t > lo) ? t : lo;
  return (a < hi) ? a : hi;
}

inline double shrink1(double t, double tau) {
  const double s = std::fabs(t) - tau;
  return std::copysign((s > 0.0) ? s : 0.0, t);
}

// The projected / proximal trial point for one coordinate-wise separable set.
inline void trial_update(Vec& out, const Vec& base, double stepscale, const Vec& grad,
                         const TermSpec& term, bool is_box, const Vec& lo,
                         const Vec& hi, double prox_stepsize) {
  const std::size_t n = base.size();
  for (std::size_t i = 0; i < n; ++i) {
    double t = base[i] + stepscale * grad[i];
    if (term.l1_weight >= 0.0) {
      const double tau = term.l1_weight / prox_stepsize;
      t = shrink1(t, tau);
    }
    out[i] = is_box ? clamp1(t, lo[i], hi[i]) : t;
  }
}

}  // namespace detail

/// Momentum descent-ascent with the regularized dual block, transcribed
/// directly: at k = 1 the estimators are the fresh minibatch gradients; for
/// k >= 2 one batch evaluates both the current point (regularization
/// sched[k-1].rho) and the previous point (sched[k-2].rho). Projection-only
/// runs pass default TermSpecs.
inline Trajectory run_momentum(const StochasticOracle& oracle,
                               const std::vector<ScheduleAt>& sched, double beta,
                               int batch, int steps, std::uint64_t seed, Vec x, Vec y,
                               const TermSpec& term_x = {}, const TermSpec& term_y = {}) {
  if (static_cast<int>(sched.size()) < steps)
    throw std::invalid_argument("transcript: schedule shorter than trajectory");
  const int dx = oracle.dx();
  const int dy = oracle.dy();
  Vec lox, hix, loy, hiy;
  bool box_x = false, box_y = false;
  detail::box_bounds(oracle.x_set(), lox, hix, box_x);
  detail::box_bounds(oracle.y_set(), loy, hiy, box_y);

  RngStream rng = RngStream::child(seed, 0);
  Vec v(dx), w(dy), xprev, yprev;
  Vec gx(dx), gy(dy), gxp(dx), gyp(dy), xt(dx), yt(dy);
  Trajectory out;

  for (int k = 1; k <= steps; ++k) {
    const ScheduleAt& sk = sched[k - 1];
    if (k == 1) {
      oracle.sample_gradients(x, y, batch, rng, gx, gy);
      for (int i = 0; i < dy; ++i) gy[i] = gy[i] + (-sk.rho) * y[i];
      v = gx;
      w = gy;
    } else {
      const ScheduleAt& skm1 = sched[k - 2];
      oracle.sample_gradients_pair(x, y, xprev, yprev, batch, rng, gx, gy, gxp, gyp);
      for (int i = 0; i < dy; ++i) gy[i] = gy[i] + (-sk.rho) * y[i];
      for (int i = 0; i < dy; ++i) gyp[i] = gyp[i] + (-skm1.rho) * yprev[i];
      const double cg = 1.0 - skm1.gamma;
      const double ct = 1.0 - skm1.theta;
      for (int i = 0; i < dx; ++i) v[i] = gx[i] + cg * (v[i] - gxp[i]);
      for (int i = 0; i < dy; ++i) w[i] = gy[i] + ct * (w[i] - gyp[i]);
    }

    detail::trial_update(xt, x, -sk.alpha, v, term_x, box_x, lox, hix, 1.0 / sk.alpha);
    detail::trial_update(yt, y, beta, w, term_y, box_y, loy, hiy, 1.0 / beta);

    xprev = x;
    yprev = y;
    for (int i = 0; i < dx; ++i) x[i] = x[i] + sk.eta * (xt[i] - x[i]);
    for (int i = 0; i < dy; ++i) y[i] = y[i] + sk.eta * (yt[i] - y[i]);

    out.vs.push_back(v);
    out.ws.push_back(w);
    out.xs.push_back(x);
    out.ys.push_back(y);
  }
  return out;
}

/// Plain descent-ascent baseline, transcribed: fresh minibatch, fixed
/// stepsizes, simultaneous projected updates.
inline Trajectory run_plain(const StochasticOracle& oracle, double alpha, double beta,
                            int batch, int steps, std::uint64_t seed, Vec x, Vec y) {
  const int dx = oracle.dx();
  const int dy = oracle.dy();
  Vec lox, hix, loy, hiy;
  bool box_x = false, box_y = false;
  detail::box_bounds(oracle.x_set(), lox, hix, box_x);
  detail::box_bounds(oracle.y_set(), loy, hiy, box_y);

  RngStream rng = RngStream::child(seed, 0);
  Vec gx(dx), gy(dy);
  Trajectory out;
  for (int k = 1; k <= steps; ++k) {
    oracle.sample_gradients(x, y, batch, rng, gx, gy);
    for (int i = 0; i < dx; ++i) {
      const double t = x[i] + (-alpha) * gx[i];
      x[i] = box_x ? detail::clamp1(t, lox[i], hix[i]) : t;
    }
    for (int i = 0; i < dy; ++i) {
      const double t = y[i] + beta * gy[i];
      y[i] = box_y ? detail::clamp1(t, loy[i], hiy[i]) : t;
    }
    out.xs.push_back(x);
    out.ys.push_back(y);
  }
  return out;
}

}  // namespace minimax::transcript
