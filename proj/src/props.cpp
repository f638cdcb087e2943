#include <cmath>
#include <cstdio>
#include <limits>

#include "minimax/harness.hpp"
#include "minimax/kernels.hpp"
#include "minimax/metrics.hpp"
#include "minimax/schedules.hpp"
#include "minimax/transcription.hpp"

// Reduced-size executable versions of the library's invariant suites, exposed
// through the CLI `props` verb. The full-size versions live in the test tree.

namespace minimax {

namespace {

struct Suite {
  PropertyReport report;
  std::uint64_t seed;
  PropertyOptions opts;

  void add(const std::string& name, bool pass, const std::string& detail = "") {
    report.checks.push_back({name, pass, detail});
    report.all_pass = report.all_pass && pass;
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double norm2(std::span<const double> v) { return std::sqrt(kernels::sumsq(v)); }

Vec random_point(RngStream& rng, int dim, double spread) {
  Vec p(dim);
  for (auto& c : p) c = rng.uniform(-spread, spread);
  return p;
}

// The fault-injection hook perturbs projections so the suite must notice.
Vec checked_project(const FeasibleSet& set, const Vec& p, const PropertyOptions& opts) {
  Vec out = project(set, p);
  if (opts.corrupt_projection)
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += 1e-3 * std::cos(p[0] + i);
  return out;
}

void geometry_checks(Suite& s) {
  RngStream rng = RngStream::child(s.seed, 101);
  const std::vector<std::pair<std::string, FeasibleSet>> sets = {
      {"box", Box{Vec{-1.0, -0.5, 0.0}, Vec{1.0, 2.0, 0.25}}},
      {"ball", Ball{Vec{0.5, -0.5, 1.0}, 1.5}},
      {"simplex", Simplex{4}},
      {"unbounded", Unbounded{3, 5.0}},
  };
  const int n = 1500;
  for (const auto& [name, set] : sets) {
    const int dim = dimension(set);
    bool idem = true, nonexp = true, varin = true, zero_eq = true;
    double worst = 0.0;
    for (int t = 0; t < n; ++t) {
      const Vec a = random_point(rng, dim, 3.0);
      const Vec b = random_point(rng, dim, 3.0);
      const Vec pa = checked_project(set, a, s.opts);
      const Vec pb = checked_project(set, b, s.opts);
      const Vec ppa = checked_project(set, pa, s.opts);

      Vec d(dim);
      kernels::scaled_sub_to(d, ppa, pa, 1.0);
      if (norm2(d) > 1e-12 * (1.0 + norm2(pa))) idem = false;

      kernels::scaled_sub_to(d, pa, pb, 1.0);
      const double proj_dist = norm2(d);
      kernels::scaled_sub_to(d, a, b, 1.0);
      if (proj_dist > norm2(d) + 1e-12) {
        nonexp = false;
        worst = std::max(worst, proj_dist - norm2(d));
      }

      // Variational characterization against a feasible witness.
      const Vec z = project(set, random_point(rng, dim, 3.0));
      double ip = 0.0;
      for (int i = 0; i < dim; ++i) ip += (a[i] - pa[i]) * (z[i] - pa[i]);
      if (ip > 1e-10) varin = false;

      const Vec via_prox = prox(ZeroTerm{}, set, 1.0, a);
      for (int i = 0; i < dim; ++i)
        if (std::fabs(via_prox[i] - pa[i]) > 1e-12) zero_eq = false;
    }
    s.add("geometry/idempotence/" + name, idem);
    s.add("geometry/nonexpansive/" + name, nonexp,
          nonexp ? "" : "worst excess " + num(worst));
    s.add("geometry/variational/" + name, varin);
    s.add("geometry/prox-zero/" + name, zero_eq);
  }

  // Firm nonexpansiveness of the l1 prox over a box.
  const FeasibleSet box = Box{Vec{-1.0, -1.0}, Vec{1.0, 1.0}};
  const ProxTerm l1 = L1Term{0.3};
  bool firm = true;
  for (int t = 0; t < n; ++t) {
    const Vec a = random_point(rng, 2, 3.0);
    const Vec b = random_point(rng, 2, 3.0);
    const Vec pa = prox(l1, box, 2.0, a);
    const Vec pb = prox(l1, box, 2.0, b);
    double lhs = 0.0, rhs = 0.0;
    for (int i = 0; i < 2; ++i) {
      lhs += (pa[i] - pb[i]) * (pa[i] - pb[i]);
      rhs += (pa[i] - pb[i]) * (a[i] - b[i]);
    }
    if (lhs > rhs + 1e-10) firm = false;
  }
  s.add("geometry/prox-firm-nonexpansive", firm);
}

ScheduleConfig random_valid_config(RngStream& rng) {
  ScheduleConfig sc;
  sc.L = rng.uniform(0.5, 4.0);
  sc.beta = rng.uniform(0.2, 1.0) / (6.0 * sc.L);
  sc.batch = 1 + static_cast<int>(rng.index(500));
  const double a4_cap = std::min(1.0 / (8.0 * sc.L), sc.beta / (8.0 * std::sqrt(5.0)));
  sc.a4 = rng.uniform(0.2, 1.0) * a4_cap;
  const double a12_cap = std::min(sc.batch / (32.0 * sc.a4 * sc.L * sc.L),
                                  sc.batch * sc.a4 / (2.0 * sc.L * sc.beta));
  sc.a1 = rng.uniform(0.1, 1.0) * a12_cap;
  sc.a2 = rng.uniform(0.1, 1.0) * a12_cap;
  sc.a5 = 4.0 * sc.a4 / sc.a1 + 12.0 / 13.0 + rng.uniform(0.0, 1.0);
  sc.a6 = 80.0 * sc.a4 / sc.a2 + 12.0 / 13.0 + rng.uniform(0.0, 1.0);
  return sc;
}

void schedule_checks(Suite& s) {
  RngStream rng = RngStream::child(s.seed, 202);
  bool valid_all = true, invariants = true;
  for (int c = 0; c < 20 && invariants; ++c) {
    const ScheduleConfig sc = random_valid_config(rng);
    if (!validate_constraints(sc).ok) valid_all = false;
    long k = 2;
    while (k < 1000000) {
      const ScheduleAt at_km1 = schedule_at(sc, k - 1);
      const ScheduleAt at_k = schedule_at(sc, k);
      const ScheduleAt at_kp1 = schedule_at(sc, k + 1);
      if (at_k.rho > at_km1.rho) invariants = false;
      if (!(at_k.eta > 0.0 && at_k.eta <= 1.0)) invariants = false;
      if (!(at_k.gamma > 0.0 && at_k.gamma <= 1.0)) invariants = false;
      if (!(at_k.theta > 0.0 && at_k.theta <= 1.0)) invariants = false;
      // alpha_k / rho_{k+1} <= alpha_{k-1} / rho_k
      if (at_k.alpha / at_kp1.rho >
          at_km1.alpha / at_k.rho * (1.0 + 1e-14))
        invariants = false;
      if (!(at_k.eta * sc.beta * at_k.rho < 1.0)) invariants = false;
      k = std::max(k + 1, (k * 5) / 4);
    }
  }
  s.add("schedules/constructed-configs-validate", valid_all);
  s.add("schedules/invariants", invariants);

  // k = 1 closed forms against a long-double evaluation.
  ScheduleConfig sc;
  sc.L = 1.0;
  sc.a4 = 0.1;
  sc.a5 = 1.0;
  sc.a6 = 1.0;
  const ScheduleAt at = schedule_at(sc, 1);
  const long double ln3 = logl(3.0L);
  const long double ln2 = logl(2.0L);
  bool k1 = true;
  auto close = [](double a, long double b) {
    return std::fabs(a - static_cast<double>(b)) <= 1e-12 * std::max(1.0, std::fabs(a));
  };
  k1 = k1 && close(at.eta, expl(-5.0L / 13.0L * ln3));
  k1 = k1 && close(at.alpha, 0.1L * expl(-4.0L / 13.0L * ln3));
  k1 = k1 && close(at.rho, expl(-2.0L / 13.0L * ln2));
  k1 = k1 && close(at.gamma, expl(-12.0L / 13.0L * ln3));
  k1 = k1 && close(at.theta, expl(-8.0L / 13.0L * ln3));
  s.add("schedules/k1-closed-forms", k1);
}

void oracle_checks(Suite& s) {
  RngStream rng = RngStream::child(s.seed, 303);

  QuadraticSpec qs;
  qs.dx = 3;
  qs.dy = 2;
  qs.noise = 0.3;
  const QuadraticSaddleOracle quad(qs, s.seed + 1);
  const WganToyOracle wgan(0.0, 0.1, 1.0, Box{Vec{-2, -2}, Vec{2, 2}},
                           Box{Vec{-2, -2}, Vec{2, 2}});
  const auto domains = make_synthetic_domains(3, 4, 120, 2.0, 1.0,
                                              Vec{0.05, 0.1, 0.15}, s.seed + 2);
  const RobustMultidomainOracle robust(domains);

  const std::vector<std::pair<std::string, const StochasticOracle*>> oracles = {
      {"quadratic", &quad}, {"wgan", &wgan}, {"robust", &robust}};

  for (const auto& [name, oracle] : oracles) {
    bool unbiased = true;
    bool identity = true;
    double fd = 0.0;
    for (int point = 0; point < 3; ++point) {
      const Vec x = project(oracle->x_set(), random_point(rng, oracle->dx(), 1.5));
      const Vec y = project(oracle->y_set(), random_point(rng, oracle->dy(), 1.5));
      Vec ex(oracle->dx()), ey(oracle->dy());
      oracle->exact_gradients(x, y, ex, ey);

      const int n = 20000;
      Vec mx(oracle->dx(), 0.0), my(oracle->dy(), 0.0);
      Vec sx(oracle->dx(), 0.0), sy(oracle->dy(), 0.0);
      Vec gx(oracle->dx()), gy(oracle->dy());
      for (int t = 0; t < n; ++t) {
        oracle->sample_gradients(x, y, 1, rng, gx, gy);
        for (int i = 0; i < oracle->dx(); ++i) {
          mx[i] += gx[i];
          sx[i] += gx[i] * gx[i];
        }
        for (int i = 0; i < oracle->dy(); ++i) {
          my[i] += gy[i];
          sy[i] += gy[i] * gy[i];
        }
      }
      for (int i = 0; i < oracle->dx(); ++i) {
        const double mean = mx[i] / n;
        const double var = std::max(sx[i] / n - mean * mean, 0.0);
        const double se = std::sqrt(var / n) + 1e-12;
        if (std::fabs(mean - ex[i]) > 5.0 * se) unbiased = false;
      }
      for (int i = 0; i < oracle->dy(); ++i) {
        const double mean = my[i] / n;
        const double var = std::max(sy[i] / n - mean * mean, 0.0);
        const double se = std::sqrt(var / n) + 1e-12;
        if (std::fabs(mean - ey[i]) > 5.0 * se) unbiased = false;
      }

      // Regularized view: y-shift is an exact algebraic identity.
      const double rho = 0.7;
      RngStream r1 = RngStream::child(s.seed, 9000 + point);
      RngStream r2 = r1;
      RegularizedView view{*oracle, rho};
      Vec vx(oracle->dx()), vy(oracle->dy());
      view.sample_gradients(x, y, 8, r1, vx, vy);
      oracle->sample_gradients(x, y, 8, r2, gx, gy);
      kernels::axpy(-rho, y, gy);
      for (int i = 0; i < oracle->dx(); ++i)
        if (std::fabs(vx[i] - gx[i]) > 1e-15) identity = false;
      for (int i = 0; i < oracle->dy(); ++i)
        if (std::fabs(vy[i] - gy[i]) > 1e-15) identity = false;

      fd = std::max(fd, finite_difference_check(*oracle, x, y, 1e-5));
    }
    s.add("oracle/unbiasedness/" + name, unbiased);
    s.add("oracle/regularized-identity/" + name, identity);
    s.add("oracle/finite-difference/" + name, fd <= 1e-6, "max rel err " + num(fd));
  }
}

void metrics_checks(Suite& s) {
  RngStream rng = RngStream::child(s.seed, 404);

  QuadraticSpec qs;
  qs.dx = 2;
  qs.dy = 2;
  const QuadraticSaddleOracle quad(qs, s.seed + 3);
  const WganToyOracle wgan(0.0, 0.1, 1.0, Box{Vec{-2, -2}, Vec{2, 2}},
                           Box{Vec{-2, -2}, Vec{2, 2}});

  bool decomposition = true;
  for (const StochasticOracle* oracle :
       {static_cast<const StochasticOracle*>(&quad),
        static_cast<const StochasticOracle*>(&wgan)}) {
    for (int t = 0; t < 200; ++t) {
      const Vec x = project(oracle->x_set(), random_point(rng, 2, 3.0));
      const Vec y = project(oracle->y_set(), random_point(rng, 2, 3.0));
      const double alpha = rng.uniform(0.01, 1.0);
      const double beta = rng.uniform(0.01, 1.0);
      const double rho = rng.uniform(0.0, 1.0);
      if (!gap_decomposition_check(*oracle, x, y, alpha, beta, rho).holds)
        decomposition = false;
    }
  }
  s.add("metrics/gap-decomposition", decomposition);

  bool drift = true;
  int violations = 0;
  for (int t = 0; t < 25; ++t) {
    QuadraticSpec spec;
    spec.dx = 2;
    spec.dy = 2;
    spec.a_min = -1.0;
    spec.a_max = 1.0;
    spec.c_min = 0.0;
    spec.c_max = rng.uniform(0.5, 2.0);
    spec.b_scale = rng.uniform(0.5, 2.0);
    spec.box_halfwidth_x = 3.0;
    spec.box_halfwidth_y = 3.0;
    const QuadraticSaddleOracle inst(spec, s.seed + 100 + t);
    const Vec x = project(inst.x_set(), random_point(rng, 2, 2.0));
    const Vec xbar = project(inst.x_set(), random_point(rng, 2, 2.0));
    const double rho_kp1 = rng.uniform(0.1, 1.0);
    const double rho_k = rho_kp1 * (1.0 + rng.uniform(0.0, 1.0));
    const auto check = ystar_drift_check(inst, x, xbar, rho_k, rho_kp1, 101);
    if (!check.holds) {
      drift = false;
      ++violations;
    }
  }
  s.add("metrics/ystar-drift", drift,
        drift ? "" : std::to_string(violations) + " violations");
}

void solver_checks(Suite& s) {
  QuadraticSpec qs;
  qs.dx = 3;
  qs.dy = 2;
  qs.noise = 0.05;
  qs.box_halfwidth_x = 2.0;
  qs.box_halfwidth_y = 2.0;
  const QuadraticSaddleOracle quad(qs, s.seed + 4);

  ScheduleConfig sc;
  sc.L = 1.0;
  sc.beta = 1.0 / 6.0;
  sc.batch = 4;
  sc.a4 = std::min(1.0 / 8.0, sc.beta / (8.0 * std::sqrt(5.0)));
  sc.a1 = sc.a2 = 0.05;
  sc.a5 = 4.0 * sc.a4 / sc.a1 + 12.0 / 13.0;
  sc.a6 = 80.0 * sc.a4 / sc.a2 + 12.0 / 13.0;

  const int steps = 5;
  std::vector<ScheduleAt> sched;
  for (int k = 1; k <= steps; ++k) sched.push_back(schedule_at(sc, k));

  bool formda_match = true, ns_match = true, sgda_match = true, deterministic = true;
  for (std::uint64_t seed = s.seed; seed < s.seed + 3; ++seed) {
    const Vec x0(3, 0.5), y0(2, -0.25);
    {
      IteratePair it{x0, y0, 1};
      MomentumState mom;
      RngStream rng = RngStream::child(seed, 0);
      auto ref = transcript::run_momentum(quad, sched, sc.beta, sc.batch, steps, seed,
                                          x0, y0);
      for (int k = 1; k <= steps; ++k) {
        formda_step(quad, it, mom, sched[k - 1], k >= 2 ? sched[k - 2] : sched[0],
                    sc.beta, sc.batch, rng);
        if (it.x != ref.xs[k - 1] || it.y != ref.ys[k - 1] || mom.v != ref.vs[k - 1] ||
            mom.w != ref.ws[k - 1])
          formda_match = false;
      }
    }
    {
      IteratePair it{x0, y0, 1};
      MomentumState mom;
      RngStream rng = RngStream::child(seed, 0);
      const ProxTerm l1x = L1Term{0.05};
      auto ref = transcript::run_momentum(quad, sched, sc.beta, sc.batch, steps, seed,
                                          x0, y0, transcript::TermSpec{0.05},
                                          transcript::TermSpec{});
      for (int k = 1; k <= steps; ++k) {
        formda_ns_step(quad, it, mom, l1x, ZeroTerm{}, sched[k - 1],
                       k >= 2 ? sched[k - 2] : sched[0], sc.beta, sc.batch, rng);
        if (it.x != ref.xs[k - 1] || it.y != ref.ys[k - 1]) ns_match = false;
      }
    }
    {
      IteratePair it{x0, y0, 1};
      RngStream rng = RngStream::child(seed, 0);
      auto ref = transcript::run_plain(quad, 0.05, 0.05, sc.batch, steps, seed, x0, y0);
      for (int k = 1; k <= steps; ++k) {
        sgda_step(quad, it, 0.05, 0.05, sc.batch, rng);
        if (it.x != ref.xs[k - 1] || it.y != ref.ys[k - 1]) sgda_match = false;
      }
    }
  }
  s.add("solver/transcription-formda", formda_match);
  s.add("solver/transcription-formda-ns", ns_match);
  s.add("solver/transcription-sgda", sgda_match);

  SolverSpec spec;
  spec.algorithm = Algorithm::formda;
  spec.schedule = sc;
  spec.max_iters = 30;
  spec.gap_eval_stride = 5;
  const auto r1 = run(spec, quad, s.seed);
  const auto r2 = run(spec, quad, s.seed);
  if (r1.records.size() != r2.records.size()) deterministic = false;
  for (std::size_t i = 0; deterministic && i < r1.records.size(); ++i) {
    const auto& a = r1.records[i];
    const auto& b = r2.records[i];
    if (a.iter != b.iter || a.gap_true != b.gap_true ||
        a.gap_surrogate != b.gap_surrogate || a.rho != b.rho ||
        a.estimator_err_x != b.estimator_err_x || a.grad_calls != b.grad_calls)
      deterministic = false;
  }
  s.add("solver/determinism", deterministic);
}

}  // namespace

PropertyReport property_suite(std::uint64_t seed, const PropertyOptions& opts) {
  Suite s;
  s.seed = seed;
  s.opts = opts;
  geometry_checks(s);
  schedule_checks(s);
  oracle_checks(s);
  metrics_checks(s);
  solver_checks(s);
  return s.report;
}

}  // namespace minimax
