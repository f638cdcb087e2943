#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "doctest.h"
#include "minimax/kernels.hpp"
#include "minimax/metrics.hpp"
#include "minimax/oracle.hpp"

using namespace minimax;

namespace {

Vec random_feasible(const FeasibleSet& set, RngStream& rng, double spread = 2.0) {
  Vec p(dimension(set));
  for (auto& c : p) c = rng.uniform(-spread, spread);
  return project(set, p);
}

struct MeanVar {
  Vec mean;
  Vec var;
};

// Empirical mean/variance of n single-sample gradients, per component.
MeanVar sample_stats(const StochasticOracle& oracle, const Vec& x, const Vec& y, int n,
                     RngStream& rng, bool x_block) {
  const int d = x_block ? oracle.dx() : oracle.dy();
  Vec sum(d, 0.0), sumsq(d, 0.0);
  Vec gx(oracle.dx()), gy(oracle.dy());
  for (int t = 0; t < n; ++t) {
    oracle.sample_gradients(x, y, 1, rng, gx, gy);
    const Vec& g = x_block ? gx : gy;
    for (int i = 0; i < d; ++i) {
      sum[i] += g[i];
      sumsq[i] += g[i] * g[i];
    }
  }
  MeanVar mv;
  mv.mean.resize(d);
  mv.var.resize(d);
  for (int i = 0; i < d; ++i) {
    mv.mean[i] = sum[i] / n;
    mv.var[i] = std::max(sumsq[i] / n - mv.mean[i] * mv.mean[i], 0.0);
  }
  return mv;
}

void check_unbiased(const StochasticOracle& oracle, int n_samples, int n_points,
                    double n_se, std::uint64_t seed) {
  RngStream rng(seed);
  for (int p = 0; p < n_points; ++p) {
    const Vec x = random_feasible(oracle.x_set(), rng);
    const Vec y = random_feasible(oracle.y_set(), rng);
    Vec ex(oracle.dx()), ey(oracle.dy());
    oracle.exact_gradients(x, y, ex, ey);
    const auto sx = sample_stats(oracle, x, y, n_samples, rng, true);
    const auto sy = sample_stats(oracle, x, y, n_samples, rng, false);
    for (int i = 0; i < oracle.dx(); ++i) {
      const double se = std::sqrt(sx.var[i] / n_samples) + 1e-12;
      CHECK(std::fabs(sx.mean[i] - ex[i]) <= n_se * se);
    }
    for (int i = 0; i < oracle.dy(); ++i) {
      const double se = std::sqrt(sy.var[i] / n_samples) + 1e-12;
      CHECK(std::fabs(sy.mean[i] - ey[i]) <= n_se * se);
    }
  }
}

}  // namespace

TEST_CASE("quadratic saddle: gradients, value, and dual argmax are consistent") {
  QuadraticSpec spec;
  spec.dx = 4;
  spec.dy = 3;
  spec.c_min = 0.1;
  const QuadraticSaddleOracle oracle(spec, 123);

  // Hand-derived gradients agree with central differences of the value.
  RngStream rng(5);
  const Vec x = random_feasible(oracle.x_set(), rng);
  const Vec y = random_feasible(oracle.y_set(), rng);
  CHECK(finite_difference_check(oracle, x, y, 1e-5) <= 1e-6);

  // The closed-form regularized argmax zeroes the regularized dual gradient.
  for (double rho : {0.1, 0.5, 2.0}) {
    const Vec ys = oracle.ystar_unconstrained(x, rho);
    Vec gx(4), gy(3);
    oracle.exact_gradients(x, ys, gx, gy);
    kernels::axpy(-rho, ys, gy);
    CHECK(std::sqrt(kernels::sumsq(gy)) <= 1e-10);
  }

  // Decoupled problem: B = 0, C = I makes y*(x) = 0 everywhere.
  QuadraticSpec dec;
  dec.dx = 2;
  dec.dy = 2;
  dec.b_scale = 0.0;
  dec.c_min = 1.0;
  dec.c_max = 1.0;
  const QuadraticSaddleOracle decoupled(dec, 9);
  const Vec ys0 = decoupled.ystar_unconstrained(Vec{5.0, -3.0}, 0.5);
  CHECK(std::sqrt(kernels::sumsq(ys0)) <= 1e-12);
}

TEST_CASE("quadratic saddle: 1-d solve matches (C + rho)^{-1} B' x") {
  // dx = dy = 1 with pinned spectra: A = 0, C = 1; B is random but observable.
  QuadraticSpec spec;
  spec.dx = 1;
  spec.dy = 1;
  spec.a_min = 0.0;
  spec.a_max = 0.0;
  spec.c_min = 1.0;
  spec.c_max = 1.0;
  const QuadraticSaddleOracle oracle(spec, 31);
  const double b01 = oracle.b()(0, 0);
  const Vec x{2.0};
  const Vec ys = oracle.ystar_unconstrained(x, 1.0);
  CHECK(ys[0] == doctest::Approx(b01 * 2.0 / (1.0 + 1.0)).epsilon(1e-14));
}

TEST_CASE("quadratic saddle: minibatch noise scales as delta/sqrt(b)") {
  QuadraticSpec spec;
  spec.dx = 2;
  spec.dy = 2;
  spec.noise = 0.1;
  const QuadraticSaddleOracle oracle(spec, 77);
  RngStream rng(6);
  const Vec x = random_feasible(oracle.x_set(), rng);
  const Vec y = random_feasible(oracle.y_set(), rng);
  Vec ex(2), ey(2), gx(2), gy(2);
  oracle.exact_gradients(x, y, ex, ey);
  oracle.sample_gradients(x, y, 10000, rng, gx, gy);
  for (int i = 0; i < 2; ++i) {
    CHECK(std::fabs(gx[i] - ex[i]) <= 3.0 * (0.1 / 100.0));
    CHECK(std::fabs(gy[i] - ey[i]) <= 3.0 * (0.1 / 100.0));
  }
}

TEST_CASE("quadratic saddle rejects indefinite C and bad batch") {
  QuadraticSpec spec;
  spec.c_min = -0.5;
  CHECK_THROWS_AS(QuadraticSaddleOracle(spec, 1), std::invalid_argument);
  QuadraticSpec ok;
  const QuadraticSaddleOracle oracle(ok, 1);
  Vec gx(2), gy(2);
  RngStream rng(1);
  CHECK_THROWS_AS(oracle.sample_gradients(Vec{0, 0}, Vec{0, 0}, 0, rng, gx, gy),
                  std::invalid_argument);
  CHECK_THROWS_AS(oracle.exact_gradients(Vec{0.0}, Vec{0, 0}, gx, gy),
                  std::invalid_argument);
}

TEST_CASE("moment-matching toy: closed-form gradients") {
  const FeasibleSet box = Box{Vec{-2, -2}, Vec{2, 2}};
  const WganToyOracle oracle(0.0, 0.1, 1.0, box, box);

  // At the moment-matched generator the objective is identically zero in the
  // discriminator, so its gradient block vanishes for any y.
  Vec gx(2), gy(2);
  oracle.exact_gradients(Vec{0.0, 0.1}, Vec{0.7, -0.3}, gx, gy);
  CHECK(gy[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(gy[1] == doctest::Approx(0.0).epsilon(1e-15));

  // With the discriminator switched off the generator gradient vanishes.
  oracle.exact_gradients(Vec{0.0, 0.1}, Vec{0.0, 0.0}, gx, gy);
  CHECK(gx[0] == 0.0);
  CHECK(gx[1] == 0.0);

  CHECK(finite_difference_check(oracle, Vec{0.4, -0.2}, Vec{0.3, 0.8}, 1e-5) <= 1e-6);

  const auto target = oracle.target_x();
  REQUIRE(target.has_value());
  CHECK((*target)[0] == 0.0);
  CHECK((*target)[1] == doctest::Approx(0.1));
}

TEST_CASE("moment-matching toy: sampling is reproducible and unbiased") {
  const FeasibleSet box = Box{Vec{-2, -2}, Vec{2, 2}};
  const WganToyOracle oracle(0.0, 0.1, 1.0, box, box);

  // Identical stream state gives bitwise-identical minibatch gradients.
  RngStream a(99);
  RngStream b = a;
  Vec gx1(2), gy1(2), gx2(2), gy2(2);
  oracle.sample_gradients(Vec{0.5, 0.5}, Vec{0.2, -0.2}, 100, a, gx1, gy1);
  oracle.sample_gradients(Vec{0.5, 0.5}, Vec{0.2, -0.2}, 100, b, gx2, gy2);
  CHECK(gx1 == gx2);
  CHECK(gy1 == gy2);

  check_unbiased(oracle, 20000, 3, 5.0, 1234);

  // Large-batch mean approaches the closed form within 4 standard errors.
  RngStream rng(17);
  const Vec x{0.4, 0.7}, y{-0.5, 0.9};
  const auto stats_x = sample_stats(oracle, x, y, 20000, rng, true);
  Vec ex(2), ey(2);
  oracle.exact_gradients(x, y, ex, ey);
  const int big_b = 1000000;
  Vec bx(2), by(2);
  oracle.sample_gradients(x, y, big_b, rng, bx, by);
  for (int i = 0; i < 2; ++i) {
    const double se = std::sqrt(stats_x.var[i] / big_b) + 1e-12;
    CHECK(std::fabs(bx[i] - ex[i]) <= 4.0 * se);
  }
}

TEST_CASE("robust multidomain: degenerate weightings") {
  const auto domains = make_synthetic_domains(2, 3, 50, 2.0, 1.0, Vec{0.0, 0.0}, 5);
  // Identical data in both domains.
  std::vector<DomainData> twin{domains[0], domains[0]};
  const RobustMultidomainOracle oracle(std::move(twin));

  RngStream rng(3);
  const Vec x = random_feasible(oracle.x_set(), rng, 0.5);
  Vec gx1(oracle.dx()), gy1(2), gx2(oracle.dx()), gy2(2);
  oracle.exact_gradients(x, Vec{0.3, 0.7}, gx1, gy1);
  oracle.exact_gradients(x, Vec{0.9, 0.1}, gx2, gy2);
  CHECK(gy1[0] == gy1[1]);  // same data, same per-domain loss
  for (int i = 0; i < oracle.dx(); ++i)
    CHECK(gx1[i] == doctest::Approx(gx2[i]).epsilon(1e-12));

  // A vertex weighting reduces to the single-domain gradient.
  const auto mixed = make_synthetic_domains(3, 3, 40, 2.0, 1.0, Vec{0.0, 0.1, 0.2}, 6);
  const RobustMultidomainOracle oracle3{std::vector<DomainData>(mixed)};
  Vec gx(oracle3.dx()), gy(3), gd(oracle3.dx());
  oracle3.exact_gradients(x, Vec{0.0, 1.0, 0.0}, gx, gy);
  oracle3.domain_gradient(1, x, gd);
  for (int i = 0; i < oracle3.dx(); ++i) CHECK(gx[i] == doctest::Approx(gd[i]).epsilon(1e-14));
  CHECK(gy[1] == doctest::Approx(oracle3.domain_loss(1, x)).epsilon(1e-14));
}

TEST_CASE("robust multidomain: gradients, unbiasedness, sigma_y") {
  const auto domains =
      make_synthetic_domains(3, 4, 80, 2.0, 1.0, Vec{0.05, 0.1, 0.15}, 8);
  const RobustMultidomainOracle oracle{std::vector<DomainData>(domains)};
  CHECK(oracle.sigma_y() == 1.0);
  CHECK(std::holds_alternative<Simplex>(oracle.y_set()));

  RngStream rng(4);
  const Vec x = random_feasible(oracle.x_set(), rng, 0.5);
  const Vec y = random_feasible(oracle.y_set(), rng);
  CHECK(finite_difference_check(oracle, x, y, 1e-5) <= 1e-6);
  check_unbiased(oracle, 20000, 3, 5.0, 4321);

  CHECK_THROWS_AS(RobustMultidomainOracle(std::vector<DomainData>{}),
                  std::invalid_argument);
  DomainData empty;
  empty.features = Mat(0, 3);
  CHECK_THROWS_AS(
      RobustMultidomainOracle(std::vector<DomainData>{domains[0], empty}),
      std::invalid_argument);
}

TEST_CASE("regularized view is an exact algebraic shift") {
  QuadraticSpec spec;
  spec.noise = 0.4;
  const QuadraticSaddleOracle base(spec, 55);
  RngStream rng(12);
  const Vec x = random_feasible(base.x_set(), rng);
  const Vec y = random_feasible(base.y_set(), rng);

  for (double rho : {0.0, 0.3, 1.7}) {
    const RegularizedView view{base, rho};
    RngStream r1(1000);
    RngStream r2(1000);
    Vec vx(2), vy(2), gx(2), gy(2);
    view.sample_gradients(x, y, 16, r1, vx, vy);
    base.sample_gradients(x, y, 16, r2, gx, gy);
    for (int i = 0; i < 2; ++i) {
      CHECK(vx[i] == gx[i]);  // x-block untouched
      CHECK(std::fabs(vy[i] - (gy[i] - rho * y[i])) <= 1e-15);
    }
    // Value shift: g - rho/2 ||y||^2.
    CHECK(view.exact_value(x, y) ==
          doctest::Approx(base.exact_value(x, y) - 0.5 * rho * kernels::sumsq(y))
              .epsilon(1e-15));
  }

  // Deterministic oracle: any batch equals exact gradients minus (0, rho y).
  QuadraticSpec quiet = spec;
  quiet.noise = 0.0;
  const QuadraticSaddleOracle det(quiet, 55);
  const RegularizedView view{det, 1.3};
  for (int b : {1, 7, 100}) {
    RngStream r(0);
    Vec vx(2), vy(2), ex(2), ey(2);
    view.sample_gradients(x, y, b, r, vx, vy);
    det.exact_gradients(x, y, ex, ey);
    kernels::axpy(-1.3, y, ey);
    CHECK(vx == ex);
    CHECK(vy == ey);
  }
}

TEST_CASE("pair sampling shares one batch across both points") {
  // With zero noise the pair gradients equal the exact ones at each point; with
  // noise, the difference of the two outputs is noise-free (same samples).
  QuadraticSpec spec;
  spec.noise = 0.5;
  const QuadraticSaddleOracle oracle(spec, 66);
  RngStream rng(13);
  const Vec x = random_feasible(oracle.x_set(), rng);
  const Vec y = random_feasible(oracle.y_set(), rng);
  const Vec xp = random_feasible(oracle.x_set(), rng);
  const Vec yp = random_feasible(oracle.y_set(), rng);
  Vec gx(2), gy(2), gxp(2), gyp(2);
  oracle.sample_gradients_pair(x, y, xp, yp, 8, rng, gx, gy, gxp, gyp);
  Vec ex(2), ey(2), exp_(2), eyp(2);
  oracle.exact_gradients(x, y, ex, ey);
  oracle.exact_gradients(xp, yp, exp_, eyp);
  for (int i = 0; i < 2; ++i) {
    // noise cancels in the difference
    CHECK(gx[i] - gxp[i] == doctest::Approx(ex[i] - exp_[i]).epsilon(1e-12));
    CHECK(gy[i] - gyp[i] == doctest::Approx(ey[i] - eyp[i]).epsilon(1e-12));
  }
}

TEST_CASE("csv domain ingestion") {
  const auto dir = std::filesystem::temp_directory_path() / "minimax_csv_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "domain.csv").string();
  {
    std::ofstream out(path);
    out << "0.5,-1.25,1\n-0.5,2.0,0\n1.5,0.25,1\n";
  }
  const DomainData dom = load_domain_csv(path);
  CHECK(dom.features.rows == 3);
  CHECK(dom.features.cols == 2);
  CHECK(dom.features(0, 1) == -1.25);
  CHECK(dom.labels == Vec{1.0, -1.0, 1.0});

  const auto bad = (dir / "bad.csv").string();
  {
    std::ofstream out(bad);
    out << "0.5,2\n";  // label must be 0/1 or -1/+1
  }
  CHECK_THROWS_AS(load_domain_csv(bad), std::invalid_argument);
  CHECK_THROWS_AS(load_domain_csv((dir / "missing.csv").string()),
                  std::invalid_argument);
  std::filesystem::remove_all(dir);
}
