#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "minimax/geometry.hpp"
#include "minimax/kernels.hpp"
#include "minimax/rng.hpp"
#include "support/grid_oracles.hpp"

using namespace minimax;

namespace {

Vec random_vec(RngStream& rng, int n, double spread) {
  Vec v(n);
  for (auto& c : v) c = rng.uniform(-spread, spread);
  return v;
}

double dist(const Vec& a, const Vec& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(acc);
}

const FeasibleSet kSets[] = {
    FeasibleSet{Box{Vec{-1.0, -0.5, 0.25}, Vec{1.0, 2.0, 0.75}}},
    FeasibleSet{Ball{Vec{0.5, -0.5, 1.0}, 1.5}},
    FeasibleSet{Simplex{4}},
    FeasibleSet{Unbounded{3, 5.0}},
};

}  // namespace

TEST_CASE("simplex projection agrees with the grid QP oracle") {
  // Expected values computed by dense grid refinement before trusting the
  // sort-and-threshold implementation.
  const Vec oracle1 = testsupport::simplex_project_grid({0.5, 0.5, 1.0});
  const Vec impl1 = simplex_project(Vec{0.5, 0.5, 1.0});
  CHECK(dist(oracle1, impl1) < 2e-4);
  // Frozen values from the oracle run (analytically 1/6, 1/6, 2/3).
  CHECK(impl1[0] == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(impl1[1] == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(impl1[2] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  const Vec oracle2 = testsupport::simplex_project_grid({0.2, 0.9, 0.9});
  const Vec impl2 = simplex_project(Vec{0.2, 0.9, 0.9});
  CHECK(dist(oracle2, impl2) < 2e-4);
  CHECK(impl2[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(impl2[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(impl2[2] == doctest::Approx(0.5).epsilon(1e-12));

  RngStream rng(7);
  for (int t = 0; t < 50; ++t) {
    const int n = 2 + static_cast<int>(rng.index(3));
    const Vec p = random_vec(rng, n, 2.0);
    const Vec impl = simplex_project(p);
    const Vec grid = testsupport::simplex_project_grid(p);
    CHECK(dist(impl, grid) < 5e-4);
  }
}

TEST_CASE("simplex projection postconditions") {
  RngStream rng(8);
  for (int t = 0; t < 2000; ++t) {
    const int n = 1 + static_cast<int>(rng.index(6));
    const Vec out = simplex_project(random_vec(rng, n, 3.0));
    double sum = 0.0;
    for (double c : out) {
      CHECK(c >= 0.0);
      sum += c;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
  // Vertices and the barycenter are fixed points.
  CHECK(simplex_project(Vec{1.0, 0.0, 0.0}) == Vec{1.0, 0.0, 0.0});
  const Vec bary{1.0 / 3, 1.0 / 3, 1.0 / 3};
  const Vec pb = simplex_project(bary);
  for (int i = 0; i < 3; ++i) CHECK(pb[i] == doctest::Approx(bary[i]).epsilon(1e-15));
}

TEST_CASE("projection closed forms") {
  // Interior box point is fixed.
  const FeasibleSet box = Box{Vec{0.0, 0.0}, Vec{1.0, 1.0}};
  CHECK(project(box, Vec{0.5, 0.5}) == Vec{0.5, 0.5});
  // Radial scaling onto the unit ball.
  const FeasibleSet ball = Ball{Vec{0.0, 0.0}, 1.0};
  const Vec pb = project(ball, Vec{3.0, 4.0});
  CHECK(pb[0] == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(pb[1] == doctest::Approx(0.8).epsilon(1e-14));
  // Unbounded: identity.
  const FeasibleSet ub = Unbounded{2, 10.0};
  CHECK(project(ub, Vec{7.0, -9.0}) == Vec{7.0, -9.0});
}

TEST_CASE("projection properties on 10^4 random inputs per set type") {
  RngStream rng(9);
  const int n = 10000;
  for (const auto& set : kSets) {
    const int dim = dimension(set);
    for (int t = 0; t < n; ++t) {
      const Vec a = random_vec(rng, dim, 3.0);
      const Vec b = random_vec(rng, dim, 3.0);
      const Vec pa = project(set, a);
      const Vec pb = project(set, b);

      // Idempotence, 1e-12 relative.
      const Vec ppa = project(set, pa);
      CHECK(dist(ppa, pa) <= 1e-12 * (1.0 + std::sqrt(kernels::sumsq(pa))));

      // Nonexpansiveness.
      CHECK(dist(pa, pb) <= dist(a, b) + 1e-12);

      // Variational characterization with a feasible witness.
      const Vec z = project(set, random_vec(rng, dim, 3.0));
      double ip = 0.0;
      for (int i = 0; i < dim; ++i) ip += (a[i] - pa[i]) * (z[i] - pa[i]);
      CHECK(ip <= 1e-10);

      // Zero prox term reduces exactly to projection.
      const Vec via_prox = prox(ZeroTerm{}, set, 1.0, a);
      for (int i = 0; i < dim; ++i) CHECK(std::fabs(via_prox[i] - pa[i]) <= 1e-12);

      CHECK(contains(set, pa, 1e-10));
    }
  }
}

TEST_CASE("prox closed forms against the 1-d grid oracle") {
  // Soft threshold by weight/alpha on an unbounded domain.
  const FeasibleSet ub = Unbounded{1, 100.0};
  CHECK(prox(L1Term{1.0}, ub, 1.0, Vec{2.5})[0] == doctest::Approx(1.5).epsilon(1e-14));

  // Zero term over a box reduces to projection.
  const FeasibleSet box1 = Box{Vec{-1.0}, Vec{1.0}};
  CHECK(prox(ZeroTerm{}, box1, 1.0, Vec{2.0})[0] == 1.0);

  // l1 over a box: grid oracle pins the expected value first.
  const FeasibleSet box01 = Box{Vec{0.0}, Vec{1.0}};
  const double oracle = testsupport::prox_l1_interval_grid(1.0, 2.0, 0.0, 1.0, 0.9);
  const double impl = prox(L1Term{1.0}, box01, 2.0, Vec{0.9})[0];
  CHECK(impl == doctest::Approx(oracle).epsilon(1e-6));
  CHECK(impl == doctest::Approx(0.4).epsilon(1e-12));  // soft-threshold then clamp

  RngStream rng(10);
  for (int t = 0; t < 200; ++t) {
    const double w = rng.uniform(0.0, 2.0);
    const double alpha = rng.uniform(0.1, 3.0);
    const double lo = rng.uniform(-2.0, 0.0);
    const double hi = lo + rng.uniform(0.5, 3.0);
    const double p = rng.uniform(-3.0, 3.0);
    const double got = prox(L1Term{w}, Box{Vec{lo}, Vec{hi}}, alpha, Vec{p})[0];
    const double want = testsupport::prox_l1_interval_grid(w, alpha, lo, hi, p);
    CHECK(got == doctest::Approx(want).epsilon(1e-5));
  }
}

TEST_CASE("prox firm nonexpansiveness") {
  RngStream rng(11);
  const FeasibleSet box = Box{Vec{-1.0, -1.0}, Vec{1.0, 1.0}};
  const FeasibleSet ub = Unbounded{2, 10.0};
  for (const auto* set : {&box, &ub}) {
    for (int t = 0; t < 5000; ++t) {
      const Vec a = random_vec(rng, 2, 3.0);
      const Vec b = random_vec(rng, 2, 3.0);
      const Vec pa = prox(L1Term{0.4}, *set, 1.5, a);
      const Vec pb = prox(L1Term{0.4}, *set, 1.5, b);
      double lhs = 0.0, rhs = 0.0;
      for (int i = 0; i < 2; ++i) {
        lhs += (pa[i] - pb[i]) * (pa[i] - pb[i]);
        rhs += (pa[i] - pb[i]) * (a[i] - b[i]);
      }
      CHECK(lhs <= rhs + 1e-10);
    }
  }
}

TEST_CASE("prox special combinations") {
  // l1 is constant on the simplex, so the prox is the projection.
  const FeasibleSet simplex = Simplex{3};
  const Vec p{0.5, 0.5, 1.0};
  CHECK(prox(L1Term{2.0}, simplex, 1.0, p) == project(simplex, p));

  // Indicator of a box over an unbounded ambient set projects onto the box.
  const FeasibleSet ub = Unbounded{2, 10.0};
  const IndicatorTerm ind{Box{Vec{-1.0, -1.0}, Vec{1.0, 1.0}}};
  CHECK(prox(ind, ub, 1.0, Vec{2.0, -3.0}) == Vec{1.0, -1.0});

  // Box over box intersects the bounds.
  const FeasibleSet outer = Box{Vec{-2.0, -2.0}, Vec{0.5, 2.0}};
  const Vec q = prox(ind, outer, 1.0, Vec{2.0, -3.0});
  CHECK(q == Vec{0.5, -1.0});

  // Identical sets project once.
  const FeasibleSet ball = Ball{Vec{0.0, 0.0}, 1.0};
  const IndicatorTerm same{Ball{Vec{0.0, 0.0}, 1.0}};
  CHECK(prox(same, ball, 1.0, Vec{3.0, 4.0}) == project(ball, Vec{3.0, 4.0}));
}

TEST_CASE("error paths") {
  const FeasibleSet box = Box{Vec{0.0, 0.0}, Vec{1.0, 1.0}};
  CHECK_THROWS_AS(project(box, Vec{0.5}), std::invalid_argument);
  CHECK_THROWS_AS(prox(ZeroTerm{}, box, 0.0, Vec{0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(prox(ZeroTerm{}, box, -1.0, Vec{0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(prox(L1Term{1.0}, FeasibleSet{Ball{Vec{0.0, 0.0}, 1.0}}, 1.0,
                       Vec{0.5, 0.5}),
                  std::invalid_argument);
  // Disjoint boxes have an empty intersection.
  const IndicatorTerm far_box{Box{Vec{5.0, 5.0}, Vec{6.0, 6.0}}};
  CHECK_THROWS_AS(prox(far_box, box, 1.0, Vec{0.5, 0.5}), std::invalid_argument);

  CHECK_THROWS_AS(validate(FeasibleSet{Box{Vec{1.0}, Vec{0.0}}}), std::invalid_argument);
  CHECK_THROWS_AS(validate(FeasibleSet{Ball{Vec{0.0}, -1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(validate(FeasibleSet{Simplex{0}}), std::invalid_argument);
  CHECK_THROWS_AS(validate(ProxTerm{L1Term{-0.5}}), std::invalid_argument);
  CHECK_NOTHROW(validate(FeasibleSet{Box{Vec{0.0}, Vec{1.0}}}));
}

TEST_CASE("set geometry helpers") {
  CHECK(max_norm(FeasibleSet{Simplex{5}}) == 1.0);
  CHECK(max_norm(FeasibleSet{Unbounded{3, 7.5}}) == 7.5);
  CHECK(max_norm(FeasibleSet{Box{Vec{-2.0, -2.0}, Vec{2.0, 2.0}}}) ==
        doctest::Approx(2.0 * std::sqrt(2.0)));
  CHECK(max_norm(FeasibleSet{Ball{Vec{3.0, 4.0}, 2.0}}) == doctest::Approx(7.0));
  CHECK(max_abs_coord(FeasibleSet{Box{Vec{-1.0, -3.0}, Vec{2.0, 1.0}}}, 1) == 3.0);
  CHECK(dimension(kSets[2]) == 4);
}
