#include "minimax/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "minimax/kernels.hpp"

namespace minimax {

namespace {

void require_dim(int set_dim, std::size_t point_dim, const char* what) {
  if (set_dim != static_cast<int>(point_dim))
    throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

}  // namespace

int dimension(const FeasibleSet& set) {
  return std::visit(
      [](const auto& s) -> int {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Box>) return static_cast<int>(s.lower.size());
        if constexpr (std::is_same_v<T, Ball>) return static_cast<int>(s.center.size());
        if constexpr (std::is_same_v<T, Simplex>) return s.dim;
        if constexpr (std::is_same_v<T, Unbounded>) return s.dim;
      },
      set);
}

void validate(const FeasibleSet& set) {
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Box>) {
          if (s.lower.size() != s.upper.size())
            throw std::invalid_argument("box: bound dimension mismatch");
          if (s.lower.empty()) throw std::invalid_argument("box: empty dimension");
          for (std::size_t i = 0; i < s.lower.size(); ++i)
            if (!(s.lower[i] <= s.upper[i]))
              throw std::invalid_argument("box: lower bound exceeds upper bound");
        } else if constexpr (std::is_same_v<T, Ball>) {
          if (s.center.empty()) throw std::invalid_argument("ball: empty dimension");
          if (!(s.radius >= 0.0)) throw std::invalid_argument("ball: negative radius");
        } else if constexpr (std::is_same_v<T, Simplex>) {
          if (s.dim < 1) throw std::invalid_argument("simplex: dimension must be >= 1");
        } else if constexpr (std::is_same_v<T, Unbounded>) {
          if (s.dim < 1) throw std::invalid_argument("unbounded: dimension must be >= 1");
          if (!(s.radius >= 0.0))
            throw std::invalid_argument("unbounded: negative norm bound");
        }
      },
      set);
}

double max_norm(const FeasibleSet& set) {
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Box>) {
          double acc = 0.0;
          for (std::size_t i = 0; i < s.lower.size(); ++i) {
            const double m = std::max(std::fabs(s.lower[i]), std::fabs(s.upper[i]));
            acc += m * m;
          }
          return std::sqrt(acc);
        }
        if constexpr (std::is_same_v<T, Ball>)
          return std::sqrt(kernels::sumsq(s.center)) + s.radius;
        if constexpr (std::is_same_v<T, Simplex>) return 1.0;  // attained at vertices
        if constexpr (std::is_same_v<T, Unbounded>) return s.radius;
      },
      set);
}

double max_abs_coord(const FeasibleSet& set, int i) {
  if (i < 0 || i >= dimension(set))
    throw std::invalid_argument("max_abs_coord: coordinate out of range");
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Box>)
          return std::max(std::fabs(s.lower[i]), std::fabs(s.upper[i]));
        if constexpr (std::is_same_v<T, Ball>) return std::fabs(s.center[i]) + s.radius;
        if constexpr (std::is_same_v<T, Simplex>) return 1.0;
        if constexpr (std::is_same_v<T, Unbounded>) return s.radius;
      },
      set);
}

bool contains(const FeasibleSet& set, std::span<const double> p, double tol) {
  require_dim(dimension(set), p.size(), "contains");
  return std::visit(
      [&](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Box>) {
          for (std::size_t i = 0; i < p.size(); ++i)
            if (p[i] < s.lower[i] - tol || p[i] > s.upper[i] + tol) return false;
          return true;
        }
        if constexpr (std::is_same_v<T, Ball>) {
          Vec d(p.begin(), p.end());
          kernels::axpy(-1.0, s.center, d);
          return std::sqrt(kernels::sumsq(d)) <= s.radius + tol;
        }
        if constexpr (std::is_same_v<T, Simplex>) {
          double sum = 0.0;
          for (double c : p) {
            if (c < -tol) return false;
            sum += c;
          }
          return std::fabs(sum - 1.0) <= tol;
        }
        if constexpr (std::is_same_v<T, Unbounded>) return true;
      },
      set);
}

Vec simplex_project(std::span<const double> p) {
  const std::size_t n = p.size();
  if (n == 0) throw std::invalid_argument("simplex_project: empty point");
  Vec u(p.begin(), p.end());
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cumsum = 0.0;
  double tau = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    cumsum += u[j];
    const double t = (cumsum - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) tau = t;
  }
  Vec out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = std::max(p[i] - tau, 0.0);
  return out;
}

void project_into(const FeasibleSet& set, std::span<const double> p, std::span<double> out) {
  require_dim(dimension(set), p.size(), "project");
  if (p.size() != out.size()) throw std::invalid_argument("project: output size mismatch");
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Box>) {
          kernels::clamp_to(out, p, s.lower, s.upper);
        } else if constexpr (std::is_same_v<T, Ball>) {
          Vec d(p.begin(), p.end());
          kernels::axpy(-1.0, s.center, d);
          const double dist = std::sqrt(kernels::sumsq(d));
          if (dist <= s.radius) {
            std::copy(p.begin(), p.end(), out.begin());
          } else {
            // center + (radius/dist) * (p - center)
            kernels::lerp_to(out, s.center, s.radius / dist, p);
          }
        } else if constexpr (std::is_same_v<T, Simplex>) {
          Vec r = simplex_project(p);
          std::copy(r.begin(), r.end(), out.begin());
        } else if constexpr (std::is_same_v<T, Unbounded>) {
          std::copy(p.begin(), p.end(), out.begin());
        }
      },
      set);
}

Vec project(const FeasibleSet& set, std::span<const double> p) {
  Vec out(p.size());
  project_into(set, p, out);
  return out;
}

void validate(const ProxTerm& term) {
  std::visit(
      [](const auto& t) {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, L1Term>) {
          if (!(t.weight >= 0.0)) throw std::invalid_argument("l1 term: negative weight");
        } else if constexpr (std::is_same_v<T, IndicatorTerm>) {
          validate(t.set);
        }
      },
      term);
}

namespace {

void indicator_prox(const IndicatorTerm& t, const FeasibleSet& ambient,
                    std::span<const double> p, std::span<double> out) {
  if (std::holds_alternative<Unbounded>(ambient)) {
    project_into(t.set, p, out);
    return;
  }
  if (std::holds_alternative<Box>(ambient) && std::holds_alternative<Box>(t.set)) {
    const auto& za = std::get<Box>(ambient);
    const auto& zb = std::get<Box>(t.set);
    if (za.lower.size() != zb.lower.size())
      throw std::invalid_argument("prox: indicator dimension mismatch");
    Box inter{za.lower, za.upper};
    for (std::size_t i = 0; i < inter.lower.size(); ++i) {
      inter.lower[i] = std::max(inter.lower[i], zb.lower[i]);
      inter.upper[i] = std::min(inter.upper[i], zb.upper[i]);
      if (inter.lower[i] > inter.upper[i])
        throw std::invalid_argument("prox: empty box intersection");
    }
    project_into(FeasibleSet{inter}, p, out);
    return;
  }
  if (ambient == t.set) {
    project_into(ambient, p, out);
    return;
  }
  throw std::invalid_argument("prox: unsupported indicator/ambient combination");
}

}  // namespace

void prox_into(const ProxTerm& term, const FeasibleSet& set, double stepsize,
               std::span<const double> p, std::span<double> out) {
  if (!(stepsize > 0.0)) throw std::invalid_argument("prox: stepsize must be positive");
  require_dim(dimension(set), p.size(), "prox");
  if (p.size() != out.size()) throw std::invalid_argument("prox: output size mismatch");
  std::visit(
      [&](const auto& t) {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, ZeroTerm>) {
          project_into(set, p, out);
        } else if constexpr (std::is_same_v<T, L1Term>) {
          const double tau = t.weight / stepsize;
          if (std::holds_alternative<Unbounded>(set)) {
            kernels::soft_threshold_to(out, p, tau);
          } else if (std::holds_alternative<Box>(set)) {
            // Separable over an axis-aligned box: shrink, then clamp.
            const auto& b = std::get<Box>(set);
            kernels::soft_threshold_to(out, p, tau);
            kernels::clamp_to(out, out, b.lower, b.upper);
          } else if (std::holds_alternative<Simplex>(set)) {
            // ||z||_1 = 1 on the simplex, so the l1 term is a constant.
            project_into(set, p, out);
          } else {
            throw std::invalid_argument("prox: l1 over this set is not separable");
          }
        } else if constexpr (std::is_same_v<T, IndicatorTerm>) {
          indicator_prox(t, set, p, out);
        }
      },
      term);
}

Vec prox(const ProxTerm& term, const FeasibleSet& set, double stepsize,
         std::span<const double> p) {
  Vec out(p.size());
  prox_into(term, set, stepsize, p, out);
  return out;
}

}  // namespace minimax
