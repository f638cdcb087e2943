#include "minimax/kernels.hpp"

#include <cmath>
#include <stdexcept>

#include "kernels_table.hpp"

namespace minimax::kernels {

namespace detail {
namespace {

void axpby_to_scalar(std::span<double> out, std::span<const double> x, double a,
                     std::span<const double> g) {
  const std::size_t n = out.size();
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] + a * g[i];
}

void axpy_scalar(double a, std::span<const double> x, std::span<double> y) {
  const std::size_t n = y.size();
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void lerp_scalar(std::span<double> x, double t, std::span<const double> xt) {
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) x[i] = x[i] + t * (xt[i] - x[i]);
}

void lerp_to_scalar(std::span<double> out, std::span<const double> a, double t,
                    std::span<const double> b) {
  const std::size_t n = out.size();
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + t * (b[i] - a[i]);
}

void momentum_scalar(std::span<double> v, double c, std::span<const double> g,
                     std::span<const double> gp) {
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) v[i] = g[i] + c * (v[i] - gp[i]);
}

void clamp_to_scalar(std::span<double> out, std::span<const double> v,
                     std::span<const double> lo, std::span<const double> hi) {
  const std::size_t n = out.size();
  for (std::size_t i = 0; i < n; ++i) {
    // Comparison forms mirror the AVX max/min lane semantics exactly.
    const double t = (v[i] > lo[i]) ? v[i] : lo[i];
    out[i] = (t < hi[i]) ? t : hi[i];
  }
}

void soft_threshold_to_scalar(std::span<double> out, std::span<const double> v,
                              double tau) {
  const std::size_t n = out.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double s = std::fabs(v[i]) - tau;
    out[i] = std::copysign((s > 0.0) ? s : 0.0, v[i]);
  }
}

void scaled_sub_to_scalar(std::span<double> out, std::span<const double> a,
                          std::span<const double> b, double s) {
  const std::size_t n = out.size();
  for (std::size_t i = 0; i < n; ++i) out[i] = (a[i] - b[i]) * s;
}

void scale_scalar(double a, std::span<double> x) {
  for (double& xi : x) xi *= a;
}

double dot_scalar(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sumsq_scalar(std::span<const double> a) {
  double acc = 0.0;
  for (double ai : a) acc += ai * ai;
  return acc;
}

bool all_finite_scalar(std::span<const double> a) {
  for (double ai : a)
    if (!std::isfinite(ai)) return false;
  return true;
}

constexpr KernelTable kScalarTable = {
    axpby_to_scalar,      axpy_scalar,       lerp_scalar,
    lerp_to_scalar,       momentum_scalar,   clamp_to_scalar,
    soft_threshold_to_scalar, scaled_sub_to_scalar, scale_scalar,
    dot_scalar,           sumsq_scalar,      all_finite_scalar,
};

struct Dispatch {
  const KernelTable* table;
  Backend backend;
  Dispatch() {
    const KernelTable* avx2 = avx2_table();
    if (avx2 != nullptr) {
      table = avx2;
      backend = Backend::avx2;
    } else {
      table = &kScalarTable;
      backend = Backend::scalar;
    }
  }
};

Dispatch& dispatch() {
  static Dispatch d;
  return d;
}

}  // namespace
}  // namespace detail

Backend active_backend() { return detail::dispatch().backend; }

bool avx2_available() { return detail::avx2_table() != nullptr; }

void force_backend(Backend b) {
  auto& d = detail::dispatch();
  if (b == Backend::scalar) {
    d.table = &detail::kScalarTable;
    d.backend = Backend::scalar;
    return;
  }
  const detail::KernelTable* avx2 = detail::avx2_table();
  if (avx2 == nullptr) throw std::invalid_argument("kernels: avx2 backend unavailable");
  d.table = avx2;
  d.backend = Backend::avx2;
}

void axpby_to(std::span<double> out, std::span<const double> x, double a,
              std::span<const double> g) {
  detail::dispatch().table->axpby_to(out, x, a, g);
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  detail::dispatch().table->axpy(a, x, y);
}

void lerp(std::span<double> x, double t, std::span<const double> xt) {
  detail::dispatch().table->lerp(x, t, xt);
}

void lerp_to(std::span<double> out, std::span<const double> a, double t,
             std::span<const double> b) {
  detail::dispatch().table->lerp_to(out, a, t, b);
}

void momentum(std::span<double> v, double c, std::span<const double> g,
              std::span<const double> gp) {
  detail::dispatch().table->momentum(v, c, g, gp);
}

void clamp_to(std::span<double> out, std::span<const double> v,
              std::span<const double> lo, std::span<const double> hi) {
  detail::dispatch().table->clamp_to(out, v, lo, hi);
}

void soft_threshold_to(std::span<double> out, std::span<const double> v, double tau) {
  detail::dispatch().table->soft_threshold_to(out, v, tau);
}

void scaled_sub_to(std::span<double> out, std::span<const double> a,
                   std::span<const double> b, double s) {
  detail::dispatch().table->scaled_sub_to(out, a, b, s);
}

void scale(double a, std::span<double> x) { detail::dispatch().table->scale(a, x); }

double dot(std::span<const double> a, std::span<const double> b) {
  return detail::dispatch().table->dot(a, b);
}

double sumsq(std::span<const double> a) { return detail::dispatch().table->sumsq(a); }

bool all_finite(std::span<const double> a) {
  return detail::dispatch().table->all_finite(a);
}

}  // namespace minimax::kernels
