#pragma once

#include <cstddef>
#include <span>

// Double-precision vector kernels behind the whole library: gradient steps,
// momentum blends, box clamps, soft-thresholds, reductions. Each kernel has a
// scalar reference implementation and an AVX2 variant; the backend is picked
// once at startup from CPUID and can be forced for testing.
//
// Elementwise kernels are bit-identical across backends (per-lane IEEE ops in
// the same order, no FMA contraction). Reductions (dot, sumsq) accumulate in a
// different order under AVX2 and may differ from scalar in the last ulps.

namespace minimax::kernels {

enum class Backend { scalar, avx2 };

/// Backend currently in use (detected once, or last forced value).
Backend active_backend();

/// True if the AVX2 variants are compiled in and the CPU supports them.
bool avx2_available();

/// Test hook: route all kernels through the given backend. Throws
/// std::invalid_argument when asked for an unavailable backend.
void force_backend(Backend b);

// out[i] = x[i] + a * g[i]
void axpby_to(std::span<double> out, std::span<const double> x, double a,
              std::span<const double> g);

// y[i] += a * x[i]
void axpy(double a, std::span<const double> x, std::span<double> y);

// x[i] = x[i] + t * (xt[i] - x[i])
void lerp(std::span<double> x, double t, std::span<const double> xt);

// out[i] = a[i] + t * (b[i] - a[i])
void lerp_to(std::span<double> out, std::span<const double> a, double t,
             std::span<const double> b);

// v[i] = g[i] + c * (v[i] - gp[i])
void momentum(std::span<double> v, double c, std::span<const double> g,
              std::span<const double> gp);

// out[i] = min(max(v[i], lo[i]), hi[i])
void clamp_to(std::span<double> out, std::span<const double> v,
              std::span<const double> lo, std::span<const double> hi);

// out[i] = copysign(max(|v[i]| - tau, 0), v[i])
void soft_threshold_to(std::span<double> out, std::span<const double> v, double tau);

// out[i] = (a[i] - b[i]) * s
void scaled_sub_to(std::span<double> out, std::span<const double> a,
                   std::span<const double> b, double s);

// x[i] *= a
void scale(double a, std::span<double> x);

double dot(std::span<const double> a, std::span<const double> b);

double sumsq(std::span<const double> a);

/// All components finite (no NaN, no +-inf).
bool all_finite(std::span<const double> a);

}  // namespace minimax::kernels
