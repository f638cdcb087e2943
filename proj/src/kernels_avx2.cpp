// AVX2 kernel variants. This translation unit is compiled with -mavx2 and
// -ffp-contract=off; everything else in the library stays on the baseline
// architecture. Elementwise kernels use plain vaddpd/vsubpd/vmulpd/vminpd/
// vmaxpd lanes so results match the scalar reference bit for bit. Reductions
// use 4-lane accumulators and therefore sum in a different order.

#include "minimax/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define MINIMAX_HAVE_AVX2_TU 1
#include <immintrin.h>
#endif

#include <cmath>
#include <cstddef>

#include "kernels_table.hpp"

namespace minimax::kernels::detail {

#if MINIMAX_HAVE_AVX2_TU

namespace {

void axpby_to_avx2(std::span<double> out, std::span<const double> x, double a,
                   std::span<const double> g) {
  const std::size_t n = out.size();
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vx = _mm256_loadu_pd(&x[i]);
    const __m256d vg = _mm256_loadu_pd(&g[i]);
    _mm256_storeu_pd(&out[i], _mm256_add_pd(vx, _mm256_mul_pd(va, vg)));
  }
  for (; i < n; ++i) out[i] = x[i] + a * g[i];
}

void axpy_avx2(double a, std::span<const double> x, std::span<double> y) {
  const std::size_t n = y.size();
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vy = _mm256_loadu_pd(&y[i]);
    const __m256d vx = _mm256_loadu_pd(&x[i]);
    _mm256_storeu_pd(&y[i], _mm256_add_pd(vy, _mm256_mul_pd(va, vx)));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void lerp_to_avx2(std::span<double> out, std::span<const double> a, double t,
                  std::span<const double> b) {
  const std::size_t n = out.size();
  const __m256d vt = _mm256_set1_pd(t);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d va = _mm256_loadu_pd(&a[i]);
    const __m256d vb = _mm256_loadu_pd(&b[i]);
    const __m256d d = _mm256_sub_pd(vb, va);
    _mm256_storeu_pd(&out[i], _mm256_add_pd(va, _mm256_mul_pd(vt, d)));
  }
  for (; i < n; ++i) out[i] = a[i] + t * (b[i] - a[i]);
}

void lerp_avx2(std::span<double> x, double t, std::span<const double> xt) {
  lerp_to_avx2(x, x, t, xt);
}

void momentum_avx2(std::span<double> v, double c, std::span<const double> g,
                   std::span<const double> gp) {
  const std::size_t n = v.size();
  const __m256d vc = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vv = _mm256_loadu_pd(&v[i]);
    const __m256d vg = _mm256_loadu_pd(&g[i]);
    const __m256d vgp = _mm256_loadu_pd(&gp[i]);
    const __m256d d = _mm256_sub_pd(vv, vgp);
    _mm256_storeu_pd(&v[i], _mm256_add_pd(vg, _mm256_mul_pd(vc, d)));
  }
  for (; i < n; ++i) v[i] = g[i] + c * (v[i] - gp[i]);
}

void clamp_to_avx2(std::span<double> out, std::span<const double> v,
                   std::span<const double> lo, std::span<const double> hi) {
  const std::size_t n = out.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vv = _mm256_loadu_pd(&v[i]);
    const __m256d vlo = _mm256_loadu_pd(&lo[i]);
    const __m256d vhi = _mm256_loadu_pd(&hi[i]);
    _mm256_storeu_pd(&out[i], _mm256_min_pd(_mm256_max_pd(vv, vlo), vhi));
  }
  for (; i < n; ++i) {
    const double t = (v[i] > lo[i]) ? v[i] : lo[i];
    out[i] = (t < hi[i]) ? t : hi[i];
  }
}

void soft_threshold_to_avx2(std::span<double> out, std::span<const double> v,
                            double tau) {
  const std::size_t n = out.size();
  const __m256d vtau = _mm256_set1_pd(tau);
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vv = _mm256_loadu_pd(&v[i]);
    const __m256d mag = _mm256_sub_pd(_mm256_andnot_pd(sign_mask, vv), vtau);
    const __m256d pos = _mm256_max_pd(mag, zero);
    _mm256_storeu_pd(&out[i], _mm256_or_pd(pos, _mm256_and_pd(vv, sign_mask)));
  }
  for (; i < n; ++i) {
    const double s = std::fabs(v[i]) - tau;
    out[i] = std::copysign((s > 0.0) ? s : 0.0, v[i]);
  }
}

void scaled_sub_to_avx2(std::span<double> out, std::span<const double> a,
                        std::span<const double> b, double s) {
  const std::size_t n = out.size();
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d va = _mm256_loadu_pd(&a[i]);
    const __m256d vb = _mm256_loadu_pd(&b[i]);
    _mm256_storeu_pd(&out[i], _mm256_mul_pd(_mm256_sub_pd(va, vb), vs));
  }
  for (; i < n; ++i) out[i] = (a[i] - b[i]) * s;
}

void scale_avx2(double a, std::span<double> x) {
  const std::size_t n = x.size();
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(&x[i], _mm256_mul_pd(_mm256_loadu_pd(&x[i]), va));
  for (; i < n; ++i) x[i] *= a;
}

double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d va = _mm256_loadu_pd(&a[i]);
    const __m256d vb = _mm256_loadu_pd(&b[i]);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(va, vb));
  }
  double out = hsum(acc);
  for (; i < n; ++i) out += a[i] * b[i];
  return out;
}

double sumsq_avx2(std::span<const double> a) {
  const std::size_t n = a.size();
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d va = _mm256_loadu_pd(&a[i]);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(va, va));
  }
  double out = hsum(acc);
  for (; i < n; ++i) out += a[i] * a[i];
  return out;
}

bool all_finite_avx2(std::span<const double> a) {
  const std::size_t n = a.size();
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  const __m256d inf = _mm256_set1_pd(__builtin_inf());
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(&a[i]);
    // |v| < inf is false for NaN and +-inf.
    const __m256d ok = _mm256_cmp_pd(_mm256_andnot_pd(sign_mask, v), inf, _CMP_LT_OQ);
    if (_mm256_movemask_pd(ok) != 0xf) return false;
  }
  for (; i < n; ++i)
    if (!std::isfinite(a[i])) return false;
  return true;
}

constexpr KernelTable kAvx2Table = {
    axpby_to_avx2,      axpy_avx2,       lerp_avx2,
    lerp_to_avx2,       momentum_avx2,   clamp_to_avx2,
    soft_threshold_to_avx2, scaled_sub_to_avx2, scale_avx2,
    dot_avx2,           sumsq_avx2,      all_finite_avx2,
};

}  // namespace

const KernelTable* avx2_table() {
  return __builtin_cpu_supports("avx2") ? &kAvx2Table : nullptr;
}

#else

const KernelTable* avx2_table() { return nullptr; }

#endif  // MINIMAX_HAVE_AVX2_TU

}  // namespace minimax::kernels::detail
