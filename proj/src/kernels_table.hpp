#pragma once

#include <span>

// Internal dispatch table shared by the scalar and AVX2 translation units.

namespace minimax::kernels::detail {

struct KernelTable {
  void (*axpby_to)(std::span<double>, std::span<const double>, double,
                   std::span<const double>);
  void (*axpy)(double, std::span<const double>, std::span<double>);
  void (*lerp)(std::span<double>, double, std::span<const double>);
  void (*lerp_to)(std::span<double>, std::span<const double>, double,
                  std::span<const double>);
  void (*momentum)(std::span<double>, double, std::span<const double>,
                   std::span<const double>);
  void (*clamp_to)(std::span<double>, std::span<const double>,
                   std::span<const double>, std::span<const double>);
  void (*soft_threshold_to)(std::span<double>, std::span<const double>, double);
  void (*scaled_sub_to)(std::span<double>, std::span<const double>,
                        std::span<const double>, double);
  void (*scale)(double, std::span<double>);
  double (*dot)(std::span<const double>, std::span<const double>);
  double (*sumsq)(std::span<const double>);
  bool (*all_finite)(std::span<const double>);
};

// Defined in kernels_avx2.cpp; null when the CPU or build lacks AVX2.
const KernelTable* avx2_table();

}  // namespace minimax::kernels::detail
