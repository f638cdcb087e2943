#pragma once

#include <optional>
#include <string>
#include <vector>

namespace minimax {

/// One closed-form sequence value(k) = scale / ((k + shift)^(num13/13) + offset).
/// num13 is the exponent numerator over the fixed denominator 13; this family
/// covers both the default decay laws and the shifted/offset variants used by
/// the experiment presets.
struct PowerSeq {
  double scale = 1.0;
  double shift = 2.0;
  int num13 = 5;
  double offset = 0.0;

  double at(long k) const;
};

struct ManualSchedule {
  PowerSeq eta;
  PowerSeq alpha;
  PowerSeq rho;
  PowerSeq gamma;
  PowerSeq theta;
};

enum class ScheduleMode { theorem, manual };

/// Constants of the stepsize/regularization schedules. In theorem mode the
/// five sequences are
///   eta_k   = (k+2)^(-5/13)
///   alpha_k = a4 (k+2)^(-4/13)
///   rho_k   = L (k+1)^(-2/13)
///   gamma_k = a5 (k+2)^(-12/13)
///   theta_k = a6 (k+2)^(-8/13)
/// with gamma/theta clipped to (0,1]. Manual mode substitutes user-supplied
/// PowerSeq closed forms (same clipping).
struct ScheduleConfig {
  double a1 = 0.1;
  double a2 = 0.1;
  double a4 = 0.01;
  double a5 = 1.0;
  double a6 = 1.0;
  double L = 1.0;      // gradient smoothness constant of the regularized objective
  double beta = 0.1;   // dual stepsize
  int batch = 1;       // minibatch size b
  ScheduleMode mode = ScheduleMode::theorem;
  std::optional<ManualSchedule> manual;
};

struct ScheduleAt {
  double eta;
  double alpha;
  double rho;
  double gamma;
  double theta;
};

/// Sequence values at iteration k >= 1. Throws std::invalid_argument for k < 1
/// or a manual-mode config without manual sequences. The first-iteration rule
/// gamma_0 = theta_0 = 1 lives in the solver, not here.
ScheduleAt schedule_at(const ScheduleConfig& config, long k);

struct ConstraintCheck {
  std::string name;
  double lhs;
  double rhs;
  bool ok;
};

struct ValidationReport {
  std::vector<ConstraintCheck> checks;
  bool ok = true;
  bool applicable = true;  // false in manual mode: constraints target theorem mode
};

/// Checks the admissible ranges of (a1, a2, a4, a5, a6, beta) against L and b:
///   0 < a1 <= min{ b/(32 a4 L^2), b a4/(2 L beta) }
///   0 < a2 <= min{ b/(32 a4 L^2), b a4/(2 L beta) }
///   0 < a4 <= min{ 1/(8L), beta/(8 sqrt 5) }
///   a5 >= 4 a4/a1 + 12/13
///   a6 >= 80 a4/a2 + 12/13
///   0 < beta <= 1/(6L)
/// Always returns a full report; never throws.
ValidationReport validate_constraints(const ScheduleConfig& config);

struct ComplexityTarget {
  double dual_branch;     // max(0, (2 L sigma_y / eps)^(13/2) - 1)
  double exponent = 6.5;  // reported iteration-complexity exponent
};

ComplexityTarget complexity_target(double epsilon, double sigma_y, double L);

/// Smoothness constant of the regularized objective consistent with its own
/// first regularization level: solves L = ell + L * 2^(-2/13) for L.
double smoothness_from_lipschitz(double ell);

}  // namespace minimax
