#pragma once

#include <optional>
#include <vector>

#include "krotov/problem.hpp"
#include "krotov/sigma.hpp"

namespace krotov {

/// A bound needed by an estimate is not provided by the model.
class BoundUnavailable : public Error {
 public:
  using Error::Error;
};

/// Inputs of the analytic estimate that do not change between iterations.
struct AnalyticBounds {
  double A = 0.0;                     ///< max(0, curvature / 2)
  double B = 0.0;                     ///< 2 sqrt(N) |dH/dphi| + 2 sup |Im H| / hbar
  double state_gradient = 0.0;        ///< |dH/dphi| (0 for state-independent H)
  double running_curvature = 0.0;     ///< sup of g_b(dphi) / |dphi|^2
};

/// A and B, plus the pieces of C that do not depend on the costates.
/// `field_samples` are the field values over which sup |Im H| is taken.
/// A known A skips the curvature sampling of the functional.
AnalyticBounds analytic_bounds(const Problem& problem, const RealVector& field_samples,
                               std::optional<double> known_A = std::nullopt);

/// C = -[2 sum_k sup_t |chi_k(t)| |dH/dphi| + running_curvature].
double analytic_C(const AnalyticBounds& bounds, const Trajectory& costates);

/// Full analytic triple from the current costates.
Estimates estimate_analytic(const Problem& problem, const Trajectory& costates,
                            const RealVector& field_samples);

/// Per-point numeric estimates from one completed sweep.
struct NumericEstimates {
  Estimates value;              ///< A at T, sup_j B_j, inf_j C_j
  RealVector B_j;               ///< NaN where the point was skipped
  RealVector C_j;               ///< NaN where the point was skipped
  std::size_t skipped = 0;
  double max_ball = 0.0;        ///< max_j sum_k |dphi_k(t_j)|^2
};

/// Estimates from the change dphi = new - old of a sweep made under the
/// costates `costates` of the old field. Points with sum_k |dphi_k|^2 < 1e-14
/// are skipped; if every point is skipped the result is (0, 0, 0).
NumericEstimates estimate_numeric(const Problem& problem, const ControlField& old_field,
                                  const Trajectory& old_forward, const Trajectory& new_forward,
                                  const Trajectory& costates);

}  // namespace krotov
