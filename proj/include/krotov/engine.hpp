#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "krotov/estimators.hpp"
#include "krotov/problem.hpp"
#include "krotov/sigma.hpp"

namespace krotov {

struct IterationEntry;

struct IterateOptions {
  std::size_t max_iter = 100;
  /// Stop once |delta J| < J_tol (0 disables the test).
  double J_tol = 0.0;
  SigmaParams sigma;
  bool monotonic_guard = true;
  /// Re-evaluations of dH/d eps at the candidate field for nonlinear-in-field H.
  std::size_t fixed_point_sweeps = 1;
  SourceMode source_mode = SourceMode::constant;
  /// Numeric mode: use 2A + eps_A and 2C - eps_C without clipping to the admissible signs.
  bool numeric_unclipped = false;
  /// Numeric mode: estimates standing in for the previous iteration on the first one.
  Estimates numeric_seed;
  /// Smallest eps_A / eps_C after an escalation.
  double escalation_floor = 1e-3;
  /// Record the analytic C next to the numeric estimates in every iteration.
  bool track_analytic_C = false;
  /// Called after each iteration is recorded.
  std::function<void(const IterationEntry&)> on_iteration;
};

struct IterationEntry {
  std::size_t iter = 0;
  double J = 0.0;
  double J_T = 0.0;
  double int_ga = 0.0;
  double int_gb = 0.0;
  double J_norm = 0.0;
  double delta_J = 0.0;
  bool monotonic = true;
  double A_bar = 0.0;
  double B_bar = 0.0;
  double C_bar = 0.0;
  std::size_t retries = 0;

  /// Numeric estimates of the accepted step: A at T, sup_j B_j, inf_j C_j.
  Estimates numeric;
  /// max_j sum_k |dphi_k(t_j)|^2 of the accepted step.
  double max_ball = 0.0;
  double analytic_C = std::numeric_limits<double>::quiet_NaN();
  /// Numeric estimates of the first attempt when it was retried.
  Estimates failed_numeric;
};

struct OptimizationRecord {
  /// Entry 0 evaluates the guess field; entry i is iteration i.
  std::vector<IterationEntry> entries;
  ControlField final_field;
  StateSet final_states;
  bool aborted = false;
  std::string abort_reason;

  std::size_t iterations() const { return entries.empty() ? 0 : entries.size() - 1; }
  std::size_t violations() const;
  std::size_t total_retries() const;
};

/// Normalized functional: J / (lambda_b - lambda0) for lambda_b <= 0,
/// 1 - (J - lambda0) / (lambda_b - lambda0) for lambda_b > 0.
double j_norm(double J, double lambda0, double lambda_b);

/// New field value at interval j:
///   eps_ref + S/lambda_a Im{ sum_k <chi_k|dH/deps|phi_k> + sigma/2 sum_k <dphi_k|dH/deps|phi_k> }.
/// dH/deps is taken at field.values[j] first; for nonlinear-in-field H it is
/// re-evaluated `sweeps` times at the latest candidate.
double update_field_step(std::size_t j, const StateSet& chi, const StateSet& phi_new,
                         const StateSet& dphi, double sigma_j, const ControlField& field,
                         const Hamiltonian& h, double t, std::size_t sweeps = 1);

struct NonlinearityCheck {
  std::vector<bool> satisfied;
  /// Smallest uniform lambda_a meeting the condition everywhere, times 1.1.
  double minimal_lambda_a = 0.0;
  bool all() const;
};

/// lambda_a / S_j > sqrt(N)/2 chi_j M2 + N |sigma_j| M2 at every sample, with
/// chi_j = sum_k |chi_k(t_j)|.
NonlinearityCheck check_field_nonlinearity_bound(double lambda_a, const RealVector& shape,
                                                 const RealVector& sigma,
                                                 const RealVector& chi_norm_sums, double m2,
                                                 std::size_t n_states);

/// sum_k |chi_k(t_j)| for every grid point.
RealVector costate_norm_sums(const Trajectory& costates);

/// Krotov iteration until max_iter, |delta J| < J_tol or divergence.
OptimizationRecord iterate(const Problem& problem, const IterateOptions& options);

}  // namespace krotov
