#pragma once

#include <cstddef>
#include <functional>

#include "krotov/core.hpp"
#include "krotov/hamiltonian.hpp"
#include "krotov/propagator.hpp"

namespace krotov {

/// State-dependent running cost g_b = lambda_b / (T N) sum_k <phi_k|D(t)|phi_k>.
class RunningCost {
 public:
  using OperatorFn = std::function<DenseOperator(double t)>;

  /// g_b = 0.
  RunningCost(double final_time, std::size_t n_states);
  /// Constant D. D must be Hermitian.
  RunningCost(double lambda_b, DenseOperator d, double final_time, std::size_t n_states);
  /// Time-dependent D(t). Every D(t) must be Hermitian.
  RunningCost(double lambda_b, OperatorFn d, double final_time, std::size_t n_states);

  double lambda_b() const { return lambda_b_; }
  double final_time() const { return final_time_; }
  std::size_t n_states() const { return n_states_; }
  bool active() const { return lambda_b_ != 0.0 && static_cast<bool>(d_); }
  bool time_dependent() const { return time_dependent_; }

  /// D(t); throws if no operator was configured.
  DenseOperator operator_at(double t) const;

  /// g_b at time t for the given states (0 when inactive).
  double value(const StateSet& states, double t) const;
  /// grad_{<phi|} g_b = lambda_b / (T N) D(t) |phi>.
  Vector gradient(const Vector& phi, double t) const;

 private:
  double lambda_b_ = 0.0;
  OperatorFn d_;
  double final_time_;
  std::size_t n_states_;
  bool time_dependent_ = false;
};

/// How the costate inhomogeneity is held across one step.
enum class SourceMode {
  constant,  ///< average of the two endpoint values
  linear,    ///< linear interpolation between endpoint values
};

struct PropagationOptions {
  double hbar = 1.0;
  SourceMode source_mode = SourceMode::constant;
};

/// Field value used at grid point t_j (zero-order hold of the interval that starts there).
double field_at_point(const ControlField& field, std::size_t j);

/// Forward propagation of every state under the piecewise-constant field.
Trajectory propagate_forward(const StateSet& initial, const ControlField& field,
                             const TimeGrid& grid, const Hamiltonian& h,
                             const PropagationOptions& opts = {});

/// One forward step of all states over interval j with field value `eps`.
StateSet forward_step(const StateSet& states, double eps, std::size_t j, const TimeGrid& grid,
                      const Hamiltonian& h, const PropagationOptions& opts = {});

/// Backward propagation of the costates from chi(T) = `terminal`.
/// The adjoint generator is H^dagger; a state-dependent running cost adds the
/// inhomogeneity grad_{<phi_k|} g_b evaluated on `forward`.
Trajectory propagate_costate_backward(const StateSet& terminal, const Trajectory& forward,
                                      const ControlField& field, const TimeGrid& grid,
                                      const Hamiltonian& h, const RunningCost& cost,
                                      const PropagationOptions& opts = {});

/// d/dt chi_k at grid point t_j from the right-hand side of the costate equation.
StateSet costate_derivative(const StateSet& chi, const StateSet& phi, const ControlField& field,
                            std::size_t j, const TimeGrid& grid, const Hamiltonian& h,
                            const RunningCost& cost, double hbar = 1.0);

}  // namespace krotov
