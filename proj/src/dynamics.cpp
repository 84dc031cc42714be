#include "krotov/dynamics.hpp"

#include <cmath>

namespace krotov {

RunningCost::RunningCost(double final_time, std::size_t n_states)
    : final_time_(final_time), n_states_(n_states) {
  if (!(final_time > 0.0) || n_states == 0) {
    throw Error("RunningCost: horizon and subspace size must be positive");
  }
}

RunningCost::RunningCost(double lambda_b, DenseOperator d, double final_time,
                         std::size_t n_states)
    : RunningCost(final_time, n_states) {
  if (!std::isfinite(lambda_b)) {
    throw Error("RunningCost: lambda_b must be finite");
  }
  if (!d.hermitian()) {
    throw Error("RunningCost: D must be Hermitian");
  }
  lambda_b_ = lambda_b;
  d_ = [op = std::move(d)](double) { return op; };
}

RunningCost::RunningCost(double lambda_b, OperatorFn d, double final_time, std::size_t n_states)
    : RunningCost(final_time, n_states) {
  if (!std::isfinite(lambda_b)) {
    throw Error("RunningCost: lambda_b must be finite");
  }
  lambda_b_ = lambda_b;
  d_ = std::move(d);
  time_dependent_ = true;
}

DenseOperator RunningCost::operator_at(double t) const {
  if (!d_) {
    throw Error("RunningCost: no operator D configured");
  }
  DenseOperator d = d_(t);
  if (!d.hermitian()) {
    throw Error("RunningCost: D(t) must be Hermitian");
  }
  return d;
}

double RunningCost::value(const StateSet& states, double t) const {
  if (!active()) {
    return 0.0;
  }
  const Matrix d = operator_at(t).matrix();
  double sum = 0.0;
  for (const auto& phi : states) {
    sum += phi.dot(d * phi).real();
  }
  return lambda_b_ / (final_time_ * static_cast<double>(n_states_)) * sum;
}

Vector RunningCost::gradient(const Vector& phi, double t) const {
  if (!active()) {
    return Vector::Zero(phi.size());
  }
  return (lambda_b_ / (final_time_ * static_cast<double>(n_states_))) *
         (operator_at(t).matrix() * phi);
}

double field_at_point(const ControlField& field, std::size_t j) {
  const auto n = field.size();
  return field.values[static_cast<Eigen::Index>(j < n ? j : n - 1)];
}

namespace {

void check_states(const StateSet& states, const Hamiltonian& h, const char* who) {
  if (states.empty()) {
    throw Error(std::string(who) + ": empty state set");
  }
  for (const auto& v : states) {
    if (v.size() != h.dim()) {
      throw Error(std::string(who) + ": state dimension does not match the Hamiltonian");
    }
  }
}

}  // namespace

StateSet forward_step(const StateSet& states, double eps, std::size_t j, const TimeGrid& grid,
                      const Hamiltonian& h, const PropagationOptions& opts) {
  const double tm = grid.midpoint(j);
  StateSet next;
  next.reserve(states.size());
  if (h.flags().linear_in_state) {
    const DenseOperator hj = h.evaluate(eps, tm);
    for (const auto& phi : states) {
      next.push_back(step_propagator(hj, grid.dt(), phi, std::nullopt, opts.hbar, j).state);
    }
  } else {
    for (const auto& phi : states) {
      const DenseOperator hj = h.evaluate(eps, tm, &phi);
      next.push_back(step_propagator(hj, grid.dt(), phi, std::nullopt, opts.hbar, j).state);
    }
  }
  return next;
}

Trajectory propagate_forward(const StateSet& initial, const ControlField& field,
                             const TimeGrid& grid, const Hamiltonian& h,
                             const PropagationOptions& opts) {
  check_states(initial, h, "propagate_forward");
  if (field.size() != grid.n_steps()) {
    throw Error("propagate_forward: field length does not match the grid");
  }
  Trajectory traj;
  traj.reserve(grid.n_points());
  traj.push_back(initial);
  for (std::size_t j = 0; j < grid.n_steps(); ++j) {
    traj.push_back(forward_step(traj.back(), field.values[static_cast<Eigen::Index>(j)], j,
                                grid, h, opts));
  }
  return traj;
}

Trajectory propagate_costate_backward(const StateSet& terminal, const Trajectory& forward,
                                      const ControlField& field, const TimeGrid& grid,
                                      const Hamiltonian& h, const RunningCost& cost,
                                      const PropagationOptions& opts) {
  check_states(terminal, h, "propagate_costate_backward");
  if (forward.size() != grid.n_points()) {
    throw Error("propagate_costate_backward: forward trajectory missing or on a different grid");
  }
  if (field.size() != grid.n_steps()) {
    throw Error("propagate_costate_backward: field length does not match the grid");
  }
  const std::size_t n_states = terminal.size();
  for (const auto& set : forward) {
    if (set.size() != n_states) {
      throw Error("propagate_costate_backward: forward trajectory has a different state count");
    }
  }
  const bool nonlinear = !h.flags().linear_in_state;
  const bool sourced = cost.active() || nonlinear;

  // Driving term of d/dt chi_k at grid point j (excluding the H^dagger part).
  auto drive = [&](const StateSet& chi, std::size_t j, std::size_t k) {
    Vector s = cost.gradient(forward[j][k], grid.t(j));
    if (nonlinear) {
      s += h.costate_nonlinear_term(k, forward[j], chi, field_at_point(field, j), grid.t(j),
                                    opts.hbar);
    }
    return s;
  };

  Trajectory chi(grid.n_points());
  chi.back() = terminal;
  for (std::size_t jj = grid.n_steps(); jj-- > 0;) {
    const double eps = field.values[static_cast<Eigen::Index>(jj)];
    const double tm = grid.midpoint(jj);
    const StateSet& upper = chi[jj + 1];
    // Reversed time tau = t_{j+1} - t: d/dtau chi = -(i/hbar)(-H^dagger) chi - s.
    auto reversed_generator = [&](const Vector* state) {
      const DenseOperator hj = h.evaluate(eps, tm, state);
      return DenseOperator(Matrix(-hj.matrix().adjoint()), hj.hermitian());
    };
    const DenseOperator shared = nonlinear ? DenseOperator() : reversed_generator(nullptr);
    StateSet lower;
    lower.reserve(n_states);
    for (std::size_t k = 0; k < n_states; ++k) {
      DenseOperator own;
      if (nonlinear) {
        const Vector mid = 0.5 * (forward[jj][k] + forward[jj + 1][k]);
        own = reversed_generator(&mid);
      }
      std::optional<StepSource> src;
      if (sourced) {
        // Costates at t_j are not known yet, so the state-coupling part of the
        // lower endpoint uses chi(t_{j+1}).
        const Vector s_upper = -drive(upper, jj + 1, k);
        const Vector s_lower = -drive(upper, jj, k);
        if (opts.source_mode == SourceMode::constant) {
          src = StepSource::constant(0.5 * (s_upper + s_lower));
        } else {
          src = StepSource{s_upper, s_lower};
        }
      }
      lower.push_back(step_propagator(nonlinear ? own : shared, grid.dt(), upper[k], src,
                                      opts.hbar, jj)
                          .state);
    }
    chi[jj] = std::move(lower);
  }
  return chi;
}

StateSet costate_derivative(const StateSet& chi, const StateSet& phi, const ControlField& field,
                            std::size_t j, const TimeGrid& grid, const Hamiltonian& h,
                            const RunningCost& cost, double hbar) {
  const double eps = field_at_point(field, j);
  const double t = grid.t(j);
  const Complex minus_i_over_hbar(0.0, -1.0 / hbar);
  StateSet out;
  out.reserve(chi.size());
  for (std::size_t k = 0; k < chi.size(); ++k) {
    const DenseOperator hk = h.evaluate(eps, t, &phi[k]);
    Vector d = minus_i_over_hbar * (hk.matrix().adjoint() * chi[k]);
    d += cost.gradient(phi[k], t);
    if (!h.flags().linear_in_state) {
      d += h.costate_nonlinear_term(k, phi, chi, eps, t, hbar);
    }
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace krotov
