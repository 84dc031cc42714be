#include "krotov/engine.hpp"

#include <algorithm>
#include <cmath>

#include "krotov/propagator.hpp"

namespace krotov {

void Problem::validate() const {
  if (!hamiltonian) {
    throw Error("problem '" + name + "': no Hamiltonian");
  }
  if (!functional) {
    throw Error("problem '" + name + "': no final-time functional");
  }
  if (initial.empty()) {
    throw Error("problem '" + name + "': no initial states");
  }
  if (targets.size() != initial.size()) {
    throw Error("problem '" + name + "': " + std::to_string(initial.size()) +
                " initial states but " + std::to_string(targets.size()) + " targets");
  }
  const Eigen::Index dim = hamiltonian->dim();
  for (std::size_t k = 0; k < initial.size(); ++k) {
    if (initial[k].size() != dim || targets[k].size() != dim) {
      throw Error("problem '" + name + "': state " + std::to_string(k) +
                  " does not match the Hamiltonian dimension " + std::to_string(dim));
    }
  }
  // Targets are O|k> for orthonormal |k>, so they must be orthonormal as well.
  for (std::size_t k = 0; k < targets.size(); ++k) {
    for (std::size_t l = 0; l < targets.size(); ++l) {
      const Complex overlap = targets[k].dot(targets[l]);
      const double expected = k == l ? 1.0 : 0.0;
      if (std::abs(overlap - expected) > 1e-10) {
        throw Error("problem '" + name + "': target operator is not unitary on the subspace");
      }
    }
  }
  if (cost.n_states() != initial.size() || cost.final_time() != grid.final_time()) {
    throw Error("problem '" + name + "': running cost set up for a different N or T");
  }
  if (cost.active() && cost.operator_at(0.0).dim() != dim) {
    throw Error("problem '" + name + "': running-cost operator has the wrong dimension");
  }
  guess.validate(grid);
  if (!(hbar > 0.0)) {
    throw Error("problem '" + name + "': hbar must be positive");
  }
}

std::size_t OptimizationRecord::violations() const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [](const auto& e) { return !e.monotonic; }));
}

std::size_t OptimizationRecord::total_retries() const {
  std::size_t n = 0;
  for (const auto& e : entries) {
    n += e.retries;
  }
  return n;
}

double j_norm(double J, double lambda0, double lambda_b) {
  const double den = lambda_b - lambda0;
  if (den == 0.0) {
    throw Error("j_norm: lambda_b equals lambda_0");
  }
  if (lambda_b <= 0.0) {
    return J / den;
  }
  return 1.0 - (J - lambda0) / den;
}

double update_field_step(std::size_t j, const StateSet& chi, const StateSet& phi_new,
                         const StateSet& dphi, double sigma_j, const ControlField& field,
                         const Hamiltonian& h, double t, std::size_t sweeps) {
  if (j >= field.size()) {
    throw Error("update_field_step: index " + std::to_string(j) + " outside the field");
  }
  if (chi.size() != phi_new.size() || dphi.size() != phi_new.size()) {
    throw Error("update_field_step: state counts differ");
  }
  const auto idx = static_cast<Eigen::Index>(j);
  const double weight = field.shape[idx] / field.lambda_a;
  if (!std::isfinite(weight)) {
    throw Error("update_field_step: S/lambda_a is not finite at index " + std::to_string(j));
  }
  const bool state_dependent = !h.flags().linear_in_state;

  auto candidate = [&](double eps_eval) {
    Complex first = 0.0;
    Complex second = 0.0;
    Matrix shared;
    if (!state_dependent) {
      shared = h.field_derivative(eps_eval, t);
    }
    for (std::size_t k = 0; k < phi_new.size(); ++k) {
      const Vector mu_phi = state_dependent
                                ? Vector(h.field_derivative(eps_eval, t, &phi_new[k]) * phi_new[k])
                                : Vector(shared * phi_new[k]);
      first += chi[k].dot(mu_phi);
      if (sigma_j != 0.0) {
        second += dphi[k].dot(mu_phi);
      }
    }
    return field.reference[idx] + weight * (first + 0.5 * sigma_j * second).imag();
  };

  double eps = candidate(field.values[idx]);
  if (!h.flags().linear_in_field) {
    for (std::size_t s = 0; s < sweeps; ++s) {
      eps = candidate(eps);
    }
  }
  return eps;
}

bool NonlinearityCheck::all() const {
  return std::all_of(satisfied.begin(), satisfied.end(), [](bool b) { return b; });
}

NonlinearityCheck check_field_nonlinearity_bound(double lambda_a, const RealVector& shape,
                                                 const RealVector& sigma,
                                                 const RealVector& chi_norm_sums, double m2,
                                                 std::size_t n_states) {
  if (sigma.size() != shape.size() || chi_norm_sums.size() < shape.size()) {
    throw Error("check_field_nonlinearity_bound: sample counts differ");
  }
  const double n = static_cast<double>(n_states);
  NonlinearityCheck out;
  out.satisfied.resize(static_cast<std::size_t>(shape.size()));
  double needed = 0.0;
  for (Eigen::Index j = 0; j < shape.size(); ++j) {
    const double rhs = 0.5 * std::sqrt(n) * chi_norm_sums[j] * m2 + n * std::abs(sigma[j]) * m2;
    const double s = shape[j];
    out.satisfied[static_cast<std::size_t>(j)] = s == 0.0 || lambda_a / s > rhs;
    needed = std::max(needed, s * rhs);
  }
  out.minimal_lambda_a = 1.1 * needed;
  return out;
}

RealVector costate_norm_sums(const Trajectory& costates) {
  RealVector out(static_cast<Eigen::Index>(costates.size()));
  for (std::size_t j = 0; j < costates.size(); ++j) {
    double sum = 0.0;
    for (const auto& chi : costates[j]) {
      sum += chi.norm();
    }
    out[static_cast<Eigen::Index>(j)] = sum;
  }
  return out;
}

namespace {

struct Evaluation {
  double J_T = 0.0;
  double int_ga = 0.0;
  double int_gb = 0.0;
  double J() const { return J_T + int_ga + int_gb; }
};

Evaluation evaluate(const Problem& problem, const ControlField& field, const Trajectory& forward) {
  Evaluation e;
  e.J_T = problem.functional->value(forward.back(), problem.targets);
  e.int_ga = g_a_integral(field, problem.grid);
  e.int_gb = g_b_integral(forward, problem.cost, problem.grid);
  return e;
}

struct Attempt {
  ControlField field;
  Trajectory forward;
  Evaluation eval;
  NumericEstimates numeric;
  bool finite = true;
  std::string failure;
};

class Optimizer {
 public:
  Optimizer(const Problem& problem, const IterateOptions& options)
      : p_(problem), opt_(options), eps_(options.sigma) {
    popts_.hbar = problem.hbar;
    popts_.source_mode = options.source_mode;
  }

  OptimizationRecord run();

 private:
  Attempt sweep(const ControlField& field, const Trajectory& forward, const Trajectory& chi,
                const SigmaParams& params) const;
  SigmaParams params_for(const Trajectory& chi, const ControlField& field, double* analytic_c);
  IterationEntry make_entry(std::size_t iter, const Evaluation& e, double previous_J) const;

  const Problem& p_;
  const IterateOptions& opt_;
  PropagationOptions popts_;
  SigmaParams eps_;
  std::optional<AnalyticBounds> analytic_;
  Estimates numeric_prev_;
};

Attempt Optimizer::sweep(const ControlField& field, const Trajectory& forward,
                         const Trajectory& chi, const SigmaParams& params) const {
  const TimeGrid& grid = p_.grid;
  Attempt a;
  a.field = field;
  a.field.reference = field.values;
  a.forward.reserve(grid.n_points());
  a.forward.push_back(p_.initial);
  try {
    for (std::size_t j = 0; j < grid.n_steps(); ++j) {
      const StateSet& phi = a.forward.back();
      StateSet dphi(phi.size());
      for (std::size_t k = 0; k < phi.size(); ++k) {
        dphi[k] = phi[k] - forward[j][k];
      }
      const double sigma_j = sigma_eval(grid.t(j), params, grid.final_time());
      const double eps = update_field_step(j, chi[j], phi, dphi, sigma_j, a.field, *p_.hamiltonian,
                                           grid.midpoint(j), opt_.fixed_point_sweeps);
      if (!std::isfinite(eps)) {
        a.finite = false;
        a.failure = "non-finite field at index " + std::to_string(j);
        return a;
      }
      a.field.values[static_cast<Eigen::Index>(j)] = eps;
      a.forward.push_back(forward_step(phi, eps, j, grid, *p_.hamiltonian, popts_));
    }
  } catch (const PropagationError& e) {
    a.finite = false;
    a.failure = e.what();
    return a;
  }
  a.eval = evaluate(p_, a.field, a.forward);
  if (!std::isfinite(a.eval.J())) {
    a.finite = false;
    a.failure = "non-finite functional";
    return a;
  }
  a.numeric = estimate_numeric(p_, field, forward, a.forward, chi);
  return a;
}

SigmaParams Optimizer::params_for(const Trajectory& chi, const ControlField& field,
                                  double* analytic_c) {
  const SigmaMode mode = opt_.sigma.mode;
  const bool need_analytic = mode == SigmaMode::analytic || opt_.track_analytic_C;
  Estimates analytic;
  if (need_analytic) {
    if (!analytic_) {
      analytic_ = analytic_bounds(p_, field.values);
    } else if (!p_.hamiltonian->flags().hermitian) {
      analytic_ = analytic_bounds(p_, field.values, analytic_->A);
    }
    analytic = {analytic_->A, analytic_->B, analytic_C(*analytic_, chi)};
    *analytic_c = analytic.C;
  }
  switch (mode) {
    case SigmaMode::off:
    case SigmaMode::fixed:
      return opt_.sigma;
    case SigmaMode::analytic:
      return bar_params(analytic, eps_);
    case SigmaMode::numeric:
      return opt_.numeric_unclipped ? unclipped_params(numeric_prev_, eps_)
                                    : bar_params(numeric_prev_, eps_);
  }
  return opt_.sigma;
}

IterationEntry Optimizer::make_entry(std::size_t iter, const Evaluation& e,
                                     double previous_J) const {
  IterationEntry entry;
  entry.iter = iter;
  entry.J_T = e.J_T;
  entry.int_ga = e.int_ga;
  entry.int_gb = e.int_gb;
  entry.J = e.J();
  entry.delta_J = iter == 0 ? 0.0 : entry.J - previous_J;
  entry.monotonic = entry.delta_J <= 1e-12 * (1.0 + std::abs(entry.J));
  const double lambda_b = p_.cost.active() ? p_.cost.lambda_b() : 0.0;
  try {
    entry.J_norm = j_norm(entry.J, p_.functional->lambda0(), lambda_b);
  } catch (const Error&) {
    entry.J_norm = std::numeric_limits<double>::quiet_NaN();
  }
  return entry;
}

OptimizationRecord Optimizer::run() {
  p_.validate();
  if (opt_.sigma.eps_A < 0.0 || opt_.sigma.eps_B < 0.0 || opt_.sigma.eps_C < 0.0) {
    throw Error("iterate: eps_A, eps_B and eps_C must be non-negative");
  }
  numeric_prev_ = opt_.numeric_seed;

  OptimizationRecord record;
  ControlField field = p_.guess;
  Trajectory forward = propagate_forward(p_.initial, field, p_.grid, *p_.hamiltonian, popts_);
  Evaluation current = evaluate(p_, field, forward);
  IterationEntry first = make_entry(0, current, 0.0);
  if (opt_.sigma.mode == SigmaMode::fixed) {
    first.A_bar = opt_.sigma.A_bar;
    first.B_bar = opt_.sigma.B_bar;
    first.C_bar = opt_.sigma.C_bar;
  }
  record.entries.push_back(first);
  if (opt_.on_iteration) {
    opt_.on_iteration(first);
  }
  if (!std::isfinite(current.J())) {
    record.aborted = true;
    record.abort_reason = "guess field gives a non-finite functional";
  }

  for (std::size_t iter = 1; iter <= opt_.max_iter && !record.aborted; ++iter) {
    const StateSet terminal = p_.functional->costate_boundary(forward.back(), p_.targets);
    const Trajectory chi = propagate_costate_backward(terminal, forward, field, p_.grid,
                                                      *p_.hamiltonian, p_.cost, popts_);
    double analytic_c = std::numeric_limits<double>::quiet_NaN();
    SigmaParams params = params_for(chi, field, &analytic_c);

    Attempt attempt = sweep(field, forward, chi, params);
    if (!attempt.finite) {
      record.aborted = true;
      record.abort_reason = "iteration " + std::to_string(iter) + " diverged (" + attempt.failure +
                            "); last good iteration " + std::to_string(iter - 1);
      break;
    }
    IterationEntry entry = make_entry(iter, attempt.eval, current.J());

    if (!entry.monotonic && opt_.monotonic_guard && opt_.sigma.mode == SigmaMode::numeric) {
      const Estimates failed = attempt.numeric.value;
      params = bar_params(failed, eps_);
      Attempt retry = sweep(field, forward, chi, params);
      if (!retry.finite) {
        record.aborted = true;
        record.abort_reason = "retry of iteration " + std::to_string(iter) + " diverged (" +
                              retry.failure + "); last good iteration " + std::to_string(iter - 1);
        break;
      }
      attempt = std::move(retry);
      entry = make_entry(iter, attempt.eval, current.J());
      entry.failed_numeric = failed;
      entry.retries = 1;
      if (!entry.monotonic) {
        eps_.eps_A = std::max(2.0 * eps_.eps_A, opt_.escalation_floor);
        eps_.eps_C = std::max(2.0 * eps_.eps_C, opt_.escalation_floor);
      }
    }
    entry.A_bar = params.mode == SigmaMode::off ? 0.0 : params.A_bar;
    entry.B_bar = params.mode == SigmaMode::off ? 0.0 : params.B_bar;
    entry.C_bar = params.mode == SigmaMode::off ? 0.0 : params.C_bar;
    entry.numeric = attempt.numeric.value;
    entry.max_ball = attempt.numeric.max_ball;
    entry.analytic_C = analytic_c;

    numeric_prev_ = attempt.numeric.value;
    field = std::move(attempt.field);
    forward = std::move(attempt.forward);
    current = attempt.eval;
    record.entries.push_back(entry);
    if (opt_.on_iteration) {
      opt_.on_iteration(entry);
    }
    if (opt_.J_tol > 0.0 && std::abs(entry.delta_J) < opt_.J_tol) {
      break;
    }
  }
  record.final_field = std::move(field);
  record.final_states = forward.back();
  return record;
}

}  // namespace

OptimizationRecord iterate(const Problem& problem, const IterateOptions& options) {
  Optimizer optimizer(problem, options);
  return optimizer.run();
}

}  // namespace krotov
