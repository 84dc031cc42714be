#include "krotov/estimators.hpp"

#include <cmath>
#include <limits>

#include "krotov/functionals.hpp"

namespace krotov {
namespace {

constexpr double kSkipThreshold = 1e-14;

double anti_hermitian_norm(const Matrix& h) {
  const Matrix im = (h - h.adjoint()) / Complex(0.0, 2.0);
  return spectral_norm(im);
}

}  // namespace

AnalyticBounds analytic_bounds(const Problem& problem, const RealVector& field_samples,
                               std::optional<double> known_A) {
  const Hamiltonian& h = *problem.hamiltonian;
  const auto flags = h.flags();
  AnalyticBounds out;
  out.A = known_A ? *known_A
                  : std::max(0.0, 0.5 * problem.functional->curvature_bound(problem.targets));

  if (!flags.linear_in_state) {
    const auto bound = h.state_gradient_bound();
    if (!bound) {
      throw BoundUnavailable("analytic estimate: state-dependent generator provides no bound on dH/dphi");
    }
    out.state_gradient = *bound;
  }
  double imag = 0.0;
  if (!flags.hermitian) {
    if (!flags.linear_in_state) {
      throw BoundUnavailable(
          "analytic estimate: no bound on the anti-Hermitian part of a state-dependent generator");
    }
    const TimeGrid& grid = problem.grid;
    for (Eigen::Index j = 0; j < field_samples.size(); ++j) {
      const double t = grid.midpoint(static_cast<std::size_t>(j) % grid.n_steps());
      imag = std::max(imag, anti_hermitian_norm(h.evaluate(field_samples[j], t).matrix()));
    }
  }
  const double n = static_cast<double>(problem.n_states());
  out.B = 2.0 * std::sqrt(n) * out.state_gradient + 2.0 * imag / problem.hbar;
  out.running_curvature = g_b_curvature_bound(problem.cost, problem.grid);
  return out;
}

double analytic_C(const AnalyticBounds& bounds, const Trajectory& costates) {
  double chi_sum = 0.0;
  if (bounds.state_gradient != 0.0 && !costates.empty()) {
    for (std::size_t k = 0; k < costates.front().size(); ++k) {
      double largest = 0.0;
      for (const auto& set : costates) {
        largest = std::max(largest, set[k].norm());
      }
      chi_sum += largest;
    }
  }
  return -(2.0 * chi_sum * bounds.state_gradient + bounds.running_curvature);
}

Estimates estimate_analytic(const Problem& problem, const Trajectory& costates,
                            const RealVector& field_samples) {
  const AnalyticBounds b = analytic_bounds(problem, field_samples);
  return {b.A, b.B, analytic_C(b, costates)};
}

NumericEstimates estimate_numeric(const Problem& problem, const ControlField& old_field,
                                  const Trajectory& old_forward, const Trajectory& new_forward,
                                  const Trajectory& costates) {
  const TimeGrid& grid = problem.grid;
  const Hamiltonian& h = *problem.hamiltonian;
  const RunningCost& cost = problem.cost;
  const std::size_t n_points = grid.n_points();
  if (old_forward.size() != n_points || new_forward.size() != n_points ||
      costates.size() != n_points) {
    throw Error("estimate_numeric: trajectories do not match the grid");
  }
  const std::size_t n_states = problem.n_states();
  const bool linear = h.flags().linear_in_state;
  const Complex minus_i_over_hbar(0.0, -1.0 / problem.hbar);
  const double g_scale = cost.active() ? cost.lambda_b() / (cost.final_time() * static_cast<double>(n_states)) : 0.0;

  NumericEstimates out;
  out.B_j = RealVector::Constant(static_cast<Eigen::Index>(n_points),
                                 std::numeric_limits<double>::quiet_NaN());
  out.C_j = out.B_j;
  double b_sup = -std::numeric_limits<double>::infinity();
  double c_inf = std::numeric_limits<double>::infinity();

  for (std::size_t j = 0; j < n_points; ++j) {
    StateSet dphi(n_states);
    double den = 0.0;
    for (std::size_t k = 0; k < n_states; ++k) {
      dphi[k] = new_forward[j][k] - old_forward[j][k];
      den += dphi[k].squaredNorm();
    }
    out.max_ball = std::max(out.max_ball, den);
    if (den < kSkipThreshold) {
      ++out.skipped;
      continue;
    }
    const double eps = field_at_point(old_field, j);
    const double t = grid.t(j);
    const Matrix d = cost.active() ? cost.operator_at(t).matrix() : Matrix();

    double b_num = 0.0;
    double c_num = 0.0;
    if (linear) {
      // H parts of chi-dot and Delta f, both through H dphi.
      const Matrix hj = h.evaluate(eps, t).matrix();
      for (std::size_t k = 0; k < n_states; ++k) {
        const Vector h_dphi = hj * dphi[k];
        const Vector df = minus_i_over_hbar * h_dphi;
        const Complex chi_h_dphi = costates[j][k].dot(h_dphi);
        b_num += 2.0 * dphi[k].dot(df).real();
        c_num += 2.0 * (std::conj(minus_i_over_hbar) * chi_h_dphi).real();
        c_num += 2.0 * (minus_i_over_hbar * chi_h_dphi).real();
      }
    } else {
      const StateSet chi_dot =
          costate_derivative(costates[j], old_forward[j], old_field, j, grid, h, cost, problem.hbar);
      for (std::size_t k = 0; k < n_states; ++k) {
        const Vector f_new = minus_i_over_hbar * (h.evaluate(eps, t, &new_forward[j][k]).matrix() *
                                                  new_forward[j][k]);
        const Vector f_old = minus_i_over_hbar * (h.evaluate(eps, t, &old_forward[j][k]).matrix() *
                                                  old_forward[j][k]);
        const Vector df = f_new - f_old;
        // The running-cost part of chi-dot is handled with Delta g below.
        const Vector chi_dot_h = chi_dot[k] - cost.gradient(old_forward[j][k], t);
        b_num += 2.0 * dphi[k].dot(df).real();
        c_num += 2.0 * chi_dot_h.dot(dphi[k]).real() + 2.0 * costates[j][k].dot(df).real();
      }
    }
    if (cost.active()) {
      // 2 Re<grad g|dphi> - Delta g = -g_scale <dphi|D|dphi> for the quadratic running cost.
      for (std::size_t k = 0; k < n_states; ++k) {
        c_num -= g_scale * dphi[k].dot(d * dphi[k]).real();
      }
    }
    const double bj = b_num / den;
    const double cj = c_num / den;
    out.B_j[static_cast<Eigen::Index>(j)] = bj;
    out.C_j[static_cast<Eigen::Index>(j)] = cj;
    b_sup = std::max(b_sup, bj);
    c_inf = std::min(c_inf, cj);
  }

  if (out.skipped == n_points) {
    return out;
  }
  out.value.B = b_sup;
  out.value.C = c_inf;

  const StateSet& old_T = old_forward.back();
  const StateSet& new_T = new_forward.back();
  double den_T = 0.0;
  Complex cross = 0.0;
  for (std::size_t k = 0; k < n_states; ++k) {
    const Vector dphi = new_T[k] - old_T[k];
    den_T += dphi.squaredNorm();
    cross += costates.back()[k].dot(dphi);
  }
  if (den_T >= kSkipThreshold) {
    const FinalTimeFunctional& f = *problem.functional;
    out.value.A = (2.0 * cross.real() + f.value(new_T, problem.targets) -
                   f.value(old_T, problem.targets)) /
                  den_T;
  }
  return out;
}

}  // namespace krotov
