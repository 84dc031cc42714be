#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "krotov/core.hpp"
#include "krotov/dynamics.hpp"

namespace krotov {

/// tau = sum_k <k|O^dagger|phi_k> = sum_k <target_k|phi_k>, with target_k = O|k>.
Complex trace_overlap(const StateSet& states, const StateSet& targets);

/// target_k = O|k> for each basis state.
StateSet target_states(const DenseOperator& o, const StateSet& basis);

/// Final-time functional J_T and its costate boundary chi_k(T) = -grad_{<phi_k|} J_T.
class FinalTimeFunctional {
 public:
  explicit FinalTimeFunctional(double lambda0);
  virtual ~FinalTimeFunctional() = default;

  virtual std::string name() const = 0;
  virtual double value(const StateSet& states, const StateSet& targets) const = 0;
  virtual StateSet costate_boundary(const StateSet& states, const StateSet& targets) const = 0;
  /// Supremum of the second state derivatives of J_T over the admissible ball.
  /// A non-positive value means the functional needs no second-order term.
  virtual double curvature_bound(const StateSet& targets) const = 0;

  double lambda0() const { return lambda0_; }

 protected:
  static void check_sizes(const StateSet& states, const StateSet& targets);

 private:
  double lambda0_;
};

/// J_T = -(lambda0 / N^2) |tau|^2.
double jt_sm(const StateSet& states, const StateSet& targets, double lambda0);
StateSet jt_sm_costate(const StateSet& states, const StateSet& targets, double lambda0);

/// J_T = -(lambda0 / N) Re tau.
double jt_re(const StateSet& states, const StateSet& targets, double lambda0);
StateSet jt_re_costate(const StateSet& states, const StateSet& targets, double lambda0);

/// J_T = -lambda0 (|tau|^2 / N^2)^p, a polynomial of degree 2p in the states.
double jt_power(const StateSet& states, const StateSet& targets, double lambda0, int p);
StateSet jt_power_costate(const StateSet& states, const StateSet& targets, double lambda0, int p);

class JtSm final : public FinalTimeFunctional {
 public:
  using FinalTimeFunctional::FinalTimeFunctional;
  std::string name() const override { return "jt_sm"; }
  double value(const StateSet& s, const StateSet& t) const override;
  StateSet costate_boundary(const StateSet& s, const StateSet& t) const override;
  /// The square modulus enters with a negative sign: second derivatives along
  /// any direction are <= 0.
  double curvature_bound(const StateSet&) const override { return 0.0; }
};

class JtRe final : public FinalTimeFunctional {
 public:
  using FinalTimeFunctional::FinalTimeFunctional;
  std::string name() const override { return "jt_re"; }
  double value(const StateSet& s, const StateSet& t) const override;
  StateSet costate_boundary(const StateSet& s, const StateSet& t) const override;
  /// Linear in the states.
  double curvature_bound(const StateSet&) const override { return 0.0; }
};

/// Settings for the sampled curvature bound of JtPower.
struct CurvatureSampling {
  std::size_t samples = 2000;
  double safety_factor = 1.5;
  std::uint64_t seed = 20100401;
  std::optional<double> override_value;
};

class JtPower final : public FinalTimeFunctional {
 public:
  JtPower(double lambda0, int p, CurvatureSampling sampling = {});
  std::string name() const override { return "jt_power"; }
  double value(const StateSet& s, const StateSet& t) const override;
  StateSet costate_boundary(const StateSet& s, const StateSet& t) const override;
  /// Largest second partial derivative with respect to the real and imaginary
  /// state components, found by central finite differences at random points
  /// of the ball of radius 2 sqrt(N), times the safety factor.
  double curvature_bound(const StateSet& targets) const override;

  int power() const { return p_; }

 private:
  int p_;
  CurvatureSampling sampling_;
};

/// Integral of g_a = lambda_a / S (eps - eps_ref)^2 by the midpoint rule.
/// Throws if S_j = 0 while eps_j != eps_ref_j.
double g_a_integral(const ControlField& field, const TimeGrid& grid);

/// g_b at every grid point of a trajectory.
RealVector g_b_samples(const Trajectory& forward, const RunningCost& cost, const TimeGrid& grid);

/// Integral of g_b with the per-interval average of the endpoint values.
double g_b_integral(const Trajectory& forward, const RunningCost& cost, const TimeGrid& grid);

/// Smallest and largest eigenvalue of a Hermitian matrix by shifted power iteration.
std::pair<double, double> extreme_eigenvalues(const Matrix& hermitian);

/// sup over states and grid times of g_b(Delta phi) / ||Delta phi||^2,
/// i.e. lambda_b / (N T) times the extreme eigenvalue of D selected by the sign of lambda_b.
double g_b_curvature_bound(const RunningCost& cost, const TimeGrid& grid);

}  // namespace krotov
