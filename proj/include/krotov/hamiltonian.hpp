#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "krotov/core.hpp"

namespace krotov {

/// Generator H[phi, eps, t] of the equation of motion d/dt phi = -(i/hbar) H phi.
///
/// Implementations expose the field derivative used by the update, and the
/// suprema that feed the second-order parameter estimates:
///   second_field_derivative_bound()  sup |d^2 H / d eps^2|
///   state_gradient_bound()           sup |dH / dphi| over the reachable states
/// An empty optional means "no bound known"; estimators that need it raise
/// BoundUnavailable instead of assuming zero.
class Hamiltonian {
 public:
  struct Flags {
    bool hermitian = true;
    bool linear_in_field = true;
    bool linear_in_state = true;
  };

  virtual ~Hamiltonian() = default;

  virtual Eigen::Index dim() const = 0;
  virtual Flags flags() const = 0;

  /// H evaluated at field `eps`, time `t`. `state` is only consulted by
  /// state-dependent generators.
  virtual DenseOperator evaluate(double eps, double t, const Vector* state = nullptr) const = 0;

  /// dH/d eps at the same arguments.
  virtual Matrix field_derivative(double eps, double t, const Vector* state = nullptr) const = 0;

  virtual std::optional<double> second_field_derivative_bound() const = 0;
  virtual std::optional<double> state_gradient_bound() const = 0;

  /// Extra costate driving term for state-dependent generators:
  ///   -(i/hbar)[sum_l <phi_l|grad_{|phi_k>} H^dagger|chi_l> - sum_l <chi_l|grad_{<phi_k|} H|phi_l>]
  /// Returns zero for linear_in_state generators; the default throws otherwise.
  virtual Vector costate_nonlinear_term(std::size_t k, const StateSet& states,
                                        const StateSet& costates, double eps, double t,
                                        double hbar) const;

  Vector apply(const Vector& state, double eps, double t) const;
  Vector apply_field_derivative(const Vector& state, double eps, double t) const;
};

/// H(eps) = sum_p eps^p H_p, state independent and time independent.
class PolynomialHamiltonian final : public Hamiltonian {
 public:
  /// `terms[p]` multiplies eps^p. All terms must share one dimension. For
  /// degree > 2 the field-curvature bound needs `field_bound` = sup |eps|.
  explicit PolynomialHamiltonian(std::vector<DenseOperator> terms,
                                 std::optional<double> field_bound = std::nullopt);

  Eigen::Index dim() const override { return dim_; }
  Flags flags() const override { return flags_; }
  DenseOperator evaluate(double eps, double t, const Vector* state = nullptr) const override;
  Matrix field_derivative(double eps, double t, const Vector* state = nullptr) const override;
  std::optional<double> second_field_derivative_bound() const override { return m2_; }
  std::optional<double> state_gradient_bound() const override { return 0.0; }

  /// d^2 H / d eps^2.
  Matrix second_field_derivative(double eps) const;

  const std::vector<DenseOperator>& terms() const { return terms_; }

 private:
  std::vector<DenseOperator> terms_;
  Eigen::Index dim_ = 0;
  Flags flags_;
  std::optional<double> m2_;
};

/// Spectral norm (largest singular value); for Hermitian input the largest |eigenvalue|.
double spectral_norm(const Matrix& m);

}  // namespace krotov
