#pragma once

#include <cstddef>
#include <optional>

#include "krotov/core.hpp"

namespace krotov {

/// Raised when the polynomial expansion does not converge.
class PropagationError : public Error {
 public:
  PropagationError(const std::string& what, std::size_t step)
      : Error(what + " (step " + std::to_string(step) + ")"), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

enum class PropagatorPath { chebyshev, dense_exponential };

const char* to_string(PropagatorPath path);

/// Inhomogeneity s(tau) of d/dt phi = -(i/hbar) H phi + s(tau) over one step,
/// linear between `begin` (tau = 0) and `end` (tau = dt).
struct StepSource {
  Vector begin;
  Vector end;

  static StepSource constant(const Vector& s) { return {s, s}; }
  bool is_constant() const { return begin == end; }
};

struct StepResult {
  Vector state;
  PropagatorPath path = PropagatorPath::chebyshev;
  std::size_t terms = 0;  ///< expansion order used (0 on the dense path)
};

/// Spectral enclosure [lower, upper] of a Hermitian matrix (Gershgorin discs).
std::pair<double, double> gershgorin_bounds(const Matrix& h);

/// One step of d/dt phi = -(i/hbar) H phi + s(tau) with H held constant:
///   phi(dt) = exp(Z) phi + dt phi1(Z) s_begin + dt phi2(Z) (s_end - s_begin),  Z = -i H dt / hbar,
/// with phi1(z) = (e^z - 1)/z and phi2(z) = (e^z - 1 - z)/z^2.
///
/// Hermitian operators use a Chebyshev expansion (Bessel coefficients for the
/// exponential, cosine-transform coefficients for phi1/phi2). Other operators
/// fall back to a scaling-and-squaring exponential of the augmented matrix.
/// `step_index` only labels PropagationError.
StepResult step_propagator(const DenseOperator& h, double dt, const Vector& state,
                           const std::optional<StepSource>& source = std::nullopt,
                           double hbar = 1.0, std::size_t step_index = 0);

/// exp(-i H dt / hbar) on the dense path, exposed for cross-checks.
Matrix dense_propagator(const Matrix& h, double dt, double hbar = 1.0);

}  // namespace krotov
