#include "krotov/propagator.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

namespace krotov {
namespace {

constexpr double kCoeffTol = 1e-17;
// Quadrature-computed coefficients bottom out near round-off.
constexpr double kTransformTol = 1e-15;
constexpr std::size_t kMaxTerms = 200000;

// phi_p(z) = sum_k z^k / (k + p)!, evaluated by series near zero.
Complex phi_function(int p, Complex z) {
  if (std::abs(z) < 0.5) {
    Complex term = 1.0;
    double fact = 1.0;
    for (int i = 2; i <= p; ++i) {
      fact *= i;
    }
    term /= fact;
    Complex sum = term;
    for (int k = 1; k < 40; ++k) {
      term *= z / static_cast<double>(k + p);
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) {
        break;
      }
    }
    return sum;
  }
  const Complex ez = std::exp(z);
  if (p == 1) {
    return (ez - 1.0) / z;
  }
  return (ez - 1.0 - z) / (z * z);
}

// Chebyshev coefficients of x -> f(x) on [-1, 1] via Gauss-Chebyshev
// quadrature, truncated once they fall below tolerance past the index `alpha`.
template <typename F>
std::vector<Complex> cosine_transform_coefficients(F&& f, double alpha, std::size_t step) {
  std::size_t nodes = 2 * (static_cast<std::size_t>(std::ceil(alpha)) + 32);
  while (nodes <= kMaxTerms) {
    std::vector<Complex> samples(nodes);
    std::vector<double> theta(nodes);
    for (std::size_t m = 0; m < nodes; ++m) {
      theta[m] = std::numbers::pi * (static_cast<double>(m) + 0.5) / static_cast<double>(nodes);
      samples[m] = f(std::cos(theta[m]));
    }
    std::vector<Complex> coeffs;
    double largest = 0.0;
    int small_run = 0;
    for (std::size_t n = 0; n < nodes; ++n) {
      Complex a = 0.0;
      for (std::size_t m = 0; m < nodes; ++m) {
        a += samples[m] * std::cos(static_cast<double>(n) * theta[m]);
      }
      a *= (n == 0 ? 1.0 : 2.0) / static_cast<double>(nodes);
      coeffs.push_back(a);
      largest = std::max(largest, std::abs(a));
      if (static_cast<double>(n) > alpha && std::abs(a) <= kTransformTol * std::max(largest, 1.0)) {
        if (++small_run == 2) {
          return coeffs;
        }
      } else {
        small_run = 0;
      }
    }
    nodes *= 2;
  }
  throw PropagationError("Chebyshev series for phi-function did not converge", step);
}

// (H - center) / radius, kept real when H has no imaginary part.
struct ScaledOperator {
  Matrix complex;
  Eigen::MatrixXd real;
  bool is_real = false;

  ScaledOperator(const Matrix& h, double center, double radius) {
    is_real = h.imag().cwiseAbs().maxCoeff() == 0.0;
    if (is_real) {
      real = h.real();
      real.diagonal().array() -= center;
      real /= radius;
    } else {
      complex = h;
      complex.diagonal().array() -= center;
      complex /= radius;
    }
  }

  void apply(const Vector& in, Vector& out) const {
    if (is_real) {
      out.real().noalias() = real * in.real();
      out.imag().noalias() = real * in.imag();
    } else {
      out.noalias() = complex * in;
    }
  }
};

// sum_n a_n T_n(hn) v
Vector chebyshev_sum(const ScaledOperator& hn, const std::vector<Complex>& coeffs,
                     const Vector& v) {
  Vector prev = v;
  Vector result = coeffs[0] * prev;
  if (coeffs.size() == 1) {
    return result;
  }
  Vector curr(v.size());
  hn.apply(v, curr);
  result += coeffs[1] * curr;
  Vector next(v.size());
  for (std::size_t n = 2; n < coeffs.size(); ++n) {
    hn.apply(curr, next);
    next = 2.0 * next - prev;
    result += coeffs[n] * next;
    prev.swap(curr);
    curr.swap(next);
  }
  return result;
}

StepResult chebyshev_step(const DenseOperator& h, double dt, const Vector& state,
                          const std::optional<StepSource>& source, double hbar,
                          std::size_t step) {
  const auto [lower, upper] = gershgorin_bounds(h.matrix());
  const double center = 0.5 * (upper + lower);
  const double radius = std::max(0.5 * (upper - lower), 1e-12);
  const double alpha = radius * dt / hbar;
  if (!std::isfinite(alpha)) {
    throw PropagationError("non-finite spectral range in Chebyshev propagator", step);
  }
  const ScaledOperator hn(h.matrix(), center, radius);

  // exp(-i alpha x) = J_0(alpha) + 2 sum_n (-i)^n J_n(alpha) T_n(x)
  std::vector<Complex> exp_coeffs;
  const Complex minus_i(0.0, -1.0);
  Complex phase = 1.0;
  int small_run = 0;
  for (std::size_t n = 0;; ++n) {
    if (n > kMaxTerms) {
      throw PropagationError("Chebyshev series for the exponential did not converge", step);
    }
    const double jn = std::cyl_bessel_j(static_cast<double>(n), alpha);
    exp_coeffs.push_back((n == 0 ? 1.0 : 2.0) * phase * jn);
    phase *= minus_i;
    if (static_cast<double>(n) > alpha && std::abs(jn) < kCoeffTol) {
      if (++small_run == 2) {
        break;
      }
    } else {
      small_run = 0;
    }
  }
  const Complex shift = std::exp(Complex(0.0, -center * dt / hbar));

  StepResult out;
  out.path = PropagatorPath::chebyshev;
  out.terms = exp_coeffs.size();
  out.state = shift * chebyshev_sum(hn, exp_coeffs, state);

  if (source) {
    auto z_of = [&](double x) { return Complex(0.0, -(center + radius * x) * dt / hbar); };
    const auto c1 = cosine_transform_coefficients(
        [&](double x) { return phi_function(1, z_of(x)); }, alpha, step);
    out.state += dt * chebyshev_sum(hn, c1, source->begin);
    out.terms = std::max(out.terms, c1.size());
    if (!source->is_constant()) {
      const auto c2 = cosine_transform_coefficients(
          [&](double x) { return phi_function(2, z_of(x)); }, alpha, step);
      out.state += dt * chebyshev_sum(hn, c2, source->end - source->begin);
      out.terms = std::max(out.terms, c2.size());
    }
  }
  return out;
}

StepResult dense_step(const DenseOperator& h, double dt, const Vector& state,
                      const std::optional<StepSource>& source, double hbar) {
  const Eigen::Index m = h.dim();
  const Complex factor(0.0, -dt / hbar);
  StepResult out;
  out.path = PropagatorPath::dense_exponential;
  if (!source) {
    const Matrix u = (factor * h.matrix()).exp();
    out.state = u * state;
    return out;
  }
  // Augmented generator on [phi; tau/dt; 1] with the linear source folded in.
  Matrix aug = Matrix::Zero(m + 2, m + 2);
  aug.topLeftCorner(m, m) = factor * h.matrix();
  aug.block(0, m, m, 1) = dt * (source->end - source->begin);
  aug.block(0, m + 1, m, 1) = dt * source->begin;
  aug(m, m + 1) = 1.0;
  Vector init = Vector::Zero(m + 2);
  init.head(m) = state;
  init[m + 1] = 1.0;
  const Matrix u = aug.exp();
  out.state = (u * init).head(m);
  return out;
}

}  // namespace

const char* to_string(PropagatorPath path) {
  switch (path) {
    case PropagatorPath::chebyshev:
      return "chebyshev";
    case PropagatorPath::dense_exponential:
      return "dense_exponential";
  }
  return "unknown";
}

std::pair<double, double> gershgorin_bounds(const Matrix& h) {
  double lower = std::numeric_limits<double>::infinity();
  double upper = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    const double center = h(i, i).real();
    const double radius = h.row(i).cwiseAbs().sum() - std::abs(h(i, i));
    lower = std::min(lower, center - radius);
    upper = std::max(upper, center + radius);
  }
  return {lower, upper};
}

StepResult step_propagator(const DenseOperator& h, double dt, const Vector& state,
                           const std::optional<StepSource>& source, double hbar,
                           std::size_t step_index) {
  if (!(dt > 0.0)) {
    throw Error("step_propagator: dt must be positive");
  }
  if (state.size() != h.dim()) {
    throw Error("step_propagator: state and operator dimensions differ");
  }
  if (source && (source->begin.size() != h.dim() || source->end.size() != h.dim())) {
    throw Error("step_propagator: source and operator dimensions differ");
  }
  if (h.hermitian()) {
    return chebyshev_step(h, dt, state, source, hbar, step_index);
  }
  return dense_step(h, dt, state, source, hbar);
}

Matrix dense_propagator(const Matrix& h, double dt, double hbar) {
  return (Complex(0.0, -dt / hbar) * h).exp();
}

}  // namespace krotov
