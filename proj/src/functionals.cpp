#include "krotov/functionals.hpp"

#include <cmath>
#include <random>

#include "krotov/propagator.hpp"

namespace krotov {

Complex trace_overlap(const StateSet& states, const StateSet& targets) {
  return overlap_sum(targets, states);
}

StateSet target_states(const DenseOperator& o, const StateSet& basis) {
  for (const auto& v : basis) {
    if (v.size() != o.dim()) {
      throw Error("target_states: basis and operator dimensions differ");
    }
  }
  return apply_operator(o.matrix(), basis);
}

FinalTimeFunctional::FinalTimeFunctional(double lambda0) : lambda0_(lambda0) {
  if (!(lambda0 > 0.0) || !std::isfinite(lambda0)) {
    throw Error("final-time functional: lambda_0 must be positive");
  }
}

void FinalTimeFunctional::check_sizes(const StateSet& states, const StateSet& targets) {
  if (states.empty() || states.size() != targets.size()) {
    throw Error("final-time functional: " + std::to_string(states.size()) + " states but " +
                std::to_string(targets.size()) + " targets");
  }
  for (std::size_t k = 0; k < states.size(); ++k) {
    if (states[k].size() != targets[k].size()) {
      throw Error("final-time functional: state and target dimensions differ");
    }
  }
}

namespace {

double subspace_size(const StateSet& states) { return static_cast<double>(states.size()); }

StateSet scaled_targets(const StateSet& targets, Complex factor) {
  StateSet out;
  out.reserve(targets.size());
  for (const auto& t : targets) {
    out.push_back(factor * t);
  }
  return out;
}

void check_power(int p) {
  if (p < 1) {
    throw Error("jt_power: exponent p must be >= 1");
  }
}

}  // namespace

double jt_sm(const StateSet& states, const StateSet& targets, double lambda0) {
  const double n = subspace_size(states);
  return -lambda0 / (n * n) * std::norm(trace_overlap(states, targets));
}

StateSet jt_sm_costate(const StateSet& states, const StateSet& targets, double lambda0) {
  const double n = subspace_size(states);
  return scaled_targets(targets, lambda0 / (n * n) * trace_overlap(states, targets));
}

double jt_re(const StateSet& states, const StateSet& targets, double lambda0) {
  return -lambda0 / subspace_size(states) * trace_overlap(states, targets).real();
}

StateSet jt_re_costate(const StateSet& states, const StateSet& targets, double lambda0) {
  return scaled_targets(targets, lambda0 / (2.0 * subspace_size(states)));
}

double jt_power(const StateSet& states, const StateSet& targets, double lambda0, int p) {
  check_power(p);
  const double n = subspace_size(states);
  const double u = std::norm(trace_overlap(states, targets)) / (n * n);
  return -lambda0 * std::pow(u, p);
}

StateSet jt_power_costate(const StateSet& states, const StateSet& targets, double lambda0, int p) {
  check_power(p);
  const double n = subspace_size(states);
  const Complex tau = trace_overlap(states, targets);
  const double u = std::norm(tau) / (n * n);
  const double factor = lambda0 * p / (n * n) * std::pow(u, p - 1);
  return scaled_targets(targets, factor * tau);
}

double JtSm::value(const StateSet& s, const StateSet& t) const {
  check_sizes(s, t);
  return jt_sm(s, t, lambda0());
}

StateSet JtSm::costate_boundary(const StateSet& s, const StateSet& t) const {
  check_sizes(s, t);
  return jt_sm_costate(s, t, lambda0());
}

double JtRe::value(const StateSet& s, const StateSet& t) const {
  check_sizes(s, t);
  return jt_re(s, t, lambda0());
}

StateSet JtRe::costate_boundary(const StateSet& s, const StateSet& t) const {
  check_sizes(s, t);
  return jt_re_costate(s, t, lambda0());
}

JtPower::JtPower(double lambda0, int p, CurvatureSampling sampling)
    : FinalTimeFunctional(lambda0), p_(p), sampling_(sampling) {
  check_power(p);
  if (sampling_.samples == 0 || !(sampling_.safety_factor > 0.0)) {
    throw Error("jt_power: curvature sampling needs samples > 0 and a positive safety factor");
  }
}

double JtPower::value(const StateSet& s, const StateSet& t) const {
  check_sizes(s, t);
  return jt_power(s, t, lambda0(), p_);
}

StateSet JtPower::costate_boundary(const StateSet& s, const StateSet& t) const {
  check_sizes(s, t);
  return jt_power_costate(s, t, lambda0(), p_);
}

double JtPower::curvature_bound(const StateSet& targets) const {
  if (sampling_.override_value) {
    return *sampling_.override_value;
  }
  if (targets.empty()) {
    throw Error("jt_power: curvature bound needs the target states");
  }
  const std::size_t n_states = targets.size();
  const auto dim = targets.front().size();
  const std::size_t n_real = 2 * n_states * static_cast<std::size_t>(dim);
  const double radius = 2.0 * std::sqrt(static_cast<double>(n_states));
  constexpr double h = 1e-4;

  // Real coordinate a maps to state a / (2 dim), component (a / 2) % dim, real or imaginary part.
  auto perturb = [&](StateSet& s, std::size_t a, double delta) {
    const std::size_t k = a / (2 * static_cast<std::size_t>(dim));
    const auto i = static_cast<Eigen::Index>((a / 2) % static_cast<std::size_t>(dim));
    s[k][i] += (a % 2 == 0) ? Complex(delta, 0.0) : Complex(0.0, delta);
  };
  auto f = [&](const StateSet& s) { return jt_power(s, targets, lambda0(), p_); };

  std::mt19937_64 rng(sampling_.seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif;
  double best = -std::numeric_limits<double>::infinity();
  StateSet point(n_states, Vector::Zero(dim));
  for (std::size_t sample = 0; sample < sampling_.samples; ++sample) {
    std::vector<double> x(n_real);
    double norm = 0.0;
    for (auto& xi : x) {
      xi = gauss(rng);
      norm += xi * xi;
    }
    const double r = radius * std::pow(unif(rng), 1.0 / static_cast<double>(n_real));
    for (auto& xi : x) {
      xi *= r / std::sqrt(norm);
    }
    for (std::size_t a = 0; a < n_real; ++a) {
      point[a / (2 * static_cast<std::size_t>(dim))]
           [static_cast<Eigen::Index>((a / 2) % static_cast<std::size_t>(dim))] = 0.0;
    }
    for (std::size_t a = 0; a < n_real; ++a) {
      perturb(point, a, x[a]);
    }
    const double f0 = f(point);
    for (std::size_t a = 0; a < n_real; ++a) {
      StateSet pp = point;
      StateSet mm = point;
      perturb(pp, a, h);
      perturb(mm, a, -h);
      best = std::max(best, (f(pp) - 2.0 * f0 + f(mm)) / (h * h));
      for (std::size_t b = a + 1; b < n_real; ++b) {
        StateSet p1 = pp, p2 = pp, m1 = mm, m2 = mm;
        perturb(p1, b, h);
        perturb(p2, b, -h);
        perturb(m1, b, h);
        perturb(m2, b, -h);
        best = std::max(best, (f(p1) - f(p2) - f(m1) + f(m2)) / (4.0 * h * h));
      }
    }
  }
  return sampling_.safety_factor * best;
}

double g_a_integral(const ControlField& field, const TimeGrid& grid) {
  field.validate(grid);
  double sum = 0.0;
  for (Eigen::Index j = 0; j < field.values.size(); ++j) {
    const double diff = field.values[j] - field.reference[j];
    if (diff == 0.0) {
      continue;
    }
    if (field.shape[j] == 0.0) {
      throw Error("g_a_integral: shape S vanishes at index " + std::to_string(j) +
                  " where the field differs from the reference");
    }
    sum += field.lambda_a / field.shape[j] * diff * diff;
  }
  return sum * grid.dt();
}

RealVector g_b_samples(const Trajectory& forward, const RunningCost& cost, const TimeGrid& grid) {
  if (forward.size() != grid.n_points()) {
    throw Error("g_b: trajectory length does not match the grid");
  }
  RealVector g(static_cast<Eigen::Index>(grid.n_points()));
  for (std::size_t j = 0; j < grid.n_points(); ++j) {
    g[static_cast<Eigen::Index>(j)] = cost.value(forward[j], grid.t(j));
  }
  return g;
}

double g_b_integral(const Trajectory& forward, const RunningCost& cost, const TimeGrid& grid) {
  if (!cost.active()) {
    return 0.0;
  }
  const RealVector g = g_b_samples(forward, cost, grid);
  double sum = 0.0;
  for (Eigen::Index j = 0; j + 1 < g.size(); ++j) {
    sum += 0.5 * (g[j] + g[j + 1]);
  }
  return sum * grid.dt();
}

std::pair<double, double> extreme_eigenvalues(const Matrix& hermitian) {
  const Eigen::Index n = hermitian.rows();
  if (n == 0) {
    throw Error("extreme_eigenvalues: empty matrix");
  }
  const auto [lo, hi] = gershgorin_bounds(hermitian);
  const double shift = std::max(std::abs(lo), std::abs(hi)) + 1.0;

  // Dominant eigenvalue of sign * A + shift * 1, which is positive definite.
  auto dominant = [&](double sign) {
    Matrix a = sign * hermitian;
    a.diagonal().array() += shift;
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      v[i] = Complex(1.0 + 0.61803398875 * static_cast<double>(i % 7),
                     0.41421356237 * static_cast<double>(i % 5));
    }
    v.normalize();
    double rq = v.dot(a * v).real();
    for (int it = 0; it < 100000; ++it) {
      Vector w = a * v;
      const double wn = w.norm();
      if (wn == 0.0) {
        break;
      }
      v = w / wn;
      const double next = v.dot(a * v).real();
      const bool converged = std::abs(next - rq) <= 1e-15 * std::max(1.0, std::abs(next));
      rq = next;
      if (converged && it > 2) {
        break;
      }
    }
    return sign * (rq - shift);
  };
  const double largest = dominant(1.0);
  const double smallest = dominant(-1.0);
  return {smallest, largest};
}

double g_b_curvature_bound(const RunningCost& cost, const TimeGrid& grid) {
  if (!cost.active()) {
    return 0.0;
  }
  const double scale = cost.lambda_b() / (cost.final_time() * static_cast<double>(cost.n_states()));
  auto bound_at = [&](double t) {
    const auto [lo, hi] = extreme_eigenvalues(cost.operator_at(t).matrix());
    return scale >= 0.0 ? scale * hi : scale * lo;
  };
  if (!cost.time_dependent()) {
    return bound_at(0.0);
  }
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < grid.n_points(); ++j) {
    best = std::max(best, bound_at(grid.t(j)));
  }
  return best;
}

}  // namespace krotov
