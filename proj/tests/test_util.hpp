#pragma once

#include <cstdint>
#include <random>

#include "krotov/core.hpp"

namespace krotov::test {

inline Vector random_vector(std::mt19937_64& rng, Eigen::Index dim, double scale = 1.0) {
  std::normal_distribution<double> g;
  Vector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    v[i] = scale * Complex(g(rng), g(rng));
  }
  return v;
}

inline StateSet random_states(std::mt19937_64& rng, std::size_t n, Eigen::Index dim,
                              bool normalized = true) {
  StateSet s;
  for (std::size_t k = 0; k < n; ++k) {
    Vector v = random_vector(rng, dim);
    if (normalized) {
      v.normalize();
    }
    s.push_back(v);
  }
  return s;
}

inline Matrix random_hermitian(std::mt19937_64& rng, Eigen::Index dim, double scale = 1.0) {
  std::normal_distribution<double> g;
  Matrix a(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      a(i, j) = Complex(g(rng), g(rng));
    }
  }
  return scale * 0.5 * (a + a.adjoint());
}

inline Matrix random_unitary(std::mt19937_64& rng, Eigen::Index dim) {
  Matrix a(dim, dim);
  std::normal_distribution<double> g;
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      a(i, j) = Complex(g(rng), g(rng));
    }
  }
  Eigen::HouseholderQR<Matrix> qr(a);
  return qr.householderQ() * Matrix::Identity(dim, dim);
}

/// Central-difference Wirtinger gradient d f / d<phi_k| = (df/dx + i df/dy) / 2.
template <typename F>
StateSet fd_gradient(F&& f, const StateSet& states, double h = 1e-5) {
  StateSet grad;
  for (std::size_t k = 0; k < states.size(); ++k) {
    Vector g(states[k].size());
    for (Eigen::Index i = 0; i < states[k].size(); ++i) {
      StateSet p = states, m = states;
      p[k][i] += h;
      m[k][i] -= h;
      const double dx = (f(p) - f(m)) / (2.0 * h);
      p = states;
      m = states;
      p[k][i] += Complex(0.0, h);
      m[k][i] -= Complex(0.0, h);
      const double dy = (f(p) - f(m)) / (2.0 * h);
      g[i] = 0.5 * Complex(dx, dy);
    }
    grad.push_back(g);
  }
  return grad;
}

/// max_k |a_k - b_k| / max(max_k |b_k|, floor)
inline double relative_error(const StateSet& a, const StateSet& b, double floor = 1e-12) {
  double diff = 0.0;
  double scale = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    diff = std::max(diff, (a[k] - b[k]).norm());
    scale = std::max(scale, b[k].norm());
  }
  return diff / std::max(scale, floor);
}

}  // namespace krotov::test
