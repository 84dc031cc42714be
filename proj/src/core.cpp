#include "krotov/core.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

namespace krotov {

TimeGrid::TimeGrid(std::size_t n_steps, double final_time)
    : n_steps_(n_steps), final_time_(final_time), dt_(0.0) {
  if (n_steps == 0) {
    throw Error("TimeGrid: n_steps must be positive");
  }
  if (!(final_time > 0.0) || !std::isfinite(final_time)) {
    throw Error("TimeGrid: final time must be positive and finite");
  }
  dt_ = final_time / static_cast<double>(n_steps);
}

double TimeGrid::t(std::size_t j) const {
  if (j >= n_steps_) {
    return final_time_;
  }
  return final_time_ * (static_cast<double>(j) / static_cast<double>(n_steps_));
}

double TimeGrid::midpoint(std::size_t j) const {
  return final_time_ * ((static_cast<double>(j) + 0.5) / static_cast<double>(n_steps_));
}

double hermiticity_defect(const Matrix& m) {
  if (m.rows() != m.cols()) {
    return std::numeric_limits<double>::infinity();
  }
  if (m.size() == 0) {
    return 0.0;
  }
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

DenseOperator::DenseOperator(Matrix matrix, bool hermitian)
    : matrix_(std::move(matrix)), hermitian_(hermitian) {
  if (matrix_.rows() != matrix_.cols()) {
    throw Error("DenseOperator: matrix must be square");
  }
  if (hermitian_ && hermiticity_defect(matrix_) >= 1e-12) {
    std::ostringstream msg;
    msg << "DenseOperator: flagged Hermitian but |H - H^dagger|_max = "
        << hermiticity_defect(matrix_);
    throw Error(msg.str());
  }
}

DenseOperator DenseOperator::detect(Matrix matrix) {
  const bool herm = hermiticity_defect(matrix) < 1e-12;
  return DenseOperator(std::move(matrix), herm);
}

void ControlField::validate(const TimeGrid& grid) const {
  const auto n = static_cast<Eigen::Index>(grid.n_steps());
  if (values.size() != n || shape.size() != n || reference.size() != n) {
    throw Error("ControlField: values, shape and reference must have n_steps entries");
  }
  if (!(lambda_a > 0.0) || !std::isfinite(lambda_a)) {
    throw Error("ControlField: lambda_a must be positive");
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    if (!(shape[j] >= 0.0)) {
      throw Error("ControlField: shape must be non-negative (index " + std::to_string(j) + ")");
    }
  }
}

RealVector sin2_shape(const TimeGrid& grid) {
  RealVector s(static_cast<Eigen::Index>(grid.n_steps()));
  for (std::size_t j = 0; j < grid.n_steps(); ++j) {
    const double x = std::sin(std::numbers::pi * grid.midpoint(j) / grid.final_time());
    s[static_cast<Eigen::Index>(j)] = x * x;
  }
  return s;
}

ControlField build_guess_field(const TimeGrid& grid, double amplitude, double frequency,
                               double lambda_a) {
  if (!(amplitude >= 0.0) || !(frequency >= 0.0)) {
    throw Error("build_guess_field: amplitude and frequency must be non-negative");
  }
  ControlField field;
  field.shape = sin2_shape(grid);
  field.values.resize(field.shape.size());
  for (std::size_t j = 0; j < grid.n_steps(); ++j) {
    const auto i = static_cast<Eigen::Index>(j);
    field.values[i] = amplitude * field.shape[i] * std::cos(frequency * grid.midpoint(j));
  }
  field.reference = field.values;
  field.lambda_a = lambda_a;
  field.validate(grid);
  return field;
}

StateSet orthonormal_basis(Eigen::Index dim, const std::vector<Eigen::Index>& indices) {
  if (dim <= 0) {
    throw Error("orthonormal_basis: dimension must be positive");
  }
  if (indices.empty()) {
    throw Error("orthonormal_basis: at least one index required");
  }
  std::set<Eigen::Index> seen;
  StateSet basis;
  basis.reserve(indices.size());
  for (const auto idx : indices) {
    if (idx < 0 || idx >= dim) {
      throw Error("orthonormal_basis: index " + std::to_string(idx) + " out of range");
    }
    if (!seen.insert(idx).second) {
      throw Error("orthonormal_basis: duplicate index " + std::to_string(idx));
    }
    Vector v = Vector::Zero(dim);
    v[idx] = 1.0;
    basis.push_back(std::move(v));
  }
  return basis;
}

Complex overlap_sum(const StateSet& a, const StateSet& b) {
  if (a.size() != b.size()) {
    throw Error("overlap_sum: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()) +
                " states");
  }
  Complex sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k].size() != b[k].size()) {
      throw Error("overlap_sum: state dimensions differ");
    }
    sum += a[k].dot(b[k]);
  }
  return sum;
}

double squared_norm_sum(const StateSet& a) {
  double sum = 0.0;
  for (const auto& v : a) {
    sum += v.squaredNorm();
  }
  return sum;
}

StateSet apply_operator(const Matrix& op, const StateSet& states) {
  StateSet out;
  out.reserve(states.size());
  for (const auto& v : states) {
    out.push_back(op * v);
  }
  return out;
}

}  // namespace krotov
