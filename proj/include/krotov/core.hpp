#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace krotov {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Uniform grid t_j = j T / n, j = 0..n.
class TimeGrid {
 public:
  TimeGrid(std::size_t n_steps, double final_time);

  std::size_t n_steps() const { return n_steps_; }
  std::size_t n_points() const { return n_steps_ + 1; }
  double final_time() const { return final_time_; }
  double dt() const { return dt_; }

  /// Grid point t_j. t(n_steps()) returns final_time() exactly.
  double t(std::size_t j) const;
  /// Interval midpoint t_{j+1/2}, j < n_steps().
  double midpoint(std::size_t j) const;

  bool operator==(const TimeGrid& other) const = default;

 private:
  std::size_t n_steps_;
  double final_time_;
  double dt_;
};

/// N state vectors |phi_k>, k = 0..N-1.
using StateSet = std::vector<Vector>;

/// One StateSet per grid point; index 0 holds the initial conditions.
using Trajectory = std::vector<StateSet>;

/// Dense M x M operator with a Hermiticity flag that is verified on construction.
class DenseOperator {
 public:
  DenseOperator() = default;
  /// Throws if `hermitian` is set and the matrix is not Hermitian to 1e-12.
  explicit DenseOperator(Matrix matrix, bool hermitian = false);

  /// Sets the flag from the data: Hermitian iff max |H - H^dagger| < 1e-12.
  static DenseOperator detect(Matrix matrix);

  const Matrix& matrix() const { return matrix_; }
  bool hermitian() const { return hermitian_; }
  Eigen::Index dim() const { return matrix_.rows(); }

  Vector operator*(const Vector& v) const { return matrix_ * v; }

 private:
  Matrix matrix_;
  bool hermitian_ = false;
};

/// Largest absolute entry of H - H^dagger.
double hermiticity_defect(const Matrix& m);

/// Real control sampled at interval midpoints, with shape S(t), reference
/// field and weight lambda_a.
struct ControlField {
  RealVector values;
  RealVector shape;
  RealVector reference;
  double lambda_a = 1.0;

  std::size_t size() const { return static_cast<std::size_t>(values.size()); }

  /// Throws if sizes disagree with the grid, S < 0 anywhere or lambda_a <= 0.
  void validate(const TimeGrid& grid) const;
};

/// s(t) = sin^2(pi t / T) sampled at the interval midpoints.
RealVector sin2_shape(const TimeGrid& grid);

/// Guess field eps0 * sin^2(pi t / T) * cos(Omega t) at the interval midpoints.
/// Shape defaults to sin^2, reference to the guess itself.
ControlField build_guess_field(const TimeGrid& grid, double amplitude, double frequency,
                               double lambda_a = 1.0);

/// Canonical unit vectors |i> of dimension `dim` for each index in `indices`.
StateSet orthonormal_basis(Eigen::Index dim, const std::vector<Eigen::Index>& indices);

/// Sum_k <a_k|b_k>.
Complex overlap_sum(const StateSet& a, const StateSet& b);

/// Sum_k ||a_k||^2.
double squared_norm_sum(const StateSet& a);

/// Applies `op` to every state.
StateSet apply_operator(const Matrix& op, const StateSet& states);

}  // namespace krotov
