#include "krotov/hamiltonian.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace krotov {

Vector Hamiltonian::costate_nonlinear_term(std::size_t k, const StateSet& states,
                                           const StateSet& /*costates*/, double /*eps*/,
                                           double /*t*/, double /*hbar*/) const {
  if (flags().linear_in_state) {
    return Vector::Zero(states.at(k).size());
  }
  throw Error("Hamiltonian: state-dependent generator does not implement costate_nonlinear_term");
}

Vector Hamiltonian::apply(const Vector& state, double eps, double t) const {
  return evaluate(eps, t, &state) * state;
}

Vector Hamiltonian::apply_field_derivative(const Vector& state, double eps, double t) const {
  return field_derivative(eps, t, &state) * state;
}

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) {
    return 0.0;
  }
  if (hermiticity_defect(m) < 1e-12) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

PolynomialHamiltonian::PolynomialHamiltonian(std::vector<DenseOperator> terms,
                                             std::optional<double> field_bound)
    : terms_(std::move(terms)) {
  if (terms_.empty()) {
    throw Error("PolynomialHamiltonian: at least one term required");
  }
  dim_ = terms_.front().dim();
  bool herm = true;
  for (const auto& term : terms_) {
    if (term.dim() != dim_) {
      throw Error("PolynomialHamiltonian: all terms must have the same dimension");
    }
    herm = herm && term.hermitian();
  }
  // Trailing zero terms do not count towards the degree.
  std::size_t degree = 0;
  for (std::size_t p = 0; p < terms_.size(); ++p) {
    if (terms_[p].matrix().cwiseAbs().maxCoeff() > 0.0) {
      degree = p;
    }
  }
  flags_.hermitian = herm;
  flags_.linear_in_field = degree <= 1;
  flags_.linear_in_state = true;

  if (degree <= 1) {
    m2_ = 0.0;
  } else if (degree == 2) {
    m2_ = 2.0 * spectral_norm(terms_[2].matrix());
  } else if (field_bound) {
    const double emax = std::abs(*field_bound);
    double bound = 0.0;
    for (std::size_t p = 2; p < terms_.size(); ++p) {
      const auto pd = static_cast<double>(p);
      bound += pd * (pd - 1.0) * std::pow(emax, pd - 2.0) * spectral_norm(terms_[p].matrix());
    }
    m2_ = bound;
  }
}

DenseOperator PolynomialHamiltonian::evaluate(double eps, double /*t*/,
                                              const Vector* /*state*/) const {
  Matrix h = terms_.front().matrix();
  double power = 1.0;
  for (std::size_t p = 1; p < terms_.size(); ++p) {
    power *= eps;
    h += power * terms_[p].matrix();
  }
  if (flags_.hermitian) {
    // Symmetrize to remove round-off asymmetry from the weighted sum.
    Matrix sym = 0.5 * (h + h.adjoint());
    return DenseOperator(std::move(sym), true);
  }
  return DenseOperator(std::move(h), false);
}

Matrix PolynomialHamiltonian::field_derivative(double eps, double /*t*/,
                                               const Vector* /*state*/) const {
  Matrix d = Matrix::Zero(dim_, dim_);
  double power = 1.0;
  for (std::size_t p = 1; p < terms_.size(); ++p) {
    d += static_cast<double>(p) * power * terms_[p].matrix();
    power *= eps;
  }
  return d;
}

Matrix PolynomialHamiltonian::second_field_derivative(double eps) const {
  Matrix d = Matrix::Zero(dim_, dim_);
  double power = 1.0;
  for (std::size_t p = 2; p < terms_.size(); ++p) {
    const auto pd = static_cast<double>(p);
    d += pd * (pd - 1.0) * power * terms_[p].matrix();
    power *= eps;
  }
  return d;
}

}  // namespace krotov
