#include "krotov/models.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include "krotov/io.hpp"

namespace krotov {

Problem assemble(const ModelParts& parts, std::shared_ptr<const FinalTimeFunctional> functional,
                 const TimeGrid& grid, ControlField guess) {
  const std::size_t n = parts.initial.size();
  RunningCost cost = (parts.running_operator && parts.lambda_b != 0.0)
                         ? RunningCost(parts.lambda_b, *parts.running_operator,
                                       grid.final_time(), n)
                         : RunningCost(grid.final_time(), n);
  Problem p{parts.name,  parts.hamiltonian,  parts.initial, parts.targets,
            std::move(functional), std::move(cost), grid, std::move(guess), parts.hbar};
  p.validate();
  return p;
}

Matrix pauli(int i) {
  Matrix m = Matrix::Zero(2, 2);
  const Complex I(0.0, 1.0);
  switch (i) {
    case 0:
      m(0, 0) = 1.0;
      m(1, 1) = 1.0;
      break;
    case 1:
      m(0, 1) = 1.0;
      m(1, 0) = 1.0;
      break;
    case 2:
      m(0, 1) = -I;
      m(1, 0) = I;
      break;
    case 3:
      m(0, 0) = 1.0;
      m(1, 1) = -1.0;
      break;
    default:
      throw Error("pauli: index must be 0..3");
  }
  return m;
}

Matrix hadamard() {
  Matrix h(2, 2);
  h << 1.0, 1.0, 1.0, -1.0;
  return h / std::sqrt(2.0);
}

Matrix b_gate() {
  const double c = std::cos(std::numbers::pi / 8.0);
  const double s = std::sin(std::numbers::pi / 8.0);
  const Complex I(0.0, 1.0);
  Matrix b = Matrix::Zero(4, 4);
  b(0, 0) = c;
  b(0, 3) = I * s;
  b(1, 1) = s;
  b(1, 2) = I * c;
  b(2, 1) = I * c;
  b(2, 2) = s;
  b(3, 0) = I * s;
  b(3, 3) = c;
  return b;
}

ModelParts make_tls(double omega, TlsTarget target, std::optional<Matrix> drive) {
  if (!std::isfinite(omega)) {
    throw Error("make_tls: omega must be finite");
  }
  const Matrix v = drive ? *drive : pauli(1);
  if (v.rows() != 2 || v.cols() != 2) {
    throw Error("make_tls: drive must be 2 x 2");
  }
  auto h = std::make_shared<PolynomialHamiltonian>(std::vector<DenseOperator>{
      DenseOperator(Matrix(0.5 * omega * pauli(3)), true), DenseOperator::detect(v)});
  ModelParts parts;
  parts.hamiltonian = h;
  if (target == TlsTarget::state_transfer) {
    parts.name = "tls_state_transfer";
    parts.initial = orthonormal_basis(2, {0});
    parts.targets = orthonormal_basis(2, {1});
  } else {
    parts.name = "tls_hadamard";
    parts.initial = orthonormal_basis(2, {0, 1});
    parts.targets = apply_operator(hadamard(), parts.initial);
  }
  return parts;
}

ModelParts make_lambda(const LambdaParams& params) {
  if (params.energies.size() != 3) {
    throw Error("make_lambda: exactly three level energies required");
  }
  if (params.forbidden_index < 0 || params.forbidden_index > 2) {
    throw Error("make_lambda: forbidden_index must be 0, 1 or 2");
  }
  Matrix h0 = Matrix::Zero(3, 3);
  h0.diagonal() = params.energies.cast<Complex>();
  Matrix h1 = Matrix::Zero(3, 3);
  h1(0, 1) = h1(1, 0) = params.mu01;
  h1(1, 2) = h1(2, 1) = params.mu12;

  std::vector<Eigen::Index> allowed;
  for (Eigen::Index i = 0; i < 3; ++i) {
    if (i != params.forbidden_index) {
      allowed.push_back(i);
    }
  }
  Matrix p_forbid = Matrix::Zero(3, 3);
  p_forbid(params.forbidden_index, params.forbidden_index) = 1.0;
  const Matrix p_allow = Matrix::Identity(3, 3) - p_forbid;

  ModelParts parts;
  parts.name = "lambda";
  parts.hamiltonian = std::make_shared<PolynomialHamiltonian>(
      std::vector<DenseOperator>{DenseOperator(h0, true), DenseOperator(h1, true)});
  parts.initial = orthonormal_basis(3, {allowed[0]});
  parts.targets = orthonormal_basis(3, {allowed[1]});
  parts.lambda_b = params.lambda_b;

  bool forbidden = params.lambda_b > 0.0;
  if (params.choice == SubspaceChoice::allowed) {
    forbidden = false;
  } else if (params.choice == SubspaceChoice::forbidden) {
    forbidden = true;
  }
  if (params.lambda_b != 0.0) {
    parts.running_operator = DenseOperator(forbidden ? p_forbid : p_allow, true);
    // P_forbid with lambda_b > 0 gives C = -lambda_b / (N T) < 0.
    parts.second_order_required = forbidden && params.lambda_b > 0.0;
  }
  return parts;
}

Matrix spin_coupling(const Eigen::Matrix4d& a) {
  Matrix k = Matrix::Zero(4, 4);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (a(i, j) == 0.0) {
        continue;
      }
      k += a(i, j) * Matrix(Eigen::kroneckerProduct(pauli(i), pauli(j)));
    }
  }
  return k;
}

ModelParts make_spin_spin(const Eigen::Matrix4d& a, double hbar, SpinTarget target) {
  if (!(hbar > 0.0)) {
    throw Error("make_spin_spin: hbar must be positive");
  }
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 || !a.allFinite()) {
    throw Error("make_spin_spin: coefficient tensor must be real symmetric");
  }
  const Matrix k = spin_coupling(a);
  ModelParts parts;
  parts.hbar = hbar;
  parts.hamiltonian = std::make_shared<PolynomialHamiltonian>(std::vector<DenseOperator>{
      DenseOperator(Matrix::Zero(4, 4), true), DenseOperator(Matrix::Zero(4, 4), true),
      DenseOperator(Matrix(hbar / 8.0 * k), true)});
  if (target == SpinTarget::state_transfer) {
    parts.name = "spin_spin_transfer";
    parts.initial = orthonormal_basis(4, {1});
    parts.targets = orthonormal_basis(4, {2});
  } else {
    parts.name = "spin_spin_b_gate";
    parts.initial = orthonormal_basis(4, {0, 1, 2, 3});
    parts.targets = apply_operator(b_gate(), parts.initial);
  }
  return parts;
}

Matrix fourier_kinetic(std::size_t n, double length, double mass, double hbar) {
  if (n < 2 || !(length > 0.0) || !(mass > 0.0)) {
    throw Error("fourier_kinetic: need n >= 2, positive length and mass");
  }
  const auto nn = static_cast<Eigen::Index>(n);
  const double dx = length / static_cast<double>(n);
  // Momenta in FFT order: 0, 1, ..., n/2 - 1, -n/2, ..., -1 (times 2 pi / L).
  RealVector k(nn);
  for (Eigen::Index m = 0; m < nn; ++m) {
    const Eigen::Index shifted = m < nn / 2 ? m : m - nn;
    k[m] = 2.0 * std::numbers::pi * static_cast<double>(shifted) / length;
  }
  Eigen::MatrixXd t(nn, nn);
  for (Eigen::Index i = 0; i < nn; ++i) {
    for (Eigen::Index j = 0; j < nn; ++j) {
      double sum = 0.0;
      for (Eigen::Index m = 0; m < nn; ++m) {
        sum += k[m] * k[m] * std::cos(k[m] * dx * static_cast<double>(i - j));
      }
      t(i, j) = hbar * hbar / (2.0 * mass) * sum / static_cast<double>(n);
    }
  }
  t = 0.5 * (t + t.transpose()).eval();
  return t.cast<Complex>();
}

RealVector fourier_points(std::size_t n, double x_min, double length) {
  RealVector x(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    x[static_cast<Eigen::Index>(i)] =
        x_min + length * static_cast<double>(i) / static_cast<double>(n);
  }
  return x;
}

ModelParts make_fourier_grid(const FourierGridParams& params) {
  const std::size_t surfaces = params.potentials.size();
  if (surfaces == 0) {
    throw Error("make_fourier_grid: at least one potential surface required");
  }
  const auto n_r = static_cast<std::size_t>(params.potentials.front().size());
  if (n_r < 2 || (n_r & (n_r - 1)) != 0) {
    throw Error("make_fourier_grid: N_R must be a power of two, got " + std::to_string(n_r));
  }
  for (const auto& v : params.potentials) {
    if (static_cast<std::size_t>(v.size()) != n_r) {
      throw Error("make_fourier_grid: all surfaces need N_R samples");
    }
  }
  const auto nr = static_cast<Eigen::Index>(n_r);
  const auto dim = static_cast<Eigen::Index>(surfaces * n_r);
  const Matrix t = fourier_kinetic(n_r, params.length, params.mass, params.hbar);

  Matrix h0 = Matrix::Zero(dim, dim);
  std::vector<Eigen::SelfAdjointEigenSolver<Matrix>> solvers;
  for (std::size_t s = 0; s < surfaces; ++s) {
    Matrix hs = t;
    hs.diagonal() += params.potentials[s].cast<Complex>();
    h0.block(static_cast<Eigen::Index>(s) * nr, static_cast<Eigen::Index>(s) * nr, nr, nr) = hs;
    solvers.emplace_back(hs);
  }
  Matrix h1 = Matrix::Zero(dim, dim);
  for (std::size_t s = 0; s + 1 < surfaces; ++s) {
    const auto a = static_cast<Eigen::Index>(s) * nr;
    const auto b = a + nr;
    h1.block(a, b, nr, nr) = params.mu * Matrix::Identity(nr, nr);
    h1.block(b, a, nr, nr) = params.mu * Matrix::Identity(nr, nr);
  }

  auto eigenstate = [&](std::pair<int, int> which, const char* role) {
    const auto [surface, level] = which;
    if (surface < 0 || static_cast<std::size_t>(surface) >= surfaces || level < 0 ||
        level >= nr) {
      throw Error(std::string("make_fourier_grid: ") + role + " state out of range");
    }
    Vector v = Vector::Zero(dim);
    v.segment(surface * nr, nr) = solvers[static_cast<std::size_t>(surface)].eigenvectors().col(level);
    return v;
  };

  ModelParts parts;
  parts.name = "fourier_grid";
  parts.hbar = params.hbar;
  parts.hamiltonian = std::make_shared<PolynomialHamiltonian>(
      std::vector<DenseOperator>{DenseOperator(h0, true), DenseOperator(h1, true)});
  parts.initial = {eigenstate(params.initial, "initial")};
  parts.targets = {eigenstate(params.target, "target")};
  return parts;
}

FourierGridParams read_potential_file(const std::string& path) {
  const auto rows = io::read_table_file(path);
  if (rows.size() < 2 || rows.front().size() < 2) {
    throw Error("potential file '" + path + "': need columns x V_1 ... and at least two rows");
  }
  const std::size_t n = rows.size();
  const std::size_t surfaces = rows.front().size() - 1;
  const double dx = rows[1][0] - rows[0][0];
  if (!(dx > 0.0)) {
    throw Error("potential file '" + path + "': x must increase");
  }
  FourierGridParams p;
  p.potentials.assign(surfaces, RealVector(static_cast<Eigen::Index>(n)));
  for (std::size_t i = 0; i < n; ++i) {
    const double expected = rows[0][0] + dx * static_cast<double>(i);
    if (std::abs(rows[i][0] - expected) > 1e-9 * std::max(1.0, std::abs(expected))) {
      throw Error("potential file '" + path + "': x not uniformly spaced at row " +
                  std::to_string(i));
    }
    for (std::size_t s = 0; s < surfaces; ++s) {
      p.potentials[s][static_cast<Eigen::Index>(i)] = rows[i][s + 1];
    }
  }
  p.x_min = rows[0][0];
  p.length = dx * static_cast<double>(n);
  return p;
}

}  // namespace krotov
