#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "krotov/core.hpp"
#include "krotov/hamiltonian.hpp"
#include "krotov/problem.hpp"

namespace krotov {

/// Model-specific ingredients of a Problem.
struct ModelParts {
  std::string name;
  std::shared_ptr<const Hamiltonian> hamiltonian;
  StateSet initial;
  StateSet targets;
  /// D of the running cost, when the model defines one.
  std::optional<DenseOperator> running_operator;
  double lambda_b = 0.0;
  double hbar = 1.0;
  /// The running cost makes C < 0, so sigma must not be switched off.
  bool second_order_required = false;
};

/// Combines model parts with a functional, grid and guess field.
Problem assemble(const ModelParts& parts, std::shared_ptr<const FinalTimeFunctional> functional,
                 const TimeGrid& grid, ControlField guess);

/// sigma_0 = 1, sigma_1 = x, sigma_2 = y, sigma_3 = z.
Matrix pauli(int i);
Matrix hadamard();
/// Two-qubit B-gate in the logical basis |00>, |01>, |10>, |11>.
Matrix b_gate();

enum class TlsTarget { state_transfer, hadamard };

/// H = (omega/2) sigma_z + eps(t) V with V = sigma_x unless `drive` is given.
/// state_transfer: |0> -> |1> (N = 1). hadamard: gate on {|0>, |1>} (N = 2).
ModelParts make_tls(double omega, TlsTarget target = TlsTarget::state_transfer,
                    std::optional<Matrix> drive = std::nullopt);

/// Which projector the running cost uses.
enum class SubspaceChoice { automatic, allowed, forbidden };

struct LambdaParams {
  /// Level energies E_0, E_1, E_2.
  RealVector energies = (RealVector(3) << 0.0, 1.0, 2.6).finished();
  double mu01 = 1.0;
  double mu12 = 1.0;
  Eigen::Index forbidden_index = 2;
  double lambda_b = 0.0;
  /// automatic: P_allow for lambda_b <= 0, P_forbid for lambda_b > 0.
  SubspaceChoice choice = SubspaceChoice::automatic;
};

/// Three levels coupled in a chain 0 - 1 - 2 by eps(t) (mu01, mu12).
/// Transfers the lowest allowed level into the other allowed level.
ModelParts make_lambda(const LambdaParams& params);

enum class SpinTarget { state_transfer, b_gate };

/// sum_ij a_ij sigma_i (x) sigma_j.
Matrix spin_coupling(const Eigen::Matrix4d& a);

/// H = (hbar/8) Omega^2 sum_ij a_ij sigma_i (x) sigma_j with Omega as the control.
/// state_transfer: |01> -> |10> (N = 1). b_gate: the full logical basis (N = 4).
/// `a` must be real symmetric.
ModelParts make_spin_spin(const Eigen::Matrix4d& a, double hbar,
                          SpinTarget target = SpinTarget::state_transfer);

struct FourierGridParams {
  /// Potential on each surface sampled at the N_R grid points.
  std::vector<RealVector> potentials;
  double x_min = -10.0;
  double length = 20.0;
  double mass = 1.0;
  double mu = 1.0;
  double hbar = 1.0;
  /// (surface, vibrational level) of the initial and target states.
  std::pair<int, int> initial = {0, 0};
  std::pair<int, int> target = {1, 0};
};

/// Kinetic energy -hbar^2/(2m) d^2/dx^2 on a periodic grid of n points, as a
/// dense real symmetric matrix built from the discrete Fourier transform.
Matrix fourier_kinetic(std::size_t n, double length, double mass, double hbar = 1.0);

/// Grid points x_min + i L / n.
RealVector fourier_points(std::size_t n, double x_min, double length);

/// Surfaces coupled in a chain by mu eps(t); dimension = surfaces * N_R.
/// Initial and target states are eigenstates of the uncoupled surfaces.
ModelParts make_fourier_grid(const FourierGridParams& params);

/// Potentials read from a text file with columns "x V_1 ... V_S" (one row
/// per grid point); x must be uniformly spaced.
FourierGridParams read_potential_file(const std::string& path);

}  // namespace krotov
