#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "krotov/engine.hpp"
#include "krotov/models.hpp"
#include "krotov/problem.hpp"

namespace krotov {

/// Schema or value error in a run configuration; the message names the key.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Validated run configuration (schema_version 1).
///
/// Layout:
///   schema_version  1
///   model           {type: tls | lambda | spin_spin | fourier_grid, ...model keys}
///     tls           omega, target: state_transfer | hadamard
///     lambda        energies [3], mu01, mu12, forbidden_index
///     spin_spin     hbar, tensor [4][4] or tensor_file, target: state_transfer | b_gate
///     fourier_grid  potential_file or harmonic {n_r, x_min, length, omega [], shift [], offset []},
///                   mass, mu, hbar, initial [surface, level], target [surface, level]
///   functional      {type: jt_sm | jt_re | jt_power, lambda0, p, curvature_samples,
///                    curvature_safety, curvature_override}
///   running_cost    {lambda_a, shape: sin2 | flat, lambda_b, D: auto | allowed | forbidden | identity}
///   grid            {T, n_steps}
///   guess           {amplitude, frequency}
///   sigma           {mode: off | fixed | analytic | numeric, A_bar, B_bar, C_bar,
///                    eps_A, eps_B, eps_C, numeric_unclipped, numeric_seed {A, B, C}}
///   stopping        {max_iter, J_tol}
///   options         {monotonic_guard, fixed_point_sweeps, source_mode: constant | linear,
///                    track_analytic_C}
///   output          {convergence, field, overlaps}
///   seed            integer used by sampled bounds
struct RunConfig {
  nlohmann::json raw;

  std::string model_type;
  double tls_omega = 1.0;
  TlsTarget tls_target = TlsTarget::state_transfer;
  LambdaParams lambda;
  Eigen::Matrix4d spin_tensor = Eigen::Matrix4d::Zero();
  double spin_hbar = 1.0;
  SpinTarget spin_target = SpinTarget::state_transfer;
  FourierGridParams fourier;

  std::string functional_type = "jt_sm";
  double lambda0 = 1.0;
  int power = 2;
  std::size_t curvature_samples = 2000;
  double curvature_safety = 1.5;
  std::optional<double> curvature_override;

  double lambda_a = 1.0;
  std::string shape = "sin2";
  double lambda_b = 0.0;
  std::string running_operator = "auto";

  double final_time = 1.0;
  std::size_t n_steps = 100;
  double guess_amplitude = 0.0;
  double guess_frequency = 0.0;

  IterateOptions options;

  std::string convergence_file = "convergence.csv";
  std::string field_file = "field.dat";
  std::string overlaps_file = "overlaps.dat";

  std::uint64_t seed = 20100401;
  /// Directory of the config file; relative model file paths resolve against it.
  std::string base_dir = ".";
};

/// Parses and validates; throws ConfigError naming the offending key.
RunConfig parse_config(const nlohmann::json& j, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);

/// Parameters that `scan` may vary, as dotted paths.
const std::vector<std::string>& scannable_parameters();

/// Copy of `j` with the dotted path set to `value`; throws ConfigError for
/// paths that are not scannable.
nlohmann::json with_parameter(const nlohmann::json& j, const std::string& path, double value);

/// Builds the problem described by the configuration.
Problem build_problem(const RunConfig& config);

/// One-paragraph description of the resolved problem.
std::string describe(const RunConfig& config, const Problem& problem);

}  // namespace krotov
