#pragma once

#include <string>

namespace krotov {

enum class SigmaMode { off, fixed, analytic, numeric };

const char* to_string(SigmaMode mode);
/// Throws krotov::Error for unknown names.
SigmaMode parse_sigma_mode(const std::string& name);

/// Parameters of the second-order weight sigma(t).
struct SigmaParams {
  SigmaMode mode = SigmaMode::off;
  double A_bar = 0.0;
  double B_bar = 0.0;
  double C_bar = 0.0;
  double eps_A = 0.0;
  double eps_B = 0.0;
  double eps_C = 0.0;
};

/// Raw estimates A, B, C before the Abar/Bbar/Cbar transformation.
struct Estimates {
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;
};

/// sigma(t) = exp(B(T - t)) (C/B - A) - C/B for B != 0, C (T - t) - A for B = 0.
/// Returns 0 in off mode.
double sigma_eval(double t, const SigmaParams& p, double final_time);

/// Abar = max(eps_A, 2A + eps_A), Bbar = 2B + eps_B, Cbar = min(-eps_C, 2C - eps_C).
/// Mode and eps_* are copied from `eps`.
SigmaParams bar_params(const Estimates& e, const SigmaParams& eps);

/// Abar = 2A + eps_A, Bbar = 2B + eps_B, Cbar = 2C - eps_C without the sign clipping.
SigmaParams unclipped_params(const Estimates& e, const SigmaParams& eps);

}  // namespace krotov
