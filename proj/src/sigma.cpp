#include "krotov/sigma.hpp"

#include <algorithm>
#include <cmath>

#include "krotov/core.hpp"

namespace krotov {

const char* to_string(SigmaMode mode) {
  switch (mode) {
    case SigmaMode::off:
      return "off";
    case SigmaMode::fixed:
      return "fixed";
    case SigmaMode::analytic:
      return "analytic";
    case SigmaMode::numeric:
      return "numeric";
  }
  return "unknown";
}

SigmaMode parse_sigma_mode(const std::string& name) {
  for (auto mode : {SigmaMode::off, SigmaMode::fixed, SigmaMode::analytic, SigmaMode::numeric}) {
    if (name == to_string(mode)) {
      return mode;
    }
  }
  throw Error("unknown sigma mode '" + name + "' (expected off, fixed, analytic or numeric)");
}

double sigma_eval(double t, const SigmaParams& p, double final_time) {
  if (p.mode == SigmaMode::off) {
    return 0.0;
  }
  const double rest = final_time - t;
  if (p.B_bar == 0.0) {
    return p.C_bar * rest - p.A_bar;
  }
  // expm1 form of exp(B r)(C/B - A) - C/B.
  return p.C_bar / p.B_bar * std::expm1(p.B_bar * rest) - p.A_bar * std::exp(p.B_bar * rest);
}

SigmaParams bar_params(const Estimates& e, const SigmaParams& eps) {
  SigmaParams out = eps;
  out.A_bar = std::max(eps.eps_A, 2.0 * e.A + eps.eps_A);
  out.B_bar = 2.0 * e.B + eps.eps_B;
  out.C_bar = std::min(-eps.eps_C, 2.0 * e.C - eps.eps_C) + 0.0;
  return out;
}

SigmaParams unclipped_params(const Estimates& e, const SigmaParams& eps) {
  SigmaParams out = eps;
  out.A_bar = 2.0 * e.A + eps.eps_A;
  out.B_bar = 2.0 * e.B + eps.eps_B;
  out.C_bar = 2.0 * e.C - eps.eps_C;
  return out;
}

}  // namespace krotov
