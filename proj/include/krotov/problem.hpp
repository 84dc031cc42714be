#pragma once

#include <memory>
#include <string>

#include "krotov/core.hpp"
#include "krotov/dynamics.hpp"
#include "krotov/functionals.hpp"
#include "krotov/hamiltonian.hpp"

namespace krotov {

/// Everything one optimization needs: dynamics, boundary conditions,
/// functional, running cost, grid and guess field.
struct Problem {
  std::string name;
  std::shared_ptr<const Hamiltonian> hamiltonian;
  StateSet initial;
  /// O|k> for each initial state |k>.
  StateSet targets;
  std::shared_ptr<const FinalTimeFunctional> functional;
  RunningCost cost;
  TimeGrid grid;
  ControlField guess;
  double hbar = 1.0;

  std::size_t n_states() const { return initial.size(); }

  /// Dimensional consistency of every ingredient; throws krotov::Error.
  void validate() const;
};

}  // namespace krotov
