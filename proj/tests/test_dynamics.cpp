#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "krotov/dynamics.hpp"
#include "krotov/functionals.hpp"
#include "krotov/hamiltonian.hpp"
#include "krotov/models.hpp"
#include "test_util.hpp"

using namespace krotov;

namespace {

struct Setup {
  std::shared_ptr<PolynomialHamiltonian> h;
  Matrix h0;
  Matrix h1;
  StateSet initial;
};

Setup random_setup(std::uint64_t seed, Eigen::Index dim, std::size_t n) {
  std::mt19937_64 rng(seed);
  Setup s;
  s.h0 = test::random_hermitian(rng, dim);
  s.h1 = test::random_hermitian(rng, dim, 0.5);
  s.h = std::make_shared<PolynomialHamiltonian>(
      std::vector<DenseOperator>{DenseOperator(s.h0, true), DenseOperator(s.h1, true)});
  s.initial = test::random_states(rng, n, dim);
  return s;
}

}  // namespace

TEST_CASE("running cost values and gradient") {
  const StateSet states = orthonormal_basis(3, {0, 2});
  const RunningCost off(2.0, 2);
  CHECK_FALSE(off.active());
  CHECK(off.value(states, 0.3) == 0.0);

  const RunningCost id(4.0, DenseOperator(Matrix::Identity(3, 3), true), 2.0, 2);
  CHECK(id.active());
  CHECK(id.value(states, 0.3) == doctest::Approx(4.0 / 2.0));
  Matrix p = Matrix::Zero(3, 3);
  p(2, 2) = 1.0;
  const RunningCost proj(4.0, DenseOperator(p, true), 2.0, 2);
  CHECK(proj.value(states, 0.0) == doctest::Approx(4.0 / (2.0 * 2.0)));
  CHECK((proj.gradient(states[1], 0.0) - Vector::Unit(3, 2)).norm() < 1e-15);
  CHECK_THROWS_AS(RunningCost(1.0, DenseOperator(Matrix::Identity(3, 3) * Complex(0, 1)), 1.0, 1),
                  Error);
}

TEST_CASE("time-dependent running operator") {
  const RunningCost cost(
      1.0, [](double t) { return DenseOperator(Matrix::Identity(2, 2) * t, true); }, 2.0, 1);
  CHECK(cost.time_dependent());
  CHECK(cost.value(orthonormal_basis(2, {1}), 1.5) == doctest::Approx(0.75));
}

TEST_CASE("homogeneous costates keep their norm") {
  const Setup s = random_setup(10, 5, 2);
  const TimeGrid grid(300, 4.0);
  const ControlField f = build_guess_field(grid, 1.0, 1.5);
  const Trajectory fwd = propagate_forward(s.initial, f, grid, *s.h);
  std::mt19937_64 rng(11);
  const StateSet terminal = test::random_states(rng, 2, 5);
  const Trajectory chi =
      propagate_costate_backward(terminal, fwd, f, grid, *s.h, RunningCost(4.0, 2));
  REQUIRE(chi.size() == grid.n_points());
  double worst_norm = 0.0;
  double worst_overlap = 0.0;
  const Complex o_T = overlap_sum(chi.back(), fwd.back());
  for (std::size_t j = 0; j < grid.n_points(); ++j) {
    for (std::size_t k = 0; k < 2; ++k) {
      worst_norm = std::max(worst_norm, std::abs(chi[j][k].norm() - 1.0));
    }
    worst_overlap = std::max(worst_overlap, std::abs(overlap_sum(chi[j], fwd[j]) - o_T));
  }
  CHECK(worst_norm < 1e-9);
  CHECK(worst_overlap < 1e-8);
}

TEST_CASE("constant generator: chi(0) = exp(+iHT) chi(T)") {
  const Setup s = random_setup(12, 4, 1);
  const TimeGrid grid(64, 3.0);
  const ControlField f = build_guess_field(grid, 0.0, 0.0);
  const Trajectory fwd = propagate_forward(s.initial, f, grid, *s.h);
  std::mt19937_64 rng(13);
  const StateSet terminal = test::random_states(rng, 1, 4);
  const double hbar = 0.8;
  const Trajectory chi = propagate_costate_backward(terminal, fwd, f, grid, *s.h,
                                                    RunningCost(3.0, 1), {hbar});
  const Matrix z = Complex(0.0, 3.0 / hbar) * s.h0;
  CHECK((chi[0][0] - z.exp() * terminal[0]).norm() < 1e-10);
}

TEST_CASE("sourced costates: norm change follows the source") {
  const Setup s = random_setup(14, 3, 1);
  const TimeGrid grid(4000, 2.0);
  const ControlField f = build_guess_field(grid, 0.7, 1.0);
  const Trajectory fwd = propagate_forward(s.initial, f, grid, *s.h);
  const double lambda_b = 1.5;
  const RunningCost cost(lambda_b, DenseOperator(Matrix::Identity(3, 3), true), 2.0, 1);
  std::mt19937_64 rng(15);
  const StateSet terminal = test::random_states(rng, 1, 3);
  const Trajectory chi = propagate_costate_backward(terminal, fwd, f, grid, *s.h, cost,
                                                    {1.0, SourceMode::linear});
  double worst = 0.0;
  for (std::size_t j = 1; j + 1 < grid.n_points(); j += 97) {
    const double fd = (chi[j + 1][0].squaredNorm() - chi[j - 1][0].squaredNorm()) /
                      (2.0 * grid.dt());
    const double expect = 2.0 * (chi[j][0].dot(cost.gradient(fwd[j][0], grid.t(j)))).real();
    worst = std::max(worst, std::abs(fd - expect));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("linear source mode is the more accurate one") {
  const Setup s = random_setup(16, 3, 1);
  Matrix d = Matrix::Zero(3, 3);
  d(2, 2) = 1.0;
  auto chi0 = [&](std::size_t n, SourceMode mode) {
    const TimeGrid grid(n, 2.0);
    const ControlField f = build_guess_field(grid, 0.0, 0.0);
    const Trajectory fwd = propagate_forward(s.initial, f, grid, *s.h);
    const RunningCost cost(2.0, DenseOperator(d, true), 2.0, 1);
    return propagate_costate_backward(orthonormal_basis(3, {0}), fwd, f, grid, *s.h, cost,
                                      {1.0, mode})[0][0];
  };
  const Vector ref = chi0(3200, SourceMode::linear);
  const double e_const = (chi0(50, SourceMode::constant) - ref).norm();
  const double e_lin = (chi0(50, SourceMode::linear) - ref).norm();
  CHECK(e_lin <= e_const);
  CHECK(e_const < 1e-3);
}

TEST_CASE("costate derivative is the right-hand side of the costate equation") {
  const Setup s = random_setup(17, 3, 1);
  const TimeGrid grid(10, 1.0);
  const ControlField f = build_guess_field(grid, 0.5, 0.0);
  const RunningCost cost(2.0, DenseOperator(Matrix::Identity(3, 3), true), 1.0, 1);
  std::mt19937_64 rng(18);
  const StateSet chi = test::random_states(rng, 1, 3);
  const StateSet phi = test::random_states(rng, 1, 3);
  const StateSet d = costate_derivative(chi, phi, f, 4, grid, *s.h, cost);
  const double eps = field_at_point(f, 4);
  const Vector expect = Complex(0.0, -1.0) * ((s.h0 + eps * s.h1) * chi[0]) + 2.0 * phi[0];
  CHECK((d[0] - expect).norm() < 1e-13);
}

TEST_CASE("grid mismatches are rejected") {
  const Setup s = random_setup(19, 2, 1);
  const TimeGrid grid(10, 1.0);
  const ControlField f = build_guess_field(grid, 0.5, 0.0);
  const Trajectory fwd = propagate_forward(s.initial, f, grid, *s.h);
  const TimeGrid other(12, 1.0);
  CHECK_THROWS_AS(propagate_costate_backward(s.initial, fwd, f, other, *s.h, RunningCost(1.0, 1)),
                  Error);
  CHECK_THROWS_AS(propagate_costate_backward(s.initial, {}, f, grid, *s.h, RunningCost(1.0, 1)),
                  Error);
  CHECK_THROWS_AS(propagate_forward(orthonormal_basis(3, {0}), f, grid, *s.h), Error);
}

TEST_CASE("field-free TLS keeps its populations") {
  const ModelParts tls = make_tls(1.3);
  const TimeGrid grid(200, 7.0);
  const ControlField f = build_guess_field(grid, 0.0, 0.0);
  const Trajectory tr = propagate_forward(tls.initial, f, grid, *tls.hamiltonian);
  CHECK(std::norm(tr.back()[0][0]) == doctest::Approx(1.0).epsilon(1e-12));
}
