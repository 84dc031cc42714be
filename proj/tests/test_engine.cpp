#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "krotov/engine.hpp"
#include "krotov/models.hpp"
#include "test_util.hpp"

using namespace krotov;

namespace {

ControlField flat_field(const TimeGrid& grid, double reference) {
  ControlField f = build_guess_field(grid, 0.0, 0.0);
  f.shape.setOnes();
  f.reference.setConstant(reference);
  f.values = f.reference;
  f.lambda_a = 1.0;
  return f;
}

Problem tls(double lambda_a, std::shared_ptr<const FinalTimeFunctional> f, std::size_t n = 400,
            double T = 10.0, double amplitude = 0.1) {
  const TimeGrid grid(n, T);
  ControlField guess = build_guess_field(grid, amplitude, 1.0);
  guess.lambda_a = lambda_a;
  return assemble(make_tls(1.0), std::move(f), grid, guess);
}

}  // namespace

TEST_CASE("update step examples") {
  const ModelParts parts = make_tls(1.0);
  const TimeGrid grid(4, 1.0);
  const StateSet phi = orthonormal_basis(2, {0});
  const StateSet zero = {Vector::Zero(2)};

  ControlField f = flat_field(grid, 0.0);
  const StateSet chi = {Vector(Vector::Unit(2, 1) * Complex(0.0, -0.5))};
  CHECK(update_field_step(1, chi, phi, zero, 0.0, f, *parts.hamiltonian, 0.3) ==
        doctest::Approx(0.5));

  const StateSet dphi = {Vector(Vector::Unit(2, 1) * Complex(0.0, -0.2))};
  CHECK(update_field_step(1, zero, phi, dphi, -2.0, f, *parts.hamiltonian, 0.3) ==
        doctest::Approx(-0.2));

  f = flat_field(grid, 0.3);
  const StateSet real_chi = {Vector(Vector::Unit(2, 1) * 0.5)};
  CHECK(update_field_step(2, real_chi, phi, real_chi, 1.0, f, *parts.hamiltonian, 0.3) ==
        doctest::Approx(0.3));

  f.lambda_a = 4.0;
  f.shape[1] = 2.0;
  f.reference[1] = 0.0;
  CHECK(update_field_step(1, chi, phi, zero, 0.0, f, *parts.hamiltonian, 0.3) ==
        doctest::Approx(0.25));
  CHECK_THROWS_AS(update_field_step(4, chi, phi, zero, 0.0, f, *parts.hamiltonian, 0.3), Error);
}

TEST_CASE("normalized functional") {
  CHECK(j_norm(-0.5, 1.0, 0.0) == doctest::Approx(0.5));
  CHECK(j_norm(-1.0, 1.0, -1.0) == doctest::Approx(0.5));
  CHECK(j_norm(0.0, 1.0, 3.0) == doctest::Approx(1.5));
  CHECK(j_norm(-1.0, 1.0, 3.0) == doctest::Approx(2.0));
  CHECK_THROWS_AS(j_norm(0.0, 2.0, 2.0), Error);
}

TEST_CASE("field nonlinearity condition") {
  const RealVector shape = RealVector::Ones(1);
  const RealVector sigma = RealVector::Zero(1);
  const RealVector chi = RealVector::Ones(1);
  CHECK_FALSE(check_field_nonlinearity_bound(1.0, shape, sigma, chi, 2.0, 1).all());
  CHECK(check_field_nonlinearity_bound(1.01, shape, sigma, chi, 2.0, 1).all());
  CHECK(check_field_nonlinearity_bound(1.0, shape, sigma, chi, 2.0, 1).minimal_lambda_a ==
        doctest::Approx(1.1));
  CHECK(check_field_nonlinearity_bound(1e-9, shape, RealVector::Constant(1, 5.0), chi, 0.0, 1)
            .all());
  const RealVector sig = RealVector::Constant(1, -0.5);
  CHECK(check_field_nonlinearity_bound(1.0, shape, sig, RealVector::Zero(1), 2.0, 4)
            .minimal_lambda_a == doctest::Approx(1.1 * 4.0));
  CHECK_THROWS_AS(check_field_nonlinearity_bound(1.0, RealVector::Ones(2), sigma, chi, 1.0, 1),
                  Error);
}

TEST_CASE("zero iterations records only the guess") {
  const Problem p = tls(5.0, std::make_shared<JtSm>(1.0));
  IterateOptions o;
  o.max_iter = 0;
  const OptimizationRecord r = iterate(p, o);
  REQUIRE(r.entries.size() == 1);
  CHECK(r.iterations() == 0);
  CHECK(r.final_field.values == p.guess.values);
  CHECK(r.entries[0].J == doctest::Approx(r.entries[0].J_T + r.entries[0].int_ga));
  CHECK(r.entries[0].int_ga == 0.0);
}

TEST_CASE("first-order run: bookkeeping and monotonicity") {
  const Problem p = tls(5.0, std::make_shared<JtSm>(1.0));
  IterateOptions o;
  o.max_iter = 30;
  std::size_t calls = 0;
  o.on_iteration = [&](const IterationEntry&) { ++calls; };
  const OptimizationRecord r = iterate(p, o);
  CHECK_FALSE(r.aborted);
  CHECK(calls == r.entries.size());
  CHECK(r.violations() == 0);
  for (std::size_t i = 1; i < r.entries.size(); ++i) {
    const auto& e = r.entries[i];
    CHECK(std::abs(e.delta_J - (e.J - r.entries[i - 1].J)) <= 1e-14);
    CHECK(std::abs(e.J - (e.J_T + e.int_ga + e.int_gb)) <= 1e-14);
    CHECK(e.max_ball <= 4.0 * p.n_states() + 1e-9);
    CHECK(e.A_bar == 0.0);
  }
  CHECK(r.entries.back().J < r.entries.front().J);
  const Trajectory fwd = propagate_forward(p.initial, r.final_field, p.grid, *p.hamiltonian);
  CHECK(jt_sm(fwd.back(), p.targets, 1.0) == doctest::Approx(r.entries.back().J_T));
}

TEST_CASE("J_tol stops early") {
  const Problem p = tls(5.0, std::make_shared<JtSm>(1.0));
  IterateOptions o;
  o.max_iter = 500;
  o.J_tol = 1e-3;
  const OptimizationRecord r = iterate(p, o);
  CHECK(r.iterations() < 500);
  CHECK(std::abs(r.entries.back().delta_J) < 1e-3);
}

TEST_CASE("analytic second order keeps the power functional monotonic") {
  const Problem p = tls(0.1, std::make_shared<JtPower>(1.0, 2), 800);
  IterateOptions o;
  o.max_iter = 40;
  o.sigma.mode = SigmaMode::analytic;
  o.monotonic_guard = false;
  const OptimizationRecord r = iterate(p, o);
  CHECK_FALSE(r.aborted);
  CHECK(r.violations() == 0);
  CHECK(r.entries[1].A_bar > 0.0);
}

TEST_CASE("numeric retries escalate eps_A and eps_C") {
  const Problem p = tls(0.02, std::make_shared<JtPower>(1.0, 2), 400);
  IterateOptions o;
  o.max_iter = 15;
  o.sigma.mode = SigmaMode::numeric;
  const OptimizationRecord r = iterate(p, o);
  std::size_t escalations = 0;
  for (std::size_t i = 1; i < r.entries.size(); ++i) {
    const auto& e = r.entries[i];
    const double floor = escalations == 0 ? 0.0 : 1e-3 * std::pow(2.0, escalations - 1);
    CHECK(e.A_bar >= floor);
    CHECK(e.C_bar <= -floor);
    if (e.retries == 1) {
      const SigmaParams expect = bar_params(e.failed_numeric, [&] {
        SigmaParams eps;
        eps.eps_A = floor;
        eps.eps_C = floor;
        return eps;
      }());
      CHECK(e.A_bar == doctest::Approx(expect.A_bar));
      CHECK(e.C_bar == doctest::Approx(expect.C_bar));
      if (!e.monotonic) {
        ++escalations;
      }
    }
  }
  CHECK(escalations >= 2);
}

TEST_CASE("divergence aborts with the last good iteration") {
  const Problem p = tls(1e-6, std::make_shared<JtSm>(1.0), 100);
  IterateOptions o;
  o.max_iter = 5;
  const OptimizationRecord r = iterate(p, o);
  CHECK(r.aborted);
  CHECK(r.iterations() == 0);
  CHECK(r.abort_reason.find("last good iteration 0") != std::string::npos);
  CHECK(r.final_field.values == p.guess.values);
}

TEST_CASE("negative eps values are rejected") {
  const Problem p = tls(5.0, std::make_shared<JtSm>(1.0), 50);
  IterateOptions o;
  o.sigma.eps_C = -1.0;
  CHECK_THROWS_AS(iterate(p, o), Error);
}
