#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "krotov/dynamics.hpp"
#include "krotov/estimators.hpp"
#include "krotov/models.hpp"
#include "test_util.hpp"

using namespace krotov;

namespace {

Problem tls_problem(std::shared_ptr<const FinalTimeFunctional> f, double T = 5.0,
                    std::size_t n = 200) {
  const TimeGrid grid(n, T);
  return assemble(make_tls(1.0), std::move(f), grid, build_guess_field(grid, 0.2, 1.0));
}

Problem lambda_problem(double lambda_b, double T = 2.0, std::size_t n = 200) {
  LambdaParams lp;
  lp.lambda_b = lambda_b;
  const TimeGrid grid(n, T);
  return assemble(make_lambda(lp), std::make_shared<JtSm>(1.0), grid,
                  build_guess_field(grid, 0.3, 1.0));
}

// Cubic self-interaction without a known bound on dH/dphi.
class UnboundedNonlinear final : public Hamiltonian {
 public:
  Eigen::Index dim() const override { return 2; }
  Flags flags() const override { return {true, true, false}; }
  DenseOperator evaluate(double eps, double, const Vector* state) const override {
    Matrix m = eps * pauli(1);
    if (state) {
      m(0, 0) += std::norm((*state)[0]);
      m(1, 1) += std::norm((*state)[1]);
    }
    return DenseOperator(m, true);
  }
  Matrix field_derivative(double, double, const Vector*) const override { return pauli(1); }
  std::optional<double> second_field_derivative_bound() const override { return 0.0; }
  std::optional<double> state_gradient_bound() const override { return std::nullopt; }
};

Trajectory costates_of(const Problem& p, const Trajectory& fwd) {
  return propagate_costate_backward(p.functional->costate_boundary(fwd.back(), p.targets), fwd,
                                    p.guess, p.grid, *p.hamiltonian, p.cost);
}

}  // namespace

TEST_CASE("analytic estimates of a linear Hermitian problem with jt_sm vanish") {
  const Problem p = tls_problem(std::make_shared<JtSm>(1.0));
  const Trajectory fwd = propagate_forward(p.initial, p.guess, p.grid, *p.hamiltonian);
  const Estimates e = estimate_analytic(p, costates_of(p, fwd), p.guess.values);
  CHECK(e.A == 0.0);
  CHECK(e.B == 0.0);
  CHECK(e.C == 0.0);
}

TEST_CASE("forbidden-subspace running cost sets C") {
  const Problem p = lambda_problem(20.0, 2.0);
  const Trajectory fwd = propagate_forward(p.initial, p.guess, p.grid, *p.hamiltonian);
  const Estimates e = estimate_analytic(p, costates_of(p, fwd), p.guess.values);
  CHECK(e.C == doctest::Approx(-10.0).epsilon(1e-10));
  CHECK(e.A == 0.0);
  CHECK(e.B == 0.0);
  const Problem allowed = lambda_problem(-20.0, 2.0);
  CHECK(estimate_analytic(allowed, costates_of(allowed, fwd), allowed.guess.values).C <= 1e-12);
}

TEST_CASE("non-Hermitian generators enter B through the anti-Hermitian part") {
  Matrix h0 = Matrix::Zero(2, 2);
  h0(1, 1) = Complex(0.0, -0.3);
  auto h = std::make_shared<PolynomialHamiltonian>(
      std::vector<DenseOperator>{DenseOperator::detect(h0), DenseOperator(pauli(1), true)});
  ModelParts parts = make_tls(1.0);
  parts.hamiltonian = h;
  parts.hbar = 0.5;
  const TimeGrid grid(50, 2.0);
  const Problem p = assemble(parts, std::make_shared<JtSm>(1.0), grid,
                             build_guess_field(grid, 0.2, 1.0));
  const AnalyticBounds b = analytic_bounds(p, p.guess.values);
  CHECK(b.B == doctest::Approx(2.0 * 0.3 / 0.5).epsilon(1e-8));
}

TEST_CASE("jt_power needs a positive A") {
  const Problem p = tls_problem(std::make_shared<JtPower>(1.0, 2));
  const AnalyticBounds b = analytic_bounds(p, p.guess.values);
  CHECK(b.A > 0.0);
  CHECK(analytic_bounds(p, p.guess.values, 0.25).A == 0.25);
}

TEST_CASE("missing state-gradient bound is reported") {
  ModelParts parts = make_tls(1.0);
  parts.hamiltonian = std::make_shared<UnboundedNonlinear>();
  const TimeGrid grid(10, 1.0);
  const Problem p = assemble(parts, std::make_shared<JtSm>(1.0), grid,
                             build_guess_field(grid, 0.2, 1.0));
  CHECK_THROWS_AS(analytic_bounds(p, p.guess.values), BoundUnavailable);
}

TEST_CASE("numeric estimates without a change are zero") {
  const Problem p = tls_problem(std::make_shared<JtSm>(1.0));
  const Trajectory fwd = propagate_forward(p.initial, p.guess, p.grid, *p.hamiltonian);
  const NumericEstimates n = estimate_numeric(p, p.guess, fwd, fwd, costates_of(p, fwd));
  CHECK(n.skipped == p.grid.n_points());
  CHECK(n.value.A == 0.0);
  CHECK(n.value.B == 0.0);
  CHECK(n.value.C == 0.0);
  CHECK(n.max_ball == 0.0);
}

TEST_CASE("numeric estimates of a linear Hermitian problem") {
  const Problem p = tls_problem(std::make_shared<JtSm>(1.0));
  const Trajectory old_fwd = propagate_forward(p.initial, p.guess, p.grid, *p.hamiltonian);
  ControlField changed = p.guess;
  changed.values *= 1.5;
  const Trajectory new_fwd = propagate_forward(p.initial, changed, p.grid, *p.hamiltonian);
  const Trajectory chi = costates_of(p, old_fwd);
  const NumericEstimates n = estimate_numeric(p, p.guess, old_fwd, new_fwd, chi);
  CHECK(n.skipped >= 1);  // t = 0
  for (Eigen::Index j = 0; j < n.B_j.size(); ++j) {
    if (!std::isnan(n.B_j[j])) {
      CHECK(std::abs(n.B_j[j]) < 1e-10);
      CHECK(std::abs(n.C_j[j]) < 1e-10);
    }
  }
  // A = (2 Re<chi|dphi> + Delta J_T) / |dphi|^2 at T, recomputed here.
  double den = 0.0;
  Complex cross = 0.0;
  for (std::size_t k = 0; k < p.n_states(); ++k) {
    const Vector d = new_fwd.back()[k] - old_fwd.back()[k];
    den += d.squaredNorm();
    cross += chi.back()[k].dot(d);
  }
  const double expect = (2.0 * cross.real() + jt_sm(new_fwd.back(), p.targets, 1.0) -
                         jt_sm(old_fwd.back(), p.targets, 1.0)) /
                        den;
  CHECK(n.value.A == doctest::Approx(expect));
  // jt_sm is concave: the quadratic remainder is never positive.
  CHECK(n.value.A <= 1e-12);
  CHECK(n.max_ball > 0.0);
  CHECK(n.max_ball <= 4.0 * p.n_states() + 1e-9);
}

TEST_CASE("numeric estimates stay within the analytic ones for the forbidden subspace") {
  const Problem p = lambda_problem(5.0, 4.0, 300);
  const Trajectory old_fwd = propagate_forward(p.initial, p.guess, p.grid, *p.hamiltonian);
  const Trajectory chi = costates_of(p, old_fwd);
  const Estimates analytic = estimate_analytic(p, chi, p.guess.values);
  for (double scale : {0.5, 2.0, 4.0}) {
    ControlField changed = p.guess;
    changed.values *= scale;
    const Trajectory new_fwd = propagate_forward(p.initial, changed, p.grid, *p.hamiltonian);
    const NumericEstimates n = estimate_numeric(p, p.guess, old_fwd, new_fwd, chi);
    for (Eigen::Index j = 0; j < n.C_j.size(); ++j) {
      if (!std::isnan(n.C_j[j])) {
        CHECK(n.C_j[j] >= analytic.C - 1e-9);
        CHECK(n.B_j[j] <= analytic.B + 1e-9);
      }
    }
  }
}

TEST_CASE("numeric estimates reject mismatched trajectories") {
  const Problem p = tls_problem(std::make_shared<JtSm>(1.0));
  const Trajectory fwd = propagate_forward(p.initial, p.guess, p.grid, *p.hamiltonian);
  Trajectory short_fwd = fwd;
  short_fwd.pop_back();
  CHECK_THROWS_AS(estimate_numeric(p, p.guess, fwd, short_fwd, fwd), Error);
}
