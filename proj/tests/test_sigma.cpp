#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "krotov/core.hpp"
#include "krotov/sigma.hpp"

using namespace krotov;

namespace {

SigmaParams params(double a, double b, double c) {
  SigmaParams p;
  p.mode = SigmaMode::analytic;
  p.A_bar = a;
  p.B_bar = b;
  p.C_bar = c;
  return p;
}

}  // namespace

TEST_CASE("sigma examples") {
  CHECK(sigma_eval(0.0, params(1.0, 0.0, -2.0), 3.0) == doctest::Approx(-7.0));
  CHECK(sigma_eval(0.0, params(1.0, 1.0, -1.0), 2.0) ==
        doctest::Approx(1.0 - 2.0 * std::exp(2.0)));
  CHECK(sigma_eval(3.0, params(0.4, 2.0, -1.0), 3.0) == doctest::Approx(-0.4));
  SigmaParams off = params(1.0, 1.0, -1.0);
  off.mode = SigmaMode::off;
  CHECK(sigma_eval(0.5, off, 2.0) == 0.0);
}

TEST_CASE("sigma solves its first-order equation") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int c = 0; c < 50; ++c) {
    const double T = 0.5 + 3.0 * u(rng);
    const SigmaParams p = params(2.0 * u(rng), 4.0 * u(rng) - 2.0, -3.0 * u(rng));
    const double t = T * u(rng);
    const double h = 1e-5;
    const double deriv = (sigma_eval(t + h, p, T) - sigma_eval(t - h, p, T)) / (2.0 * h);
    // d sigma/dt = -B sigma - C
    CHECK(std::abs(deriv + p.B_bar * sigma_eval(t, p, T) + p.C_bar) < 1e-6);
  }
}

TEST_CASE("small B approaches the B = 0 branch") {
  const double T = 1.5;
  const SigmaParams zero = params(0.7, 0.0, -1.2);
  const SigmaParams tiny = params(0.7, 1e-10, -1.2);
  for (double t : {0.0, 0.3, 1.0, 1.5}) {
    CHECK(sigma_eval(t, tiny, T) == doctest::Approx(sigma_eval(t, zero, T)).epsilon(1e-9));
  }
}

TEST_CASE("bar parameters") {
  SigmaParams eps;
  eps.mode = SigmaMode::numeric;
  const SigmaParams z = bar_params({0.0, 0.0, 0.0}, eps);
  CHECK(z.A_bar == 0.0);
  CHECK(z.B_bar == 0.0);
  CHECK(z.C_bar == 0.0);
  CHECK_FALSE(std::signbit(z.C_bar));
  CHECK(z.mode == SigmaMode::numeric);

  CHECK(bar_params({-3.0, 0.0, 0.0}, eps).A_bar == 0.0);
  CHECK(bar_params({0.0, 0.0, -10.0}, eps).C_bar == -20.0);
  CHECK(bar_params({0.0, 0.0, 4.0}, eps).C_bar == 0.0);

  eps.eps_A = 0.1;
  eps.eps_B = 0.2;
  eps.eps_C = 0.3;
  const SigmaParams b = bar_params({1.0, -1.0, -1.0}, eps);
  CHECK(b.A_bar == doctest::Approx(2.1));
  CHECK(b.B_bar == doctest::Approx(-1.8));
  CHECK(b.C_bar == doctest::Approx(-2.3));
  CHECK(bar_params({-3.0, 0.0, 5.0}, eps).A_bar == doctest::Approx(0.1));
  CHECK(bar_params({-3.0, 0.0, 5.0}, eps).C_bar == doctest::Approx(-0.3));

  const SigmaParams u = unclipped_params({-3.0, 0.5, 5.0}, eps);
  CHECK(u.A_bar == doctest::Approx(-5.9));
  CHECK(u.B_bar == doctest::Approx(1.2));
  CHECK(u.C_bar == doctest::Approx(9.7));
}

TEST_CASE("mode names") {
  for (SigmaMode m : {SigmaMode::off, SigmaMode::fixed, SigmaMode::analytic, SigmaMode::numeric}) {
    CHECK(parse_sigma_mode(to_string(m)) == m);
  }
  CHECK_THROWS_AS(parse_sigma_mode("second"), Error);
}
