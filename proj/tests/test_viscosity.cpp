#include <cmath>
#include <random>

#include "doctest.h"
#include "oddflow/dynamics.hpp"
#include "oddflow/errors.hpp"
#include "oddflow/viscosity.hpp"
#include "support.hpp"

using namespace oddflow;
using oddflow::testing::simpson;

TEST_CASE("pointwise evaluation") {
  const ViscosityLaw lin = ViscosityLaw::power_law(1, 0, 1, 0.5);
  CHECK(lin.f(2.0) == doctest::Approx(2.0));
  CHECK(lin.fprime(2.0) == doctest::Approx(1.0));

  const ViscosityLaw cst = ViscosityLaw::constant(0.3, 0.5);
  CHECK(cst.f(2.0) == 0.3);
  CHECK(cst.fprime(2.0) == 0.0);
  CHECK(cst.g(2.0) == 0.0);
  CHECK(cst.is_constant());

  const ViscosityLaw cubic = ViscosityLaw::power_law(2, 1, 3, 1.0);
  CHECK(cubic.f(1.5) == doctest::Approx(2 * 3.375 + 1).epsilon(1e-15));
  CHECK(cubic.fprime(1.5) == doctest::Approx(6 * 2.25).epsilon(1e-15));
}

TEST_CASE("g of the linear law is 2 log(rho / rho_star)") {
  const ViscosityLaw lin = ViscosityLaw::power_law(1, 0, 1, 1.0);
  for (double r : {1.0, 1.3, 2.0, 5.0}) CHECK(lin.g(r) == doctest::Approx(2 * std::log(r)).epsilon(1e-14));
  CHECK(lin.g(1.0) == 0.0);
}

TEST_CASE("g of rho^2 against Simpson quadrature and closed form") {
  const ViscosityLaw sq = ViscosityLaw::power_law(1, 0, 2, 1.0);
  const double oracle = simpson([](double r) { return (2.0 / r) * 2.0 * r; }, 1.0, 2.0);
  CHECK(sq.g(2.0) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(sq.g(2.0) == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(sq.g_quadrature(2.0) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("quadrature and closed form agree on power laws") {
  for (double alpha : {-1.5, 0.5, 1.0, 2.0, 3.0}) {
    const ViscosityLaw law = ViscosityLaw::power_law(0.7, 0.2, alpha, 0.6);
    for (double r : {0.6, 0.8, 1.1, 1.9}) {
      CHECK(std::abs(law.g(r) - law.g_quadrature(r)) < 1e-10);
      // rho g'(rho) = 2 f'(rho)
      CHECK(r * law.gprime(r) == doctest::Approx(2 * law.fprime(r)).epsilon(1e-12));
    }
    CHECK(law.g(0.6) == 0.0);
  }
}

TEST_CASE("custom law uses quadrature") {
  const ViscosityLaw law = ViscosityLaw::custom([](double r) { return std::sin(r) + 2; },
                                                [](double r) { return std::cos(r); }, 0.5);
  const double oracle = simpson([](double r) { return 2.0 * std::cos(r) / r; }, 0.5, 1.4);
  CHECK(law.g(1.4) == doctest::Approx(oracle).epsilon(1e-11));
  CHECK(law.g(0.5) == 0.0);
  CHECK_FALSE(law.is_constant());
}

TEST_CASE("vacuum guard") {
  const ViscosityLaw law = ViscosityLaw::power_law(1, 0, 1, 0.8);
  CHECK_THROWS_AS(law.f(0.7), VacuumError);
  CHECK_THROWS_AS(law.g(0.79), VacuumError);
  const Grid g(16);
  CHECK_THROWS_AS(g_eval(law, ScalarField(g, 0.5)), VacuumError);
  try {
    check_vacuum(law, ScalarField(g, 0.5));
  } catch (const VacuumError& e) {
    CHECK(e.rho_min() == 0.5);
    CHECK(e.rho_star() == 0.8);
  }
  CHECK_THROWS_AS(ViscosityLaw::power_law(1, 0, 1, 0.0), ConfigError);
}

TEST_CASE("degenerate laws are rejected on their density range") {
  // f = (rho - 1)^2 style: a custom law whose derivative vanishes at 1
  const ViscosityLaw bad = ViscosityLaw::custom([](double r) { return (r - 1) * (r - 1); },
                                                [](double r) { return 2 * (r - 1); }, 0.5);
  CHECK_THROWS_AS(bad.validate_range(0.8, 1.2), ConfigError);
  CHECK_NOTHROW(bad.validate_range(1.1, 1.5));
  CHECK_NOTHROW(ViscosityLaw::constant(1.0, 0.5).validate_range(0.8, 1.2));
  CHECK_NOTHROW(ViscosityLaw::power_law(0.0, 1.0, 2.0, 0.5).validate_range(0.8, 1.2));
}

TEST_CASE("default rho_star") {
  const Grid g(16);
  const ScalarField rho = ScalarField::from_function(g, [](double x, double) { return 1 + 0.5 * std::cos(x); });
  CHECK(default_rho_star(rho) == doctest::Approx(0.45));
}

TEST_CASE("the anchor rho_star does not change grad_perp g") {
  const Grid g(32);
  std::mt19937_64 rng(4);
  const ScalarField rho = oddflow::testing::random_density(g, rng, 3, 0.3);
  const ViscosityLaw a = ViscosityLaw::power_law(1, 0, 2, 0.5);
  const ViscosityLaw b = a.with_rho_star(0.6);
  const VectorField da = perp_gradient(g_eval(a, rho));
  const VectorField db = perp_gradient(g_eval(b, rho));
  CHECK((da - db).max_magnitude() < 1e-12);
  CHECK((g_eval(a, rho) - g_eval(b, rho)).max_abs() > 0.1);
}

TEST_CASE("effective velocity") {
  const Grid g(64);
  std::mt19937_64 rng(8);
  const VectorField u = oddflow::testing::random_solenoidal(g, rng, 4);
  const ViscosityLaw lin = ViscosityLaw::power_law(1, 0, 1, 0.5);

  // constant density: U = u
  CHECK((effective_velocity(lin, ScalarField(g, 1.3), u) - u).max_magnitude() < 1e-14);

  // f = rho: U = u - 2 grad_perp log rho
  const ScalarField rho = oddflow::testing::random_density(g, rng, 3, 0.3);
  const VectorField U = effective_velocity(lin, rho, u);
  const VectorField ref = u - 2.0 * perp_gradient(rho.map([](double r) { return std::log(r); }));
  CHECK((U - ref).max_magnitude() < 1e-12);
  CHECK(divergence(U).max_abs() < 1e-10);

  // f = rho^2, rho = 1 + 0.1 cos x, u = 0: U = -grad_perp(4 (rho - 1)) = (0, 0.4 sin x)
  const ViscosityLaw sq = ViscosityLaw::power_law(1, 0, 2, 0.5);
  const ScalarField r2 = ScalarField::from_function(g, [](double x, double) { return 1 + 0.1 * std::cos(x); });
  const VectorField U2 = effective_velocity(sq, r2, VectorField(g));
  const ScalarField gfun = r2.map([](double r) { return 4 * (r - 1); });
  const ScalarField fd_y = oddflow::testing::fd_derivative(gfun, Axis::X);
  CHECK(U2.x.max_abs() < 1e-14);
  // fourth-order truncation: 0.4 h^4 / 30
  const double h = g.spacing();
  CHECK((U2.y + fd_y).max_abs() < 2 * 0.4 * std::pow(h, 4) / 30);
  CHECK((U2.y - ScalarField::from_function(g, [](double x, double) { return 0.4 * std::sin(x); })).max_abs() < 1e-13);
}
