#include <cmath>
#include <random>

#include "doctest.h"
#include "oddflow/dynamics.hpp"
#include "oddflow/errors.hpp"
#include "oddflow/picard.hpp"
#include "support.hpp"

using namespace oddflow;

namespace {

template <class F>
std::vector<F> constant_trajectory(const F& f, std::size_t nodes) {
  return std::vector<F>(nodes, f);
}

}  // namespace

TEST_CASE("picard config validation") {
  PicardConfig c;
  CHECK_NOTHROW(validate(c));
  CHECK(picard_steps(c) == 100);
  c.epsilon = 0.0;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = PicardConfig{};
  c.tol = 0.0;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = PicardConfig{};
  c.T = 0.105;
  c.dt = 0.01;
  CHECK(picard_steps(c) == 11);
}

TEST_CASE("transport by a zero velocity keeps the density") {
  const Grid g(32);
  std::mt19937_64 rng(1);
  const ScalarField rho0 = oddflow::testing::random_density(g, rng, 3, 0.3);
  const auto rho = transport_density(constant_trajectory(VectorField(g), 21), rho0, 0.01);
  REQUIRE(rho.size() == 21);
  for (const auto& r : rho) CHECK((r - rho0).max_abs() == 0.0);
}

TEST_CASE("transport by a translation is an exact shift") {
  const Grid g(32);
  const double c = 0.5;
  const double dt = 0.01;
  const std::size_t N = 20;
  auto profile = [](double x, double y) { return 1 + 0.2 * std::cos(x) * std::sin(2 * y) + 0.1 * std::sin(3 * x); };
  const ScalarField rho0 = ScalarField::from_function(g, profile);
  const VectorField u(ScalarField(g, c), ScalarField(g, 0.0));
  const auto rho = transport_density(constant_trajectory(u, 2 * N + 1), rho0, dt);
  for (std::size_t k = 0; k < rho.size(); ++k) {
    const double t = 0.5 * dt * static_cast<double>(k);
    const ScalarField exact = ScalarField::from_function(g, [&](double x, double y) { return profile(x - c * t, y); });
    CHECK((rho[k] - exact).max_abs() < 1e-10);
  }
}

TEST_CASE("transport by a swirl keeps a radial bump") {
  const Grid g(64);
  const double cx = std::numbers::pi;
  auto r2 = [&](double x, double y) { return (x - cx) * (x - cx) + (y - cx) * (y - cx); };
  const ScalarField rho0 = ScalarField::from_function(g, [&](double x, double y) { return 1 + 0.2 * std::exp(-r2(x, y) / 0.3); });
  const ScalarField psi = ScalarField::from_function(g, [&](double x, double y) { return std::exp(-r2(x, y) / 0.3); });
  const VectorField u = perp_gradient(psi);
  const auto rho = transport_density(constant_trajectory(u, 41), rho0, 0.01);
  CHECK((rho.back() - rho0).max_abs() < 1e-8);
}

TEST_CASE("transport maximum principle and vacuum guard") {
  const Grid g(32);
  std::mt19937_64 rng(2);
  const ScalarField rho0 = oddflow::testing::random_density(g, rng, 2, 0.3);
  const VectorField u = oddflow::testing::random_solenoidal(g, rng, 2, 0.5);
  const auto rho = transport_density(constant_trajectory(u, 41), rho0, 0.01);
  // nodal extrema of rho0 undershoot the continuous ones; bound by a fine resample
  const ScalarField fine = resample(rho0, 8 * g.n());
  const double range = fine.max() - fine.min();
  for (const auto& r : rho) {
    CHECK(r.min() >= fine.min() - 1e-6 * range);
    CHECK(r.max() <= fine.max() + 1e-6 * range);
    CHECK(std::abs(r.mean() - rho0.mean()) < 1e-12);
  }
  CHECK_THROWS_AS(transport_density(constant_trajectory(u, 41), rho0, 0.01, rho0.min() + 1e-3), VacuumError);
  CHECK_THROWS_AS(transport_density(constant_trajectory(u, 40), rho0, 0.01), Error);
}

TEST_CASE("linear Stokes solve: heat equation mode") {
  const Grid g(32);
  const double eps = 0.3;
  const double abar = 0.8;
  const double dt = 0.01;
  const std::size_t N = 20;
  const ScalarField psi = ScalarField::from_function(g, [](double x, double y) { return std::sin(2 * x) * std::cos(y); });
  const VectorField u0 = perp_gradient(psi);
  const StokesSolution s = linear_stokes_solve(constant_trajectory(ScalarField(g, abar), 2 * N + 1),
                                               constant_trajectory(VectorField(g), 2 * N + 1), u0, eps, dt);
  REQUIRE(s.u.size() == 2 * N + 1);
  REQUIRE(s.grad_Pi.size() == N + 1);
  for (std::size_t k = 0; k < s.u.size(); ++k) {
    const double t = 0.5 * dt * static_cast<double>(k);
    CHECK((s.u[k] - std::exp(-eps * abar * 5.0 * t) * u0).max_magnitude() < 1e-9);
    CHECK(divergence(s.u[k]).max_abs() < 1e-9);
  }
  for (const auto& gp : s.grad_Pi) CHECK(gp.max_magnitude() < 1e-10);
}

TEST_CASE("linear Stokes solve: rest and skew advection") {
  const Grid g(32);
  std::mt19937_64 rng(4);
  const ScalarField a = oddflow::testing::random_density(g, rng, 2, 0.3);
  const VectorField U = oddflow::testing::random_solenoidal(g, rng, 3, 0.5);
  const auto at = constant_trajectory(a, 21);
  const auto Ut = constant_trajectory(U, 21);

  const StokesSolution rest = linear_stokes_solve(at, Ut, VectorField(g), 0.1, 0.01);
  for (const auto& u : rest.u) CHECK(u.max_magnitude() == 0.0);
  for (const auto& gp : rest.grad_Pi) CHECK(gp.max_magnitude() == 0.0);

  // constant a, eps -> 0: projected advection by a solenoidal field conserves ||u||
  const VectorField u0 = oddflow::testing::random_solenoidal(g, rng, 3, 0.5);
  const StokesSolution adv = linear_stokes_solve(constant_trajectory(ScalarField(g, 1.3), 21), Ut, u0, 0.0, 0.01);
  const double e0 = u0.l2_norm();
  for (const auto& u : adv.u) CHECK(std::abs(u.l2_norm() - e0) / e0 < 1e-8);
  CHECK((adv.u.back() - u0).l2_norm() > 1e-3);
}

TEST_CASE("Picard iteration") {
  const Grid g(32);
  const ViscosityLaw law = ViscosityLaw::power_law(1, 0, 1, 0.7);
  PicardConfig cfg;
  cfg.dt = 0.005;
  cfg.T = 0.1;
  cfg.tol = 1e-10;

  SUBCASE("zero velocity converges at once to the rest state") {
    const State s0 = make_initial_state(g, InitialData{});
    const PicardResult r = picard_run(law, s0.rho, VectorField(g), cfg);
    CHECK(r.converged);
    CHECK(r.history.size() <= 2);
    CHECK(r.u_final().max_magnitude() == 0.0);
    CHECK((r.rho_final() - s0.rho).max_abs() == 0.0);
  }
  SUBCASE("constant density contracts") {
    InitialData d;
    d.rho_delta = 0.0;
    const State s0 = make_initial_state(g, d);
    const PicardResult r = picard_run(law, s0.rho, s0.u, cfg);
    CHECK(r.converged);
    CHECK_FALSE(r.diverged);
    for (std::size_t k = 1; k < r.history.size(); ++k) CHECK(r.history[k].d < r.history[k - 1].d);
  }
  SUBCASE("variable density: iterates respect the density range") {
    const State s0 = make_initial_state(g, InitialData{});
    cfg.n_max = 6;
    const PicardResult r = picard_run(law, s0.rho, s0.u, cfg);
    CHECK(r.history.size() == 6);
    const double range = s0.rho.max() - s0.rho.min();
    for (const auto& rho : r.rho) {
      CHECK(rho.min() >= s0.rho.min() - 1e-6 * range);
      CHECK(rho.max() <= s0.rho.max() + 1e-6 * range);
    }
    CHECK(r.history.back().d < r.history[1].d);
    CHECK(r.history.back().residual > 0.0);
  }
}

TEST_CASE("trajectory residual needs five nodes") {
  const Grid g(16);
  const ViscosityLaw law = ViscosityLaw::power_law(1, 0, 1, 0.5);
  const auto rho = constant_trajectory(ScalarField(g, 1.0), 4);
  const auto u = constant_trajectory(VectorField(g), 4);
  CHECK_THROWS_AS(trajectory_residual(law, 0.1, rho, u, 0.01), Error);
  const auto rho5 = constant_trajectory(ScalarField(g, 1.0), 5);
  const auto u5 = constant_trajectory(VectorField(g), 5);
  CHECK(trajectory_residual(law, 0.1, rho5, u5, 0.01) == 0.0);
}
