#pragma once

// Right-hand sides and time integration for the four formulations:
//   original     rho (d_t + u.grad) u + grad pi + div(f(rho)(grad u_perp + grad_perp u)) = 0
//   reduced      rho (d_t + U.grad) u + grad Pi = 0,           U = u - grad_perp g(rho)
//   elsasser     rho (d_t + U.grad) u + grad Pi = 0,  rho (d_t + u.grad) U + grad Pi = 0
//   regularized  rho (d_t + U.grad) u + grad Pi - eps Lap u = 0
// all with (d_t + u.grad) rho = 0 and div u = 0.

#include <functional>
#include <vector>

#include "oddflow/diagnostics.hpp"
#include "oddflow/state.hpp"

namespace oddflow {

/// (grad f . grad) u_perp + f Lap u_perp + (grad f . grad_perp) u, dealiased.
VectorField odd_stress_divergence(const ViscosityLaw& law, const ScalarField& rho,
                                  const VectorField& u);

/// U = u - grad_perp g(rho)
VectorField effective_velocity(const ViscosityLaw& law, const ScalarField& rho,
                               const VectorField& u);
inline VectorField effective_velocity(const ViscosityLaw& law, const State& s) {
  return effective_velocity(law, s.rho, s.u);
}

/// pi = Pi + f(rho) omega, shifted to zero mean.
ScalarField recover_pressure(const ViscosityLaw& law, const State& state, const ScalarField& Pi);

// Right-hand sides. `warm_start` seeds the pressure solve and may be null.
Rate rhs_reduced(const ViscosityLaw& law, const State& state, const EllipticOptions& opts,
                 const ScalarField* warm_start = nullptr);
Rate rhs_original(const ViscosityLaw& law, const State& state, const EllipticOptions& opts,
                  const ScalarField* warm_start = nullptr);
Rate rhs_elsasser(const ViscosityLaw& law, const ExtendedState& state, const EllipticOptions& opts,
                  const ScalarField* warm_start = nullptr);
/// epsilon == 0 reproduces rhs_reduced bit for bit.
Rate rhs_regularized(const ViscosityLaw& law, const State& state, double epsilon,
                     const EllipticOptions& opts, const ScalarField* warm_start = nullptr);

/// Shared by the regularized RHS and the linear Stokes-type solve: given the
/// transport field U and coefficient a = 1/rho,
///   du = -(U.grad)u - a grad Pi + eps a Lap u,
///   -div(a grad Pi) = div((U.grad)u - eps a Lap u).
struct VelocityTendency {
  VectorField du;
  ScalarField Pi;
  int iterations = 0;
  double residual = 0.0;
  bool energy_bound_holds = true;
};
VelocityTendency transported_velocity_tendency(const VectorField& U, const ScalarField& a,
                                               const VectorField& u, double epsilon,
                                               const EllipticOptions& opts,
                                               const ScalarField* warm_start = nullptr);

State advance(const State& s, const Rate& r, double h);
ExtendedState advance(const ExtendedState& s, const Rate& r, double h);

/// Classical RK4 step. `rhs` is evaluated four times; the pressure of the
/// first stage is returned through `first_stage` when non-null.
State rk4_step(const std::function<Rate(const State&)>& rhs, const State& state, double dt,
               Rate* first_stage = nullptr);
ExtendedState rk4_step(const std::function<Rate(const ExtendedState&)>& rhs,
                       const ExtendedState& state, double dt, Rate* first_stage = nullptr);

/// Lawson integrating-factor RK4 for the regularized formulation: the
/// constant-coefficient part eps * mean(1/rho) Lap u is integrated exactly,
/// the remainder explicitly.
State if_rk4_step(const ViscosityLaw& law, const State& state, double epsilon, double dt,
                  const EllipticOptions& opts, ScalarField* warm_start = nullptr,
                  Rate* first_stage = nullptr);

/// Largest dt allowed by dt <= cfl * h / max(|u|, |U|).
double cfl_limit(const Grid& grid, double cfl, const VectorField& u, const VectorField& U);

/// Everything an observer sees at an output step.
struct Sample {
  int step = 0;
  const State& state;
  const VectorField& U;         // carried (Elsasser) or effective velocity
  const ScalarField& pressure;  // Pi, or pi for the original formulation
  const DiagnosticsRecord& record;
};
using Observer = std::function<void(const Sample&)>;

struct SimulationResult {
  std::vector<DiagnosticsRecord> records;
  State final_state;
  std::optional<VectorField> final_U;  // carried U of Elsasser runs
  int steps = 0;
};

/// Integrates `config` from its initial data to t_end.
/// Throws VacuumError, CflError, NonFiniteError or ConvergenceError.
SimulationResult simulate(const SimConfig& config, const Observer& observer = {});
/// Same, from an explicit initial state.
SimulationResult simulate_from(const SimConfig& config, const State& initial,
                               const Observer& observer = {});

}  // namespace oddflow
