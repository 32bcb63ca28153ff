#pragma once

// Iterative construction of solutions of the regularized system: transport
// the density along the previous velocity, then solve a linear Stokes-type
// problem with the frozen coefficient a = 1/rho and transport field
//   U^n = u^n - grad_perp g(rho^{n+1}).
//
// Trajectories are stored densely on the half-step grid t_k = k dt / 2,
// k = 0 .. 2N, so that every RK4 stage time is a stored node. Full-step
// nodes come from the integrator; midpoints are cubic Hermite interpolants
// built from the endpoint tendencies.

#include <vector>

#include "oddflow/elliptic.hpp"
#include "oddflow/state.hpp"
#include "oddflow/viscosity.hpp"

namespace oddflow {

struct PicardConfig {
  double epsilon = 0.01;  // in (0, 1]
  double T = 0.1;
  int n_max = 40;
  double tol = 1e-9;      // stop when d_n < tol
  double dt = 1e-3;       // inner time step
  EllipticOptions elliptic{};
};

/// Throws ConfigError on epsilon outside (0, 1], tol <= 0, T <= 0 or dt <= 0.
void validate(const PicardConfig& config);

/// Number of full steps covering [0, T].
int picard_steps(const PicardConfig& config);

using ScalarTrajectory = std::vector<ScalarField>;
using VectorTrajectory = std::vector<VectorField>;

/// Solves (d_t + u.grad) rho = 0 with rho(0) = rho0 along the half-step
/// velocity trajectory `u` (2N + 1 nodes, spacing dt / 2). Returns the
/// half-step density trajectory. Throws VacuumError when the density drops
/// below rho_star and NonFiniteError on NaN.
ScalarTrajectory transport_density(const VectorTrajectory& u, const ScalarField& rho0, double dt,
                                   double rho_star = 0.0);

struct StokesSolution {
  VectorTrajectory u;       // half-step nodes
  VectorTrajectory grad_Pi; // full-step nodes
  int max_pressure_iters = 0;
};

/// Solves (d_t + U.grad) u + a grad Pi - eps a Lap u = 0, div u = 0, from u0
/// with half-step coefficient trajectories `a` and `U`.
StokesSolution linear_stokes_solve(const ScalarTrajectory& a, const VectorTrajectory& U,
                                   const VectorField& u0, double epsilon, double dt,
                                   const EllipticOptions& opts = {});

/// Max over interior full-step nodes of momentum_residual, with du/dt from
/// the five-point central difference of the full-step trajectory
/// (rho_full, u_full spaced by dt). Needs at least five nodes.
double trajectory_residual(const ViscosityLaw& law, double epsilon, const ScalarTrajectory& rho_full,
                           const VectorTrajectory& u_full, double dt);

struct PicardIterate {
  int n = 0;              // iterate index, starting at 1
  double d = 0.0;         // sup_t ||u^n - u^{n-1}||_2 + sup_t ||rho^n - rho^{n-1}||_2
  double residual = 0.0;  // max over interior full steps of the momentum residual
};

struct PicardResult {
  std::vector<PicardIterate> history;
  bool converged = false;
  /// d_n grew three times in a row.
  bool diverged = false;
  ScalarTrajectory rho;  // last iterate, half-step nodes
  VectorTrajectory u;
  double dt = 0.0;

  const ScalarField& rho_final() const { return rho.back(); }
  const VectorField& u_final() const { return u.back(); }
};

/// Runs the iteration from (rho0, u = 0). The residual uses a five-point
/// central difference in time of the full-step trajectory.
PicardResult picard_run(const ViscosityLaw& law, const ScalarField& rho0, const VectorField& u0,
                        const PicardConfig& config);

}  // namespace oddflow
