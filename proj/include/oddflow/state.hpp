#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "oddflow/elliptic.hpp"
#include "oddflow/grid.hpp"
#include "oddflow/viscosity.hpp"

namespace oddflow {

/// Density and velocity of the closed formulations.
struct State {
  ScalarField rho;
  VectorField u;
  double t = 0.0;
};

/// State plus an independently evolved effective velocity U.
struct ExtendedState : State {
  VectorField U;
};

enum class Formulation { Original, Reduced, Elsasser, Regularized };
enum class Integrator { RK4, IntegratingFactorRK4 };

std::string to_string(Formulation f);
Formulation parse_formulation(const std::string& name);
std::string to_string(Integrator i);
Integrator parse_integrator(const std::string& name);

/// Time derivative of a state together with the pressure it was built from.
struct Rate {
  ScalarField drho;
  VectorField du;
  std::optional<VectorField> dU;  // Elsasser only
  ScalarField pressure;           // Pi, or pi for the original formulation
  int pressure_iters = 0;
  double pressure_residual = 0.0;
  bool energy_bound_holds = true;
};

enum class ModeShape { SinSin, SinCos, CosSin, CosCos };

/// One term A * shape(kx k0 x, ky k0 y) of the initial stream function.
struct StreamMode {
  int kx = 1;
  int ky = 1;
  double amplitude = 1.0;
  ModeShape shape = ModeShape::SinSin;
};

/// rho0 = rho_mean (1 + rho_delta cos(rho_kx k0 x) cos(rho_ky k0 y)),
/// u0 = grad_perp psi0, psi0 = sum of `modes` plus `random_modes` seeded terms.
struct InitialData {
  double rho_mean = 1.0;
  double rho_delta = 0.2;
  int rho_kx = 1;
  int rho_ky = 1;
  std::vector<StreamMode> modes{StreamMode{}};
  int random_modes = 0;
  double random_amplitude = 0.1;
  int random_kmax = 4;
  std::uint64_t seed = 0;
};

State make_initial_state(const Grid& grid, const InitialData& data);

struct SimConfig {
  Grid grid{64};
  ViscosityLaw law = ViscosityLaw::power_law(1.0, 0.0, 1.0, 0.72);
  Formulation formulation = Formulation::Reduced;
  double epsilon = 0.0;  // regularized formulation only, in (0, 1]
  double dt = 1e-3;
  double cfl = 0.5;
  double t_end = 1.0;
  Integrator integrator = Integrator::RK4;
  EllipticOptions elliptic{};
  InitialData initial{};
  /// Emit a diagnostics record every `output_every` steps (and at t_end).
  int output_every = 100;
  /// Re-project u (and U) when max |div| exceeds this after a step.
  double divergence_cleanup = 1e-10;
};

/// Throws ConfigError for dt <= 0, t_end < 0, cfl <= 0, or epsilon outside
/// (0, 1] for the regularized formulation.
void validate(const SimConfig& config);

}  // namespace oddflow
