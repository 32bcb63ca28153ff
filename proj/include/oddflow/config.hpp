#pragma once

// JSON run configuration. Nested objects on disk, documented as dotted keys:
//
//   grid.n, grid.length
//   viscosity.kind (power_law | constant), viscosity.a, viscosity.b,
//   viscosity.alpha, viscosity.c, viscosity.rho_star (default 0.9 min rho0)
//   elliptic.tol, elliptic.max_iter
//   dynamics.formulation, dynamics.epsilon, dynamics.dt, dynamics.cfl,
//   dynamics.t_end, dynamics.integrator (rk4 | if-rk4), dynamics.divergence_cleanup
//   initial.rho_mean, initial.rho_delta, initial.rho_kx, initial.rho_ky,
//   initial.modes [{kx, ky, amplitude, shape}], initial.random_modes,
//   initial.random_amplitude, initial.random_kmax
//   picard.epsilon, picard.T, picard.n_max, picard.tol, picard.dt
//   stability.deltas [..]
//   eps_sweep.epsilons [..], eps_sweep.t_end
//   lp.s, lp.q (1 | 2 | "inf")
//   output.dir, output.every, output.snapshots
//   seed
//
// Unknown keys are rejected with a ConfigError naming the dotted key.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "oddflow/picard.hpp"
#include "oddflow/state.hpp"

namespace oddflow {

struct RunConfig {
  SimConfig sim;
  /// Set when viscosity.rho_star is given; otherwise derived from rho0.
  std::optional<double> rho_star;
  PicardConfig picard;
  std::vector<double> stability_deltas{1e-3, 5e-4, 2.5e-4};
  std::vector<double> sweep_epsilons{1e-1, 1e-2, 1e-3, 1e-4};
  std::optional<double> sweep_t_end;
  double lp_s = 1.0;
  double lp_q = 2.0;
  std::string output_dir = "out";
  bool write_snapshots = true;
  std::uint64_t seed = 0;
};

RunConfig parse_config_text(const std::string& json_text);
/// Throws ConfigError on unreadable files, malformed JSON or schema violations.
RunConfig parse_config(const std::string& path);

/// Applies the seed, resolves rho_star against the initial density and
/// validates the result.
void finalize(RunConfig& config);

}  // namespace oddflow
