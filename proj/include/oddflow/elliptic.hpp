#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "oddflow/grid.hpp"

namespace oddflow {

struct EllipticOptions {
  double tol = 1e-10;
  int max_iter = 500;
};

/// -div(a grad Pi) = div(F) on the torus, Pi fixed by a zero mean.
struct EllipticProblem {
  ScalarField a;
  VectorField F;
  EllipticOptions options{};
  /// Ellipticity constant; defaults to min(a). Must satisfy 0 < a_star <= min(a).
  std::optional<double> a_star{};
};

struct EllipticSolution {
  ScalarField Pi;
  int iterations = 0;
  /// ||div(a grad Pi) + div F||_2 / ||div F||_2 (0 when div F is below rounding level)
  double residual = 0.0;
  std::vector<double> history;
  double a_star = 0.0;
  double grad_norm = 0.0;  // ||grad Pi||_2
  double flux_norm = 0.0;  // ||F||_2
  /// a_star ||grad Pi||_2 <= ||F||_2 (1 + 1e-8)
  bool energy_bound_holds = true;
};

/// Preconditioned conjugate gradients on the symmetric collocation operator
/// -div(a grad .), preconditioned by the exact spectral inverse of
/// -mean(a) Laplacian. `initial_guess` (warm start) may be null.
///
/// Throws ConvergenceError (with the residual history) if the tolerance is
/// not met within max_iter, Error if a drops below a_star or a_star <= 0.
EllipticSolution solve_variable_poisson(const EllipticProblem& problem,
                                        const ScalarField* initial_guess = nullptr);

/// Process-wide tallies of completed solves, safe under concurrent use.
struct EllipticCounters {
  std::uint64_t solves = 0;
  std::uint64_t bound_violations = 0;  // solves with energy_bound_holds == false
  int max_iterations = 0;
};
EllipticCounters elliptic_counters();
void reset_elliptic_counters();

/// Divergence-free part of v, v - grad Laplacian^{-1} div v.
VectorField leray_project(const VectorField& v);

/// Mean-zero solution of Laplacian(phi) = s (the mean of s is ignored).
ScalarField inverse_laplacian(const ScalarField& s);

}  // namespace oddflow
