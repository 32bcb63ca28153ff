#pragma once

#include <string>
#include <vector>

#include "oddflow/state.hpp"

namespace oddflow {

/// Per-output-step scalars. Column order of diag.csv follows declaration order.
struct DiagnosticsRecord {
  double t = 0.0;
  double E_u = 0.0;                // ||sqrt(rho) u||_2
  double E_U = 0.0;                // ||sqrt(rho) U||_2
  double div_u_max = 0.0;
  double div_U_max = 0.0;
  double elsasser_residual = 0.0;  // ||U_carried - (u - grad_perp g(rho))||_2, 0 unless Elsasser
  double rho_min = 0.0;
  double rho_max = 0.0;
  double rho_mean = 0.0;
  double pde_residual = 0.0;
  int pressure_iters = 0;
  double pressure_residual = 0.0;
};

/// diag.csv header line (no trailing newline).
std::string diagnostics_csv_header();
/// One CSV row, fixed 17-significant-digit formatting.
std::string diagnostics_csv_row(const DiagnosticsRecord& r);
/// Column name -> description, in CSV order.
std::vector<std::pair<std::string, std::string>> diagnostics_columns();

/// Least-squares slope of log(y) against log(x). Needs two or more
/// positive pairs.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// ||sqrt(rho) v||_2. Throws VacuumError if min(rho) < rho_star or rho <= 0.
double weighted_energy(const ScalarField& rho, const VectorField& v, double rho_star = 0.0);

/// L2 residual of the momentum equation of `formulation` at `state`, with the
/// time derivative taken from `rate`. The pressure is eliminated through the
/// constant-coefficient Leray projection rather than re-solved, so the check
/// is independent of the variable-coefficient solver:
///   ||P[rho (du + (U.grad)u) - eps Lap u]||_2 + ||div du||_2  (reduced/regularized)
///   ||P[rho (du + (u.grad)u) + T]||_2 + ||div du||_2          (original)
/// plus the matching U-equation terms and ||G_u - G_U||_2 for Elsasser, where
/// both equations must share one pressure gradient.
/// `U_carried` is required for Elsasser and ignored otherwise.
double pde_residual(const ViscosityLaw& law, Formulation formulation, double epsilon,
                    const State& state, const VectorField* U_carried, const Rate& rate);

/// Residual of a state against an externally supplied tendency du (e.g. a
/// finite difference of a stored trajectory) for the regularized/reduced
/// momentum equation.
double momentum_residual(const ViscosityLaw& law, double epsilon, const State& state,
                         const VectorField& du);

/// Builds a record; `U_carried` is used for E_U and the Elsasser residual when given.
DiagnosticsRecord make_record(const ViscosityLaw& law, Formulation formulation, double epsilon,
                              const State& state, const VectorField* U_carried, const Rate& rate);

struct StabilityReport {
  std::vector<double> t;
  std::vector<double> D;         // ||(d rho, d u, d U)(t)||_2^2
  std::vector<double> I;         // ||grad rho2||_inf + ||grad u2||_inf + ||grad U2||_inf + ||grad Pi2||_inf
  std::vector<double> integral;  // trapezoid integral of I on [0, t]
  std::vector<double> envelope;  // C exp(C integral) D(0)
  double delta = 0.0;            // ||(d rho0, d u0)||_2
  double C = 1.0;
  bool pass = false;
};

/// Perturbation of fixed shape scaled so that ||(d rho0, d u0)||_2 = delta.
State perturb(const State& state, double delta);

/// Runs the reference solution (config's initial data) and a twin started
/// from perturb(initial, delta); samples at the config's output cadence.
/// The envelope constant is fitted on this single report.
StabilityReport stability_twin(const SimConfig& config, double delta);

/// Twin runs for several magnitudes sharing one reference run, with a single
/// Gronwall constant fitted across all of them.
std::vector<StabilityReport> stability_family(const SimConfig& config,
                                              const std::vector<double>& deltas);

/// Smallest C in [1, c_max] with D(t) <= C exp(C int_0^t I) D(0) at every
/// sample of every report; returns a value > c_max when none exists.
double fit_gronwall_constant(const std::vector<const StabilityReport*>& reports,
                             double c_max = 1e6);

/// Fills `envelope`, `C` and `pass` for the given constant.
void apply_envelope(StabilityReport& report, double C, double c_max = 1e6);

}  // namespace oddflow
