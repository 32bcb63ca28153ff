#include "oddflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "oddflow/dynamics.hpp"
#include "oddflow/errors.hpp"
#include "oddflow/parallel.hpp"

namespace oddflow {

std::vector<std::pair<std::string, std::string>> diagnostics_columns() {
  return {
      {"t", "simulation time"},
      {"E_u", "weighted kinetic norm ||sqrt(rho) u||_2"},
      {"E_U", "weighted norm of the effective velocity ||sqrt(rho) U||_2"},
      {"div_u_max", "max |div u| over the grid"},
      {"div_U_max", "max |div U| over the grid"},
      {"elsasser_residual", "||U_carried - (u - grad_perp g(rho))||_2 (0 unless elsasser)"},
      {"rho_min", "min rho over the grid"},
      {"rho_max", "max rho over the grid"},
      {"rho_mean", "mean of rho"},
      {"pde_residual", "momentum-equation residual at the state and its own tendency"},
      {"pressure_iters", "PCG iterations of the first-stage pressure solve"},
      {"pressure_residual", "relative residual of that pressure solve"},
  };
}

std::string diagnostics_csv_header() {
  std::string out;
  for (const auto& [name, desc] : diagnostics_columns()) {
    if (!out.empty()) out += ',';
    out += name;
  }
  return out;
}

std::string diagnostics_csv_row(const DiagnosticsRecord& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%.17g",
                r.t, r.E_u, r.E_U, r.div_u_max, r.div_U_max, r.elsasser_residual, r.rho_min,
                r.rho_max, r.rho_mean, r.pde_residual, r.pressure_iters, r.pressure_residual);
  return buf;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error("loglog_slope: need two or more pairs");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double m = static_cast<double>(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(x[k] > 0.0) || !(y[k] > 0.0)) throw Error("loglog_slope: values must be positive");
    const double lx = std::log(x[k]);
    const double ly = std::log(y[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

double weighted_energy(const ScalarField& rho, const VectorField& v, double rho_star) {
  const double m = rho.min();
  if (!(m > 0.0) || m < rho_star) {
    throw VacuumError("weighted_energy: density below admissible bound", m, rho_star);
  }
  const auto r = rho.values();
  const auto vx = v.x.values();
  const auto vy = v.y.values();
  double s = 0.0;
  for (std::size_t k = 0; k < r.size(); ++k) s += r[k] * (vx[k] * vx[k] + vy[k] * vy[k]);
  const double h = rho.grid().spacing();
  return std::sqrt(h * h * s);
}

namespace {

ScalarField reciprocal(const ScalarField& rho) {
  return rho.map([](double r) { return 1.0 / r; });
}

// || P[rho (du + F)] ||_2 + || div du ||_2
double projected_residual(const ScalarField& rho, const VectorField& du, const VectorField& F) {
  const VectorField G = rho * (du + F);
  return leray_project(G).l2_norm() + divergence(du).l2_norm();
}

VectorField reduced_flux(const VectorField& W, const ScalarField& rho, const VectorField& u,
                         double epsilon) {
  VectorField F = advect(W, u);
  if (epsilon != 0.0) F.axpy(-epsilon, product(reciprocal(rho), laplacian(u)));
  return F;
}

}  // namespace

double momentum_residual(const ViscosityLaw& law, double epsilon, const State& state,
                         const VectorField& du) {
  const VectorField U = effective_velocity(law, state);
  return projected_residual(state.rho, du, reduced_flux(U, state.rho, state.u, epsilon));
}

double pde_residual(const ViscosityLaw& law, Formulation formulation, double epsilon,
                    const State& state, const VectorField* U_carried, const Rate& rate) {
  switch (formulation) {
    case Formulation::Reduced: return momentum_residual(law, 0.0, state, rate.du);
    case Formulation::Regularized: return momentum_residual(law, epsilon, state, rate.du);
    case Formulation::Original: {
      VectorField F = advect(state.u, state.u);
      F += product(reciprocal(state.rho), odd_stress_divergence(law, state.rho, state.u));
      return projected_residual(state.rho, rate.du, F);
    }
    case Formulation::Elsasser: {
      if (U_carried == nullptr || !rate.dU) {
        throw Error("pde_residual: elsasser needs the carried U and its tendency");
      }
      const VectorField G_u = state.rho * (rate.du + advect(*U_carried, state.u));
      const VectorField G_U = state.rho * (*rate.dU + advect(state.u, *U_carried));
      return leray_project(G_u).l2_norm() + leray_project(G_U).l2_norm() +
             (G_u - G_U).l2_norm() + divergence(rate.du).l2_norm() +
             divergence(*rate.dU).l2_norm();
    }
  }
  return 0.0;
}

DiagnosticsRecord make_record(const ViscosityLaw& law, Formulation formulation, double epsilon,
                              const State& state, const VectorField* U_carried, const Rate& rate) {
  DiagnosticsRecord r;
  r.t = state.t;
  const VectorField U_eff = effective_velocity(law, state);
  const VectorField& U = U_carried != nullptr ? *U_carried : U_eff;
  r.E_u = weighted_energy(state.rho, state.u, law.rho_star());
  r.E_U = weighted_energy(state.rho, U, law.rho_star());
  r.div_u_max = divergence(state.u).max_abs();
  r.div_U_max = divergence(U).max_abs();
  r.elsasser_residual = U_carried != nullptr ? (*U_carried - U_eff).l2_norm() : 0.0;
  r.rho_min = state.rho.min();
  r.rho_max = state.rho.max();
  r.rho_mean = state.rho.mean();
  r.pde_residual = pde_residual(law, formulation, epsilon, state, U_carried, rate);
  r.pressure_iters = rate.pressure_iters;
  r.pressure_residual = rate.pressure_residual;
  return r;
}

// --- stability ---------------------------------------------------------------

State perturb(const State& state, double delta) {
  const Grid& g = state.rho.grid();
  const double k0 = g.k0();
  ScalarField drho = ScalarField::from_function(
      g, [&](double x, double y) { return std::cos(2 * k0 * x) * std::sin(k0 * y); });
  ScalarField psi = ScalarField::from_function(
      g, [&](double x, double y) { return std::sin(k0 * x) * std::cos(2 * k0 * y); });
  VectorField du = perp_gradient(psi);
  const double norm = std::sqrt(std::pow(drho.l2_norm(), 2) + std::pow(du.l2_norm(), 2));
  State out = state;
  out.rho.axpy(delta / norm, drho);
  out.u.axpy(delta / norm, du);
  return out;
}

namespace {

struct Trace {
  std::vector<double> t;
  std::vector<ScalarField> rho;
  std::vector<VectorField> u;
  std::vector<VectorField> U;
  std::vector<double> I;
};

double max_gradient_frobenius(const VectorField& v) {
  const GradientMatrix m = gradient_matrix(v);
  const auto a = m.m11.values();
  const auto b = m.m12.values();
  const auto c = m.m21.values();
  const auto d = m.m22.values();
  double out = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    out = std::max(out, std::sqrt(a[k] * a[k] + b[k] * b[k] + c[k] * c[k] + d[k] * d[k]));
  }
  return out;
}

Trace run_trace(const SimConfig& config, const State& initial, bool with_I) {
  Trace tr;
  const bool original = config.formulation == Formulation::Original;
  simulate_from(config, initial, [&](const Sample& s) {
    tr.t.push_back(s.state.t);
    tr.rho.push_back(s.state.rho);
    tr.u.push_back(s.state.u);
    tr.U.push_back(s.U);
    if (with_I) {
      ScalarField Pi = s.pressure;
      if (original) Pi -= f_eval(config.law, s.state.rho) * curl(s.state.u);
      tr.I.push_back(gradient(s.state.rho).max_magnitude() + max_gradient_frobenius(s.state.u) +
                     max_gradient_frobenius(s.U) + gradient(Pi).max_magnitude());
    }
  });
  return tr;
}

StabilityReport compare(const Trace& ref, const Trace& twin, double delta) {
  if (ref.t.size() != twin.t.size()) throw Error("stability: twin runs sampled differently");
  StabilityReport rep;
  rep.delta = delta;
  double acc = 0.0;
  for (std::size_t k = 0; k < ref.t.size(); ++k) {
    const double d = std::pow((twin.rho[k] - ref.rho[k]).l2_norm(), 2) +
                     std::pow((twin.u[k] - ref.u[k]).l2_norm(), 2) +
                     std::pow((twin.U[k] - ref.U[k]).l2_norm(), 2);
    if (k > 0) acc += 0.5 * (ref.t[k] - ref.t[k - 1]) * (ref.I[k] + ref.I[k - 1]);
    rep.t.push_back(ref.t[k]);
    rep.D.push_back(d);
    rep.I.push_back(ref.I[k]);
    rep.integral.push_back(acc);
  }
  return rep;
}

bool envelope_holds(const StabilityReport& r, double C) {
  if (r.D.empty()) return true;
  const double d0 = r.D.front();
  for (std::size_t k = 0; k < r.D.size(); ++k) {
    if (r.D[k] > C * std::exp(C * r.integral[k]) * d0 * (1.0 + 1e-12)) return false;
  }
  return true;
}

}  // namespace

double fit_gronwall_constant(const std::vector<const StabilityReport*>& reports, double c_max) {
  auto feasible = [&](double C) {
    return std::all_of(reports.begin(), reports.end(),
                       [&](const StabilityReport* r) { return envelope_holds(*r, C); });
  };
  if (feasible(1.0)) return 1.0;
  if (!feasible(c_max)) return std::numeric_limits<double>::infinity();
  // Feasibility is monotone in C (integrals are non-negative), so bisect.
  double lo = 1.0;
  double hi = c_max;
  while (hi - lo > 1e-9 * hi) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? hi : lo) = mid;
  }
  return hi;
}

void apply_envelope(StabilityReport& report, double C, double c_max) {
  report.C = C;
  report.envelope.clear();
  const double d0 = report.D.empty() ? 0.0 : report.D.front();
  const double c_eval = std::isfinite(C) ? C : c_max;
  for (double I : report.integral) report.envelope.push_back(c_eval * std::exp(c_eval * I) * d0);
  report.pass = std::isfinite(C) && C <= c_max && envelope_holds(report, c_eval);
}

std::vector<StabilityReport> stability_family(const SimConfig& config,
                                              const std::vector<double>& deltas) {
  const State initial = make_initial_state(config.grid, config.initial);
  const Trace ref = run_trace(config, initial, true);

  std::vector<Trace> twins(deltas.size());
  parallel_for(deltas.size(), [&](std::size_t i) {
    twins[i] = run_trace(config, perturb(initial, deltas[i]), false);
  });

  std::vector<StabilityReport> reports;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    reports.push_back(compare(ref, twins[i], deltas[i]));
  }
  std::vector<const StabilityReport*> ptrs;
  for (const auto& r : reports) ptrs.push_back(&r);
  const double C = fit_gronwall_constant(ptrs);
  for (auto& r : reports) apply_envelope(r, C);
  return reports;
}

StabilityReport stability_twin(const SimConfig& config, double delta) {
  return stability_family(config, {delta}).front();
}

}  // namespace oddflow
