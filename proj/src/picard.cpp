#include "oddflow/picard.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "oddflow/diagnostics.hpp"
#include "oddflow/dynamics.hpp"
#include "oddflow/errors.hpp"

namespace oddflow {

void validate(const PicardConfig& c) {
  if (!(c.epsilon > 0.0 && c.epsilon <= 1.0)) throw ConfigError("picard.epsilon must lie in (0, 1]");
  if (!(c.tol > 0.0)) throw ConfigError("picard.tol must be positive");
  if (!(c.T > 0.0)) throw ConfigError("picard.T must be positive");
  if (!(c.dt > 0.0)) throw ConfigError("picard.dt must be positive");
  if (c.n_max < 1) throw ConfigError("picard.n_max must be >= 1");
}

int picard_steps(const PicardConfig& c) {
  return std::max(1, static_cast<int>(std::ceil(c.T / c.dt - 1e-9)));
}

namespace {

// Cubic Hermite midpoint from endpoint values and derivatives.
template <class F>
F hermite_mid(const F& p0, const F& p1, const F& m0, const F& m1, double dt) {
  F out = 0.5 * (p0 + p1);
  out.axpy(dt / 8.0, m0);
  out.axpy(-dt / 8.0, m1);
  return out;
}

void require_half_steps(std::size_t nodes) {
  if (nodes < 3 || nodes % 2 == 0) {
    throw Error("trajectory must have 2N + 1 half-step nodes with N >= 1");
  }
}

}  // namespace

ScalarTrajectory transport_density(const VectorTrajectory& u, const ScalarField& rho0, double dt,
                                   double rho_star) {
  require_half_steps(u.size());
  const std::size_t N = (u.size() - 1) / 2;
  auto rate = [&](std::size_t node, const ScalarField& rho) { return -advect(u[node], rho); };

  std::vector<ScalarField> full{rho0};
  std::vector<ScalarField> slope;
  for (std::size_t k = 0; k < N; ++k) {
    const ScalarField& r = full.back();
    ScalarField k1 = rate(2 * k, r);
    ScalarField k2 = rate(2 * k + 1, r + 0.5 * dt * k1);
    ScalarField k3 = rate(2 * k + 1, r + 0.5 * dt * k2);
    ScalarField k4 = rate(2 * k + 2, r + dt * k3);
    ScalarField next = r;
    next.axpy(dt / 6.0, k1).axpy(dt / 3.0, k2).axpy(dt / 3.0, k3).axpy(dt / 6.0, k4);
    if (!next.all_finite()) throw NonFiniteError("transport_density: non-finite density");
    if (next.min() < rho_star) {
      throw VacuumError("transport_density: density below rho_star", next.min(), rho_star);
    }
    slope.push_back(std::move(k1));
    full.push_back(std::move(next));
  }
  slope.push_back(rate(2 * N, full.back()));

  ScalarTrajectory out;
  out.reserve(2 * N + 1);
  for (std::size_t k = 0; k < N; ++k) {
    out.push_back(full[k]);
    out.push_back(hermite_mid(full[k], full[k + 1], slope[k], slope[k + 1], dt));
  }
  out.push_back(full[N]);
  return out;
}

StokesSolution linear_stokes_solve(const ScalarTrajectory& a, const VectorTrajectory& U,
                                   const VectorField& u0, double epsilon, double dt,
                                   const EllipticOptions& opts) {
  require_half_steps(a.size());
  if (U.size() != a.size()) throw Error("linear_stokes_solve: coefficient trajectories differ in length");
  const std::size_t N = (a.size() - 1) / 2;
  for (const auto& ak : a) {
    if (!(ak.min() > 0.0)) throw Error("linear_stokes_solve: coefficient a must be positive");
  }

  StokesSolution sol;
  ScalarField warm(u0.grid());
  auto rate = [&](std::size_t node, const VectorField& u) {
    VelocityTendency vt = transported_velocity_tendency(U[node], a[node], u, epsilon, opts, &warm);
    sol.max_pressure_iters = std::max(sol.max_pressure_iters, vt.iterations);
    warm = vt.Pi;
    return vt;
  };

  std::vector<VectorField> full{u0};
  std::vector<VectorField> slope;
  for (std::size_t k = 0; k < N; ++k) {
    const VectorField& u = full.back();
    VelocityTendency t1 = rate(2 * k, u);
    sol.grad_Pi.push_back(gradient(t1.Pi));
    VectorField k2 = rate(2 * k + 1, u + 0.5 * dt * t1.du).du;
    VectorField k3 = rate(2 * k + 1, u + 0.5 * dt * k2).du;
    VectorField k4 = rate(2 * k + 2, u + dt * k3).du;
    VectorField next = u;
    next.axpy(dt / 6.0, t1.du).axpy(dt / 3.0, k2).axpy(dt / 3.0, k3).axpy(dt / 6.0, k4);
    if (!next.all_finite()) throw NonFiniteError("linear_stokes_solve: non-finite velocity");
    if (divergence(next).max_abs() > 1e-10) next = leray_project(next);
    slope.push_back(std::move(t1.du));
    full.push_back(std::move(next));
  }
  VelocityTendency last = rate(2 * N, full.back());
  sol.grad_Pi.push_back(gradient(last.Pi));
  slope.push_back(std::move(last.du));

  sol.u.reserve(2 * N + 1);
  for (std::size_t k = 0; k < N; ++k) {
    sol.u.push_back(full[k]);
    sol.u.push_back(hermite_mid(full[k], full[k + 1], slope[k], slope[k + 1], dt));
  }
  sol.u.push_back(full[N]);
  return sol;
}

double trajectory_residual(const ViscosityLaw& law, double epsilon, const ScalarTrajectory& rho_full,
                           const VectorTrajectory& u_full, double dt) {
  if (u_full.size() < 5 || rho_full.size() != u_full.size()) {
    throw Error("trajectory_residual: need at least five matching full-step nodes");
  }
  double worst = 0.0;
  for (std::size_t k = 2; k + 2 < u_full.size(); ++k) {
    VectorField du = u_full[k - 2] - u_full[k + 2];
    du.axpy(8.0, u_full[k + 1]);
    du.axpy(-8.0, u_full[k - 1]);
    du *= 1.0 / (12.0 * dt);
    const State s{rho_full[k], u_full[k], 0.0};
    worst = std::max(worst, momentum_residual(law, epsilon, s, du));
  }
  return worst;
}

PicardResult picard_run(const ViscosityLaw& law, const ScalarField& rho0, const VectorField& u0,
                        const PicardConfig& config) {
  validate(config);
  check_vacuum(law, rho0);
  law.validate_range(rho0.min(), rho0.max());
  const int N = picard_steps(config);
  const double dt = config.T / N;
  const std::size_t nodes = 2 * static_cast<std::size_t>(N) + 1;

  PicardResult res;
  res.dt = dt;
  res.rho.assign(nodes, rho0);
  res.u.assign(nodes, VectorField(rho0.grid()));

  auto sup_distance = [](const auto& p, const auto& q) {
    double m = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) m = std::max(m, (p[k] - q[k]).l2_norm());
    return m;
  };

  int growth = 0;
  for (int n = 1; n <= config.n_max; ++n) {
    ScalarTrajectory rho = transport_density(res.u, rho0, dt, law.rho_star());
    ScalarTrajectory a;
    VectorTrajectory U;
    a.reserve(nodes);
    U.reserve(nodes);
    for (std::size_t k = 0; k < nodes; ++k) {
      a.push_back(rho[k].map([](double r) { return 1.0 / r; }));
      U.push_back(effective_velocity(law, rho[k], res.u[k]));
    }
    StokesSolution st = linear_stokes_solve(a, U, u0, config.epsilon, dt, config.elliptic);

    PicardIterate it;
    it.n = n;
    it.d = sup_distance(st.u, res.u) + sup_distance(rho, res.rho);
    res.rho = std::move(rho);
    res.u = std::move(st.u);
    if (N >= 4) {
      ScalarTrajectory rf;
      VectorTrajectory uf;
      for (std::size_t k = 0; k < nodes; k += 2) {
        rf.push_back(res.rho[k]);
        uf.push_back(res.u[k]);
      }
      it.residual = trajectory_residual(law, config.epsilon, rf, uf, dt);
    }
    if (!res.history.empty() && it.d > res.history.back().d) {
      ++growth;
    } else {
      growth = 0;
    }
    res.history.push_back(it);
    if (it.d < config.tol) {
      res.converged = true;
      break;
    }
    if (growth >= 3) {
      res.diverged = true;
      break;
    }
  }
  return res;
}

}  // namespace oddflow
