#include "oddflow/dynamics.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "oddflow/errors.hpp"

namespace oddflow {

// --- state helpers -------------------------------------------------------------

std::string to_string(Formulation f) {
  switch (f) {
    case Formulation::Original: return "original";
    case Formulation::Reduced: return "reduced";
    case Formulation::Elsasser: return "elsasser";
    case Formulation::Regularized: return "regularized";
  }
  return "?";
}

Formulation parse_formulation(const std::string& name) {
  if (name == "original") return Formulation::Original;
  if (name == "reduced") return Formulation::Reduced;
  if (name == "elsasser") return Formulation::Elsasser;
  if (name == "regularized") return Formulation::Regularized;
  throw ConfigError("unknown formulation '" + name +
                    "' (expected original, reduced, elsasser or regularized)");
}

std::string to_string(Integrator i) { return i == Integrator::RK4 ? "rk4" : "if-rk4"; }

Integrator parse_integrator(const std::string& name) {
  if (name == "rk4") return Integrator::RK4;
  if (name == "if-rk4") return Integrator::IntegratingFactorRK4;
  throw ConfigError("unknown integrator '" + name + "' (expected rk4 or if-rk4)");
}

namespace {

double mode_value(ModeShape shape, double a, double b) {
  switch (shape) {
    case ModeShape::SinSin: return std::sin(a) * std::sin(b);
    case ModeShape::SinCos: return std::sin(a) * std::cos(b);
    case ModeShape::CosSin: return std::cos(a) * std::sin(b);
    case ModeShape::CosCos: return std::cos(a) * std::cos(b);
  }
  return 0.0;
}

}  // namespace

State make_initial_state(const Grid& grid, const InitialData& data) {
  const double k0 = grid.k0();
  ScalarField rho = ScalarField::from_function(grid, [&](double x, double y) {
    return data.rho_mean *
           (1.0 + data.rho_delta * std::cos(data.rho_kx * k0 * x) * std::cos(data.rho_ky * k0 * y));
  });

  std::vector<StreamMode> modes = data.modes;
  if (data.random_modes > 0) {
    std::mt19937_64 rng(data.seed);
    std::uniform_int_distribution<int> kdist(-data.random_kmax, data.random_kmax);
    std::uniform_real_distribution<double> adist(-data.random_amplitude, data.random_amplitude);
    std::uniform_int_distribution<int> sdist(0, 3);
    for (int m = 0; m < data.random_modes; ++m) {
      int kx = 0;
      int ky = 0;
      while (kx == 0 && ky == 0) {
        kx = kdist(rng);
        ky = kdist(rng);
      }
      const double amp = adist(rng);
      modes.push_back({kx, ky, amp, static_cast<ModeShape>(sdist(rng))});
    }
  }
  ScalarField psi = ScalarField::from_function(grid, [&](double x, double y) {
    double s = 0.0;
    for (const auto& m : modes) s += m.amplitude * mode_value(m.shape, m.kx * k0 * x, m.ky * k0 * y);
    return s;
  });
  return State{std::move(rho), perp_gradient(psi), 0.0};
}

void validate(const SimConfig& c) {
  if (!(c.dt > 0.0)) throw ConfigError("dynamics.dt must be positive");
  if (!(c.t_end >= 0.0)) throw ConfigError("dynamics.t_end must be non-negative");
  if (!(c.cfl > 0.0)) throw ConfigError("dynamics.cfl must be positive");
  if (c.output_every < 1) throw ConfigError("output.every must be >= 1");
  if (c.formulation == Formulation::Regularized && !(c.epsilon > 0.0 && c.epsilon <= 1.0)) {
    throw ConfigError("dynamics.epsilon must lie in (0, 1] for the regularized formulation");
  }
  if (c.integrator == Integrator::IntegratingFactorRK4 &&
      c.formulation != Formulation::Regularized) {
    throw ConfigError("the if-rk4 integrator applies to the regularized formulation only");
  }
  if (!(c.elliptic.tol > 0.0) || c.elliptic.max_iter < 1) {
    throw ConfigError("elliptic.tol must be positive and elliptic.max_iter >= 1");
  }
}

// --- building blocks ---------------------------------------------------------------

VectorField odd_stress_divergence(const ViscosityLaw& law, const ScalarField& rho,
                                  const VectorField& u) {
  const ScalarField f = f_eval(law, rho);
  const VectorField grad_f = gradient(f);
  const VectorField u_perp = perp(u);
  VectorField out = advect(grad_f, u_perp);
  out += product(f, laplacian(u_perp));
  // (grad f . grad_perp) u = (w . grad) u with w = -(grad f)_perp
  out += advect(-1.0 * perp(grad_f), u);
  return out;
}

VectorField effective_velocity(const ViscosityLaw& law, const ScalarField& rho,
                               const VectorField& u) {
  if (law.is_constant()) {
    check_vacuum(law, rho);
    return u;
  }
  return u - perp_gradient(g_eval(law, rho));
}

ScalarField recover_pressure(const ViscosityLaw& law, const State& state, const ScalarField& Pi) {
  ScalarField pi = Pi + f_eval(law, state.rho) * curl(state.u);
  const double m = pi.mean();
  for (double& v : pi.mutable_values()) v -= m;
  return pi;
}

namespace {

ScalarField reciprocal(const ScalarField& rho) {
  return rho.map([](double r) { return 1.0 / r; });
}

struct PressureStep {
  VectorField du;
  ScalarField Pi;
  EllipticSolution sol;
};

// du = -F - a grad Pi with -div(a grad Pi) = div F.
PressureStep project_with_pressure(const ScalarField& a, const VectorField& F,
                                   const EllipticOptions& opts, const ScalarField* warm) {
  EllipticSolution sol = solve_variable_poisson(EllipticProblem{a, F, opts, std::nullopt}, warm);
  VectorField du = -1.0 * F;
  du -= a * gradient(sol.Pi);
  ScalarField Pi = sol.Pi;
  return {std::move(du), std::move(Pi), std::move(sol)};
}

Rate make_rate(ScalarField drho, PressureStep&& p) {
  Rate r{std::move(drho), std::move(p.du), std::nullopt, std::move(p.Pi)};
  r.pressure_iters = p.sol.iterations;
  r.pressure_residual = p.sol.residual;
  r.energy_bound_holds = p.sol.energy_bound_holds;
  return r;
}

}  // namespace

VelocityTendency transported_velocity_tendency(const VectorField& U, const ScalarField& a,
                                               const VectorField& u, double epsilon,
                                               const EllipticOptions& opts,
                                               const ScalarField* warm_start) {
  VectorField F = advect(U, u);
  if (epsilon != 0.0) F.axpy(-epsilon, product(a, laplacian(u)));
  PressureStep p = project_with_pressure(a, F, opts, warm_start);
  return {std::move(p.du), std::move(p.Pi), p.sol.iterations, p.sol.residual,
          p.sol.energy_bound_holds};
}

Rate rhs_regularized(const ViscosityLaw& law, const State& state, double epsilon,
                     const EllipticOptions& opts, const ScalarField* warm_start) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw Error("regularization epsilon must lie in [0, 1]");
  }
  check_vacuum(law, state.rho);
  const VectorField U = effective_velocity(law, state);
  ScalarField drho = -advect(state.u, state.rho);
  VelocityTendency vt =
      transported_velocity_tendency(U, reciprocal(state.rho), state.u, epsilon, opts, warm_start);
  Rate r{std::move(drho), std::move(vt.du), std::nullopt, std::move(vt.Pi)};
  r.pressure_iters = vt.iterations;
  r.pressure_residual = vt.residual;
  r.energy_bound_holds = vt.energy_bound_holds;
  return r;
}

Rate rhs_reduced(const ViscosityLaw& law, const State& state, const EllipticOptions& opts,
                 const ScalarField* warm_start) {
  return rhs_regularized(law, state, 0.0, opts, warm_start);
}

Rate rhs_original(const ViscosityLaw& law, const State& state, const EllipticOptions& opts,
                  const ScalarField* warm_start) {
  check_vacuum(law, state.rho);
  const ScalarField a = reciprocal(state.rho);
  const VectorField T = odd_stress_divergence(law, state.rho, state.u);
  VectorField F = advect(state.u, state.u);
  F += product(a, T);
  return make_rate(-advect(state.u, state.rho), project_with_pressure(a, F, opts, warm_start));
}

Rate rhs_elsasser(const ViscosityLaw& law, const ExtendedState& state, const EllipticOptions& opts,
                  const ScalarField* warm_start) {
  check_vacuum(law, state.rho);
  const ScalarField a = reciprocal(state.rho);
  const VectorField F_U = advect(state.u, state.U);
  PressureStep p = project_with_pressure(a, advect(state.U, state.u), opts, warm_start);
  VectorField dU = -1.0 * F_U;
  dU -= a * gradient(p.Pi);
  Rate r = make_rate(-advect(state.u, state.rho), std::move(p));
  r.dU = std::move(dU);
  return r;
}

// --- integrators ------------------------------------------------------------------

State advance(const State& s, const Rate& r, double h) {
  State out = s;
  out.rho.axpy(h, r.drho);
  out.u.axpy(h, r.du);
  out.t = s.t + h;
  return out;
}

ExtendedState advance(const ExtendedState& s, const Rate& r, double h) {
  if (!r.dU) throw Error("advance: extended state needs a U tendency");
  ExtendedState out = s;
  out.rho.axpy(h, r.drho);
  out.u.axpy(h, r.du);
  out.U.axpy(h, *r.dU);
  out.t = s.t + h;
  return out;
}

namespace {

template <class S>
S rk4_generic(const std::function<Rate(const S&)>& rhs, const S& s, double dt, Rate* first) {
  Rate k1 = rhs(s);
  Rate k2 = rhs(advance(s, k1, 0.5 * dt));
  Rate k3 = rhs(advance(s, k2, 0.5 * dt));
  Rate k4 = rhs(advance(s, k3, dt));
  S out = s;
  const double w = dt / 6.0;
  out.rho.axpy(w, k1.drho).axpy(2 * w, k2.drho).axpy(2 * w, k3.drho).axpy(w, k4.drho);
  out.u.axpy(w, k1.du).axpy(2 * w, k2.du).axpy(2 * w, k3.du).axpy(w, k4.du);
  if constexpr (std::is_same_v<S, ExtendedState>) {
    out.U.axpy(w, *k1.dU).axpy(2 * w, *k2.dU).axpy(2 * w, *k3.dU).axpy(w, *k4.dU);
  }
  out.t = s.t + dt;
  if (first != nullptr) *first = std::move(k1);
  return out;
}

// exp(-c |k|^2 tau) applied to each component (Nyquist modes untouched, as in
// the Laplacian).
VectorField heat_propagator(const VectorField& v, double c_tau) {
  const Grid& g = v.grid();
  const double nyq = 0.5 * static_cast<double>(g.n()) * g.k0();
  auto m = [&](double kx, double ky) {
    const double ax = std::abs(std::abs(kx) - nyq) < 0.25 * g.k0() ? 0.0 : kx * kx;
    const double ay = std::abs(std::abs(ky) - nyq) < 0.25 * g.k0() ? 0.0 : ky * ky;
    return std::exp(-c_tau * (ax + ay));
  };
  return VectorField(apply_multiplier(v.x, m), apply_multiplier(v.y, m));
}

}  // namespace

State rk4_step(const std::function<Rate(const State&)>& rhs, const State& state, double dt,
               Rate* first_stage) {
  return rk4_generic<State>(rhs, state, dt, first_stage);
}

ExtendedState rk4_step(const std::function<Rate(const ExtendedState&)>& rhs,
                       const ExtendedState& state, double dt, Rate* first_stage) {
  return rk4_generic<ExtendedState>(rhs, state, dt, first_stage);
}

State if_rk4_step(const ViscosityLaw& law, const State& state, double epsilon, double dt,
                  const EllipticOptions& opts, ScalarField* warm_start, Rate* first_stage) {
  const double abar = reciprocal(state.rho).mean();
  const double c = epsilon * abar;
  // Nonlinear remainder N(y) = RHS(y) - c Lap u.
  auto N = [&](const State& s) {
    Rate r = rhs_regularized(law, s, epsilon, opts, warm_start);
    if (warm_start != nullptr) *warm_start = r.pressure;
    r.du.axpy(-c, laplacian(s.u));
    return r;
  };
  auto Eh = [&](const VectorField& v) { return heat_propagator(v, c * 0.5 * dt); };
  auto E = [&](const VectorField& v) { return heat_propagator(v, c * dt); };

  Rate k1 = N(state);
  State y2 = advance(state, k1, 0.5 * dt);
  y2.u = Eh(y2.u);
  Rate k2 = N(y2);
  const VectorField Eh_u = Eh(state.u);
  State y3{state.rho, Eh_u, state.t + 0.5 * dt};
  y3.rho.axpy(0.5 * dt, k2.drho);
  y3.u.axpy(0.5 * dt, k2.du);
  Rate k3 = N(y3);
  State y4{state.rho, E(state.u), state.t + dt};
  y4.rho.axpy(dt, k3.drho);
  y4.u.axpy(dt, Eh(k3.du));
  Rate k4 = N(y4);

  const double w = dt / 6.0;
  State out{state.rho, E(state.u), state.t + dt};
  out.rho.axpy(w, k1.drho).axpy(2 * w, k2.drho).axpy(2 * w, k3.drho).axpy(w, k4.drho);
  out.u.axpy(w, E(k1.du));
  out.u.axpy(2 * w, Eh(k2.du + k3.du));
  out.u.axpy(w, k4.du);
  if (first_stage != nullptr) {
    k1.du.axpy(c, laplacian(state.u));  // report the full tendency
    *first_stage = std::move(k1);
  }
  return out;
}

double cfl_limit(const Grid& grid, double cfl, const VectorField& u, const VectorField& U) {
  const double vmax = std::max(u.max_magnitude(), U.max_magnitude());
  if (vmax == 0.0) return std::numeric_limits<double>::infinity();
  return cfl * grid.spacing() / vmax;
}

// --- driver ---------------------------------------------------------------------

namespace {

void check_finite(const State& s) {
  if (!s.rho.all_finite() || !s.u.all_finite()) {
    std::ostringstream os;
    os << "non-finite state at t=" << s.t;
    throw NonFiniteError(os.str());
  }
}

void cleanup_divergence(VectorField& v, double threshold) {
  if (divergence(v).max_abs() > threshold) v = leray_project(v);
}

int step_count(double t_end, double dt) {
  const double ratio = t_end / dt;
  const double r = std::round(ratio);
  if (std::abs(ratio - r) <= 1e-9 * std::max(1.0, ratio)) return static_cast<int>(r);
  return static_cast<int>(std::ceil(ratio));
}

void require_cfl(const SimConfig& c, double h, const State& s, const VectorField& U) {
  const double limit = cfl_limit(c.grid, c.cfl, s.u, U);
  if (h > limit) {
    std::ostringstream os;
    os << "CFL violation at t=" << s.t << ": dt=" << h << " exceeds " << limit;
    throw CflError(os.str());
  }
}

}  // namespace

SimulationResult simulate(const SimConfig& config, const Observer& observer) {
  return simulate_from(config, make_initial_state(config.grid, config.initial), observer);
}

SimulationResult simulate_from(const SimConfig& config, const State& initial,
                               const Observer& observer) {
  validate(config);
  const ViscosityLaw& law = config.law;
  check_vacuum(law, initial.rho);
  law.validate_range(initial.rho.min(), initial.rho.max());
  check_finite(initial);

  const int nsteps = step_count(config.t_end, config.dt);
  const bool elsasser = config.formulation == Formulation::Elsasser;
  const double eps = config.formulation == Formulation::Regularized ? config.epsilon : 0.0;

  SimulationResult result{{}, initial, std::nullopt, 0};
  ScalarField warm(initial.rho.grid());

  auto emit = [&](int k, const State& s, const VectorField* carried, const Rate& rate) {
    DiagnosticsRecord rec = make_record(law, config.formulation, eps, s, carried, rate);
    result.records.push_back(rec);
    if (observer) {
      const VectorField U = carried != nullptr ? *carried : effective_velocity(law, s);
      observer(Sample{k, s, U, rate.pressure, rec});
    }
  };

  auto state_rhs = [&](const State& s) {
    Rate r = [&] {
      switch (config.formulation) {
        case Formulation::Original: return rhs_original(law, s, config.elliptic, &warm);
        case Formulation::Regularized:
          return rhs_regularized(law, s, eps, config.elliptic, &warm);
        default: return rhs_reduced(law, s, config.elliptic, &warm);
      }
    }();
    warm = r.pressure;
    return r;
  };
  auto ext_rhs = [&](const ExtendedState& s) {
    Rate r = rhs_elsasser(law, s, config.elliptic, &warm);
    warm = r.pressure;
    return r;
  };

  auto step_time = [&](int k) { return std::min(config.t_end, (k + 1) * config.dt); };

  if (elsasser) {
    ExtendedState s{initial, effective_velocity(law, initial)};
    for (int k = 0; k < nsteps; ++k) {
      const double h = step_time(k) - s.t;
      require_cfl(config, h, s, s.U);
      Rate r0{ScalarField(s.rho.grid()), VectorField(s.rho.grid()), std::nullopt,
              ScalarField(s.rho.grid())};
      ExtendedState next = rk4_step(std::function<Rate(const ExtendedState&)>(ext_rhs), s, h, &r0);
      if (k % config.output_every == 0) emit(k, s, &s.U, r0);
      next.t = step_time(k);
      check_finite(next);
      if (!next.U.all_finite()) throw NonFiniteError("non-finite effective velocity");
      check_vacuum(law, next.rho);
      cleanup_divergence(next.u, config.divergence_cleanup);
      cleanup_divergence(next.U, config.divergence_cleanup);
      s = std::move(next);
    }
    const Rate rf = ext_rhs(s);
    emit(nsteps, s, &s.U, rf);
    result.final_state = State{s.rho, s.u, s.t};
    result.final_U = s.U;
  } else {
    State s = initial;
    const bool use_if = config.integrator == Integrator::IntegratingFactorRK4;
    for (int k = 0; k < nsteps; ++k) {
      const double h = step_time(k) - s.t;
      require_cfl(config, h, s, effective_velocity(law, s));
      Rate r0{ScalarField(s.rho.grid()), VectorField(s.rho.grid()), std::nullopt,
              ScalarField(s.rho.grid())};
      State next = use_if ? if_rk4_step(law, s, eps, h, config.elliptic, &warm, &r0)
                          : rk4_step(std::function<Rate(const State&)>(state_rhs), s, h, &r0);
      if (k % config.output_every == 0) emit(k, s, nullptr, r0);
      next.t = step_time(k);
      check_finite(next);
      check_vacuum(law, next.rho);
      cleanup_divergence(next.u, config.divergence_cleanup);
      s = std::move(next);
    }
    const Rate rf = state_rhs(s);
    emit(nsteps, s, nullptr, rf);
    result.final_state = std::move(s);
  }
  result.steps = nsteps;
  return result;
}

}  // namespace oddflow
