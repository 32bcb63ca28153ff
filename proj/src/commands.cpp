#include "oddflow/commands.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "json.hpp"

#include "oddflow/config.hpp"
#include "oddflow/diagnostics.hpp"
#include "oddflow/dynamics.hpp"
#include "oddflow/errors.hpp"
#include "oddflow/littlewood_paley.hpp"
#include "oddflow/parallel.hpp"
#include "oddflow/picard.hpp"
#include "oddflow/snapshot.hpp"

namespace oddflow {

namespace fs = std::filesystem;

std::vector<std::string> subcommands() {
  return {"simulate", "compare-formulations", "picard", "eps-sweep",
          "twin-stability", "lp-analyze", "verify", "schema"};
}

std::vector<CsvSchema> csv_schemas() {
  return {
      {"diag.csv", diagnostics_columns()},
      {"compare.csv",
       {{"t", "sample time"},
        {"u_diff", "||u_original - u_reduced||_2"},
        {"pressure_grad_diff", "||grad pi_original - grad(Pi_reduced + f(rho) omega)||_2"}}},
      {"eps_sweep.csv",
       {{"epsilon", "regularization parameter"},
        {"error", "||u_eps(T) - u_0(T)||_2 against the reduced run"}}},
      {"picard.csv",
       {{"n", "iterate index"},
        {"d_n", "sup_t ||u^n - u^{n-1}||_2 + sup_t ||rho^n - rho^{n-1}||_2"},
        {"residual_n", "momentum residual of iterate n (five-point time difference)"}}},
      {"stability.csv",
       {{"t", "sample time"},
        {"D", "||(d rho, d u, d U)(t)||_2^2 between the twin runs"},
        {"I", "grid-max |grad rho| + |grad u| + |grad U| + |grad Pi| of the reference run"},
        {"envelope", "C exp(C int_0^t I) D(0) with the fitted C"},
        {"delta", "size of the initial perturbation"}}},
      {"lp.csv",
       {{"field", "rho or u"},
        {"record", "block, sobolev, besov, chemin_lerner or time_besov"},
        {"snapshot", "snapshot step index, -1 for whole-trajectory rows"},
        {"t", "snapshot time (empty for trajectory rows)"},
        {"j", "dyadic index for block rows, empty otherwise"},
        {"value", "the norm"}}},
  };
}

std::string csv_schema_help() {
  std::ostringstream os;
  for (const auto& s : csv_schemas()) {
    os << s.file << ":\n";
    for (const auto& [name, desc] : s.columns) {
      os << "  " << name;
      for (std::size_t k = name.size(); k < 20; ++k) os << ' ';
      os << desc << '\n';
    }
  }
  return os.str();
}

std::string csv_schema_json() {
  nlohmann::ordered_json root = nlohmann::ordered_json::object();
  for (const auto& s : csv_schemas()) {
    nlohmann::ordered_json cols = nlohmann::ordered_json::array();
    for (const auto& [name, desc] : s.columns) cols.push_back({{"name", name}, {"description", desc}});
    root[s.file] = cols;
  }
  return root.dump(2) + "\n";
}

namespace {

struct Context {
  RunConfig config;
  fs::path out;
  bool quiet = false;

  void log(const std::string& line) const {
    if (!quiet) std::cout << line << '\n';
  }
};

Context load(const CommandOptions& opt, bool needs_out = true) {
  Context ctx;
  ctx.config = opt.config_path ? parse_config(*opt.config_path) : RunConfig{};
  if (opt.seed) ctx.config.seed = *opt.seed;
  if (opt.out_dir) ctx.config.output_dir = *opt.out_dir;
  finalize(ctx.config);
  ctx.quiet = opt.quiet;
  ctx.out = ctx.config.output_dir;
  if (needs_out) {
    std::error_code ec;
    fs::create_directories(ctx.out, ec);
    if (ec || !fs::is_directory(ctx.out)) {
      throw IoError("cannot create output directory '" + ctx.out.string() + "'");
    }
  }
  return ctx;
}

class CsvFile {
 public:
  CsvFile(const fs::path& path, const std::string& header) : path_(path), os_(path) {
    if (!os_) throw IoError("cannot write '" + path.string() + "'");
    os_ << header << '\n';
  }
  void row(const std::string& line) {
    os_ << line << '\n';
    if (!os_) throw IoError("failed writing '" + path_.string() + "'");
  }

 private:
  fs::path path_;
  std::ofstream os_;
};

std::string header_of(const std::string& file) {
  for (const auto& s : csv_schemas()) {
    if (s.file != file) continue;
    std::string h;
    for (const auto& c : s.columns) h += (h.empty() ? "" : ",") + c.first;
    return h;
  }
  return {};
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string snapshot_name(int step) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "snap_%06d.oddf", step);
  return buf;
}

// --- simulate ------------------------------------------------------------------

int cmd_simulate(const CommandOptions& opt) {
  Context ctx = load(opt);
  const SimConfig& sim = ctx.config.sim;
  CsvFile diag(ctx.out / "diag.csv", diagnostics_csv_header());
  const SimulationResult res = simulate(sim, [&](const Sample& s) {
    diag.row(diagnostics_csv_row(s.record));
    if (ctx.config.write_snapshots) {
      write_snapshot(ctx.out / snapshot_name(s.step), Snapshot{s.state.t, s.state.rho, s.state.u,
                                                                s.pressure, s.U});
    }
  });
  const auto& first = res.records.front();
  const auto& last = res.records.back();
  ctx.log("simulate: " + to_string(sim.formulation) + " n=" + std::to_string(sim.grid.n()) +
          " steps=" + std::to_string(res.steps));
  ctx.log("  E_u " + num(first.E_u) + " -> " + num(last.E_u) + "  E_U " + num(first.E_U) +
          " -> " + num(last.E_U));
  ctx.log("  rho range [" + num(last.rho_min) + ", " + num(last.rho_max) + "]");
  return kExitOk;
}

// --- compare-formulations ----------------------------------------------------------

struct Capture {
  std::vector<State> states;
  std::vector<ScalarField> pressure;
};

int cmd_compare(const CommandOptions& opt) {
  Context ctx = load(opt);
  SimConfig reduced = ctx.config.sim;
  reduced.formulation = Formulation::Reduced;
  SimConfig original = reduced;
  original.formulation = Formulation::Original;

  std::vector<SimConfig> runs{reduced, original};
  std::vector<Capture> caps(2);
  std::vector<SimulationResult> results(2, SimulationResult{{}, make_initial_state(reduced.grid, reduced.initial), std::nullopt, 0});
  parallel_for(2, [&](std::size_t i) {
    results[i] = simulate(runs[i], [&](const Sample& s) {
      caps[i].states.push_back(s.state);
      caps[i].pressure.push_back(s.pressure);
    });
  });

  const char* names[] = {"diag_reduced.csv", "diag_original.csv"};
  for (std::size_t i = 0; i < 2; ++i) {
    CsvFile f(ctx.out / names[i], diagnostics_csv_header());
    for (const auto& r : results[i].records) f.row(diagnostics_csv_row(r));
  }
  CsvFile cmp(ctx.out / "compare.csv", header_of("compare.csv"));
  double worst_u = 0.0;
  double worst_p = 0.0;
  for (std::size_t k = 0; k < caps[0].states.size(); ++k) {
    const State& r = caps[0].states[k];
    const State& o = caps[1].states[k];
    const double du = (o.u - r.u).l2_norm();
    const ScalarField pi_r = recover_pressure(reduced.law, r, caps[0].pressure[k]);
    const double dp = (gradient(caps[1].pressure[k]) - gradient(pi_r)).l2_norm();
    worst_u = std::max(worst_u, du);
    worst_p = std::max(worst_p, dp);
    cmp.row(num(r.t) + "," + num(du) + "," + num(dp));
  }
  ctx.log("compare-formulations: max ||u_orig - u_red|| = " + num(worst_u) +
          ", max pressure-gradient gap = " + num(worst_p));
  return kExitOk;
}

// --- eps-sweep ------------------------------------------------------------------

int cmd_eps_sweep(const CommandOptions& opt) {
  Context ctx = load(opt);
  SimConfig base = ctx.config.sim;
  if (ctx.config.sweep_t_end) base.t_end = *ctx.config.sweep_t_end;
  base.output_every = 1 << 30;
  const auto& eps = ctx.config.sweep_epsilons;

  std::vector<SimConfig> runs;
  SimConfig ref = base;
  ref.formulation = Formulation::Reduced;
  ref.integrator = Integrator::RK4;
  runs.push_back(ref);
  for (double e : eps) {
    SimConfig c = base;
    c.formulation = Formulation::Regularized;
    c.epsilon = e;
    runs.push_back(c);
  }
  std::vector<VectorField> finals(runs.size(), VectorField(base.grid));
  parallel_for(runs.size(), [&](std::size_t i) { finals[i] = simulate(runs[i]).final_state.u; });

  CsvFile f(ctx.out / "eps_sweep.csv", header_of("eps_sweep.csv"));
  std::vector<double> errors;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    errors.push_back((finals[i + 1] - finals[0]).l2_norm());
    f.row(num(eps[i]) + "," + num(errors.back()));
  }
  if (eps.size() >= 2) ctx.log("eps-sweep: fitted slope " + num(loglog_slope(eps, errors)));
  return kExitOk;
}

// --- twin-stability ---------------------------------------------------------------

int cmd_twin(const CommandOptions& opt) {
  Context ctx = load(opt);
  const std::vector<double> deltas = opt.deltas.empty() ? ctx.config.stability_deltas : opt.deltas;
  const std::vector<StabilityReport> reports = stability_family(ctx.config.sim, deltas);
  CsvFile f(ctx.out / "stability.csv", header_of("stability.csv"));
  bool pass = true;
  for (const auto& r : reports) {
    for (std::size_t k = 0; k < r.t.size(); ++k) {
      f.row(num(r.t[k]) + "," + num(r.D[k]) + "," + num(r.I[k]) + "," + num(r.envelope[k]) + "," +
            num(r.delta));
    }
    pass = pass && r.pass;
  }
  ctx.log("twin-stability: fitted C = " + num(reports.front().C) + (pass ? " (pass)" : " (FAIL)"));
  return pass ? kExitOk : kExitCheckFailed;
}

// --- picard ---------------------------------------------------------------------

int cmd_picard(const CommandOptions& opt) {
  Context ctx = load(opt);
  const State s0 = make_initial_state(ctx.config.sim.grid, ctx.config.sim.initial);
  const PicardResult res = picard_run(ctx.config.sim.law, s0.rho, s0.u, ctx.config.picard);
  CsvFile f(ctx.out / "picard.csv", header_of("picard.csv"));
  for (const auto& it : res.history) {
    f.row(std::to_string(it.n) + "," + num(it.d) + "," + num(it.residual));
  }
  std::string status = res.converged ? "converged" : (res.diverged ? "diverging iterates" : "not converged");
  ctx.log("picard: " + status + " after " + std::to_string(res.history.size()) + " iterations");
  return kExitOk;
}

// --- lp-analyze -----------------------------------------------------------------

double parse_q_flag(const std::string& q) {
  if (q == "1") return 1.0;
  if (q == "2") return 2.0;
  if (q == "inf") return kInf;
  throw ConfigError("--q must be 1, 2 or inf");
}

int cmd_lp(const CommandOptions& opt) {
  Context ctx = load(opt);
  if (!opt.snapshots_dir) throw ConfigError("lp-analyze needs --snapshots <dir>");
  const double s = opt.s.value_or(ctx.config.lp_s);
  const double q = opt.q ? parse_q_flag(*opt.q) : ctx.config.lp_q;

  std::vector<fs::path> files;
  std::error_code ec;
  for (const auto& e : fs::directory_iterator(*opt.snapshots_dir, ec)) {
    const std::string name = e.path().filename().string();
    if (name.rfind("snap_", 0) == 0 && e.path().extension() == ".oddf") files.push_back(e.path());
  }
  if (ec) throw IoError("cannot list '" + *opt.snapshots_dir + "'");
  if (files.empty()) throw IoError("no snap_*.oddf files in '" + *opt.snapshots_dir + "'");
  std::sort(files.begin(), files.end());

  std::vector<Snapshot> snaps;
  std::vector<int> steps;
  for (const auto& p : files) {
    snaps.push_back(read_snapshot(p));
    steps.push_back(std::stoi(p.stem().string().substr(5)));
  }
  const DyadicPartition part(snaps.front().rho.grid());
  std::vector<double> times;
  std::vector<ScalarField> rho;
  std::vector<VectorField> u;
  for (const auto& sn : snaps) {
    if (!(sn.rho.grid() == part.grid())) throw FormatError("snapshots on different grids");
    times.push_back(sn.t);
    rho.push_back(sn.rho);
    u.push_back(sn.u);
  }

  CsvFile f(ctx.out / "lp.csv", header_of("lp.csv"));
  auto emit_field = [&](const std::string& field, const BlockSeries& series,
                        const std::vector<double>& sob) {
    for (std::size_t k = 0; k < series.norms.size(); ++k) {
      const std::string prefix = field + ",";
      const std::string where = std::to_string(steps[k]) + "," + num(times[k]) + ",";
      for (std::size_t b = 0; b < series.norms[k].size(); ++b) {
        f.row(prefix + "block," + where + std::to_string(static_cast<int>(b) - 1) + "," +
              num(series.norms[k][b]));
      }
      f.row(prefix + "sobolev," + where + "," + num(sob[k]));
      f.row(prefix + "besov," + where + "," + num(besov_from_blocks(series.norms[k], s)));
    }
    f.row(field + ",chemin_lerner,-1,,," + num(chemin_lerner_norm(series, q, s)));
    f.row(field + ",time_besov,-1,,," + num(time_besov_norm(series, q, s)));
  };
  std::vector<double> sob_rho;
  std::vector<double> sob_u;
  for (std::size_t k = 0; k < snaps.size(); ++k) {
    sob_rho.push_back(sobolev_norm(rho[k], s));
    sob_u.push_back(sobolev_norm(u[k], s));
  }
  emit_field("rho", block_series(part, rho, times), sob_rho);
  emit_field("u", block_series(part, u, times), sob_u);
  ctx.log("lp-analyze: " + std::to_string(snaps.size()) + " snapshots, j_max=" +
          std::to_string(part.j_max()));
  return kExitOk;
}

// --- verify ---------------------------------------------------------------------

ScalarField random_field(const Grid& g, std::mt19937_64& rng, int kmax) {
  std::normal_distribution<double> nd;
  std::vector<std::array<double, 4>> modes;
  for (int kx = -kmax; kx <= kmax; ++kx) {
    for (int ky = 0; ky <= kmax; ++ky) modes.push_back({double(kx), double(ky), nd(rng), nd(rng)});
  }
  const double k0 = g.k0();
  return ScalarField::from_function(g, [&](double x, double y) {
    double v = 0.0;
    for (const auto& m : modes) {
      const double ph = k0 * (m[0] * x + m[1] * y);
      v += m[2] * std::cos(ph) + m[3] * std::sin(ph);
    }
    return v;
  });
}

int cmd_verify(const CommandOptions& opt) {
  Context ctx = load(opt, false);
  std::mt19937_64 rng(ctx.config.seed);
  const Grid g(32);
  int failures = 0;
  auto check = [&](const std::string& name, double value, double bound) {
    const bool ok = value < bound;
    if (!ok) ++failures;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s %-40s %.3e < %.1e", ok ? "PASS" : "FAIL", name.c_str(), value,
                  bound);
    if (!ctx.quiet || !ok) std::cout << buf << '\n';
  };

  double ident = 0.0;
  double divperp = 0.0;
  double leray = 0.0;
  for (int k = 0; k < 10; ++k) {
    const ScalarField psi = random_field(g, rng, 8);
    const VectorField v = perp_gradient(psi);
    ident = std::max(ident, gradient_matrix_identity_check(v) / std::max(1.0, v.max_magnitude()));
    divperp = std::max(divperp, divergence(v).max_abs());
    const VectorField w(random_field(g, rng, 8), random_field(g, rng, 8));
    const VectorField p = leray_project(w);
    leray = std::max(leray, (leray_project(p) - p).max_magnitude());
  }
  check("gradient identity (solenoidal fields)", ident, 1e-10);
  check("div(grad_perp psi)", divperp, 1e-11);
  check("Leray idempotence", leray, 1e-11);

  {
    const ScalarField a = ScalarField::from_function(
        g, [](double x, double y) { return 2.0 + std::cos(x) * std::cos(y); });
    const ScalarField exact = ScalarField::from_function(g, [](double x, double y) { return std::sin(x + y); });
    const EllipticSolution sol = solve_variable_poisson({a, a * gradient(exact), {}, std::nullopt});
    check("elliptic manufactured solution", (sol.Pi + exact).max_abs(), 1e-8);
  }

  {
    const DyadicPartition part(g);
    check("partition of unity", part.unity_residual(), 1e-12);
    const ScalarField f = random_field(g, rng, 15);
    ScalarField sum(g);
    for (int j = -1; j <= part.j_max(); ++j) sum += dyadic_block(part, f, j);
    check("dyadic reconstruction", (sum - f).l2_norm() / f.l2_norm(), 1e-11);
    const ScalarField h = random_field(g, rng, 15);
    const BonyParts bp = bony_decompose(part, f, h);
    check("Bony reconstruction", (bp.T_uv + bp.T_vu + bp.R - bp.uv).l2_norm() / bp.uv.l2_norm(),
          1e-10);
  }

  {
    const SimConfig base = ctx.config.sim;
    const State s0 = make_initial_state(g, base.initial);
    const ViscosityLaw law = base.law.with_rho_star(default_rho_star(s0.rho));
    const Rate red = rhs_reduced(law, s0, base.elliptic);
    const Rate ori = rhs_original(law, s0, base.elliptic);
    check("original vs reduced tendency", (red.du - ori.du).l2_norm(), 1e-8);

    SimConfig run = base;
    run.grid = g;
    run.law = law;
    run.formulation = Formulation::Reduced;
    run.t_end = 0.1;
    run.dt = 1e-3;
    run.output_every = 1 << 30;
    const SimulationResult res = simulate(run);
    const auto& r0 = res.records.front();
    const auto& r1 = res.records.back();
    check("energy drift ||sqrt(rho) u||", std::abs(r1.E_u - r0.E_u) / r0.E_u, 1e-7);
    check("energy drift ||sqrt(rho) U||", std::abs(r1.E_U - r0.E_U) / r0.E_U, 1e-7);
    check("mean density drift", std::abs(r1.rho_mean - r0.rho_mean) / r0.rho_mean, 1e-12);
  }

  ctx.log(failures == 0 ? "verify: all checks passed"
                        : "verify: " + std::to_string(failures) + " check(s) failed");
  return failures == 0 ? kExitOk : kExitCheckFailed;
}

int cmd_schema(const CommandOptions&) {
  std::cout << csv_schema_json();
  return kExitOk;
}

}  // namespace

int dispatch(const std::string& sub, const CommandOptions& opt) {
  try {
    if (sub == "simulate") return cmd_simulate(opt);
    if (sub == "compare-formulations") return cmd_compare(opt);
    if (sub == "picard") return cmd_picard(opt);
    if (sub == "eps-sweep") return cmd_eps_sweep(opt);
    if (sub == "twin-stability") return cmd_twin(opt);
    if (sub == "lp-analyze") return cmd_lp(opt);
    if (sub == "verify") return cmd_verify(opt);
    if (sub == "schema") return cmd_schema(opt);
    std::cerr << "error: unknown subcommand '" << sub << "'\n";
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << '\n';
    return kExitIo;
  } catch (const VacuumError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const CflError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const NonFiniteError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const ConvergenceError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitOther;
  }
}

}  // namespace oddflow
