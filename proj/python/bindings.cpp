// Python module _oddflow: numpy-level access to the core operations.
// Fields cross the boundary as float64 arrays of shape (n, n), indexed
// [i, j] = value at (x_i, y_j).

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <numbers>
#include <optional>

#include "oddflow/commands.hpp"
#include "oddflow/config.hpp"
#include "oddflow/diagnostics.hpp"
#include "oddflow/dynamics.hpp"
#include "oddflow/errors.hpp"
#include "oddflow/littlewood_paley.hpp"
#include "oddflow/picard.hpp"
#include "oddflow/snapshot.hpp"

namespace py = pybind11;
using namespace oddflow;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

ScalarField to_field(const Array& a, double length) {
  if (a.ndim() != 2 || a.shape(0) != a.shape(1)) throw py::value_error("expected a square 2D array");
  const Grid g(static_cast<std::size_t>(a.shape(0)), length);
  std::vector<double> v(a.data(), a.data() + a.size());
  return ScalarField(g, std::move(v));
}

Array to_array(const ScalarField& f) {
  const auto n = static_cast<py::ssize_t>(f.grid().n());
  Array out({n, n});
  std::memcpy(out.mutable_data(), f.values().data(), f.values().size() * sizeof(double));
  return out;
}

py::tuple to_pair(const VectorField& v) { return py::make_tuple(to_array(v.x), to_array(v.y)); }

ViscosityLaw make_law(const std::string& kind, double a, double b, double alpha, double c,
                      double rho_star) {
  if (kind == "power_law") return ViscosityLaw::power_law(a, b, alpha, rho_star);
  if (kind == "constant") return ViscosityLaw::constant(c, rho_star);
  throw py::value_error("kind must be 'power_law' or 'constant'");
}

py::dict record_dict(const DiagnosticsRecord& r) {
  py::dict d;
  d["t"] = r.t;
  d["E_u"] = r.E_u;
  d["E_U"] = r.E_U;
  d["div_u_max"] = r.div_u_max;
  d["div_U_max"] = r.div_U_max;
  d["elsasser_residual"] = r.elsasser_residual;
  d["rho_min"] = r.rho_min;
  d["rho_max"] = r.rho_max;
  d["rho_mean"] = r.rho_mean;
  d["pde_residual"] = r.pde_residual;
  d["pressure_iters"] = r.pressure_iters;
  d["pressure_residual"] = r.pressure_residual;
  return d;
}

RunConfig config_from_json(const std::string& text) {
  RunConfig c = parse_config_text(text.empty() ? "{}" : text);
  finalize(c);
  return c;
}

}  // namespace

PYBIND11_MODULE(_oddflow, m) {
  m.doc() = "Pseudo-spectral core for 2D variable-density odd-viscosity flow";

  // translators are tried newest first, so the base class goes first
  auto& base = py::register_exception<Error>(m, "OddflowError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<VacuumError>(m, "VacuumError", base.ptr());
  py::register_exception<ConvergenceError>(m, "ConvergenceError", base.ptr());

  const double two_pi = 2.0 * std::numbers::pi;

  m.def(
      "gradient_identity_residual",
      [](const Array& ux, const Array& uy, double length) {
        return gradient_matrix_identity_check(VectorField(to_field(ux, length), to_field(uy, length)));
      },
      py::arg("ux"), py::arg("uy"), py::arg("length") = two_pi,
      "Max-norm of grad(u_perp) - grad_perp(u) + curl(u) I.");

  m.def(
      "perp_gradient",
      [](const Array& s, double length) { return to_pair(perp_gradient(to_field(s, length))); },
      py::arg("s"), py::arg("length") = two_pi);

  m.def(
      "curl",
      [](const Array& ux, const Array& uy, double length) {
        return to_array(curl(VectorField(to_field(ux, length), to_field(uy, length))));
      },
      py::arg("ux"), py::arg("uy"), py::arg("length") = two_pi);

  m.def(
      "divergence",
      [](const Array& ux, const Array& uy, double length) {
        return to_array(divergence(VectorField(to_field(ux, length), to_field(uy, length))));
      },
      py::arg("ux"), py::arg("uy"), py::arg("length") = two_pi);

  m.def(
      "leray_project",
      [](const Array& ux, const Array& uy, double length) {
        return to_pair(leray_project(VectorField(to_field(ux, length), to_field(uy, length))));
      },
      py::arg("ux"), py::arg("uy"), py::arg("length") = two_pi);

  m.def(
      "solve_variable_poisson",
      [](const Array& a, const Array& Fx, const Array& Fy, double tol, int max_iter, double length) {
        EllipticProblem p{to_field(a, length),
                          VectorField(to_field(Fx, length), to_field(Fy, length)),
                          EllipticOptions{tol, max_iter}, std::nullopt};
        const EllipticSolution s = solve_variable_poisson(p);
        py::dict d;
        d["Pi"] = to_array(s.Pi);
        d["iterations"] = s.iterations;
        d["residual"] = s.residual;
        d["energy_bound_holds"] = s.energy_bound_holds;
        return d;
      },
      py::arg("a"), py::arg("Fx"), py::arg("Fy"), py::arg("tol") = 1e-10, py::arg("max_iter") = 500,
      py::arg("length") = two_pi, "Solve -div(a grad Pi) = div F with mean(Pi) = 0.");

  m.def(
      "effective_velocity",
      [](const Array& rho, const Array& ux, const Array& uy, const std::string& kind, double a,
         double b, double alpha, double c, double rho_star, double length) {
        const ViscosityLaw law = make_law(kind, a, b, alpha, c, rho_star);
        return to_pair(effective_velocity(law, to_field(rho, length),
                                          VectorField(to_field(ux, length), to_field(uy, length))));
      },
      py::arg("rho"), py::arg("ux"), py::arg("uy"), py::arg("kind") = "power_law", py::arg("a") = 1.0,
      py::arg("b") = 0.0, py::arg("alpha") = 1.0, py::arg("c") = 0.0, py::arg("rho_star") = 0.5,
      py::arg("length") = two_pi, "U = u - grad_perp g(rho).");

  m.def(
      "viscosity_g",
      [](double rho, const std::string& kind, double a, double b, double alpha, double c,
         double rho_star) { return make_law(kind, a, b, alpha, c, rho_star).g(rho); },
      py::arg("rho"), py::arg("kind") = "power_law", py::arg("a") = 1.0, py::arg("b") = 0.0,
      py::arg("alpha") = 1.0, py::arg("c") = 0.0, py::arg("rho_star") = 1.0);

  m.def(
      "simulate",
      [](const std::string& config_json) {
        const RunConfig c = config_from_json(config_json);
        std::optional<SimulationResult> res;
        {
          py::gil_scoped_release release;
          res = simulate(c.sim);
        }
        py::list records;
        for (const auto& r : res->records) records.append(record_dict(r));
        py::dict d;
        d["records"] = records;
        d["rho"] = to_array(res->final_state.rho);
        d["u"] = to_pair(res->final_state.u);
        d["t"] = res->final_state.t;
        d["steps"] = res->steps;
        return d;
      },
      py::arg("config_json") = "", "Run a simulation from a JSON config string.");

  m.def(
      "picard",
      [](const std::string& config_json) {
        const RunConfig c = config_from_json(config_json);
        PicardResult res;
        {
          py::gil_scoped_release release;
          const State s0 = make_initial_state(c.sim.grid, c.sim.initial);
          res = picard_run(c.sim.law, s0.rho, s0.u, c.picard);
        }
        py::list hist;
        for (const auto& it : res.history) hist.append(py::make_tuple(it.n, it.d, it.residual));
        py::dict d;
        d["history"] = hist;
        d["converged"] = res.converged;
        d["diverged"] = res.diverged;
        d["u"] = to_pair(res.u_final());
        d["rho"] = to_array(res.rho_final());
        return d;
      },
      py::arg("config_json") = "", "Run the iterative construction from a JSON config string.");

  m.def(
      "dyadic_blocks",
      [](const Array& f, double length) {
        const ScalarField field = to_field(f, length);
        const DyadicPartition p(field.grid());
        py::list out;
        for (int j = -1; j <= p.j_max(); ++j) out.append(to_array(dyadic_block(p, field, j)));
        return out;
      },
      py::arg("f"), py::arg("length") = two_pi, "Blocks Delta_{-1} .. Delta_{j_max}.");

  m.def(
      "bony_decompose",
      [](const Array& u, const Array& v, double length) {
        const ScalarField fu = to_field(u, length);
        const DyadicPartition p(fu.grid());
        const BonyParts b = bony_decompose(p, fu, to_field(v, length));
        py::dict d;
        d["T_uv"] = to_array(b.T_uv);
        d["T_vu"] = to_array(b.T_vu);
        d["R"] = to_array(b.R);
        d["uv"] = to_array(b.uv);
        return d;
      },
      py::arg("u"), py::arg("v"), py::arg("length") = two_pi,
      "Paraproducts and remainder on the twice-refined grid.");

  m.def(
      "sobolev_norm", [](const Array& f, double s, double length) { return sobolev_norm(to_field(f, length), s); },
      py::arg("f"), py::arg("s"), py::arg("length") = two_pi);

  m.def(
      "read_snapshot",
      [](const std::string& path) {
        const Snapshot s = read_snapshot(path);
        py::dict d;
        d["t"] = s.t;
        d["length"] = s.rho.grid().length();
        d["rho"] = to_array(s.rho);
        d["u"] = to_pair(s.u);
        if (s.Pi) d["Pi"] = to_array(*s.Pi);
        if (s.U) d["U"] = to_pair(*s.U);
        return d;
      },
      py::arg("path"));

  m.def("csv_schema", &csv_schema_json, "CSV column documentation as a JSON string.");
}
