#include "oddflow/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

#include "oddflow/errors.hpp"
#include "oddflow/littlewood_paley.hpp"

namespace oddflow {

namespace {

using nlohmann::json;

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

// Dotted leaf paths below an unknown key, e.g. "viscsity.a".
void leaf_paths(const json& j, const std::string& path, std::vector<std::string>& out) {
  if (j.is_object() && !j.empty()) {
    for (auto it = j.begin(); it != j.end(); ++it) leaf_paths(it.value(), join(path, it.key()), out);
  } else {
    out.push_back(path);
  }
}

void require_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
  if (!obj.is_object()) {
    throw ConfigError("config key '" + (path.empty() ? std::string("<root>") : path) +
                      "' must be an object");
  }
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (allowed.count(it.key()) == 0) {
      std::vector<std::string> leaves;
      leaf_paths(it.value(), join(path, it.key()), leaves);
      std::string names;
      for (const auto& l : leaves) names += (names.empty() ? "" : ", ") + l;
      throw ConfigError("unknown config key '" + names + "'");
    }
  }
}

template <class T>
void read(const json& obj, const std::string& path, const char* key, T& target) {
  if (!obj.contains(key)) return;
  try {
    target = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + join(path, key) + "' has the wrong type");
  }
}

ModeShape parse_shape(const std::string& s) {
  if (s == "sin_sin") return ModeShape::SinSin;
  if (s == "sin_cos") return ModeShape::SinCos;
  if (s == "cos_sin") return ModeShape::CosSin;
  if (s == "cos_cos") return ModeShape::CosCos;
  throw ConfigError("initial.modes.shape must be sin_sin, sin_cos, cos_sin or cos_cos");
}

double parse_q(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return kInf;
    throw ConfigError("lp.q must be 1, 2 or \"inf\"");
  }
  if (!j.is_number()) throw ConfigError("lp.q must be 1, 2 or \"inf\"");
  const double q = j.get<double>();
  if (q != 1.0 && q != 2.0) throw ConfigError("lp.q must be 1, 2 or \"inf\"");
  return q;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  require_keys(root, "", {"grid", "viscosity", "elliptic", "dynamics", "initial", "picard",
                          "stability", "eps_sweep", "lp", "output", "seed"});
  RunConfig c;

  if (root.contains("grid")) {
    const json& g = root["grid"];
    require_keys(g, "grid", {"n", "length"});
    std::size_t n = c.sim.grid.n();
    double length = c.sim.grid.length();
    read(g, "grid", "n", n);
    read(g, "grid", "length", length);
    try {
      c.sim.grid = Grid(n, length);
    } catch (const Error& e) {
      throw ConfigError(std::string("grid: ") + e.what());
    }
  }

  if (root.contains("viscosity")) {
    const json& v = root["viscosity"];
    require_keys(v, "viscosity", {"kind", "a", "b", "alpha", "c", "rho_star"});
    std::string kind = "power_law";
    double a = 1.0;
    double b = 0.0;
    double alpha = 1.0;
    double cc = 0.0;
    read(v, "viscosity", "kind", kind);
    read(v, "viscosity", "a", a);
    read(v, "viscosity", "b", b);
    read(v, "viscosity", "alpha", alpha);
    read(v, "viscosity", "c", cc);
    if (v.contains("rho_star")) {
      double rs = 0.0;
      read(v, "viscosity", "rho_star", rs);
      c.rho_star = rs;
    }
    const double placeholder = c.rho_star.value_or(1.0);
    if (!(placeholder > 0.0)) throw ConfigError("viscosity.rho_star must be positive");
    if (kind == "power_law") {
      c.sim.law = ViscosityLaw::power_law(a, b, alpha, placeholder);
    } else if (kind == "constant") {
      c.sim.law = ViscosityLaw::constant(cc, placeholder);
    } else {
      throw ConfigError("viscosity.kind must be power_law or constant");
    }
  }

  if (root.contains("elliptic")) {
    const json& e = root["elliptic"];
    require_keys(e, "elliptic", {"tol", "max_iter"});
    read(e, "elliptic", "tol", c.sim.elliptic.tol);
    read(e, "elliptic", "max_iter", c.sim.elliptic.max_iter);
  }

  if (root.contains("dynamics")) {
    const json& d = root["dynamics"];
    require_keys(d, "dynamics", {"formulation", "epsilon", "dt", "cfl", "t_end", "integrator",
                                 "divergence_cleanup"});
    std::string form = to_string(c.sim.formulation);
    std::string integ = to_string(c.sim.integrator);
    read(d, "dynamics", "formulation", form);
    read(d, "dynamics", "integrator", integ);
    c.sim.formulation = parse_formulation(form);
    c.sim.integrator = parse_integrator(integ);
    read(d, "dynamics", "epsilon", c.sim.epsilon);
    read(d, "dynamics", "dt", c.sim.dt);
    read(d, "dynamics", "cfl", c.sim.cfl);
    read(d, "dynamics", "t_end", c.sim.t_end);
    read(d, "dynamics", "divergence_cleanup", c.sim.divergence_cleanup);
  }

  if (root.contains("initial")) {
    const json& in = root["initial"];
    require_keys(in, "initial", {"rho_mean", "rho_delta", "rho_kx", "rho_ky", "modes",
                                 "random_modes", "random_amplitude", "random_kmax"});
    InitialData& d = c.sim.initial;
    read(in, "initial", "rho_mean", d.rho_mean);
    read(in, "initial", "rho_delta", d.rho_delta);
    read(in, "initial", "rho_kx", d.rho_kx);
    read(in, "initial", "rho_ky", d.rho_ky);
    read(in, "initial", "random_modes", d.random_modes);
    read(in, "initial", "random_amplitude", d.random_amplitude);
    read(in, "initial", "random_kmax", d.random_kmax);
    if (in.contains("modes")) {
      if (!in["modes"].is_array()) throw ConfigError("config key 'initial.modes' must be an array");
      d.modes.clear();
      for (const json& m : in["modes"]) {
        require_keys(m, "initial.modes", {"kx", "ky", "amplitude", "shape"});
        StreamMode sm;
        std::string shape = "sin_sin";
        read(m, "initial.modes", "kx", sm.kx);
        read(m, "initial.modes", "ky", sm.ky);
        read(m, "initial.modes", "amplitude", sm.amplitude);
        read(m, "initial.modes", "shape", shape);
        sm.shape = parse_shape(shape);
        d.modes.push_back(sm);
      }
    }
    if (!(d.rho_mean > 0.0)) throw ConfigError("initial.rho_mean must be positive");
    if (!(std::abs(d.rho_delta) < 1.0)) throw ConfigError("initial.rho_delta must lie in (-1, 1)");
    if (d.random_modes < 0 || d.random_kmax < 1) {
      throw ConfigError("initial.random_modes must be >= 0 and initial.random_kmax >= 1");
    }
  }

  if (root.contains("picard")) {
    const json& p = root["picard"];
    require_keys(p, "picard", {"epsilon", "T", "n_max", "tol", "dt"});
    read(p, "picard", "epsilon", c.picard.epsilon);
    read(p, "picard", "T", c.picard.T);
    read(p, "picard", "n_max", c.picard.n_max);
    read(p, "picard", "tol", c.picard.tol);
    read(p, "picard", "dt", c.picard.dt);
  }

  if (root.contains("stability")) {
    const json& s = root["stability"];
    require_keys(s, "stability", {"deltas"});
    read(s, "stability", "deltas", c.stability_deltas);
  }

  if (root.contains("eps_sweep")) {
    const json& s = root["eps_sweep"];
    require_keys(s, "eps_sweep", {"epsilons", "t_end"});
    read(s, "eps_sweep", "epsilons", c.sweep_epsilons);
    if (s.contains("t_end")) {
      double t = 0.0;
      read(s, "eps_sweep", "t_end", t);
      c.sweep_t_end = t;
    }
  }

  if (root.contains("lp")) {
    const json& l = root["lp"];
    require_keys(l, "lp", {"s", "q"});
    read(l, "lp", "s", c.lp_s);
    if (l.contains("q")) c.lp_q = parse_q(l["q"]);
  }

  if (root.contains("output")) {
    const json& o = root["output"];
    require_keys(o, "output", {"dir", "every", "snapshots"});
    read(o, "output", "dir", c.output_dir);
    read(o, "output", "every", c.sim.output_every);
    read(o, "output", "snapshots", c.write_snapshots);
  }

  read(root, "", "seed", c.seed);
  return c;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void finalize(RunConfig& c) {
  c.sim.initial.seed = c.seed;
  validate(c.sim);
  const State s0 = make_initial_state(c.sim.grid, c.sim.initial);
  if (!(s0.rho.min() > 0.0)) throw ConfigError("initial density must be positive");
  const double rs = c.rho_star.value_or(default_rho_star(s0.rho));
  if (!(rs > 0.0)) throw ConfigError("viscosity.rho_star must be positive");
  c.sim.law = c.sim.law.with_rho_star(rs);
  if (s0.rho.min() < rs) {
    throw ConfigError("initial density falls below viscosity.rho_star");
  }
  c.sim.law.validate_range(s0.rho.min(), s0.rho.max());
  validate(c.picard);
  for (double d : c.stability_deltas) {
    if (!(d >= 0.0)) throw ConfigError("stability.deltas must be non-negative");
  }
  for (double e : c.sweep_epsilons) {
    if (!(e > 0.0 && e <= 1.0)) throw ConfigError("eps_sweep.epsilons must lie in (0, 1]");
  }
  if (c.sweep_t_end && !(*c.sweep_t_end > 0.0)) throw ConfigError("eps_sweep.t_end must be positive");
}

}  // namespace oddflow
