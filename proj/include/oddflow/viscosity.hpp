#pragma once

// Density-dependent odd-viscosity coefficient f(rho) and the potential
//   g(rho) = int_{rho_star}^{rho} (2/r) f'(r) dr,
// whose perpendicular gradient turns the odd stress into a transport term.

#include <functional>
#include <string>
#include <variant>

#include "oddflow/grid.hpp"

namespace oddflow {

class ViscosityLaw {
 public:
  /// f(rho) = a rho^alpha + b
  struct PowerLaw {
    double a = 1.0;
    double b = 0.0;
    double alpha = 1.0;
  };
  /// f(rho) = c
  struct Constant {
    double c = 0.0;
  };
  /// User-supplied f and f'. g is evaluated by adaptive quadrature.
  struct Custom {
    std::function<double(double)> f;
    std::function<double(double)> fprime;
  };
  using Kind = std::variant<PowerLaw, Constant, Custom>;

  static ViscosityLaw power_law(double a, double b, double alpha, double rho_star);
  static ViscosityLaw constant(double c, double rho_star);
  static ViscosityLaw custom(std::function<double(double)> f, std::function<double(double)> fprime,
                             double rho_star);

  const Kind& kind() const { return kind_; }
  double rho_star() const { return rho_star_; }
  ViscosityLaw with_rho_star(double rho_star) const;
  /// True when f' vanishes identically (constant law, or a*alpha == 0).
  bool is_constant() const;
  std::string describe() const;

  // Pointwise evaluation. Throws VacuumError for rho < rho_star.
  double f(double rho) const;
  double fprime(double rho) const;
  /// Closed form for power laws, quadrature otherwise.
  double g(double rho) const;
  /// g'(rho) = 2 f'(rho) / rho
  double gprime(double rho) const;
  /// Adaptive Gauss-Kronrod evaluation of g, available for every law.
  /// Throws ConvergenceError if the 1e-12 tolerance is not met.
  double g_quadrature(double rho) const;

  /// Rejects laws whose derivative vanishes inside [rho_min, rho_max]
  /// unless it vanishes identically. Throws ConfigError.
  void validate_range(double rho_min, double rho_max) const;

 private:
  ViscosityLaw(Kind kind, double rho_star);
  void check_density(double rho) const;

  Kind kind_;
  double rho_star_;
};

/// The rho_star used when none is configured: 0.9 * min(rho0).
double default_rho_star(const ScalarField& rho0);

// Field versions. Each throws VacuumError if min(rho) < rho_star.
ScalarField f_eval(const ViscosityLaw& law, const ScalarField& rho);
ScalarField f_prime(const ViscosityLaw& law, const ScalarField& rho);
ScalarField g_eval(const ViscosityLaw& law, const ScalarField& rho);
ScalarField g_prime(const ViscosityLaw& law, const ScalarField& rho);

/// Throws VacuumError when min(rho) < rho_star.
void check_vacuum(const ViscosityLaw& law, const ScalarField& rho);

}  // namespace oddflow
