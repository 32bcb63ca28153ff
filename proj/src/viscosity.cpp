#include "oddflow/viscosity.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <sstream>

#include "oddflow/errors.hpp"

namespace oddflow {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kQuadratureTol = 1e-12;

}  // namespace

ViscosityLaw::ViscosityLaw(Kind kind, double rho_star) : kind_(std::move(kind)), rho_star_(rho_star) {
  if (!(rho_star > 0.0) || !std::isfinite(rho_star)) {
    throw ConfigError("viscosity.rho_star must be positive and finite");
  }
}

ViscosityLaw ViscosityLaw::power_law(double a, double b, double alpha, double rho_star) {
  return ViscosityLaw(PowerLaw{a, b, alpha}, rho_star);
}

ViscosityLaw ViscosityLaw::constant(double c, double rho_star) {
  return ViscosityLaw(Constant{c}, rho_star);
}

ViscosityLaw ViscosityLaw::custom(std::function<double(double)> f,
                                  std::function<double(double)> fprime, double rho_star) {
  if (!f || !fprime) throw ConfigError("custom viscosity law needs both f and f'");
  return ViscosityLaw(Custom{std::move(f), std::move(fprime)}, rho_star);
}

ViscosityLaw ViscosityLaw::with_rho_star(double rho_star) const {
  return ViscosityLaw(kind_, rho_star);
}

bool ViscosityLaw::is_constant() const {
  return std::visit(overloaded{[](const PowerLaw& p) { return p.a * p.alpha == 0.0; },
                               [](const Constant&) { return true; },
                               [](const Custom&) { return false; }},
                    kind_);
}

std::string ViscosityLaw::describe() const {
  std::ostringstream os;
  std::visit(overloaded{[&](const PowerLaw& p) {
                          os << "power_law(a=" << p.a << ", b=" << p.b << ", alpha=" << p.alpha
                             << ")";
                        },
                        [&](const Constant& c) { os << "constant(c=" << c.c << ")"; },
                        [&](const Custom&) { os << "custom"; }},
             kind_);
  os << ", rho_star=" << rho_star_;
  return os.str();
}

void ViscosityLaw::check_density(double rho) const {
  if (!(rho >= rho_star_)) {
    std::ostringstream os;
    os << "density " << rho << " below rho_star " << rho_star_ << " (vacuum guard)";
    throw VacuumError(os.str(), rho, rho_star_);
  }
}

double ViscosityLaw::f(double rho) const {
  check_density(rho);
  return std::visit(overloaded{[&](const PowerLaw& p) { return p.a * std::pow(rho, p.alpha) + p.b; },
                               [](const Constant& c) { return c.c; },
                               [&](const Custom& c) { return c.f(rho); }},
                    kind_);
}

double ViscosityLaw::fprime(double rho) const {
  check_density(rho);
  return std::visit(overloaded{[&](const PowerLaw& p) {
                                 return p.a * p.alpha == 0.0
                                            ? 0.0
                                            : p.a * p.alpha * std::pow(rho, p.alpha - 1.0);
                               },
                               [](const Constant&) { return 0.0; },
                               [&](const Custom& c) { return c.fprime(rho); }},
                    kind_);
}

double ViscosityLaw::gprime(double rho) const { return 2.0 * fprime(rho) / rho; }

double ViscosityLaw::g(double rho) const {
  check_density(rho);
  if (rho == rho_star_) return 0.0;
  return std::visit(
      overloaded{[&](const PowerLaw& p) {
                   const double aa = p.a * p.alpha;
                   if (aa == 0.0) return 0.0;
                   if (p.alpha == 1.0) return 2.0 * p.a * std::log(rho / rho_star_);
                   return 2.0 * aa / (p.alpha - 1.0) *
                          (std::pow(rho, p.alpha - 1.0) - std::pow(rho_star_, p.alpha - 1.0));
                 },
                 [](const Constant&) { return 0.0; },
                 [&](const Custom&) { return g_quadrature(rho); }},
      kind_);
}

double ViscosityLaw::g_quadrature(double rho) const {
  check_density(rho);
  if (rho == rho_star_) return 0.0;
  auto integrand = [this](double r) { return 2.0 * fprime(r) / r; };
  double error = 0.0;
  double l1 = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      integrand, rho_star_, rho, 15, kQuadratureTol, &error, &l1);
  if (!(error <= 10.0 * kQuadratureTol * std::max(1.0, l1))) {
    std::ostringstream os;
    os << "g quadrature did not converge at rho=" << rho << " (error estimate " << error << ")";
    throw ConvergenceError(os.str(), {error});
  }
  return value;
}

void ViscosityLaw::validate_range(double rho_min, double rho_max) const {
  if (is_constant()) return;
  if (!(rho_min >= rho_star_)) {
    throw ConfigError("density range starts below viscosity.rho_star");
  }
  // Scan f' on a fine sample of the range; a sign change or a zero means f
  // is not a diffeomorphism there.
  constexpr int samples = 257;
  double first = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double r = rho_min + (rho_max - rho_min) * k / (samples - 1);
    const double d = fprime(r);
    if (!std::isfinite(d) || d == 0.0) {
      throw ConfigError("viscosity law has f'(rho) = 0 inside the density range; f must be a "
                        "diffeomorphism or constant");
    }
    if (k == 0) first = d;
    if ((d > 0.0) != (first > 0.0)) {
      throw ConfigError("viscosity law f' changes sign inside the density range");
    }
  }
}

double default_rho_star(const ScalarField& rho0) { return 0.9 * rho0.min(); }

void check_vacuum(const ViscosityLaw& law, const ScalarField& rho) {
  const double m = rho.min();
  if (!(m >= law.rho_star())) {
    std::ostringstream os;
    os << "min density " << m << " below rho_star " << law.rho_star() << " (vacuum guard)";
    throw VacuumError(os.str(), m, law.rho_star());
  }
}

ScalarField f_eval(const ViscosityLaw& law, const ScalarField& rho) {
  check_vacuum(law, rho);
  return rho.map([&](double r) { return law.f(r); });
}

ScalarField f_prime(const ViscosityLaw& law, const ScalarField& rho) {
  check_vacuum(law, rho);
  return rho.map([&](double r) { return law.fprime(r); });
}

ScalarField g_eval(const ViscosityLaw& law, const ScalarField& rho) {
  check_vacuum(law, rho);
  return rho.map([&](double r) { return law.g(r); });
}

ScalarField g_prime(const ViscosityLaw& law, const ScalarField& rho) {
  check_vacuum(law, rho);
  return rho.map([&](double r) { return law.gprime(r); });
}

}  // namespace oddflow
