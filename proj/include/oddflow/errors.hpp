#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace oddflow {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonFiniteError : public Error {
 public:
  using Error::Error;
};

/// Density dropped below the admissible lower bound rho_star.
class VacuumError : public Error {
 public:
  VacuumError(const std::string& what, double rho_min, double rho_star)
      : Error(what), rho_min_(rho_min), rho_star_(rho_star) {}
  double rho_min() const { return rho_min_; }
  double rho_star() const { return rho_star_; }

 private:
  double rho_min_;
  double rho_star_;
};

/// An iterative solve ran out of iterations. Carries the residual history.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> history)
      : Error(what), history_(std::move(history)) {}
  const std::vector<double>& history() const { return history_; }

 private:
  std::vector<double> history_;
};

class CflError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

/// A file or directory could not be created or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace oddflow
