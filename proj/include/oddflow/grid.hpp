#pragma once

// Doubly periodic fields on the torus [0, L)^2 and the pseudo-spectral
// calculus used by every formulation.
//
// Layout: values are stored row-major, value(i, j) = f(x_i, y_j) with
// x_i = i * L / n, y_j = j * L / n, at flat index i * n + j.
//
// Transform convention: the forward transform is unnormalized,
//   F[kx, ky] = sum_{i,j} f(x_i, y_j) exp(-i (kx x_i + ky y_j) 2 pi / L),
// and the backward transform carries the 1/n^2 factor. Only the half
// spectrum ky in [0, n/2] is stored (n * (n/2 + 1) coefficients, row index
// carries kx with the usual wrap-around).

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <numbers>
#include <span>
#include <vector>

namespace oddflow {

using Complex = std::complex<double>;

enum class Axis { X = 0, Y = 1 };

class Grid {
 public:
  /// n must be a power of two with n >= 8; length must be positive.
  explicit Grid(std::size_t n, double length = 2.0 * std::numbers::pi);

  std::size_t n() const { return n_; }
  double length() const { return length_; }
  double spacing() const { return length_ / static_cast<double>(n_); }
  /// Base frequency 2 pi / L.
  double k0() const { return 2.0 * std::numbers::pi / length_; }
  std::size_t size() const { return n_ * n_; }
  std::size_t spectral_cols() const { return n_ / 2 + 1; }
  std::size_t spectral_size() const { return n_ * spectral_cols(); }

  double x(std::size_t i) const { return spacing() * static_cast<double>(i); }
  double y(std::size_t j) const { return spacing() * static_cast<double>(j); }

  /// Integer wavenumber of spectral row i, in (-n/2, n/2].
  int kx(std::size_t row) const {
    return row <= n_ / 2 ? static_cast<int>(row) : static_cast<int>(row) - static_cast<int>(n_);
  }
  /// Integer wavenumber of spectral column j, in [0, n/2].
  int ky(std::size_t col) const { return static_cast<int>(col); }

  /// Highest integer wavenumber kept by the 2/3 rule.
  int dealias_cutoff() const { return static_cast<int>(n_) / 3; }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.n_ == b.n_ && a.length_ == b.length_;
  }

 private:
  std::size_t n_;
  double length_;
};

/// Half-spectrum coefficients of a real field.
struct Spectrum {
  Grid grid;
  std::vector<Complex> coeffs;

  explicit Spectrum(const Grid& g) : grid(g), coeffs(g.spectral_size()) {}
  Complex& operator()(std::size_t row, std::size_t col) {
    return coeffs[row * grid.spectral_cols() + col];
  }
  const Complex& operator()(std::size_t row, std::size_t col) const {
    return coeffs[row * grid.spectral_cols() + col];
  }
  /// Multiplicity of a half-spectrum column in the full spectrum.
  double column_weight(std::size_t col) const {
    return (col == 0 || col == grid.n() / 2) ? 1.0 : 2.0;
  }
};

class ScalarField {
 public:
  explicit ScalarField(const Grid& grid, double fill = 0.0);
  ScalarField(const Grid& grid, std::vector<double> values);

  static ScalarField from_function(const Grid& grid,
                                   const std::function<double(double, double)>& f);

  const Grid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  /// Mutable access; drops the cached spectrum.
  std::span<double> mutable_values() {
    cache_.reset();
    return values_;
  }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * grid_.n() + j]; }
  void set(std::size_t i, std::size_t j, double v) {
    cache_.reset();
    values_[i * grid_.n() + j] = v;
  }

  /// Forward transform, computed on first use and kept until mutation.
  const Spectrum& spectrum() const;

  ScalarField& operator+=(const ScalarField& other);
  ScalarField& operator-=(const ScalarField& other);
  ScalarField& operator*=(double s);
  /// this += s * other
  ScalarField& axpy(double s, const ScalarField& other);

  /// Pointwise map.
  ScalarField map(const std::function<double(double)>& f) const;

  double min() const;
  double max() const;
  double mean() const;
  double max_abs() const;
  /// Continuous L2 norm, (h^2 sum f^2)^(1/2).
  double l2_norm() const;
  bool all_finite() const;

 private:
  Grid grid_;
  std::vector<double> values_;
  mutable std::shared_ptr<const Spectrum> cache_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a);
ScalarField operator*(double s, ScalarField a);
/// Raw pointwise product (no dealiasing).
ScalarField operator*(const ScalarField& a, const ScalarField& b);

/// Continuous L2 inner product h^2 sum a b.
double inner(const ScalarField& a, const ScalarField& b);

struct VectorField {
  ScalarField x;
  ScalarField y;

  explicit VectorField(const Grid& grid) : x(grid), y(grid) {}
  VectorField(ScalarField x_, ScalarField y_);

  const Grid& grid() const { return x.grid(); }

  VectorField& operator+=(const VectorField& o);
  VectorField& operator-=(const VectorField& o);
  VectorField& operator*=(double s);
  VectorField& axpy(double s, const VectorField& o);

  /// (h^2 sum |v|^2)^(1/2)
  double l2_norm() const;
  /// max over the grid of |v|
  double max_magnitude() const;
  bool all_finite() const { return x.all_finite() && y.all_finite(); }
};

VectorField operator+(VectorField a, const VectorField& b);
VectorField operator-(VectorField a, const VectorField& b);
VectorField operator*(double s, VectorField a);
/// Pointwise scaling by a scalar field (no dealiasing).
VectorField operator*(const ScalarField& s, const VectorField& v);
double inner(const VectorField& a, const VectorField& b);

/// Entries m[i][j] = d_i v_j of the gradient matrix of a vector field.
struct GradientMatrix {
  ScalarField m11, m12, m21, m22;
};

// --- transforms -----------------------------------------------------------

/// Throws NonFiniteError on NaN/Inf input.
Spectrum transform_forward(const ScalarField& field);
ScalarField transform_backward(const Spectrum& spectrum);

/// Multiply every coefficient by m(kx, ky) (physical wavenumbers) and
/// transform back.
ScalarField apply_multiplier(const ScalarField& field,
                             const std::function<double(double, double)>& m);

// --- differential operators -------------------------------------------------
// All derivatives zero the Nyquist row/column.

ScalarField derivative(const ScalarField& field, Axis axis);
VectorField gradient(const ScalarField& s);
ScalarField divergence(const VectorField& v);
ScalarField laplacian(const ScalarField& s);
VectorField laplacian(const VectorField& v);
GradientMatrix gradient_matrix(const VectorField& v);

/// u_perp = (-u_2, u_1)
VectorField perp(const VectorField& v);
/// grad_perp s = (-d_2 s, d_1 s)
VectorField perp_gradient(const ScalarField& s);
/// omega = d_1 u_2 - d_2 u_1
ScalarField curl(const VectorField& v);

/// Max-norm over the grid and the four matrix entries of
/// grad(v_perp) - grad_perp(v) + curl(v) I. The identity holds exactly for
/// solenoidal v; for general v the off-diagonal entries equal +-div v.
double gradient_matrix_identity_check(const VectorField& v);

// --- dealiasing and nonlinear products --------------------------------------

/// Zero every mode with |kx| > n/3 or |ky| > n/3.
ScalarField dealias(const ScalarField& field);
VectorField dealias(const VectorField& v);

/// Dealiased pointwise product.
ScalarField product(const ScalarField& a, const ScalarField& b);
VectorField product(const ScalarField& a, const VectorField& v);
/// Dealiased (v . grad) s.
ScalarField advect(const VectorField& v, const ScalarField& s);
/// Dealiased (v . grad) w, componentwise.
VectorField advect(const VectorField& v, const VectorField& w);

/// Zero-pad (m > n) or truncate (m < n) a field's spectrum onto a grid with
/// m points per axis and the same box length.
ScalarField resample(const ScalarField& field, std::size_t m);

}  // namespace oddflow
