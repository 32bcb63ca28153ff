#include "oddflow/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <string>

#include "oddflow/errors.hpp"

namespace oddflow {

namespace {

// FFTW planning is not thread-safe; execution with the new-array interface
// is. Plans are created once per size under a lock and never destroyed.
struct PlanPair {
  fftw_plan forward;
  fftw_plan backward;
};

const PlanPair& plans_for(std::size_t n) {
  static std::mutex mutex;
  static std::map<std::size_t, PlanPair> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  const int ni = static_cast<int>(n);
  std::vector<double> real(n * n);
  std::vector<Complex> spec(n * (n / 2 + 1));
  auto* c = reinterpret_cast<fftw_complex*>(spec.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  PlanPair p{fftw_plan_dft_r2c_2d(ni, ni, real.data(), c, flags),
             fftw_plan_dft_c2r_2d(ni, ni, c, real.data(), flags)};
  if (p.forward == nullptr || p.backward == nullptr) {
    throw Error("FFTW failed to create a plan for n=" + std::to_string(n));
  }
  return cache.emplace(n, p).first->second;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void require_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) throw Error("fields live on different grids");
}

}  // namespace

// --- Grid -------------------------------------------------------------------

Grid::Grid(std::size_t n, double length) : n_(n), length_(length) {
  if (n < 8 || !is_power_of_two(n)) {
    throw Error("grid size must be a power of two >= 8, got " + std::to_string(n));
  }
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw Error("grid length must be positive and finite");
  }
}

// --- ScalarField -----------------------------------------------------------

ScalarField::ScalarField(const Grid& grid, double fill) : grid_(grid), values_(grid.size(), fill) {}

ScalarField::ScalarField(const Grid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw Error("value array has " + std::to_string(values_.size()) + " entries, grid needs " +
                std::to_string(grid_.size()));
  }
}

ScalarField ScalarField::from_function(const Grid& grid,
                                       const std::function<double(double, double)>& f) {
  ScalarField out(grid);
  const std::size_t n = grid.n();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out.values_[i * n + j] = f(grid.x(i), grid.y(j));
  }
  return out;
}

const Spectrum& ScalarField::spectrum() const {
  if (!cache_) cache_ = std::make_shared<const Spectrum>(transform_forward(*this));
  return *cache_;
}

ScalarField& ScalarField::operator+=(const ScalarField& other) {
  require_same_grid(grid_, other.grid_);
  cache_.reset();
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
  require_same_grid(grid_, other.grid_);
  cache_.reset();
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= other.values_[k];
  return *this;
}

ScalarField& ScalarField::operator*=(double s) {
  cache_.reset();
  for (double& v : values_) v *= s;
  return *this;
}

ScalarField& ScalarField::axpy(double s, const ScalarField& other) {
  require_same_grid(grid_, other.grid_);
  cache_.reset();
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += s * other.values_[k];
  return *this;
}

ScalarField ScalarField::map(const std::function<double(double)>& f) const {
  ScalarField out(grid_);
  for (std::size_t k = 0; k < values_.size(); ++k) out.values_[k] = f(values_[k]);
  return out;
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

double ScalarField::mean() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s / static_cast<double>(values_.size());
}

double ScalarField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double ScalarField::l2_norm() const { return std::sqrt(inner(*this, *this)); }

bool ScalarField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator-(ScalarField a) { return a *= -1.0; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

ScalarField operator*(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid());
  ScalarField out(a.grid());
  auto o = out.mutable_values();
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t k = 0; k < o.size(); ++k) o[k] = av[k] * bv[k];
  return out;
}

double inner(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid());
  auto av = a.values();
  auto bv = b.values();
  double s = 0.0;
  for (std::size_t k = 0; k < av.size(); ++k) s += av[k] * bv[k];
  const double h = a.grid().spacing();
  return s * h * h;
}

// --- VectorField -------------------------------------------------------------

VectorField::VectorField(ScalarField x_, ScalarField y_) : x(std::move(x_)), y(std::move(y_)) {
  require_same_grid(x.grid(), y.grid());
}

VectorField& VectorField::operator+=(const VectorField& o) {
  x += o.x;
  y += o.y;
  return *this;
}

VectorField& VectorField::operator-=(const VectorField& o) {
  x -= o.x;
  y -= o.y;
  return *this;
}

VectorField& VectorField::operator*=(double s) {
  x *= s;
  y *= s;
  return *this;
}

VectorField& VectorField::axpy(double s, const VectorField& o) {
  x.axpy(s, o.x);
  y.axpy(s, o.y);
  return *this;
}

double VectorField::l2_norm() const { return std::sqrt(inner(*this, *this)); }

double VectorField::max_magnitude() const {
  auto xv = x.values();
  auto yv = y.values();
  double m = 0.0;
  for (std::size_t k = 0; k < xv.size(); ++k) m = std::max(m, std::hypot(xv[k], yv[k]));
  return m;
}

VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
VectorField operator*(double s, VectorField a) { return a *= s; }
VectorField operator*(const ScalarField& s, const VectorField& v) {
  return VectorField(s * v.x, s * v.y);
}
double inner(const VectorField& a, const VectorField& b) {
  return inner(a.x, b.x) + inner(a.y, b.y);
}

// --- transforms ----------------------------------------------------------------

Spectrum transform_forward(const ScalarField& field) {
  if (!field.all_finite()) throw NonFiniteError("transform_forward: non-finite input");
  const Grid& g = field.grid();
  Spectrum out(g);
  // FFTW takes a non-const input pointer even though r2c preserves it.
  std::vector<double> in(field.values().begin(), field.values().end());
  fftw_execute_dft_r2c(plans_for(g.n()).forward, in.data(),
                       reinterpret_cast<fftw_complex*>(out.coeffs.data()));
  return out;
}

ScalarField transform_backward(const Spectrum& spectrum) {
  const Grid& g = spectrum.grid;
  std::vector<Complex> work = spectrum.coeffs;  // c2r destroys its input
  std::vector<double> values(g.size());
  fftw_execute_dft_c2r(plans_for(g.n()).backward, reinterpret_cast<fftw_complex*>(work.data()),
                       values.data());
  const double scale = 1.0 / static_cast<double>(g.size());
  for (double& v : values) v *= scale;
  return ScalarField(g, std::move(values));
}

namespace {

// Applies m(kx_index, ky_index) to a copy of the spectrum.
template <class F>
ScalarField multiply_spectrum(const ScalarField& field, F&& m) {
  Spectrum s = field.spectrum();
  const Grid& g = s.grid;
  const std::size_t cols = g.spectral_cols();
  for (std::size_t r = 0; r < g.n(); ++r) {
    const int kx = g.kx(r);
    for (std::size_t c = 0; c < cols; ++c) s(r, c) *= m(kx, g.ky(c));
  }
  return transform_backward(s);
}

}  // namespace

ScalarField apply_multiplier(const ScalarField& field,
                             const std::function<double(double, double)>& m) {
  const double k0 = field.grid().k0();
  return multiply_spectrum(field, [&](int kx, int ky) { return Complex(m(k0 * kx, k0 * ky), 0.0); });
}

// --- differential operators ---------------------------------------------------

ScalarField derivative(const ScalarField& field, Axis axis) {
  const Grid& g = field.grid();
  const int nyq = static_cast<int>(g.n()) / 2;
  const double k0 = g.k0();
  if (axis == Axis::X) {
    return multiply_spectrum(field, [&](int kx, int) {
      return kx == nyq ? Complex(0.0) : Complex(0.0, k0 * kx);
    });
  }
  return multiply_spectrum(field, [&](int, int ky) {
    return ky == nyq ? Complex(0.0) : Complex(0.0, k0 * ky);
  });
}

VectorField gradient(const ScalarField& s) {
  return VectorField(derivative(s, Axis::X), derivative(s, Axis::Y));
}

ScalarField divergence(const VectorField& v) {
  return derivative(v.x, Axis::X) + derivative(v.y, Axis::Y);
}

ScalarField laplacian(const ScalarField& s) {
  const Grid& g = s.grid();
  const int nyq = static_cast<int>(g.n()) / 2;
  const double k02 = g.k0() * g.k0();
  return multiply_spectrum(s, [&](int kx, int ky) {
    const double ax = kx == nyq ? 0.0 : static_cast<double>(kx * kx);
    const double ay = ky == nyq ? 0.0 : static_cast<double>(ky * ky);
    return Complex(-k02 * (ax + ay), 0.0);
  });
}

VectorField laplacian(const VectorField& v) { return VectorField(laplacian(v.x), laplacian(v.y)); }

GradientMatrix gradient_matrix(const VectorField& v) {
  return {derivative(v.x, Axis::X), derivative(v.y, Axis::X), derivative(v.x, Axis::Y),
          derivative(v.y, Axis::Y)};
}

VectorField perp(const VectorField& v) { return VectorField(-v.y, v.x); }

VectorField perp_gradient(const ScalarField& s) {
  return VectorField(-derivative(s, Axis::Y), derivative(s, Axis::X));
}

ScalarField curl(const VectorField& v) {
  return derivative(v.y, Axis::X) - derivative(v.x, Axis::Y);
}

double gradient_matrix_identity_check(const VectorField& v) {
  // grad(v_perp) has columns grad(-v_2), grad(v_1); grad_perp(v) has columns
  // grad_perp(v_1), grad_perp(v_2).
  const GradientMatrix gperp = gradient_matrix(perp(v));
  const VectorField p1 = perp_gradient(v.x);
  const VectorField p2 = perp_gradient(v.y);
  const ScalarField w = curl(v);
  const double r11 = (gperp.m11 - p1.x + w).max_abs();
  const double r12 = (gperp.m12 - p2.x).max_abs();
  const double r21 = (gperp.m21 - p1.y).max_abs();
  const double r22 = (gperp.m22 - p2.y + w).max_abs();
  return std::max(std::max(r11, r12), std::max(r21, r22));
}

// --- dealiasing ------------------------------------------------------------------

ScalarField dealias(const ScalarField& field) {
  const int cut = field.grid().dealias_cutoff();
  return multiply_spectrum(field, [cut](int kx, int ky) {
    return (std::abs(kx) > cut || ky > cut) ? Complex(0.0) : Complex(1.0);
  });
}

VectorField dealias(const VectorField& v) { return VectorField(dealias(v.x), dealias(v.y)); }

ScalarField product(const ScalarField& a, const ScalarField& b) { return dealias(a * b); }

VectorField product(const ScalarField& a, const VectorField& v) {
  return VectorField(product(a, v.x), product(a, v.y));
}

ScalarField advect(const VectorField& v, const ScalarField& s) {
  return dealias(v.x * derivative(s, Axis::X) + v.y * derivative(s, Axis::Y));
}

VectorField advect(const VectorField& v, const VectorField& w) {
  return VectorField(advect(v, w.x), advect(v, w.y));
}

ScalarField resample(const ScalarField& field, std::size_t m) {
  const Grid& src = field.grid();
  const Grid dst(m, src.length());
  const Spectrum& in = field.spectrum();
  Spectrum out(dst);
  const int limit = static_cast<int>(std::min(src.n(), m)) / 2;  // exclusive bound on |k|
  const double scale = static_cast<double>(dst.size()) / static_cast<double>(src.size());
  for (std::size_t r = 0; r < src.n(); ++r) {
    const int kx = src.kx(r);
    if (std::abs(kx) >= limit) continue;
    const std::size_t dr = kx >= 0 ? static_cast<std::size_t>(kx)
                                   : static_cast<std::size_t>(static_cast<int>(m) + kx);
    for (std::size_t c = 0; c < static_cast<std::size_t>(limit); ++c) out(dr, c) = scale * in(r, c);
  }
  return transform_backward(out);
}

}  // namespace oddflow
