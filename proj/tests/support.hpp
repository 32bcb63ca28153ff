#pragma once

// Shared helpers for the test binaries: seeded band-limited random fields and
// a few independent reference computations.

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "oddflow/grid.hpp"

namespace oddflow::testing {

/// Sum of cos/sin modes with |kx|, |ky| <= kmax and normal coefficients,
/// evaluated pointwise (no transforms involved).
inline ScalarField random_field(const Grid& g, std::mt19937_64& rng, int kmax, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  std::vector<std::array<double, 4>> modes;
  for (int kx = -kmax; kx <= kmax; ++kx) {
    for (int ky = 0; ky <= kmax; ++ky) {
      if (ky == 0 && kx < 0) continue;
      modes.push_back({double(kx), double(ky), nd(rng), nd(rng)});
    }
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

/// Smooth positive density 1 + amp * (normalized random field).
inline ScalarField random_density(const Grid& g, std::mt19937_64& rng, int kmax, double amp) {
  ScalarField f = random_field(g, rng, kmax);
  f *= amp / f.max_abs();
  f += ScalarField(g, 1.0);
  return f;
}

inline VectorField random_solenoidal(const Grid& g, std::mt19937_64& rng, int kmax, double scale = 1.0) {
  ScalarField psi = random_field(g, rng, kmax);
  psi *= scale / psi.max_abs();
  return perp_gradient(psi);
}

/// Fourth-order central finite difference along an axis, periodic wrap.
inline ScalarField fd_derivative(const ScalarField& f, Axis axis) {
  const Grid& g = f.grid();
  const std::size_t n = g.n();
  const double h = g.spacing();
  ScalarField out(g);
  auto at = [&](long i, long j) {
    const long N = static_cast<long>(n);
    return f(static_cast<std::size_t>((i % N + N) % N), static_cast<std::size_t>((j % N + N) % N));
  };
  for (long i = 0; i < static_cast<long>(n); ++i) {
    for (long j = 0; j < static_cast<long>(n); ++j) {
      const long di = axis == Axis::X ? 1 : 0;
      const long dj = axis == Axis::Y ? 1 : 0;
      const double v = (-at(i + 2 * di, j + 2 * dj) + 8 * at(i + di, j + dj) - 8 * at(i - di, j - dj) +
                        at(i - 2 * di, j - 2 * dj)) /
                       (12 * h);
      out.set(static_cast<std::size_t>(i), static_cast<std::size_t>(j), v);
    }
  }
  return out;
}

/// Composite Simpson rule with m (even) panels.
template <class F>
double simpson(F&& f, double a, double b, int m = 2000) {
  const double h = (b - a) / m;
  double s = f(a) + f(b);
  for (int k = 1; k < m; ++k) s += (k % 2 == 1 ? 4.0 : 2.0) * f(a + k * h);
  return s * h / 3.0;
}

}  // namespace oddflow::testing
