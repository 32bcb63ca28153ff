#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "oddflow/errors.hpp"
#include "oddflow/littlewood_paley.hpp"
#include "support.hpp"

using namespace oddflow;
using oddflow::testing::random_field;

namespace {

// Smallest and largest of (1 + |xi|^2)^(s/2) / (sum_j 2^{2js} phi_j(xi)^2)^(1/2)
// over the nonzero lattice: the exact equivalence constants of the two norms.
std::pair<double, double> norm_bracket(const DyadicPartition& p, double s) {
  const Grid& g = p.grid();
  double lo = kInf;
  double hi = 0.0;
  for (std::size_t row = 0; row < g.n(); ++row) {
    for (std::size_t col = 0; col < g.spectral_cols(); ++col) {
      const std::size_t idx = row * g.spectral_cols() + col;
      const double r2 = double(g.kx(row)) * g.kx(row) + double(g.ky(col)) * g.ky(col);
      double w = 0.0;
      for (int j = -1; j <= p.j_max(); ++j) w += std::exp2(2 * j * s) * std::pow(p.multiplier(j)[idx], 2);
      const double ratio = std::pow(1 + r2 * g.k0() * g.k0(), 0.5 * s) / std::sqrt(w);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
  }
  return {lo, hi};
}

ScalarField lattice_mode(const Grid& g, int kx, int ky) {
  return ScalarField::from_function(g, [&](double x, double y) { return std::cos(g.k0() * (kx * x + ky * y)); });
}

}  // namespace

TEST_CASE("profile values") {
  CHECK(lp_chi(0.0) == 1.0);
  CHECK(lp_chi(0.75) == 1.0);
  CHECK(lp_chi(4.0 / 3.0) == 0.0);
  CHECK(lp_chi(1.0) > 0.0);
  CHECK(lp_chi(1.0) < 1.0);
  CHECK(lp_phi(0.7) == 0.0);
  CHECK(lp_phi(8.0 / 3.0) == 0.0);
  CHECK(lp_phi(1.5) == 1.0);
}

TEST_CASE("partition structure") {
  const DyadicPartition p(Grid(64));
  CHECK(p.j_max() == 5);
  CHECK(DyadicPartition(Grid(32)).j_max() == 4);
  CHECK(p.unity_residual() < 1e-12);
  CHECK_THROWS_AS(p.multiplier(-2), Error);
  CHECK_THROWS_AS(p.multiplier(6), Error);

  // supports and ranges by lattice scan
  const Grid& g = p.grid();
  for (int j = -1; j <= p.j_max(); ++j) {
    const auto& m = p.multiplier(j);
    for (std::size_t row = 0; row < g.n(); ++row) {
      for (std::size_t col = 0; col < g.spectral_cols(); ++col) {
        const double v = m[row * g.spectral_cols() + col];
        const double r = std::hypot(g.kx(row), g.ky(col));
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        if (v == 0.0) continue;
        if (j == -1) {
          CHECK(r < 4.0 / 3.0);
        } else {
          CHECK(r > 0.75 * std::exp2(j));
          CHECK(r < 8.0 / 3.0 * std::exp2(j));
        }
      }
    }
  }
}

TEST_CASE("blocks of simple fields") {
  const Grid g(32);
  const DyadicPartition p(g);
  const ScalarField c(g, 2.5);
  CHECK((dyadic_block(p, c, -1) - c).max_abs() < 1e-15);
  for (int j = 0; j <= p.j_max(); ++j) CHECK(dyadic_block(p, c, j).max_abs() < 1e-15);

  // a mode with |xi| = 2^j lives in blocks j-1 .. j+1
  for (int j = 0; j <= 3; ++j) {
    const ScalarField f = lattice_mode(g, 1 << j, 0);
    for (int k = -1; k <= p.j_max(); ++k) {
      if (std::abs(k - j) >= 2) CHECK(dyadic_block(p, f, k).max_abs() < 1e-15);
    }
  }
}

TEST_CASE("reconstruction and almost orthogonality") {
  const Grid g(64, 5.0);
  const DyadicPartition p(g);
  std::mt19937_64 rng(3);
  const ScalarField f = random_field(g, rng, 20);
  ScalarField sum(g);
  for (int j = -1; j <= p.j_max(); ++j) sum += dyadic_block(p, f, j);
  CHECK((sum - f).max_abs() / f.max_abs() < 1e-11);
  CHECK((low_cutoff(p, f, p.j_max() + 1) - f).max_abs() / f.max_abs() < 1e-11);
  CHECK(low_cutoff(p, f, -1).max_abs() == 0.0);

  for (int j = -1; j <= p.j_max(); ++j) {
    for (int k = -1; k <= p.j_max(); ++k) {
      if (std::abs(j - k) < 2) continue;
      CHECK(dyadic_block(p, dyadic_block(p, f, k), j).max_abs() < 1e-13 * f.max_abs());
    }
  }
}

TEST_CASE("paraproduct terms are localized") {
  const Grid g(32);
  const DyadicPartition p(g);
  const DyadicPartition fine(Grid(64));
  std::mt19937_64 rng(6);
  const ScalarField u = random_field(g, rng, 10);
  const ScalarField v = random_field(g, rng, 10);
  for (int k = 0; k <= p.j_max(); ++k) {
    const ScalarField term = paraproduct_term(p, u, v, k);
    for (int j = -1; j <= fine.j_max(); ++j) {
      if (std::abs(j - k) >= 5) CHECK(dyadic_block(fine, term, j).max_abs() < 1e-12);
    }
  }
}

TEST_CASE("Bony decomposition") {
  const Grid g(32);
  const DyadicPartition p(g);
  std::mt19937_64 rng(8);
  const ScalarField u = random_field(g, rng, 10);
  const ScalarField v = random_field(g, rng, 10);
  const BonyParts b = bony_decompose(p, u, v);
  CHECK((b.T_uv + b.T_vu + b.R - b.uv).l2_norm() < 1e-10);
  // the refined product is exact at the coarse nodes
  CHECK(std::abs(b.uv(2, 4) - u(1, 2) * v(1, 2)) < 1e-12);

  const BonyParts one = bony_decompose(p, u, ScalarField(g, 1.0));
  CHECK(one.T_uv.max_abs() < 1e-14);
  CHECK((one.T_uv + one.T_vu + one.R - one.uv).l2_norm() < 1e-10);

  const BonyParts zero = bony_decompose(p, ScalarField(g), v);
  CHECK(zero.T_uv.max_abs() == 0.0);
  CHECK(zero.T_vu.max_abs() == 0.0);
  CHECK(zero.R.max_abs() == 0.0);
}

TEST_CASE("Sobolev and Besov norms") {
  const Grid g(32);
  const DyadicPartition p(g);
  CHECK(sobolev_norm(ScalarField(g), 1.0) == 0.0);
  CHECK(besov_norm(p, ScalarField(g), 1.0) == 0.0);

  // single mode cos(3x + 4y): |xi| = 5, ||f||_2 = L / sqrt(2)
  const ScalarField f = lattice_mode(g, 3, 4);
  for (double s : {0.0, 0.5, 1.0, 2.0}) {
    const double expect = std::pow(26.0, 0.5 * s) * g.length() / std::sqrt(2.0);
    CHECK(sobolev_norm(f, s) == doctest::Approx(expect).epsilon(1e-12));
  }
  CHECK(sobolev_norm(f, 0.0) == doctest::Approx(f.l2_norm()).epsilon(1e-12));

  // equivalence ratio stays inside the exact lattice bracket
  std::mt19937_64 rng(10);
  for (double s : {0.0, 0.5, 1.0}) {
    const auto [lo, hi] = norm_bracket(p, s);
    for (int k = 0; k < 20; ++k) {
      const ScalarField h = random_field(g, rng, 10);
      const double ratio = sobolev_norm(h, s) / besov_norm(p, h, s);
      CHECK(ratio >= lo * (1 - 1e-12));
      CHECK(ratio <= hi * (1 + 1e-12));
    }
    if (s <= 0.5) {
      CHECK(lo >= 1.0 / 3.0);
      CHECK(hi <= 3.0);
    }
  }
}

TEST_CASE("Bernstein ratios") {
  const Grid g(64);
  const DyadicPartition p(g);
  // a mode exactly at |xi| = 2^j
  for (int j = 0; j <= 4; ++j) CHECK(bernstein_ratio(p, lattice_mode(g, 1 << j, 0), j, 1) == doctest::Approx(1.0));
  // a mode near the inner edge of annulus j = 2 (radius 3)
  CHECK(bernstein_ratio(p, lattice_mode(g, 3, 1), 2, 1) == doctest::Approx(std::sqrt(10.0) / 4.0));

  std::mt19937_64 rng(12);
  for (int k = 0; k < 10; ++k) {
    const ScalarField f = random_field(g, rng, 21);
    for (int j = 0; j <= p.j_max(); ++j) {
      const double r = bernstein_ratio(p, f, j, 1);
      CHECK(r >= 0.7 * 0.75);
      CHECK(r <= 1.3 * 8.0 / 3.0);
    }
  }
  CHECK_THROWS_AS(bernstein_ratio(p, ScalarField(g, 1.0), 2, 1), Error);
}

TEST_CASE("time norms and Chemin-Lerner norms") {
  CHECK(time_norm({1.0, 1.0, 1.0}, {0.0, 0.5, 1.0}, 1.0) == doctest::Approx(1.0));
  CHECK(time_norm({0.0, 2.0}, {0.0, 1.0}, 2.0) == doctest::Approx(std::sqrt(2.0)));
  CHECK(time_norm({-3.0, 2.0}, {0.0, 1.0}, kInf) == 3.0);
  CHECK_THROWS_AS(time_norm({1.0}, {0.0, 1.0}, 2.0), Error);
  CHECK_THROWS_AS(time_norm({1.0, 1.0}, {0.0, 1.0}, 3.0), Error);

  const Grid g(32);
  const DyadicPartition p(g);
  std::mt19937_64 rng(14);
  const ScalarField f = random_field(g, rng, 8);
  const ScalarField h = random_field(g, rng, 8);
  std::vector<ScalarField> series;
  std::vector<ScalarField> steady;
  std::vector<double> times;
  for (int k = 0; k <= 10; ++k) {
    const double t = 0.1 * k;
    times.push_back(t);
    series.push_back(std::cos(t) * f + std::sin(3 * t) * h);
    steady.push_back(f);
  }
  const BlockSeries bs = block_series(p, series, times);
  const BlockSeries st = block_series(p, steady, times);
  for (double s : {0.0, 1.0}) {
    CHECK(chemin_lerner_norm(st, kInf, s) == doctest::Approx(besov_norm(p, f, s)).epsilon(1e-14));
    const double cl2 = chemin_lerner_norm(bs, 2.0, s);
    CHECK(std::abs(cl2 - time_besov_norm(bs, 2.0, s)) <= 1e-12 * cl2);
    CHECK(chemin_lerner_norm(bs, kInf, s) >= time_besov_norm(bs, kInf, s) * (1 - 1e-14));
    CHECK(chemin_lerner_norm(bs, 1.0, s) <= time_besov_norm(bs, 1.0, s) * (1 + 1e-14));
    // interpolation between L^inf H^s and L^1 H^{s+2}
    const double lhs = chemin_lerner_norm(bs, 2.0, s + 1);
    const double rhs = std::sqrt(chemin_lerner_norm(bs, kInf, s) * chemin_lerner_norm(bs, 1.0, s + 2));
    CHECK(lhs <= rhs * (1 + 1e-12));
  }
  CHECK_THROWS_AS(block_series(p, series, std::vector<double>(11, 0.0)), Error);
}
