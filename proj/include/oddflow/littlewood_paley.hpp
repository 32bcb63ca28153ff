#pragma once

// Dyadic frequency analysis on the torus lattice.
//
// Radii are measured in units of the base frequency k0 = 2 pi / L. The low
// cutoff is chi(xi) = theta(|xi| / (3/4)), with theta = 1 on [0, 1] and
//   theta(r) = exp(1 - 1 / (1 - ((r - 1) / gamma)^2)),  gamma = 7/9,
// on (1, 1 + gamma), so chi is supported in the ball of radius 4/3 and
// equals 1 on the ball of radius 3/4. phi(xi) = chi(xi / 2) - chi(xi) lives
// on the annulus 3/4 <= |xi| <= 8/3.
//
// Blocks: Delta_{-1} = chi(D), Delta_j = phi(2^{-j} D) for j = 0 .. j_max,
// with j_max = ceil(log2(n / 3)). The mean mode belongs to Delta_{-1}.
// All L2 norms are the continuous norms (h^2 sum f^2)^(1/2), computed
// through Parseval.

#include <limits>
#include <vector>

#include "oddflow/grid.hpp"

namespace oddflow {

inline constexpr double kLpGamma = 7.0 / 9.0;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Low cutoff profile as a function of |xi| / k0.
double lp_chi(double radius);
/// Annulus profile phi(xi) = chi(xi / 2) - chi(xi), argument |xi| / k0.
double lp_phi(double radius);

class DyadicPartition {
 public:
  explicit DyadicPartition(const Grid& grid);

  const Grid& grid() const { return grid_; }
  int j_max() const { return j_max_; }
  /// Half-spectrum multiplier of block j, j in [-1, j_max]. Throws Error
  /// when j is out of range.
  const std::vector<double>& multiplier(int j) const;
  /// max over the lattice of |chi + sum_j phi_j - 1|
  double unity_residual() const;

 private:
  Grid grid_;
  int j_max_;
  std::vector<std::vector<double>> blocks_;
};

inline DyadicPartition build_partition(const Grid& grid) { return DyadicPartition(grid); }

ScalarField dyadic_block(const DyadicPartition& p, const ScalarField& f, int j);
/// S_j f = sum_{k <= j-1} Delta_k f (zero for j <= -1).
ScalarField low_cutoff(const DyadicPartition& p, const ScalarField& f, int j);

/// ||Delta_j f||_2 for j = -1 .. j_max (index j + 1).
std::vector<double> block_norms(const DyadicPartition& p, const ScalarField& f);
/// Componentwise: sqrt(||Delta_j v_x||^2 + ||Delta_j v_y||^2).
std::vector<double> block_norms(const DyadicPartition& p, const VectorField& v);

/// (sum (1 + |xi|^2)^s |f_hat(xi)|^2)^(1/2), normalized so that s = 0 gives ||f||_2.
double sobolev_norm(const ScalarField& f, double s);
double sobolev_norm(const VectorField& v, double s);

/// (sum_j 2^{j s r} ||Delta_j f||_2^r)^(1/r); r = kInf gives the supremum.
double besov_norm(const DyadicPartition& p, const ScalarField& f, double s, double r = 2.0);
double besov_from_blocks(const std::vector<double>& blocks, double s, double r = 2.0);

/// Block norms ||Delta_j f(t_k)||_2 of a time series (rows: samples).
struct BlockSeries {
  std::vector<double> times;
  std::vector<std::vector<double>> norms;
};
BlockSeries block_series(const DyadicPartition& p, const std::vector<ScalarField>& series,
                         const std::vector<double>& times);
BlockSeries block_series(const DyadicPartition& p, const std::vector<VectorField>& series,
                         const std::vector<double>& times);

/// L^q norm in time of samples on `times` (trapezoid rule), q in {1, 2, kInf}.
double time_norm(const std::vector<double>& values, const std::vector<double>& times, double q);

/// Chemin-Lerner norm (sum_j 2^{2js} ||Delta_j f||_{L^q_T L^2}^2)^(1/2).
double chemin_lerner_norm(const BlockSeries& series, double q, double s);
/// L^q_T of the B^s_{2,2} norm, for comparison with chemin_lerner_norm.
double time_besov_norm(const BlockSeries& series, double q, double s);

/// The Bony decomposition of u v, formed on a grid refined by 2 so that the
/// products are free of aliasing. All four fields live on the refined grid.
struct BonyParts {
  ScalarField T_uv;  // sum_j S_{j-1} u Delta_j v
  ScalarField T_vu;  // sum_j S_{j-1} v Delta_j u
  ScalarField R;     // sum_{|j-k| <= 1} Delta_j u Delta_k v
  ScalarField uv;    // the plain product
};
BonyParts bony_decompose(const DyadicPartition& p, const ScalarField& u, const ScalarField& v);
/// S_{k-1} u Delta_k v on the refined grid.
ScalarField paraproduct_term(const DyadicPartition& p, const ScalarField& u, const ScalarField& v,
                             int k);

/// ||(|xi|^k) Delta_j f||_2 / (2^{jk} k0^k ||Delta_j f||_2). Throws Error on
/// a vanishing block or j out of range.
double bernstein_ratio(const DyadicPartition& p, const ScalarField& f, int j, int k);

/// E_eps = ||grad rho||_{Ltilde^inf H^s} + ||u||_{Ltilde^inf H^s} + eps ||u||_{Ltilde^1 H^{s+2}}
double regularized_energy(const DyadicPartition& p, const std::vector<ScalarField>& rho,
                          const std::vector<VectorField>& u, const std::vector<double>& times,
                          double s, double epsilon);

}  // namespace oddflow
