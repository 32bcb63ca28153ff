#include "oddflow/littlewood_paley.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "oddflow/errors.hpp"

namespace oddflow {

namespace {

double theta(double r) {
  if (r <= 1.0) return 1.0;
  const double s = (r - 1.0) / kLpGamma;
  if (s >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

double lattice_radius(const Grid& g, std::size_t row, std::size_t col) {
  const double kx = g.kx(row);
  const double ky = g.ky(col);
  return std::sqrt(kx * kx + ky * ky);
}

// L2 norm of the field whose half spectrum is s scaled by m (m may be null).
double spectral_norm(const Spectrum& s, const std::vector<double>* m) {
  const Grid& g = s.grid;
  double acc = 0.0;
  for (std::size_t row = 0; row < g.n(); ++row) {
    for (std::size_t col = 0; col < g.spectral_cols(); ++col) {
      const std::size_t idx = row * g.spectral_cols() + col;
      const double w = m != nullptr ? (*m)[idx] : 1.0;
      acc += s.column_weight(col) * std::norm(w * s.coeffs[idx]);
    }
  }
  const double n2 = static_cast<double>(g.n()) * static_cast<double>(g.n());
  return g.length() * std::sqrt(acc) / n2;
}

ScalarField apply_table(const std::vector<double>& m, const ScalarField& f) {
  Spectrum s = f.spectrum();
  for (std::size_t k = 0; k < s.coeffs.size(); ++k) s.coeffs[k] *= m[k];
  return transform_backward(s);
}

void require_positive_times(const std::vector<double>& times) {
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1])) throw Error("time series must be strictly increasing");
  }
}

}  // namespace

double lp_chi(double radius) { return theta(radius / 0.75); }
double lp_phi(double radius) { return lp_chi(0.5 * radius) - lp_chi(radius); }

DyadicPartition::DyadicPartition(const Grid& grid)
    : grid_(grid), j_max_(static_cast<int>(std::ceil(std::log2(grid.n() / 3.0)))) {
  blocks_.assign(static_cast<std::size_t>(j_max_) + 2, std::vector<double>(grid.spectral_size()));
  for (std::size_t row = 0; row < grid.n(); ++row) {
    for (std::size_t col = 0; col < grid.spectral_cols(); ++col) {
      const std::size_t idx = row * grid.spectral_cols() + col;
      const double r = lattice_radius(grid, row, col);
      blocks_[0][idx] = lp_chi(r);
      for (int j = 0; j <= j_max_; ++j) blocks_[j + 1][idx] = lp_phi(std::ldexp(r, -j));
    }
  }
}

const std::vector<double>& DyadicPartition::multiplier(int j) const {
  if (j < -1 || j > j_max_) {
    std::ostringstream os;
    os << "dyadic block " << j << " outside [-1, " << j_max_ << "]";
    throw Error(os.str());
  }
  return blocks_[static_cast<std::size_t>(j + 1)];
}

double DyadicPartition::unity_residual() const {
  double worst = 0.0;
  for (std::size_t idx = 0; idx < grid_.spectral_size(); ++idx) {
    double s = 0.0;
    for (const auto& b : blocks_) s += b[idx];
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return worst;
}

ScalarField dyadic_block(const DyadicPartition& p, const ScalarField& f, int j) {
  return apply_table(p.multiplier(j), f);
}

ScalarField low_cutoff(const DyadicPartition& p, const ScalarField& f, int j) {
  const Grid& g = p.grid();
  std::vector<double> m(g.spectral_size(), 0.0);
  for (int k = -1; k <= std::min(j - 1, p.j_max()); ++k) {
    const auto& b = p.multiplier(k);
    for (std::size_t i = 0; i < m.size(); ++i) m[i] += b[i];
  }
  return apply_table(m, f);
}

std::vector<double> block_norms(const DyadicPartition& p, const ScalarField& f) {
  std::vector<double> out;
  const Spectrum& s = f.spectrum();
  for (int j = -1; j <= p.j_max(); ++j) out.push_back(spectral_norm(s, &p.multiplier(j)));
  return out;
}

std::vector<double> block_norms(const DyadicPartition& p, const VectorField& v) {
  std::vector<double> a = block_norms(p, v.x);
  const std::vector<double> b = block_norms(p, v.y);
  for (std::size_t k = 0; k < a.size(); ++k) a[k] = std::hypot(a[k], b[k]);
  return a;
}

double sobolev_norm(const ScalarField& f, double s) {
  const Grid& g = f.grid();
  std::vector<double> w(g.spectral_size());
  for (std::size_t row = 0; row < g.n(); ++row) {
    for (std::size_t col = 0; col < g.spectral_cols(); ++col) {
      const double xi = g.k0() * lattice_radius(g, row, col);
      w[row * g.spectral_cols() + col] = std::pow(1.0 + xi * xi, 0.5 * s);
    }
  }
  return spectral_norm(f.spectrum(), &w);
}

double sobolev_norm(const VectorField& v, double s) {
  return std::hypot(sobolev_norm(v.x, s), sobolev_norm(v.y, s));
}

double besov_from_blocks(const std::vector<double>& blocks, double s, double r) {
  if (!(r >= 1.0)) throw Error("besov norm needs r >= 1");
  double acc = 0.0;
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const int j = static_cast<int>(k) - 1;
    const double term = std::exp2(j * s) * blocks[k];
    if (std::isinf(r)) {
      acc = std::max(acc, term);
    } else {
      acc += std::pow(term, r);
    }
  }
  return std::isinf(r) ? acc : std::pow(acc, 1.0 / r);
}

double besov_norm(const DyadicPartition& p, const ScalarField& f, double s, double r) {
  return besov_from_blocks(block_norms(p, f), s, r);
}

BlockSeries block_series(const DyadicPartition& p, const std::vector<ScalarField>& series,
                         const std::vector<double>& times) {
  if (series.size() != times.size()) throw Error("block_series: ragged time series");
  require_positive_times(times);
  BlockSeries out{times, {}};
  for (const auto& f : series) out.norms.push_back(block_norms(p, f));
  return out;
}

BlockSeries block_series(const DyadicPartition& p, const std::vector<VectorField>& series,
                         const std::vector<double>& times) {
  if (series.size() != times.size()) throw Error("block_series: ragged time series");
  require_positive_times(times);
  BlockSeries out{times, {}};
  for (const auto& v : series) out.norms.push_back(block_norms(p, v));
  return out;
}

double time_norm(const std::vector<double>& values, const std::vector<double>& times, double q) {
  if (values.size() != times.size() || values.empty()) throw Error("time_norm: ragged series");
  if (std::isinf(q)) {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
  }
  if (q != 1.0 && q != 2.0) throw Error("time_norm: q must be 1, 2 or inf");
  if (values.size() == 1) return 0.0;
  double acc = 0.0;
  for (std::size_t k = 1; k < values.size(); ++k) {
    const double a = std::pow(std::abs(values[k - 1]), q);
    const double b = std::pow(std::abs(values[k]), q);
    acc += 0.5 * (times[k] - times[k - 1]) * (a + b);
  }
  return q == 1.0 ? acc : std::sqrt(acc);
}

double chemin_lerner_norm(const BlockSeries& series, double q, double s) {
  if (series.norms.empty()) throw Error("chemin_lerner_norm: empty series");
  const std::size_t nb = series.norms.front().size();
  std::vector<double> per_block(nb);
  std::vector<double> column(series.norms.size());
  for (std::size_t b = 0; b < nb; ++b) {
    for (std::size_t k = 0; k < series.norms.size(); ++k) {
      if (series.norms[k].size() != nb) throw Error("chemin_lerner_norm: ragged block table");
      column[k] = series.norms[k][b];
    }
    per_block[b] = time_norm(column, series.times, q);
  }
  return besov_from_blocks(per_block, s, 2.0);
}

double time_besov_norm(const BlockSeries& series, double q, double s) {
  std::vector<double> values;
  for (const auto& row : series.norms) values.push_back(besov_from_blocks(row, s, 2.0));
  return time_norm(values, series.times, q);
}

ScalarField paraproduct_term(const DyadicPartition& p, const ScalarField& u, const ScalarField& v,
                             int k) {
  const std::size_t m = 2 * p.grid().n();
  return resample(low_cutoff(p, u, k - 1), m) * resample(dyadic_block(p, v, k), m);
}

BonyParts bony_decompose(const DyadicPartition& p, const ScalarField& u, const ScalarField& v) {
  if (!(u.grid() == p.grid()) || !(v.grid() == p.grid())) {
    throw Error("bony_decompose: fields and partition on different grids");
  }
  const std::size_t m = 2 * p.grid().n();
  const Grid fine(m, p.grid().length());
  std::vector<ScalarField> du;
  std::vector<ScalarField> dv;
  for (int j = -1; j <= p.j_max(); ++j) {
    du.push_back(resample(dyadic_block(p, u, j), m));
    dv.push_back(resample(dyadic_block(p, v, j), m));
  }
  BonyParts parts{ScalarField(fine), ScalarField(fine), ScalarField(fine),
                  resample(u, m) * resample(v, m)};
  const int nb = static_cast<int>(du.size());
  for (int a = 0; a < nb; ++a) {
    for (int b = 0; b < nb; ++b) {
      // block indices j = a - 1, k = b - 1
      const ScalarField prod = du[a] * dv[b];
      if (a <= b - 2) {
        parts.T_uv += prod;
      } else if (b <= a - 2) {
        parts.T_vu += prod;
      } else {
        parts.R += prod;
      }
    }
  }
  return parts;
}

double bernstein_ratio(const DyadicPartition& p, const ScalarField& f, int j, int k) {
  const Grid& g = p.grid();
  const auto& m = p.multiplier(j);
  const Spectrum& s = f.spectrum();
  const double base = spectral_norm(s, &m);
  if (!(base > 0.0)) throw Error("bernstein_ratio: vanishing dyadic block");
  std::vector<double> w(m.size());
  for (std::size_t row = 0; row < g.n(); ++row) {
    for (std::size_t col = 0; col < g.spectral_cols(); ++col) {
      const std::size_t idx = row * g.spectral_cols() + col;
      w[idx] = m[idx] * std::pow(g.k0() * lattice_radius(g, row, col), k);
    }
  }
  return spectral_norm(s, &w) / (std::exp2(j * k) * std::pow(g.k0(), k) * base);
}

double regularized_energy(const DyadicPartition& p, const std::vector<ScalarField>& rho,
                          const std::vector<VectorField>& u, const std::vector<double>& times,
                          double s, double epsilon) {
  if (rho.size() != u.size()) throw Error("regularized_energy: ragged series");
  std::vector<VectorField> grad_rho;
  for (const auto& r : rho) grad_rho.push_back(gradient(r));
  const BlockSeries gr = block_series(p, grad_rho, times);
  const BlockSeries us = block_series(p, u, times);
  return chemin_lerner_norm(gr, kInf, s) + chemin_lerner_norm(us, kInf, s) +
         epsilon * chemin_lerner_norm(us, 1.0, s + 2.0);
}

}  // namespace oddflow
