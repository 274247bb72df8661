#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>

#include "fracspde/dense.hpp"
#include "fracspde/problem.hpp"

namespace fracspde::noise {

/// Uniform time x space box grid carrying the sheet increments.
struct NoiseGridSpec {
  int m_t;
  int n_x;
  double tau;
  double h;

  NoiseGridSpec(int m_t_, int n_x_, double tau_, double h_);
  static NoiseGridSpec from_domain(double T, double l, int m_t, int n_x);

  double time_extent() const { return tau * m_t; }
  double space_extent() const { return h * n_x; }
  bool operator==(const NoiseGridSpec&) const = default;
};

/// Gaussian sheet increments; entry (i, j) is the increment over time box
/// I_i = (i*tau, (i+1)*tau] and space box D_j = (j*h, (j+1)*h].
struct BoxIncrementField {
  NoiseGridSpec spec;
  HurstPair hurst;
  std::uint64_t seed = 0;
  DenseMatrix values;
};

/// Lower-triangular L with L L^T equal to an increment covariance.
struct CovarianceFactor {
  int dim = 0;
  DenseMatrix lower;
};

/// Covariance of the n consecutive box increments of 1D fBm with the given
/// Hurst exponent and box width. Symmetric positive semidefinite Toeplitz;
/// lag-k entry is 0.5*(|k+1|^{2H} + |k-1|^{2H} - 2|k|^{2H}) * step^{2H}.
DenseMatrix increment_covariance_1d(double hurst, double step, int n);

/// Dense Cholesky with tiny-negative-pivot clamping (pivots down to
/// -1e-12 * max diagonal are treated as zero). Throws, naming the pivot
/// index, when the input is not positive semidefinite beyond that slack.
CovarianceFactor cholesky_factor(const DenseMatrix& cov);

/// Process-wide cache of increment factors keyed by (hurst, step, n).
std::shared_ptr<const CovarianceFactor> cached_increment_factor(double hurst, double step, int n);

/// Exact sampling: values = L_t Z L_x^T with Z i.i.d. standard normal,
/// filled row-major from a stream seeded with `seed`. Pure function of
/// (spec, hurst, seed).
BoxIncrementField sample_sheet_increments(const NoiseGridSpec& spec, const HurstPair& hurst,
                                          std::uint64_t seed);

/// Block sums over factor_t x factor_x boxes; exact by additivity of the
/// underlying measure. Factors must divide the grid dimensions.
BoxIncrementField aggregate(const BoxIncrementField& field, int factor_t, int factor_x);

/// All-zero field on the given grid (deterministic runs).
BoxIncrementField zero_field(const NoiseGridSpec& spec, const HurstPair& hurst);

/// Piecewise-constant regularized-noise levels: entry (i, j) is the field
/// value divided by tau*h, i.e. the level taken on I_i x D_j.
DenseMatrix wong_zakai_values(const BoxIncrementField& field);

/// Debug/verification dump. Header line "# m_t n_x tau h H1 H2 seed"
/// followed by the values row-major, one time box per line.
void write_field_csv(std::ostream& out, const BoxIncrementField& field);

}  // namespace fracspde::noise
