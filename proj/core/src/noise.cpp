#include "fracspde/noise.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <string>
#include <tuple>

#include "fracspde/rng.hpp"

namespace fracspde::noise {

namespace {

void format17(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out << buf;
}

}  // namespace

NoiseGridSpec::NoiseGridSpec(int m_t_, int n_x_, double tau_, double h_)
    : m_t(m_t_), n_x(n_x_), tau(tau_), h(h_) {
  if (m_t < 1) throw std::invalid_argument("noise grid: m_t must be >= 1");
  if (n_x < 1) throw std::invalid_argument("noise grid: n_x must be >= 1");
  if (!(tau > 0.0)) throw std::invalid_argument("noise grid: tau must be positive");
  if (!(h > 0.0)) throw std::invalid_argument("noise grid: h must be positive");
}

NoiseGridSpec NoiseGridSpec::from_domain(double T, double l, int m_t, int n_x) {
  if (m_t < 1 || n_x < 1) throw std::invalid_argument("noise grid: box counts must be >= 1");
  return {m_t, n_x, T / m_t, l / n_x};
}

DenseMatrix increment_covariance_1d(double hurst, double step, int n) {
  if (!(hurst > 0.0) || !(hurst <= 0.5))
    throw std::domain_error("increment_covariance_1d: hurst must lie in (0, 0.5]");
  if (!(step > 0.0)) throw std::domain_error("increment_covariance_1d: step must be positive");
  if (n < 1) throw std::domain_error("increment_covariance_1d: n must be >= 1");

  const double two_h = 2.0 * hurst;
  const double scale = std::pow(step, two_h);
  std::vector<double> gamma(n);
  for (int k = 0; k < n; ++k) {
    const double kp = std::pow(static_cast<double>(k + 1), two_h);
    const double km = k == 0 ? std::pow(1.0, two_h) : std::pow(static_cast<double>(k - 1), two_h);
    const double k0 = std::pow(static_cast<double>(k), two_h);
    gamma[k] = 0.5 * (kp + km - 2.0 * k0) * scale;
  }
  DenseMatrix cov(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) cov(i, j) = gamma[std::abs(i - j)];
  return cov;
}

CovarianceFactor cholesky_factor(const DenseMatrix& cov) {
  const int n = cov.rows();
  if (cov.cols() != n) throw std::invalid_argument("cholesky_factor: matrix must be square");

  double max_diag = 0.0;
  for (int i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(cov(i, i)));
  const double tol = 1e-12 * max_diag;

  CovarianceFactor f;
  f.dim = n;
  f.lower = DenseMatrix(n, n, 0.0);
  DenseMatrix& L = f.lower;
  for (int j = 0; j < n; ++j) {
    double s = cov(j, j);
    for (int k = 0; k < j; ++k) s -= L(j, k) * L(j, k);
    if (s < -tol)
      throw std::runtime_error("cholesky_factor: negative pivot " + std::to_string(s) +
                               " at index " + std::to_string(j) +
                               "; input is not positive semidefinite");
    const double piv = s > 0.0 ? std::sqrt(s) : 0.0;
    L(j, j) = piv;
    if (piv == 0.0) continue;  // PSD completion: column below stays zero
    for (int i = j + 1; i < n; ++i) {
      double t = cov(i, j);
      for (int k = 0; k < j; ++k) t -= L(i, k) * L(j, k);
      L(i, j) = t / piv;
    }
  }
  return f;
}

namespace {

using FactorKey = std::tuple<std::uint64_t, std::uint64_t, int>;

std::mutex g_factor_mutex;
std::map<FactorKey, std::shared_ptr<const CovarianceFactor>>& factor_cache() {
  static std::map<FactorKey, std::shared_ptr<const CovarianceFactor>> cache;
  return cache;
}

}  // namespace

std::shared_ptr<const CovarianceFactor> cached_increment_factor(double hurst, double step, int n) {
  const FactorKey key{std::bit_cast<std::uint64_t>(hurst), std::bit_cast<std::uint64_t>(step), n};
  {
    std::lock_guard<std::mutex> lock(g_factor_mutex);
    auto it = factor_cache().find(key);
    if (it != factor_cache().end()) return it->second;
  }
  auto factor =
      std::make_shared<const CovarianceFactor>(cholesky_factor(increment_covariance_1d(hurst, step, n)));
  std::lock_guard<std::mutex> lock(g_factor_mutex);
  auto [it, inserted] = factor_cache().emplace(key, std::move(factor));
  return it->second;
}

BoxIncrementField sample_sheet_increments(const NoiseGridSpec& spec, const HurstPair& hurst,
                                          std::uint64_t seed) {
  const auto lt = cached_increment_factor(hurst.h2, spec.tau, spec.m_t);
  const auto lx = cached_increment_factor(hurst.h1, spec.h, spec.n_x);
  const int m = spec.m_t, n = spec.n_x;

  DenseMatrix z(m, n);
  NormalStream stream(seed);
  for (double& v : z.data()) v = stream.next();

  // tmp = L_t Z, exploiting the lower-triangular structure
  DenseMatrix tmp(m, n, 0.0);
  for (int i = 0; i < m; ++i) {
    for (int p = 0; p <= i; ++p) {
      const double c = lt->lower(i, p);
      if (c == 0.0) continue;
      for (int j = 0; j < n; ++j) tmp(i, j) += c * z(p, j);
    }
  }
  // values = tmp L_x^T
  BoxIncrementField field{spec, hurst, seed, DenseMatrix(m, n, 0.0)};
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int q = 0; q <= j; ++q) s += tmp(i, q) * lx->lower(j, q);
      field.values(i, j) = s;
    }
  }
  return field;
}

BoxIncrementField aggregate(const BoxIncrementField& field, int factor_t, int factor_x) {
  if (factor_t < 1 || factor_x < 1)
    throw std::invalid_argument("aggregate: factors must be positive");
  if (field.spec.m_t % factor_t != 0)
    throw std::invalid_argument("aggregate: factor_t=" + std::to_string(factor_t) +
                                " does not divide m_t=" + std::to_string(field.spec.m_t));
  if (field.spec.n_x % factor_x != 0)
    throw std::invalid_argument("aggregate: factor_x=" + std::to_string(factor_x) +
                                " does not divide n_x=" + std::to_string(field.spec.n_x));

  const int m = field.spec.m_t / factor_t;
  const int n = field.spec.n_x / factor_x;
  BoxIncrementField out{NoiseGridSpec(m, n, field.spec.tau * factor_t, field.spec.h * factor_x),
                        field.hurst, field.seed, DenseMatrix(m, n, 0.0)};
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int a = 0; a < factor_t; ++a)
        for (int b = 0; b < factor_x; ++b)
          s += field.values(i * factor_t + a, j * factor_x + b);
      out.values(i, j) = s;
    }
  }
  return out;
}

BoxIncrementField zero_field(const NoiseGridSpec& spec, const HurstPair& hurst) {
  return {spec, hurst, 0, DenseMatrix(spec.m_t, spec.n_x, 0.0)};
}

DenseMatrix wong_zakai_values(const BoxIncrementField& field) {
  const double inv = 1.0 / (field.spec.tau * field.spec.h);
  DenseMatrix levels = field.values;
  for (double& v : levels.data()) v *= inv;
  return levels;
}

void write_field_csv(std::ostream& out, const BoxIncrementField& field) {
  out << "# " << field.spec.m_t << ' ' << field.spec.n_x << ' ';
  format17(out, field.spec.tau);
  out << ' ';
  format17(out, field.spec.h);
  out << ' ';
  format17(out, field.hurst.h1);
  out << ' ';
  format17(out, field.hurst.h2);
  out << ' ' << field.seed << '\n';
  for (int i = 0; i < field.spec.m_t; ++i) {
    for (int j = 0; j < field.spec.n_x; ++j) {
      if (j) out << ',';
      format17(out, field.values(i, j));
    }
    out << '\n';
  }
}

}  // namespace fracspde::noise
