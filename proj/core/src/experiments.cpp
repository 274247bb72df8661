#include "fracspde/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

#include "fracspde/cq_stepper.hpp"
#include "fracspde/noise.hpp"
#include "fracspde/parallel.hpp"

namespace fracspde::experiments {

namespace {

void format17(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out << buf;
}

double coupled_error_temporal(const ProblemSpec& spec, const noise::BoxIncrementField& fine,
                              int m_t, int n_x) {
  const int finest = fine.spec.m_t;
  if (finest % (2 * m_t) != 0)
    throw std::invalid_argument("error_temporal: 2*m_t must divide the finest time grid");
  const auto coarse = noise::aggregate(fine, finest / m_t, 1);
  const auto half = noise::aggregate(fine, finest / (2 * m_t), 1);
  const auto u_c = cq::run_trajectory(spec, m_t, n_x, coarse);
  const auto u_f = cq::run_trajectory(spec, 2 * m_t, n_x, half);
  fem::FemFunction diff = u_c.final;
  for (std::size_t j = 0; j < diff.coeffs.size(); ++j) diff.coeffs[j] -= u_f.final.coeffs[j];
  return fem::l2_norm(diff);
}

double coupled_error_spatial(const ProblemSpec& spec, const noise::BoxIncrementField& fine,
                             int n_x, int m_t) {
  const int finest = fine.spec.n_x;
  if (finest % (2 * n_x) != 0)
    throw std::invalid_argument("error_spatial: 2*n_x must divide the finest space grid");
  const auto coarse = noise::aggregate(fine, 1, finest / n_x);
  const auto half = noise::aggregate(fine, 1, finest / (2 * n_x));
  const auto u_c = cq::run_trajectory(spec, m_t, n_x, coarse);
  const auto u_f = cq::run_trajectory(spec, m_t, 2 * n_x, half);
  fem::FemFunction embedded = fem::refine_embed(u_c.final, 1);
  for (std::size_t j = 0; j < embedded.coeffs.size(); ++j)
    embedded.coeffs[j] -= u_f.final.coeffs[j];
  return fem::l2_norm(embedded);
}

}  // namespace

void StudyConfig::validate() const {
  if (m < 1) throw std::invalid_argument("study: m must be >= 1");
  if (levels.empty()) throw std::invalid_argument("study: at least one level is required");
  for (const StudyLevel& lvl : levels)
    if (lvl.m_t < 1 || lvl.n_x < 2)
      throw std::invalid_argument("study: levels need m_t >= 1 and n_x >= 2");
  for (std::size_t i = 1; i < levels.size(); ++i) {
    if (mode == StudyMode::Temporal) {
      if (levels[i].m_t != 2 * levels[i - 1].m_t)
        throw std::invalid_argument("study: temporal levels must double m_t");
      if (levels[i].n_x != levels[i - 1].n_x)
        throw std::invalid_argument("study: temporal levels must keep n_x fixed");
    } else {
      if (levels[i].n_x != 2 * levels[i - 1].n_x)
        throw std::invalid_argument("study: spatial levels must double n_x");
      if (levels[i].m_t != levels[i - 1].m_t)
        throw std::invalid_argument("study: spatial levels must keep m_t fixed");
    }
  }
}

std::vector<double> successive_rates(std::span<const double> errors) {
  std::vector<double> rates;
  for (std::size_t i = 1; i < errors.size(); ++i)
    rates.push_back(std::log2(errors[i - 1] / errors[i]));
  return rates;
}

double error_temporal(const ProblemSpec& spec, std::uint64_t omega_seed, int m_t, int n_x,
                      int finest_m_t) {
  const auto grid = noise::NoiseGridSpec::from_domain(spec.T, spec.l, finest_m_t, n_x);
  const auto fine = noise::sample_sheet_increments(grid, spec.hurst, omega_seed);
  return coupled_error_temporal(spec, fine, m_t, n_x);
}

double error_spatial(const ProblemSpec& spec, std::uint64_t omega_seed, int n_x, int m_t,
                     int finest_n_x) {
  const auto grid = noise::NoiseGridSpec::from_domain(spec.T, spec.l, m_t, finest_n_x);
  const auto fine = noise::sample_sheet_increments(grid, spec.hurst, omega_seed);
  return coupled_error_spatial(spec, fine, n_x, m_t);
}

RateTable run_study(const StudyConfig& config) {
  config.validate();
  const std::vector<StudyLevel>& levels = config.levels;
  const ProblemSpec& spec = config.spec;
  const bool temporal = config.mode == StudyMode::Temporal;

  const int finest_m_t = temporal ? 2 * levels.back().m_t : levels.back().m_t;
  const int finest_n_x = temporal ? levels.back().n_x : 2 * levels.back().n_x;
  const auto grid = noise::NoiseGridSpec::from_domain(spec.T, spec.l, finest_m_t, finest_n_x);

  // warm the factor caches before the workers start
  noise::cached_increment_factor(spec.hurst.h2, grid.tau, grid.m_t);
  noise::cached_increment_factor(spec.hurst.h1, grid.h, grid.n_x);

  std::vector<std::vector<double>> sq(config.m, std::vector<double>(levels.size(), 0.0));
  parallel_for(config.m, config.workers, [&](int i) {
    const auto fine =
        noise::sample_sheet_increments(grid, spec.hurst, config.base_seed + static_cast<std::uint64_t>(i));
    for (std::size_t k = 0; k < levels.size(); ++k) {
      double e;
      try {
        e = temporal ? coupled_error_temporal(spec, fine, levels[k].m_t, levels[k].n_x)
                     : coupled_error_spatial(spec, fine, levels[k].n_x, levels[k].m_t);
      } catch (const std::exception& ex) {
        throw std::runtime_error("study trajectory " + std::to_string(i) + ": " + ex.what());
      }
      sq[i][k] = e * e;
    }
  });

  RateTable table;
  table.alpha = spec.alpha;
  table.h1 = spec.hurst.h1;
  table.h2 = spec.hurst.h2;
  table.mode = config.mode;
  table.m = config.m;
  table.levels = levels;
  table.errors.resize(levels.size());
  for (std::size_t k = 0; k < levels.size(); ++k) {
    double acc = 0.0;
    for (int i = 0; i < config.m; ++i) acc += sq[i][k];  // fixed trajectory order
    table.errors[k] = std::sqrt(acc / config.m);
  }
  table.rates = successive_rates(table.errors);
  double mean = 0.0;
  for (double r : table.rates) mean += r;
  table.mean_rate = table.rates.empty() ? 0.0 : mean / table.rates.size();
  table.theoretical_rate = temporal
                               ? theoretical_temporal_rate(spec.alpha, spec.hurst.h1, spec.hurst.h2)
                               : theoretical_spatial_rate(spec.alpha, spec.hurst.h1, spec.hurst.h2);
  return table;
}

double theoretical_temporal_rate(double alpha, double h1, double h2) {
  const double margin = 2.0 * h2 + (h1 - 1.0) * alpha;
  if (!(margin > 0.0))
    throw std::domain_error("theoretical_temporal_rate: 2*h2 + (h1 - 1)*alpha must be positive");
  return margin / 2.0;
}

double theoretical_spatial_rate(double alpha, double h1, double h2) {
  const double sigma = std::min(2.0 * h2 / alpha - 0.5, 1.0);
  const double rate = (2.0 * sigma + 2.0 * h1 - 1.0) / 2.0;
  if (!(rate > 0.0))
    throw std::domain_error("theoretical_spatial_rate: rate is not positive for these parameters");
  return rate;
}

HolderEstimate holder_diagnostic(const ProblemSpec& spec, int m_t, int n_x, int m,
                                 std::span<const int> lag_steps) {
  if (m < 50) throw std::invalid_argument("holder_diagnostic: m must be >= 50");
  std::vector<int> lags(lag_steps.begin(), lag_steps.end());
  std::sort(lags.begin(), lags.end());
  lags.erase(std::unique(lags.begin(), lags.end()), lags.end());
  if (lags.size() < 2) throw std::invalid_argument("holder_diagnostic: need at least two lags");
  for (int lag : lags)
    if (lag < 1 || lag >= m_t)
      throw std::invalid_argument("holder_diagnostic: lags must lie in [1, m_t)");

  const auto grid = noise::NoiseGridSpec::from_domain(spec.T, spec.l, m_t, n_x);
  std::vector<int> snaps(lags.size() + 1);
  for (std::size_t j = 0; j < lags.size(); ++j) snaps[j] = m_t - lags[j];
  snaps.back() = m_t;

  std::vector<double> msq(lags.size(), 0.0);
  for (int i = 0; i < m; ++i) {
    const auto field = noise::sample_sheet_increments(grid, spec.hurst, 1000003ULL * (i + 1));
    const auto result = cq::run_trajectory(spec, m_t, n_x, field, snaps);
    const fem::FemFunction& at_T = result.snapshots.back();
    for (std::size_t j = 0; j < lags.size(); ++j) {
      fem::FemFunction diff = at_T;
      for (std::size_t c = 0; c < diff.coeffs.size(); ++c)
        diff.coeffs[c] -= result.snapshots[j].coeffs[c];
      const double e = fem::l2_norm(diff);
      msq[j] += e * e;
    }
  }
  const double tau = spec.T / m_t;
  std::vector<double> xs, ys;
  for (std::size_t j = 0; j < lags.size(); ++j) {
    const double mean = msq[j] / m;
    if (mean <= 0.0)
      throw std::runtime_error("holder_diagnostic: zero increments, regression rejected");
    xs.push_back(std::log(lags[j] * tau));
    ys.push_back(std::log(mean));
  }
  const std::size_t n = xs.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t j = 0; j < n; ++j) {
    sx += xs[j];
    sy += ys[j];
    sxx += xs[j] * xs[j];
    sxy += xs[j] * ys[j];
  }
  const double denom = n * sxx - sx * sx;
  const double slope = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / n;
  double rss = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double r = ys[j] - intercept - slope * xs[j];
    rss += r * r;
  }
  HolderEstimate est;
  est.exponent = slope;
  est.lags_used = static_cast<int>(n);
  est.std_error = n > 2 ? std::sqrt(rss / (n - 2) * n / denom) : 0.0;
  return est;
}

void write_rate_table_csv(std::ostream& out, const RateTable& table) {
  out << "level,m_t,n_x,error,rate\n";
  for (std::size_t k = 0; k < table.levels.size(); ++k) {
    out << k << ',' << table.levels[k].m_t << ',' << table.levels[k].n_x << ',';
    format17(out, table.errors[k]);
    out << ',';
    if (k > 0) format17(out, table.rates[k - 1]);
    out << '\n';
  }
}

}  // namespace fracspde::experiments
