#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "fracspde/problem.hpp"

namespace fracspde::experiments {

enum class StudyMode { Temporal, Spatial };

struct StudyLevel {
  int m_t = 0;
  int n_x = 0;
  bool operator==(const StudyLevel&) const = default;
};

/// Monte Carlo refinement study. Successive levels must refine by an exact
/// factor 2 in the varying dimension while the fixed dimension stays
/// constant; trajectory i is seeded with base_seed + i.
struct StudyConfig {
  ProblemSpec spec;
  StudyMode mode = StudyMode::Temporal;
  int m = 1;
  std::vector<StudyLevel> levels;
  std::uint64_t base_seed = 42;
  int workers = 1;

  void validate() const;
};

struct RateTable {
  double alpha = 0.0;
  double h1 = 0.0;
  double h2 = 0.0;
  StudyMode mode = StudyMode::Temporal;
  int m = 0;
  std::vector<StudyLevel> levels;
  std::vector<double> errors;  // RMS over trajectories, one per level
  std::vector<double> rates;   // log2(e_k / e_{k+1}), size levels-1
  double mean_rate = 0.0;
  double theoretical_rate = 0.0;
};

/// Successive dyadic rates log2(e_k / e_{k+1}) for a positive error sequence.
std::vector<double> successive_rates(std::span<const double> errors);

/// ||u_{tau} - u_{tau/2}||_{L2} at T for one trajectory: both solves share
/// the trajectory's finest-grid sheet (finest_m_t x n_x), aggregated down.
double error_temporal(const ProblemSpec& spec, std::uint64_t omega_seed, int m_t, int n_x,
                      int finest_m_t);

/// ||u_h - u_{h/2}||_{L2} at T for one trajectory, coarse solution embedded
/// onto the finer mesh; the sheet is sampled at (m_t x finest_n_x).
double error_spatial(const ProblemSpec& spec, std::uint64_t omega_seed, int n_x, int m_t,
                     int finest_n_x);

RateTable run_study(const StudyConfig& config);

/// RMS-error temporal rate (2 h2 + (h1 - 1) alpha) / 2; requires the
/// standing assumption to hold.
double theoretical_temporal_rate(double alpha, double h1, double h2);

/// RMS-error spatial rate (2 min{2 h2/alpha - 1/2, 1} + 2 h1 - 1) / 2;
/// requires a positive result.
double theoretical_spatial_rate(double alpha, double h1, double h2);

struct HolderEstimate {
  double exponent = 0.0;   // mean-square exponent: slope of log E||u(T)-u(T-lag)||^2 vs log lag
  double std_error = 0.0;
  int lags_used = 0;
};

/// Log-log regression of mean-square increments at T against the lag, over
/// m trajectories at grid (m_t, n_x). lag_steps are multiples of tau.
HolderEstimate holder_diagnostic(const ProblemSpec& spec, int m_t, int n_x, int m,
                                 std::span<const int> lag_steps);

/// CSV emission: header "level,m_t,n_x,error,rate"; the rate column holds
/// the rate into the row's level and is empty on the first row.
void write_rate_table_csv(std::ostream& out, const RateTable& table);

}  // namespace fracspde::experiments
