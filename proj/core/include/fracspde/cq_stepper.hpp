#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fracspde/fem.hpp"
#include "fracspde/noise.hpp"
#include "fracspde/problem.hpp"

namespace fracspde::cq {

/// Backward-Euler convolution quadrature weights: coefficients of
/// ((1 - zeta)/tau)^gamma, i.e. d_i = tau^{-gamma} g_i with g_0 = 1 and
/// g_i = g_{i-1} (i - 1 - gamma) / i.
struct CqWeights {
  double gamma = 0.0;
  double tau = 0.0;
  std::vector<double> d;
};

CqWeights cq_weights(double gamma, double tau, int count);

struct TrajectoryMeta {
  std::uint64_t seed = 0;
  int m_t = 0;
  int n_x = 0;
  double tau = 0.0;
  double h = 0.0;
};

struct TrajectoryResult {
  fem::FemFunction final;
  std::vector<int> snapshot_indices;
  std::vector<fem::FemFunction> snapshots;
  TrajectoryMeta meta;
};

/// One implicit step of the fully discrete scheme at index n >= 1:
///   (M/tau + d_0 S) U^n = M U^{n-1}/tau - sum_{i=1}^{n-1} d_i S U^{n-i}
///                         + F(U^{n-1}) + noise_load
/// history[r] holds U^{r+1}; U^0 = 0. noise_load must already carry beta.
/// A prefactored LHS can be passed to amortize repeated steps.
std::vector<double> step(int n, std::span<const std::vector<double>> history,
                         const CqWeights& weights, const fem::TridiagonalMatrix& mass,
                         const fem::TridiagonalMatrix& stiffness,
                         std::span<const double> noise_load, const fem::Mesh1D& mesh,
                         const ProblemSpec& spec, const fem::TridiagonalFactor* lhs = nullptr);

/// Marches the scheme from U^0 = 0 to t_M = T. The noise grid must match
/// (m_t, n_x) and the problem domain; step n consumes the levels of time
/// box n-1 (the box containing t_n).
TrajectoryResult run_trajectory(const ProblemSpec& spec, int m_t, int n_x,
                                const noise::BoxIncrementField& noise_field,
                                std::span<const int> snapshot_indices = {});

}  // namespace fracspde::cq
