#include "fracspde/cq_stepper.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fracspde::cq {

CqWeights cq_weights(double gamma, double tau, int count) {
  if (!(gamma >= 0.0) || !(gamma < 1.0))
    throw std::invalid_argument("cq_weights: gamma must lie in [0, 1)");
  if (!(tau > 0.0)) throw std::invalid_argument("cq_weights: tau must be positive");
  if (count < 1) throw std::invalid_argument("cq_weights: count must be >= 1");

  CqWeights w;
  w.gamma = gamma;
  w.tau = tau;
  w.d.resize(count);
  const double scale = std::pow(tau, -gamma);
  double g = 1.0;
  w.d[0] = scale;
  for (int i = 1; i < count; ++i) {
    g *= (i - 1.0 - gamma) / i;
    w.d[i] = scale * g;
  }
  return w;
}

namespace {

fem::TridiagonalMatrix implicit_lhs(const fem::TridiagonalMatrix& mass,
                                    const fem::TridiagonalMatrix& stiffness, double tau,
                                    double d0) {
  fem::TridiagonalMatrix lhs;
  lhs.dim = mass.dim;
  lhs.diag.resize(mass.dim);
  lhs.sub.resize(mass.dim - 1);
  for (int i = 0; i < mass.dim; ++i) lhs.diag[i] = mass.diag[i] / tau + d0 * stiffness.diag[i];
  for (int i = 0; i + 1 < mass.dim; ++i) lhs.sub[i] = mass.sub[i] / tau + d0 * stiffness.sub[i];
  lhs.super = lhs.sub;
  return lhs;
}

}  // namespace

std::vector<double> step(int n, std::span<const std::vector<double>> history,
                         const CqWeights& weights, const fem::TridiagonalMatrix& mass,
                         const fem::TridiagonalMatrix& stiffness,
                         std::span<const double> noise_load, const fem::Mesh1D& mesh,
                         const ProblemSpec& spec, const fem::TridiagonalFactor* lhs) {
  if (n < 1) throw std::invalid_argument("step: n must be >= 1");
  if (static_cast<int>(history.size()) < n - 1)
    throw std::invalid_argument("step: history must hold U^1..U^{n-1}");
  if (static_cast<int>(weights.d.size()) < n)
    throw std::invalid_argument("step: not enough convolution weights");

  const int dim = mass.dim;
  const double tau = weights.tau;
  std::vector<double> rhs(dim, 0.0);

  if (n >= 2) {
    const std::vector<double>& prev = history[n - 2];
    rhs = mass.apply(prev);
    for (double& v : rhs) v /= tau;
    std::vector<double> conv(dim, 0.0);
    for (int i = 1; i <= n - 1; ++i) {
      const std::vector<double> su = stiffness.apply(history[n - i - 1]);
      const double di = weights.d[i];
      for (int j = 0; j < dim; ++j) conv[j] += di * su[j];
    }
    for (int j = 0; j < dim; ++j) rhs[j] -= conv[j];
    const std::vector<double> fl = fem::load_nonlinear({mesh, prev}, spec.f);
    for (int j = 0; j < dim; ++j) rhs[j] += fl[j];
  } else {
    // U^0 = 0: only f(0) contributes
    const std::vector<double> fl = fem::load_nonlinear({mesh, std::vector<double>(dim, 0.0)}, spec.f);
    rhs = fl;
  }
  if (!noise_load.empty()) {
    if (static_cast<int>(noise_load.size()) != dim)
      throw std::invalid_argument("step: noise load size mismatch");
    for (int j = 0; j < dim; ++j) rhs[j] += noise_load[j];
  }

  if (lhs) return lhs->solve(rhs);
  const fem::TridiagonalFactor factor(implicit_lhs(mass, stiffness, tau, weights.d[0]));
  return factor.solve(rhs);
}

TrajectoryResult run_trajectory(const ProblemSpec& spec, int m_t, int n_x,
                                const noise::BoxIncrementField& noise_field,
                                std::span<const int> snapshot_indices) {
  if (m_t < 1) throw std::invalid_argument("run_trajectory: m_t must be >= 1");
  const fem::Mesh1D mesh(spec.l, n_x);
  const noise::NoiseGridSpec& grid = noise_field.spec;
  if (grid.m_t != m_t || grid.n_x != n_x)
    throw std::invalid_argument("run_trajectory: noise grid " + std::to_string(grid.m_t) + "x" +
                                std::to_string(grid.n_x) + " does not match solver grid " +
                                std::to_string(m_t) + "x" + std::to_string(n_x));
  if (std::abs(grid.time_extent() - spec.T) > 1e-9 * std::max(1.0, spec.T) ||
      std::abs(grid.space_extent() - spec.l) > 1e-9 * std::max(1.0, spec.l))
    throw std::invalid_argument("run_trajectory: noise grid extent does not match the domain");
  for (int idx : snapshot_indices)
    if (idx < 0 || idx > m_t)
      throw std::invalid_argument("run_trajectory: snapshot index out of range: " +
                                  std::to_string(idx));

  const double tau = spec.T / m_t;
  const fem::TridiagonalMatrix mass = assemble_mass(mesh);
  const fem::TridiagonalMatrix stiffness = assemble_stiffness(mesh);
  const CqWeights weights = cq_weights(1.0 - spec.alpha, tau, m_t);
  const fem::TridiagonalFactor lhs(implicit_lhs(mass, stiffness, tau, weights.d[0]));

  const DenseMatrix levels = noise::wong_zakai_values(noise_field);

  std::vector<std::vector<double>> history;
  history.reserve(m_t);
  std::vector<double> row(n_x);

  TrajectoryResult result{{mesh, {}}, {}, {}, {noise_field.seed, m_t, n_x, tau, mesh.h()}};
  result.snapshot_indices.assign(snapshot_indices.begin(), snapshot_indices.end());
  result.snapshots.resize(result.snapshot_indices.size(), fem::FemFunction{mesh, {}});

  auto record = [&](int idx, const std::vector<double>& coeffs) {
    for (std::size_t s = 0; s < result.snapshot_indices.size(); ++s)
      if (result.snapshot_indices[s] == idx) result.snapshots[s].coeffs = coeffs;
  };
  record(0, std::vector<double>(mesh.interior(), 0.0));

  for (int n = 1; n <= m_t; ++n) {
    for (int j = 0; j < n_x; ++j) row[j] = levels(n - 1, j);
    std::vector<double> noise_load = fem::load_noise(mesh, row);
    for (double& v : noise_load) v *= spec.beta;
    history.push_back(step(n, history, weights, mass, stiffness, noise_load, mesh, spec, &lhs));
    record(n, history.back());
  }

  result.final.coeffs = history.back();
  return result;
}

}  // namespace fracspde::cq
