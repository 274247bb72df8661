#include "fracspde/fem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fracspde::fem {

namespace {

// 3-point Gauss on [0, 1]
constexpr double kGaussNode[3] = {0.11270166537925831, 0.5, 0.88729833462074169};
constexpr double kGaussWeight[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

}  // namespace

Mesh1D::Mesh1D(double l_, int n_) : l(l_), n(n_) {
  if (!(l > 0.0)) throw std::invalid_argument("mesh: l must be positive");
  if (n < 2) throw std::invalid_argument("mesh: n must be >= 2");
}

std::vector<double> TridiagonalMatrix::apply(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim)
    throw std::invalid_argument("tridiagonal apply: size mismatch");
  std::vector<double> y(dim);
  for (int i = 0; i < dim; ++i) {
    double s = diag[i] * x[i];
    if (i > 0) s += sub[i - 1] * x[i - 1];
    if (i + 1 < dim) s += super[i] * x[i + 1];
    y[i] = s;
  }
  return y;
}

TridiagonalMatrix assemble_mass(const Mesh1D& mesh) {
  const int d = mesh.interior();
  const double h = mesh.h();
  TridiagonalMatrix m;
  m.dim = d;
  m.diag.assign(d, 4.0 * h / 6.0);
  m.sub.assign(d - 1, h / 6.0);
  m.super = m.sub;
  return m;
}

TridiagonalMatrix assemble_stiffness(const Mesh1D& mesh) {
  const int d = mesh.interior();
  const double h = mesh.h();
  TridiagonalMatrix m;
  m.dim = d;
  m.diag.assign(d, 2.0 / h);
  m.sub.assign(d - 1, -1.0 / h);
  m.super = m.sub;
  return m;
}

double FemFunction::eval(double x) const {
  const double h = mesh.h();
  if (x <= 0.0 || x >= mesh.l) return 0.0;
  const int e = std::min(static_cast<int>(x / h), mesh.n - 1);
  const double s = (x - e * h) / h;
  const double left = e >= 1 ? coeffs[e - 1] : 0.0;
  const double right = e < mesh.n - 1 ? coeffs[e] : 0.0;
  return left * (1.0 - s) + right * s;
}

std::vector<double> load_nonlinear(const FemFunction& u, const NonlinearSource& f) {
  const int n = u.mesh.n;
  const double h = u.mesh.h();
  if (static_cast<int>(u.coeffs.size()) != n - 1)
    throw std::invalid_argument("load_nonlinear: coefficient count mismatch");
  std::vector<double> load(n - 1, 0.0);
  for (int e = 0; e < n; ++e) {
    const double left = e >= 1 ? u.coeffs[e - 1] : 0.0;
    const double right = e < n - 1 ? u.coeffs[e] : 0.0;
    for (int q = 0; q < 3; ++q) {
      const double s = kGaussNode[q];
      const double fv = f(left * (1.0 - s) + right * s);
      const double w = kGaussWeight[q] * h * fv;
      if (e >= 1) load[e - 1] += w * (1.0 - s);
      if (e < n - 1) load[e] += w * s;
    }
  }
  return load;
}

std::vector<double> load_noise(const Mesh1D& mesh, std::span<const double> levels) {
  const int n = mesh.n;
  if (static_cast<int>(levels.size()) != n)
    throw std::invalid_argument("load_noise: expected one level per element, got " +
                                std::to_string(levels.size()) + " for n=" + std::to_string(n));
  const double h = mesh.h();
  std::vector<double> load(n - 1);
  for (int j = 1; j < n; ++j) load[j - 1] = (levels[j - 1] + levels[j]) * h / 2.0;
  return load;
}

TridiagonalFactor::TridiagonalFactor(const TridiagonalMatrix& m) {
  const int d = m.dim;
  if (d < 1) throw std::invalid_argument("tridiagonal factor: empty matrix");
  sub_ = m.sub;
  super_ = m.super;
  inv_diag_.resize(d);
  double pivot = m.diag[0];
  if (pivot == 0.0) throw std::runtime_error("tridiagonal factor: zero pivot at row 0");
  inv_diag_[0] = 1.0 / pivot;
  for (int i = 1; i < d; ++i) {
    const double w = m.sub[i - 1] * inv_diag_[i - 1];
    pivot = m.diag[i] - w * m.super[i - 1];
    if (pivot == 0.0)
      throw std::runtime_error("tridiagonal factor: zero pivot at row " + std::to_string(i));
    sub_[i - 1] = w;
    inv_diag_[i] = 1.0 / pivot;
  }
}

std::vector<double> TridiagonalFactor::solve(std::span<const double> rhs) const {
  const int d = static_cast<int>(inv_diag_.size());
  if (static_cast<int>(rhs.size()) != d)
    throw std::invalid_argument("tridiagonal solve: size mismatch");
  std::vector<double> x(rhs.begin(), rhs.end());
  for (int i = 1; i < d; ++i) x[i] -= sub_[i - 1] * x[i - 1];
  x[d - 1] *= inv_diag_[d - 1];
  for (int i = d - 2; i >= 0; --i) x[i] = (x[i] - super_[i] * x[i + 1]) * inv_diag_[i];
  return x;
}

std::vector<double> thomas_solve(const TridiagonalMatrix& m, std::span<const double> rhs) {
  return TridiagonalFactor(m).solve(rhs);
}

double l2_norm(const FemFunction& u) {
  const TridiagonalMatrix m = assemble_mass(u.mesh);
  const std::vector<double> mu = m.apply(u.coeffs);
  double s = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) s += u.coeffs[i] * mu[i];
  return std::sqrt(std::max(s, 0.0));
}

FemFunction refine_embed(const FemFunction& u, int levels) {
  if (levels < 0) throw std::invalid_argument("refine_embed: levels must be >= 0");
  FemFunction out = u;
  for (int step = 0; step < levels; ++step) {
    const int n = out.mesh.n;
    std::vector<double> fine(2 * n - 1);
    for (int j = 1; j < n; ++j) fine[2 * j - 1] = out.coeffs[j - 1];
    for (int e = 0; e < n; ++e) {
      const double left = e >= 1 ? out.coeffs[e - 1] : 0.0;
      const double right = e < n - 1 ? out.coeffs[e] : 0.0;
      fine[2 * e] = 0.5 * (left + right);
    }
    out.mesh = Mesh1D(out.mesh.l, 2 * n);
    out.coeffs = std::move(fine);
  }
  return out;
}

}  // namespace fracspde::fem
