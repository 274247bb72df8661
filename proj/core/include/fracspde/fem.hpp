#pragma once

#include <span>
#include <vector>

#include "fracspde/problem.hpp"

namespace fracspde::fem {

/// Uniform mesh on (0, l) with n elements; nodes x_j = j l / n.
struct Mesh1D {
  double l;
  int n;

  Mesh1D(double l_, int n_);
  double h() const { return l / n; }
  double node(int j) const { return l * j / n; }
  int interior() const { return n - 1; }
  bool operator==(const Mesh1D&) const = default;
};

/// Symmetric tridiagonal operator on the interior nodes.
struct TridiagonalMatrix {
  int dim = 0;
  std::vector<double> sub;    // dim - 1
  std::vector<double> diag;   // dim
  std::vector<double> super;  // dim - 1

  std::vector<double> apply(std::span<const double> x) const;
};

/// P1 mass matrix: bands (h/6, 4h/6, h/6).
TridiagonalMatrix assemble_mass(const Mesh1D& mesh);

/// P1 stiffness matrix: bands (-1/h, 2/h, -1/h).
TridiagonalMatrix assemble_stiffness(const Mesh1D& mesh);

/// Piecewise-linear function with zero Dirichlet boundary: interior nodal
/// values only.
struct FemFunction {
  Mesh1D mesh;
  std::vector<double> coeffs;

  double eval(double x) const;
};

/// Entry j: integral of f(u_h) against the hat at node j, 3-point Gauss per
/// element (exact through degree 5).
std::vector<double> load_nonlinear(const FemFunction& u, const NonlinearSource& f);

/// Entry j for a field that is constant per element (one level per element):
/// (levels[j-1] + levels[j]) * h / 2, the exact integral against hat_j.
std::vector<double> load_noise(const Mesh1D& mesh, std::span<const double> levels);

/// Reusable forward-elimination state for repeated solves with one matrix.
class TridiagonalFactor {
 public:
  explicit TridiagonalFactor(const TridiagonalMatrix& m);
  std::vector<double> solve(std::span<const double> rhs) const;

 private:
  std::vector<double> sub_;
  std::vector<double> inv_diag_;  // 1 / modified pivot
  std::vector<double> super_;
};

/// One-shot tridiagonal solve (Thomas algorithm). Throws on zero pivot.
std::vector<double> thomas_solve(const TridiagonalMatrix& m, std::span<const double> rhs);

/// sqrt(c^T M c), the exact L2 norm of the P1 function.
double l2_norm(const FemFunction& u);

/// Embed onto a 2^levels times finer mesh by midpoint interpolation; exact
/// as a function (P1 spaces are nested).
FemFunction refine_embed(const FemFunction& u, int levels);

}  // namespace fracspde::fem
