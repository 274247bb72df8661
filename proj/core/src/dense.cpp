#include "fracspde/dense.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace fracspde {

std::vector<double> dense_solve(DenseMatrix a, std::vector<double> rhs) {
  const int n = a.rows();
  if (a.cols() != n || static_cast<int>(rhs.size()) != n)
    throw std::invalid_argument("dense_solve: shape mismatch");

  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    if (a(pivot, col) == 0.0) throw std::runtime_error("dense_solve: singular matrix");
    if (pivot != col) {
      for (int c = col; c < n; ++c) std::swap(a(col, c), a(pivot, c));
      std::swap(rhs[col], rhs[pivot]);
    }
    for (int r = col + 1; r < n; ++r) {
      const double m = a(r, col) / a(col, col);
      if (m == 0.0) continue;
      for (int c = col; c < n; ++c) a(r, c) -= m * a(col, c);
      rhs[r] -= m * rhs[col];
    }
  }
  for (int r = n - 1; r >= 0; --r) {
    double s = rhs[r];
    for (int c = r + 1; c < n; ++c) s -= a(r, c) * rhs[c];
    rhs[r] = s / a(r, r);
  }
  return rhs;
}

}  // namespace fracspde
