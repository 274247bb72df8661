#pragma once

#include <cstddef>
#include <vector>

namespace fracspde {

/// Row-major dense matrix; just enough for covariance factors and oracles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(int rows, int cols, double value = 0.0)
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, value) {}

  double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

/// Gaussian elimination with partial pivoting. Throws on singular input.
std::vector<double> dense_solve(DenseMatrix a, std::vector<double> rhs);

}  // namespace fracspde
