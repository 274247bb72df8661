#pragma once

#include <functional>
#include <vector>

namespace fracspde {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached rule of the given order (nodes by Newton iteration on P_n).
const GaussRule& gauss_legendre(int n);

/// Composite Gauss integration of fn over [a, b] with `panels` equal panels
/// of the given order.
double integrate_composite(const std::function<double(double)>& fn, double a, double b,
                           int panels, int order);

}  // namespace fracspde
