#pragma once

#include <string>

namespace fracspde {

/// Hurst exponents of the driving sheet, spatial (h1) and temporal (h2).
/// Both are restricted to the rough regime (0, 1/2].
struct HurstPair {
  double h1;
  double h2;

  HurstPair(double h1_, double h2_);
};

/// Pointwise source term u -> f(u) with a declared Lipschitz constant.
class NonlinearSource {
 public:
  enum class Kind { Zero, Constant, Linear, Sine };

  static NonlinearSource zero();
  static NonlinearSource constant(double value);
  /// f(u) = slope * u
  static NonlinearSource linear(double slope);
  /// f(u) = scale * sin(u)
  static NonlinearSource sine(double scale);
  /// Accepts ids "zero", "constant", "linear", "sin".
  static NonlinearSource from_id(const std::string& id, double param);

  double operator()(double u) const;
  double lipschitz() const;
  Kind kind() const { return kind_; }
  double param() const { return param_; }
  std::string id() const;

 private:
  NonlinearSource(Kind kind, double param) : kind_(kind), param_(param) {}
  Kind kind_;
  double param_;
};

/// Full problem definition on D = (0, l) x (0, T].
///
/// alpha = 1 is admitted as the classical limit (the time stepping then
/// degenerates to plain backward Euler); the rough-noise theory itself
/// lives in alpha in (0, 1).
struct ProblemSpec {
  double alpha;
  HurstPair hurst;
  double beta;
  double l;
  double T;
  NonlinearSource f;

  ProblemSpec(double alpha_, HurstPair hurst_, double beta_, double l_,
              double T_, NonlinearSource f_);

  /// 2*h2 + (h1 - 1)*alpha. The constructor rejects specs where this is
  /// not positive; it is also the mean-square temporal regularity exponent.
  double regularity_exponent() const { return 2.0 * hurst.h2 + (hurst.h1 - 1.0) * alpha; }
};

}  // namespace fracspde
