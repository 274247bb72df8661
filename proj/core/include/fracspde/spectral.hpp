#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracspde/problem.hpp"

namespace fracspde::spectral {

/// Dirichlet Laplacian eigenpair on (0, l): lambda = (k pi / l)^2 with
/// L2-normalized eigenfunction sqrt(2/l) sin(k pi x / l).
struct EigenPair {
  int k;
  double lambda;
  double l;

  double phi(double x) const;
};

EigenPair dirichlet_eigenpair(int k, double l);

/// Lower bound C_1 * (1/3) * k^2 / l^2 with C_1 = (2 pi)^2 / B_1^2, B_1 = 2
/// (the d = 1 eigenvalue bound).
double eigenvalue_lower_bound(int k, double l);

/// Integration contour: two rays at angles +-theta (theta in (pi/2, pi))
/// joined by a circular arc of radius kappa. kappa <= 0 selects the default
/// kappa = 1/t at evaluation time.
struct ContourSpec {
  double theta = 2.356194490192344837;  // 3 pi / 4
  double kappa = 0.0;
  int n_quad = 400;
};

struct ContourDiagnostics {
  double est_error = 0.0;
  bool converged = true;
  int points_used = 0;
};

/// Raised when a Mittag-Leffler evaluation cannot reach target accuracy;
/// carries the best available estimate.
class MlError : public std::runtime_error {
 public:
  MlError(const std::string& what, double partial_)
      : std::runtime_error(what), partial(partial_) {}
  double partial;
};

/// E_{a,b}(z) for a in (0,1] or a = 2, b > 0, real z (guaranteed for
/// z <= 0; positive z is served where the power series is stable).
/// Absolute accuracy target 1e-10.
double mittag_leffler(double a, double b, double z);

/// E_k(t) = E_{alpha,1}(-lambda_k t^alpha), the mode-k relaxation kernel.
double resolvent_kernel(int k, double t, const ProblemSpec& spec);

/// Same kernel by quadrature of (1/2 pi i) Int e^{zt} z^{alpha-1}
/// (z^alpha + lambda_k)^{-1} dz over the contour.
double contour_quadrature_kernel(int k, double t, const ProblemSpec& spec,
                                 const ContourSpec& contour, ContourDiagnostics* diag = nullptr);

/// Scalar version used by both kernel routes and by tests.
double contour_relaxation(double alpha, double lambda, double t, const ContourSpec& contour,
                          ContourDiagnostics* diag = nullptr);

/// Spatial profile with closed-form eigen inner products where available.
class SpatialProfile {
 public:
  static SpatialProfile constant(double value);
  /// amplitude * phi_k (the normalized eigenfunction itself)
  static SpatialProfile sine_mode(int k, double amplitude);
  static SpatialProfile callable(std::function<double(double)> fn);

  /// (c, phi_k) on (0, l); closed form for constant/sine profiles,
  /// oscillation-resolving composite Gauss otherwise.
  double inner_with_eigenfunction(int k, double l) const;
  double operator()(double x) const;

 private:
  enum class Kind { Constant, SineMode, Callable };
  SpatialProfile(Kind kind, double value, int mode, std::function<double(double)> fn)
      : kind_(kind), value_(value), mode_(mode), fn_(std::move(fn)) {}
  Kind kind_;
  double value_;
  int mode_;
  std::function<double(double)> fn_;
};

/// Truncated eigen-expansion of the solution with u-independent source c
/// and beta = 0: u(t) = sum_k (c, phi_k) t E_{alpha,2}(-lambda_k t^alpha) phi_k.
struct SpectralSolution {
  double l = 0.0;
  double t = 0.0;
  std::vector<double> coeffs;  // index k-1 holds the phi_k coefficient
  double tail_estimate = 0.0;

  double eval(double x) const;
};

SpectralSolution spectral_reference_constant_source(const SpatialProfile& c, double t, int K,
                                                    const ProblemSpec& spec);

}  // namespace fracspde::spectral
