#include "fracspde/spectral.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "fracspde/quadrature.hpp"

namespace fracspde::spectral {

namespace {

constexpr double kPi = std::numbers::pi;

/// 1/Gamma(x) for any real x, via reflection on the nonpositive side.
double reciprocal_gamma(double x) {
  if (x > 0.0) {
    if (x > 178.0) return 0.0;
    return 1.0 / std::tgamma(x);
  }
  const double s = std::sin(kPi * x);
  if (s == 0.0) return 0.0;
  const double lg = std::lgamma(1.0 - x);
  if (lg > 700.0) return std::copysign(std::numeric_limits<double>::max(), s);
  return s / kPi * std::exp(lg);
}

/// Power series sum_n z^n / Gamma(a n + b). Returns false when the running
/// maximum term is large enough that double-precision cancellation would
/// break the 1e-10 accuracy target.
bool ml_series(double a, double b, double z, double& out) {
  double sum = reciprocal_gamma(b);
  if (z == 0.0) {
    out = sum;
    return true;
  }
  const double ln_az = std::log(std::abs(z));
  const bool negative = z < 0.0;
  double comp = 0.0;  // Kahan compensation
  double max_term = std::abs(sum);
  double prev_at = std::abs(sum);
  bool converged = false;
  for (int n = 1; n <= 20000; ++n) {
    const double lt = n * ln_az - std::lgamma(a * n + b);
    if (lt < -745.0 && prev_at < 1e-280) {
      converged = true;
      break;
    }
    double t = std::exp(lt);
    if (negative && (n & 1)) t = -t;
    const double at = std::abs(t);
    if (at > 1e280 || std::abs(sum) > 1e280) break;  // diverging magnitudes
    const double y = t - comp;
    const double s = sum + y;
    comp = (s - sum) - y;
    sum = s;
    if (at > max_term) max_term = at;
    if (at < 1e-17 * (1.0 + std::abs(sum)) && at < prev_at) {
      converged = true;
      break;
    }
    prev_at = at;
  }
  out = sum;
  if (!converged) return false;
  // cancellation guard: lgamma carries ~1e-13 absolute error at large
  // arguments, which the largest term amplifies
  return max_term <= 60.0 * (1.0 + std::abs(sum));
}

/// Asymptotic expansion -sum_k z^{-k} / Gamma(b - a k) for z -> -inf.
bool ml_asymptotic(double a, double b, double z, double& out) {
  double sum = 0.0;
  double zpow = 1.0;
  double min_term = std::numeric_limits<double>::infinity();
  bool ok = false;
  for (int k = 1; k <= 80; ++k) {
    zpow /= z;
    const double t = -zpow * reciprocal_gamma(b - a * k);
    const double at = std::abs(t);
    if (at == 0.0) continue;  // Gamma pole, not convergence
    if (k > 2 && at > 10.0 * min_term) break;  // past the optimal truncation
    sum += t;
    if (at < min_term) min_term = at;
    if (at < 1e-16 * (std::abs(sum) + 1e-300)) {
      ok = true;
      break;
    }
  }
  if (!ok) ok = min_term < 1e-13 * (std::abs(sum) + 1e-300);
  out = sum;
  return ok;
}

/// Branch-cut integral for 0 < a < 1, b < 1 + a, z < 0:
///   E_{a,b}(z) = (1/pi) Int_0^inf e^{-r} r^{a-b}
///                [r^a sin(pi(1-b)) - z sin(pi(1-b+a))]
///                / (r^{2a} - 2 r^a z cos(pi a) + z^2) dr
/// evaluated with exp-sinh (double-exponential) trapezoid sums.
double ml_branch_cut(double a, double b, double z) {
  const double s1b = std::sin(kPi * (1.0 - b));
  const double s1ba = std::sin(kPi * (1.0 - b + a));
  const double cpa = std::cos(kPi * a);
  const double spa2 = std::sin(kPi * a) * std::sin(kPi * a);
  const double growth = a - b + 1.0;  // > 0 by the b-reduction precondition

  auto integrand = [&](double w) -> double {
    const double lr = 0.5 * kPi * std::sinh(w);
    if (lr > 690.0) return 0.0;
    if (growth * lr < -740.0) return 0.0;
    const double r = std::exp(lr);
    const double ra = std::exp(a * lr);
    const double den = (ra - z * cpa) * (ra - z * cpa) + z * z * spa2;
    const double num = ra * s1b - z * s1ba;
    const double pref = std::exp(-r + growth * lr) * 0.5 * std::cosh(w);
    return pref * num / den;
  };

  double prev = std::numeric_limits<double>::quiet_NaN();
  for (double h : {0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625}) {
    double s = integrand(0.0);
    for (int side = -1; side <= 1; side += 2) {
      int quiet = 0;
      for (int k = 1; k * h < 14.0; ++k) {
        const double term = integrand(side * k * h);
        s += term;
        if (std::abs(term) < 1e-18 * (1.0 + std::abs(s))) {
          if (++quiet >= 8) break;
        } else {
          quiet = 0;
        }
      }
    }
    const double val = s * h;
    if (!std::isnan(prev) && std::abs(val - prev) <= 1e-12 * (1.0 + std::abs(val))) return val;
    prev = val;
  }
  throw MlError("mittag_leffler: branch-cut quadrature did not converge", prev);
}

}  // namespace

EigenPair dirichlet_eigenpair(int k, double l) {
  if (k < 1) throw std::invalid_argument("dirichlet_eigenpair: k must be >= 1");
  if (!(l > 0.0)) throw std::invalid_argument("dirichlet_eigenpair: l must be positive");
  const double w = k * kPi / l;
  return {k, w * w, l};
}

double EigenPair::phi(double x) const {
  return std::sqrt(2.0 / l) * std::sin(k * kPi * x / l);
}

double eigenvalue_lower_bound(int k, double l) {
  // C_1 * d/(d+2) * k^{2/d} |D|^{-2/d} with d = 1, C_1 = (2 pi)^2 / B_1^2, B_1 = 2
  const double c1 = (2.0 * kPi) * (2.0 * kPi) / 4.0;
  return c1 * (1.0 / 3.0) * static_cast<double>(k) * k / (l * l);
}

double mittag_leffler(double a, double b, double z) {
  if (!(b > 0.0) || !std::isfinite(b)) throw std::domain_error("mittag_leffler: b must be positive");
  if (!std::isfinite(z)) throw std::domain_error("mittag_leffler: z must be finite");
  const bool a_is_two = std::abs(a - 2.0) < 1e-12;
  if (!a_is_two && (!(a > 0.0) || !(a <= 1.0)))
    throw std::domain_error("mittag_leffler: a must lie in (0, 1] or equal 2");

  if (z == 0.0) return reciprocal_gamma(b);

  if (a_is_two) {
    if (b == 1.0) return z <= 0.0 ? std::cos(std::sqrt(-z)) : std::cosh(std::sqrt(z));
    if (b == 2.0) {
      if (z <= 0.0) {
        const double s = std::sqrt(-z);
        return std::sin(s) / s;
      }
      const double s = std::sqrt(z);
      return std::sinh(s) / s;
    }
    double v;
    if (ml_series(2.0, b, z, v)) return v;
    throw MlError("mittag_leffler: series unstable for a = 2 at this argument", v);
  }

  if (a == 1.0) {
    if (b == 1.0) return std::exp(z);
    if (b == 2.0) return std::expm1(z) / z;
    double v;
    if (ml_series(1.0, b, z, v)) return v;
    if (z < 0.0 && b > 1.0) {
      // step b down to a closed form or a stable series
      double vb = mittag_leffler(1.0, b - 1.0, z);
      return (vb - reciprocal_gamma(b - 1.0)) / z;
    }
    throw MlError("mittag_leffler: unsupported (a = 1, b, z) combination", v);
  }

  // 0 < a < 1
  double v;
  if (std::abs(z) <= 5.0 && ml_series(a, b, z, v)) return v;
  if (z > 0.0) {
    if (ml_series(a, b, z, v)) return v;
    throw MlError("mittag_leffler: positive arguments are served by the series only", v);
  }
  if (std::abs(z) >= 100.0 && ml_asymptotic(a, b, z, v)) return v;

  // branch-cut integral, with b reduced below 1 + a
  std::vector<double> chain;
  double bt = b;
  while (bt >= 1.0 + a - 1e-8) {
    chain.push_back(bt);
    bt -= a;
  }
  double val = ml_branch_cut(a, bt, z);
  for (auto it = chain.rbegin(); it != chain.rend(); ++it)
    val = (val - reciprocal_gamma(*it - a)) / z;
  return val;
}

double resolvent_kernel(int k, double t, const ProblemSpec& spec) {
  if (!(t > 0.0)) throw std::invalid_argument("resolvent_kernel: t must be positive");
  const EigenPair pair = dirichlet_eigenpair(k, spec.l);
  return mittag_leffler(spec.alpha, 1.0, -pair.lambda * std::pow(t, spec.alpha));
}

double contour_relaxation(double alpha, double lambda, double t, const ContourSpec& contour,
                          ContourDiagnostics* diag) {
  if (!(t > 0.0)) throw std::invalid_argument("contour_relaxation: t must be positive");
  if (!(contour.theta > kPi / 2.0) || !(contour.theta < kPi))
    throw std::invalid_argument("contour_relaxation: theta must lie in (pi/2, pi)");
  if (!(lambda > 0.0)) throw std::invalid_argument("contour_relaxation: lambda must be positive");

  const double theta = contour.theta;
  double kappa = contour.kappa > 0.0 ? contour.kappa : 1.0 / t;
  kappa = std::min(kappa, kPi / (t * std::sin(theta)));

  const std::complex<double> eit(std::cos(theta), std::sin(theta));
  auto g = [&](std::complex<double> zc) {
    return std::exp(zc * t) * std::pow(zc, alpha - 1.0) / (std::pow(zc, alpha) + lambda);
  };

  const double reach = kappa + 46.0 / (t * std::abs(std::cos(theta)));
  int panels = 1;
  while (kappa * std::pow(2.0, panels) < reach && panels < 60) ++panels;

  auto evaluate = [&](int arc_order, int ray_order) -> double {
    // rays, upper one only (conjugate symmetry): (1/pi) Int Im[g(r e^{i theta}) e^{i theta}] dr
    double rays = 0.0;
    const GaussRule& rr = gauss_legendre(ray_order);
    double lo = kappa;
    for (int p = 0; p < panels; ++p) {
      const double hi = std::min(lo * 2.0, reach);
      double s = 0.0;
      for (std::size_t q = 0; q < rr.nodes.size(); ++q) {
        const double r = lo + 0.5 * (hi - lo) * (rr.nodes[q] + 1.0);
        s += rr.weights[q] * std::imag(g(r * eit) * eit);
      }
      rays += 0.5 * (hi - lo) * s;
      lo = hi;
      if (lo >= reach) break;
    }
    rays /= kPi;

    // arc: (kappa/pi) Int_0^theta Re[g(kappa e^{i psi}) e^{i psi}] dpsi
    const GaussRule& ar = gauss_legendre(arc_order);
    double arc = 0.0;
    for (std::size_t q = 0; q < ar.nodes.size(); ++q) {
      const double psi = 0.5 * theta * (ar.nodes[q] + 1.0);
      const std::complex<double> ei(std::cos(psi), std::sin(psi));
      arc += ar.weights[q] * std::real(g(kappa * ei) * ei);
    }
    arc *= 0.5 * theta * kappa / kPi;
    return rays + arc;
  };

  const int arc_order = std::clamp(contour.n_quad / 8, 4, 48);
  const int ray_order = std::clamp((contour.n_quad - arc_order) / panels, 2, 64);
  const double value = evaluate(arc_order, ray_order);
  if (diag) {
    const double refined = evaluate(arc_order + 8, ray_order + 6);
    diag->est_error = std::abs(refined - value);
    diag->converged = diag->est_error <= 1e-9 * (1.0 + std::abs(refined));
    diag->points_used = contour.n_quad;
  }
  return value;
}

double contour_quadrature_kernel(int k, double t, const ProblemSpec& spec,
                                 const ContourSpec& contour, ContourDiagnostics* diag) {
  const EigenPair pair = dirichlet_eigenpair(k, spec.l);
  return contour_relaxation(spec.alpha, pair.lambda, t, contour, diag);
}

SpatialProfile SpatialProfile::constant(double value) {
  return {Kind::Constant, value, 0, nullptr};
}

SpatialProfile SpatialProfile::sine_mode(int k, double amplitude) {
  if (k < 1) throw std::invalid_argument("SpatialProfile::sine_mode: k must be >= 1");
  return {Kind::SineMode, amplitude, k, nullptr};
}

SpatialProfile SpatialProfile::callable(std::function<double(double)> fn) {
  return {Kind::Callable, 0.0, 0, std::move(fn)};
}

double SpatialProfile::inner_with_eigenfunction(int k, double l) const {
  switch (kind_) {
    case Kind::Constant: {
      // (v, phi_k) = v sqrt(2/l) l/(k pi) (1 - (-1)^k)
      const double parity = (k % 2 == 0) ? 0.0 : 2.0;
      return value_ * std::sqrt(2.0 / l) * l / (k * kPi) * parity;
    }
    case Kind::SineMode:
      return k == mode_ ? value_ : 0.0;
    case Kind::Callable: {
      const EigenPair pair = dirichlet_eigenpair(k, l);
      const int panels = std::max(8, k);
      return integrate_composite([&](double x) { return fn_(x) * pair.phi(x); }, 0.0, l,
                                 panels, 16);
    }
  }
  return 0.0;
}

double SpatialProfile::operator()(double x) const {
  switch (kind_) {
    case Kind::Constant: return value_;
    case Kind::SineMode: return value_;  // amplitude of phi_mode, not a pointwise value
    case Kind::Callable: return fn_(x);
  }
  return 0.0;
}

double SpectralSolution::eval(double x) const {
  const double scale = std::sqrt(2.0 / l);
  double s = 0.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i)
    s += coeffs[i] * scale * std::sin((i + 1) * kPi * x / l);
  return s;
}

SpectralSolution spectral_reference_constant_source(const SpatialProfile& c, double t, int K,
                                                    const ProblemSpec& spec) {
  if (K < 1) throw std::invalid_argument("spectral_reference_constant_source: K must be >= 1");
  if (!(t >= 0.0)) throw std::invalid_argument("spectral_reference_constant_source: t must be >= 0");

  SpectralSolution sol;
  sol.l = spec.l;
  sol.t = t;
  sol.coeffs.resize(K, 0.0);
  if (t == 0.0) return sol;

  const double ta = std::pow(t, spec.alpha);
  for (int k = 1; k <= K; ++k) {
    const EigenPair pair = dirichlet_eigenpair(k, spec.l);
    const double ip = c.inner_with_eigenfunction(k, spec.l);
    if (ip == 0.0) continue;
    sol.coeffs[k - 1] = ip * t * mittag_leffler(spec.alpha, 2.0, -pair.lambda * ta);
  }
  // crude tail gauge assuming >= k^{-3/2} coefficient decay
  double amp = 0.0;
  for (int k = std::max(1, K - 4); k <= K; ++k)
    amp = std::max(amp, std::abs(sol.coeffs[k - 1]) * std::pow(static_cast<double>(k), 1.5));
  sol.tail_estimate = amp * std::pow(static_cast<double>(K), -1.5);
  return sol;
}

}  // namespace fracspde::spectral
