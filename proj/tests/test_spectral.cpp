#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <numbers>

#include "fracspde/spectral.hpp"

using namespace fracspde;
using namespace fracspde::spectral;

namespace {

constexpr double kPi = std::numbers::pi;

// Extended-precision power series oracle; reliable for |z| <= ~1.5 where no
// cancellation occurs (400 terms, long double).
long double ml_series_oracle(long double a, long double b, long double z) {
  long double sum = 0.0L;
  for (int n = 0; n < 400; ++n) {
    long double lt = -lgammal(a * n + b);
    if (n > 0) lt += n * logl(fabsl(z));
    long double t = expl(lt);
    if (z < 0.0L && (n & 1)) t = -t;
    sum += t;
  }
  return sum;
}

// Scaled complementary error function; E_{1/2,1}(-x) = erfcx(x). The naive
// product overflows past x ~ 26, where the asymptotic series is exact to
// machine precision.
double erfcx(double x) {
  if (x <= 25.0) return std::exp(x * x) * std::erfc(x);
  double term = 1.0, sum = 1.0;
  for (int k = 1; k <= 12; ++k) {
    term *= -(2.0 * k - 1.0) / (2.0 * x * x);
    sum += term;
  }
  return sum / (x * std::sqrt(std::numbers::pi));
}

// E_{1/2,b}(z) for b in {1.5, 2} by the exact recursion from the closed form.
double ml_half_oracle(double b, double z) {
  const double e1 = erfcx(-z);  // b = 1
  const double e15 = (e1 - 1.0) / z;
  if (b == 1.5) return e15;
  const double inv_g15 = 1.0 / std::tgamma(1.5);
  return (e15 - inv_g15) / z;  // b = 2
}

ProblemSpec make_spec(double alpha, double l) {
  return {alpha, HurstPair(0.5, 0.5), 0.0, l, 1.0, NonlinearSource::zero()};
}

}  // namespace

TEST_CASE("eigenpairs: values, normalization, lower bound") {
  const auto pair = dirichlet_eigenpair(3, 2.0);
  CHECK(pair.lambda == doctest::Approx(std::pow(3 * kPi / 2.0, 2)).epsilon(1e-14));
  // trapezoid check of the L2 normalization
  const int n = 20000;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = 2.0 * (i + 0.5) / n;
    acc += pair.phi(x) * pair.phi(x) * (2.0 / n);
  }
  CHECK(acc == doctest::Approx(1.0).epsilon(1e-6));

  for (int k : {1, 7, 100, 1000})
    CHECK(dirichlet_eigenpair(k, 0.5).lambda >= eigenvalue_lower_bound(k, 0.5));
  CHECK_THROWS_AS(dirichlet_eigenpair(0, 1.0), std::invalid_argument);
}

TEST_CASE("mittag-leffler: classical identities, frozen values") {
  CHECK(mittag_leffler(1.0, 1.0, -1.0) == doctest::Approx(0.36787944117144233).epsilon(1e-12));
  CHECK(mittag_leffler(2.0, 1.0, -1.0) == doctest::Approx(0.54030230586813972).epsilon(1e-12));
  CHECK(mittag_leffler(1.0, 2.0, 1.0) == doctest::Approx(1.7182818284590452).epsilon(1e-12));
  // e erfc(1), the quoted reference digits and the closed form
  const double got = mittag_leffler(0.5, 1.0, -1.0);
  CHECK(got == doctest::Approx(0.4275836).epsilon(2e-7));
  CHECK(got == doctest::Approx(std::exp(1.0) * std::erfc(1.0)).epsilon(1e-11));
  CHECK(mittag_leffler(0.7, 1.2, 0.0) == doctest::Approx(1.0 / std::tgamma(1.2)).epsilon(1e-14));
}

TEST_CASE("mittag-leffler: extended-precision series oracle, small arguments") {
  for (double a : {0.3, 0.5, 0.7, 1.0})
    for (double b : {1.0, 1.5, 2.0})
      for (double z : {-0.25, -1.0, -1.5}) {
        const double want = static_cast<double>(ml_series_oracle(a, b, z));
        CHECK(mittag_leffler(a, b, z) == doctest::Approx(want).epsilon(1e-11));
      }
}

TEST_CASE("mittag-leffler: closed-form oracle across the evaluation regimes") {
  // series region, branch-cut integral region, asymptotic region
  for (double x : {1.0, 3.1622776601683795, 10.0, 31.622776601683796, 1000.0}) {
    CHECK(mittag_leffler(0.5, 1.0, -x) == doctest::Approx(erfcx(x)).epsilon(1e-9));
    CHECK(std::abs(mittag_leffler(0.5, 1.0, -x) - erfcx(x)) < 1e-10);
  }
  for (double x : {2.5, 10.0, 250.0, 4e4}) {
    CHECK(std::abs(mittag_leffler(0.5, 2.0, -x) - ml_half_oracle(2.0, -x)) < 1e-10);
    CHECK(std::abs(mittag_leffler(0.5, 1.5, -x) - ml_half_oracle(1.5, -x)) < 1e-10);
  }
}

TEST_CASE("mittag-leffler: monotone in (0, 1] on the negative axis") {
  for (double a : {0.25, 0.5, 0.75, 1.0}) {
    double prev = 1.0;
    for (double lx = -2.0; lx <= 3.0; lx += 0.25) {
      const double v = mittag_leffler(a, 1.0, -std::pow(10.0, lx));
      CHECK(v >= 0.0);  // exp underflow reaches 0 at the far end
      CHECK(v <= prev + 1e-12);
      prev = v;
    }
  }
}

TEST_CASE("mittag-leffler: domain and convergence errors") {
  CHECK_THROWS_AS(mittag_leffler(1.5, 1.0, -1.0), std::domain_error);
  CHECK_THROWS_AS(mittag_leffler(0.0, 1.0, -1.0), std::domain_error);
  CHECK_THROWS_AS(mittag_leffler(0.5, 0.0, -1.0), std::domain_error);
  try {
    mittag_leffler(2.0, 1.5, -1e8);
    CHECK(false);
  } catch (const MlError& e) {
    CHECK(std::isfinite(e.partial));
  }
}

TEST_CASE("resolvent kernel: limits and closed forms") {
  const auto spec_heat = make_spec(1.0, kPi);  // lambda_1 = 1
  CHECK(resolvent_kernel(1, 0.75, spec_heat) == doctest::Approx(std::exp(-0.75)).epsilon(1e-13));

  const auto spec_half = make_spec(0.5, kPi);
  CHECK(resolvent_kernel(1, 1.0, spec_half) ==
        doctest::Approx(std::exp(1.0) * std::erfc(1.0)).epsilon(1e-10));

  CHECK(resolvent_kernel(2, 1e-12, spec_half) == doctest::Approx(1.0).epsilon(1e-5));
  CHECK_THROWS_AS(resolvent_kernel(1, 0.0, spec_half), std::invalid_argument);
}

TEST_CASE("contour quadrature: closes the classical exponential") {
  CHECK(contour_relaxation(1.0, 1.0, 1.0, {}) == doctest::Approx(std::exp(-1.0)).epsilon(1e-9));
}

TEST_CASE("contour quadrature: agrees with the series route") {
  for (double alpha : {0.3, 0.5, 0.7})
    for (double lambda : {1.0, 10.0})
      for (double t : {0.1, 1.0}) {
        const double via_ml = mittag_leffler(alpha, 1.0, -lambda * std::pow(t, alpha));
        const double via_contour = contour_relaxation(alpha, lambda, t, {});
        CHECK(std::abs(via_ml - via_contour) < 1e-8);
      }
}

TEST_CASE("contour quadrature: deformation invariance and diagnostics") {
  const ContourSpec narrow{3.0 * kPi / 4.0, 0.0, 400};
  const ContourSpec wide{5.0 * kPi / 6.0, 0.0, 400};
  CHECK(std::abs(contour_relaxation(0.5, 1.0, 1.0, narrow) -
                 contour_relaxation(0.5, 1.0, 1.0, wide)) < 1e-8);

  ContourDiagnostics diag;
  const auto spec = make_spec(0.5, 1.0);
  contour_quadrature_kernel(1, 0.5, spec, {}, &diag);
  CHECK(diag.converged);
  CHECK(diag.est_error < 1e-9);
  CHECK(diag.points_used == 400);

  ContourDiagnostics coarse_diag;
  contour_quadrature_kernel(1, 0.5, spec, {3.0 * kPi / 4.0, 0.0, 12}, &coarse_diag);
  CHECK(coarse_diag.est_error > 0.0);
}

TEST_CASE("spatial profiles: inner products") {
  CHECK(SpatialProfile::sine_mode(2, 3.5).inner_with_eigenfunction(2, 1.0) == 3.5);
  CHECK(SpatialProfile::sine_mode(2, 3.5).inner_with_eigenfunction(3, 1.0) == 0.0);

  const double l = 0.7;
  for (int k : {1, 2, 5}) {
    const double closed = SpatialProfile::constant(2.0).inner_with_eigenfunction(k, l);
    const double quad = SpatialProfile::callable([](double) { return 2.0; })
                            .inner_with_eigenfunction(k, l);
    CHECK(closed == doctest::Approx(quad).epsilon(1e-12));
  }
}

TEST_CASE("spectral reference: zero source and classical mode decay") {
  const auto spec = make_spec(1.0, 1.0);
  const auto zero = spectral_reference_constant_source(SpatialProfile::constant(0.0), 1.0, 20, spec);
  for (double c : zero.coeffs) CHECK(c == 0.0);
  CHECK(zero.eval(0.37) == 0.0);

  // f = phi_1, alpha = 1: coefficient (1 - e^{-lambda t})/lambda
  const double t = 0.3;
  const auto sol =
      spectral_reference_constant_source(SpatialProfile::sine_mode(1, 1.0), t, 20, spec);
  const double lambda = kPi * kPi;
  CHECK(sol.coeffs[0] ==
        doctest::Approx((1.0 - std::exp(-lambda * t)) / lambda).epsilon(1e-11));
  for (std::size_t k = 1; k < sol.coeffs.size(); ++k) CHECK(sol.coeffs[k] == 0.0);
}

TEST_CASE("spectral reference: subdiffusive coefficient, closed-form oracle") {
  const auto spec = make_spec(0.5, 1.0);
  const auto sol =
      spectral_reference_constant_source(SpatialProfile::sine_mode(1, 1.0), 1.0, 8, spec);
  const double want = ml_half_oracle(2.0, -kPi * kPi);
  CHECK(sol.coeffs[0] == doctest::Approx(want).epsilon(1e-9));
}

TEST_CASE("spectral reference: tail estimate shrinks with K") {
  const auto spec = make_spec(0.5, 1.0);
  const auto a =
      spectral_reference_constant_source(SpatialProfile::constant(1.0), 0.5, 50, spec);
  const auto b =
      spectral_reference_constant_source(SpatialProfile::constant(1.0), 0.5, 200, spec);
  CHECK(a.tail_estimate > 0.0);
  CHECK(b.tail_estimate < a.tail_estimate);
}
