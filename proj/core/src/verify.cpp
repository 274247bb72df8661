#include "fracspde/verify.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "fracspde/cq_stepper.hpp"
#include "fracspde/dense.hpp"
#include "fracspde/experiments.hpp"
#include "fracspde/fem.hpp"
#include "fracspde/noise.hpp"
#include "fracspde/quadrature.hpp"
#include "fracspde/rng.hpp"
#include "fracspde/spectral.hpp"

namespace fracspde::verify {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

void check_abs(Report& report, const std::string& name, double got, double want, double tol) {
  const double err = std::abs(got - want);
  report.checks.push_back(
      {name, err <= tol, "got " + fmt(got) + ", want " + fmt(want) + ", |diff| " + fmt(err)});
}

void check_true(Report& report, const std::string& name, bool pass, const std::string& detail) {
  report.checks.push_back({name, pass, detail});
}

// ---- ml suite -------------------------------------------------------------

Report suite_ml() {
  Report report{"ml", {}};

  double worst = 0.0;
  for (double z = -20.0; z <= 1e-12; z += 0.25)
    worst = std::max(worst, std::abs(spectral::mittag_leffler(1.0, 1.0, z) - std::exp(z)));
  check_true(report, "E_{1,1}(z) = exp(z) on [-20, 0]", worst <= 1e-10, "worst |diff| " + fmt(worst));

  worst = 0.0;
  for (double z = 0.0; z <= 5.0 + 1e-12; z += 0.1)
    worst = std::max(worst, std::abs(spectral::mittag_leffler(2.0, 1.0, -z * z) - std::cos(z)));
  check_true(report, "E_{2,1}(-z^2) = cos(z) on [0, 5]", worst <= 1e-10, "worst |diff| " + fmt(worst));

  worst = 0.0;
  for (double z = -20.0; z <= 1.0 + 1e-12; z += 0.25) {
    if (std::abs(z) < 1e-9) continue;
    worst = std::max(worst,
                     std::abs(spectral::mittag_leffler(1.0, 2.0, z) - std::expm1(z) / z));
  }
  check_true(report, "E_{1,2}(z) = (exp(z)-1)/z", worst <= 1e-10, "worst |diff| " + fmt(worst));

  check_abs(report, "E_{1/2,1}(-1) = e erfc(1)", spectral::mittag_leffler(0.5, 1.0, -1.0),
            std::exp(1.0) * std::erfc(1.0), 1e-10);

  // cross-method agreement at the default contour
  worst = 0.0;
  for (double alpha : {0.3, 0.5, 0.7})
    for (double lambda : {1.0, 10.0})
      for (double t : {0.1, 1.0}) {
        const double series =
            spectral::mittag_leffler(alpha, 1.0, -lambda * std::pow(t, alpha));
        const double contour = spectral::contour_relaxation(alpha, lambda, t, {});
        worst = std::max(worst, std::abs(series - contour));
      }
  check_true(report, "contour vs series, 12 cases", worst <= 1e-8, "worst |diff| " + fmt(worst));

  worst = 0.0;
  for (double alpha : {0.5, 0.7})
    for (double t : {0.1, 1.0}) {
      spectral::ContourSpec a{3.0 * kPi / 4.0, 0.0, 400};
      spectral::ContourSpec b{5.0 * kPi / 6.0, 0.0, 400};
      worst = std::max(worst, std::abs(spectral::contour_relaxation(alpha, 4.0, t, a) -
                                       spectral::contour_relaxation(alpha, 4.0, t, b)));
    }
  check_true(report, "contour invariant under theta change", worst <= 1e-8,
             "worst |diff| " + fmt(worst));

  bool mono = true, in_range = true;
  for (double alpha : {0.2, 0.4, 0.6, 0.8, 1.0}) {
    double prev = 1.0;
    for (double lx = -3.0; lx <= 3.0 + 1e-12; lx += 0.125) {
      const double x = std::pow(10.0, lx);
      const double v = spectral::mittag_leffler(alpha, 1.0, -x);
      if (v < 0.0 || v > 1.0 + 1e-12) in_range = false;  // 0 admitted at underflow
      if (v > prev + 1e-12) mono = false;
      prev = v;
    }
  }
  check_true(report, "E_{a,1}(-x) in [0,1], decreasing", mono && in_range,
             mono ? (in_range ? "ok" : "range violation") : "monotonicity violation");

  bool bound_ok = true;
  for (int k = 1; k <= 1000; ++k) {
    const auto pair = spectral::dirichlet_eigenpair(k, 0.7);
    if (pair.lambda < spectral::eigenvalue_lower_bound(k, 0.7)) bound_ok = false;
  }
  check_true(report, "eigenvalue lower bound, k <= 1000", bound_ok, bound_ok ? "ok" : "violated");

  return report;
}

// ---- cq suite -------------------------------------------------------------

// (1-x)^{1/2} coefficients: g_0 = 1, g_i = -C(2i-2, i-1) / (i 2^{2i-1}),
// central binomials built exactly in 128-bit integers.
std::vector<double> half_power_weights_oracle(int count) {
  std::vector<double> g(count);
  g[0] = 1.0;
  __int128 central = 1;  // C(0, 0)
  for (int i = 1; i < count; ++i) {
    if (i >= 2) {
      const int k = i - 1;  // C(2k, k) from C(2k-2, k-1)
      central = central * 2 * (2 * k - 1) / k;
    }
    const long double denom = static_cast<long double>(i) * std::ldexp(1.0L, 2 * i - 1);
    g[i] = static_cast<double>(-static_cast<long double>(central) / denom);
  }
  return g;
}

Report suite_cq() {
  Report report{"cq", {}};

  const auto w = cq::cq_weights(0.5, 1.0, 64);
  const auto oracle = half_power_weights_oracle(64);
  double worst = 0.0;
  for (int i = 0; i < 64; ++i) worst = std::max(worst, std::abs(w.d[i] - oracle[i]));
  check_true(report, "gamma = 1/2 weights vs binomial expansion (64)", worst <= 1e-13,
             "worst |diff| " + fmt(worst));

  worst = 0.0;
  for (double gamma : {0.3, 0.5, 0.7}) {
    const auto a = cq::cq_weights(gamma, 1.0, 64);
    const auto b = cq::cq_weights(1.0 - gamma, 1.0, 64);
    for (int k = 0; k < 64; ++k) {
      double conv = 0.0;
      for (int j = 0; j <= k; ++j) conv += a.d[j] * b.d[k - j];
      const double want = k == 0 ? 1.0 : (k == 1 ? -1.0 : 0.0);
      worst = std::max(worst, std::abs(conv - want));
    }
  }
  check_true(report, "convolution identity d^g * d^(1-g) = [1/tau, -1/tau, 0...]", worst <= 1e-12,
             "worst |diff| " + fmt(worst));

  bool sums_ok = true;
  std::string sum_detail = "ok";
  for (double gamma : {0.3, 0.5, 0.7}) {
    const int count = 4096;
    const auto weights = cq::cq_weights(gamma, 1.0, count);
    double partial = 0.0, prev = 1e300, recur = 1.0;
    for (int k = 0; k < count; ++k) {
      partial += weights.d[k];
      if (k > 0) recur *= (k - gamma) / k;  // (-1)^k C(gamma-1, k)
      if (!(partial > 0.0) || partial >= prev + 1e-15 ||
          std::abs(partial - recur) > 1e-12 * recur) {
        sums_ok = false;
        sum_detail = "violation at gamma " + fmt(gamma) + ", k " + std::to_string(k);
        break;
      }
      prev = partial;
    }
    if (sums_ok && partial > 0.11) {
      sums_ok = false;
      sum_detail = "partial sum did not decay, gamma " + fmt(gamma);
    }
  }
  check_true(report, "partial sums positive, decreasing to 0", sums_ok, sum_detail);

  return report;
}

// ---- fem suite ------------------------------------------------------------

Report suite_fem() {
  Report report{"fem", {}};

  const fem::Mesh1D mesh4(1.0, 4);
  const auto mass4 = fem::assemble_mass(mesh4);
  check_abs(report, "mass diag, n=4 l=1", mass4.diag[0], 1.0 / 6.0, 1e-15);
  check_abs(report, "mass offdiag, n=4 l=1", mass4.sub[0], 1.0 / 24.0, 1e-15);

  const auto stiff2 = fem::assemble_stiffness(fem::Mesh1D(1.0, 2));
  check_abs(report, "stiffness single entry, n=2 l=1", stiff2.diag[0], 4.0, 1e-15);

  // Thomas vs dense elimination on a random SPD tridiagonal system
  {
    const int dim = 50;
    NormalStream rng(20240001ULL);
    fem::TridiagonalMatrix m;
    m.dim = dim;
    m.sub.resize(dim - 1);
    m.diag.resize(dim);
    for (double& v : m.sub) v = -std::abs(rng.next());
    for (int i = 0; i < dim; ++i) {
      double row = 0.1 + std::abs(rng.next());
      if (i > 0) row += std::abs(m.sub[i - 1]);
      if (i < dim - 1) row += std::abs(m.sub[i]);
      m.diag[i] = row;
    }
    m.super = m.sub;
    std::vector<double> rhs(dim);
    for (double& v : rhs) v = rng.next();
    const auto fast = fem::thomas_solve(m, rhs);
    DenseMatrix dm(dim, dim, 0.0);
    for (int i = 0; i < dim; ++i) {
      dm(i, i) = m.diag[i];
      if (i > 0) dm(i, i - 1) = m.sub[i - 1];
      if (i < dim - 1) dm(i, i + 1) = m.super[i];
    }
    const auto slow = dense_solve(dm, rhs);
    double worst = 0.0;
    for (int i = 0; i < dim; ++i) worst = std::max(worst, std::abs(fast[i] - slow[i]));
    check_true(report, "thomas vs dense elimination, dim 50", worst <= 1e-10,
               "worst |diff| " + fmt(worst));
  }

  {
    const fem::Mesh1D mesh(1.0, 256);
    fem::FemFunction f{mesh, std::vector<double>(mesh.interior())};
    for (int j = 1; j < mesh.n; ++j)
      f.coeffs[j - 1] = std::sqrt(2.0) * std::sin(kPi * mesh.node(j));
    check_abs(report, "l2 norm of phi_1 interpolant, n=256", fem::l2_norm(f), 1.0, 1e-4);

    const auto fine = fem::refine_embed(f, 2);
    check_abs(report, "refine_embed preserves the l2 norm", fem::l2_norm(fine), fem::l2_norm(f),
              1e-12);
  }

  // smallest generalized eigenvalue of (S, M) by inverse power iteration
  {
    const fem::Mesh1D mesh(1.0, 64);
    const auto mass = fem::assemble_mass(mesh);
    const auto stiff = fem::assemble_stiffness(mesh);
    const fem::TridiagonalFactor sf(stiff);
    std::vector<double> x(mesh.interior(), 1.0);
    double lambda = 0.0;
    for (int it = 0; it < 200; ++it) {
      auto y = sf.solve(mass.apply(x));
      double norm = 0.0;
      for (double v : y) norm += v * v;
      norm = std::sqrt(norm);
      for (double& v : y) v /= norm;
      x = std::move(y);
    }
    const auto sx = stiff.apply(x);
    const auto mx = mass.apply(x);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      num += x[i] * sx[i];
      den += x[i] * mx[i];
    }
    lambda = num / den;
    const double exact = kPi * kPi;
    check_true(report, "lambda_1(S, M) near pi^2, n=64",
               std::abs(lambda - exact) <= 0.01 * exact,
               "got " + fmt(lambda) + ", want " + fmt(exact));
  }

  return report;
}

// ---- noise suite ----------------------------------------------------------

Report suite_noise() {
  Report report{"noise", {}};

  const int samples = 20000;
  const int m_t = 4, n_x = 4;
  const double T = 0.5, l = 0.5;
  const auto grid = noise::NoiseGridSpec::from_domain(T, l, m_t, n_x);

  int pair_index = 0;
  for (const auto& [h1, h2] : {std::pair{0.5, 0.5}, std::pair{0.25, 0.25}, std::pair{0.2, 0.4}}) {
    const HurstPair hurst(h1, h2);
    const auto cov_t = noise::increment_covariance_1d(h2, grid.tau, m_t);
    const auto cov_x = noise::increment_covariance_1d(h1, grid.h, n_x);

    const int cells = m_t * n_x;
    std::vector<double> acc(static_cast<std::size_t>(cells) * cells, 0.0);
    std::vector<double> flat(cells);
    for (int s = 0; s < samples; ++s) {
      const auto field =
          noise::sample_sheet_increments(grid, hurst, 7000000ULL + 31ULL * pair_index + s);
      for (int c = 0; c < cells; ++c) flat[c] = field.values.data()[c];
      for (int a = 0; a < cells; ++a)
        for (int b = a; b < cells; ++b) acc[a * cells + b] += flat[a] * flat[b];
    }
    double worst_sigma = 0.0;
    for (int a = 0; a < cells; ++a) {
      for (int b = a; b < cells; ++b) {
        const int ia = a / n_x, ja = a % n_x, ib = b / n_x, jb = b % n_x;
        const double truth = cov_t(ia, ib) * cov_x(ja, jb);
        const double va = cov_t(ia, ia) * cov_x(ja, ja);
        const double vb = cov_t(ib, ib) * cov_x(jb, jb);
        const double se = std::sqrt((va * vb + truth * truth) / samples);
        const double got = acc[a * cells + b] / samples;
        worst_sigma = std::max(worst_sigma, std::abs(got - truth) / se);
      }
    }
    check_true(report,
               "empirical covariance within 5 SE, H = (" + fmt(h1) + ", " + fmt(h2) + ")",
               worst_sigma <= 5.0, "worst deviation " + fmt(worst_sigma) + " SE");
    ++pair_index;
  }

  {
    const auto fine = noise::sample_sheet_increments(
        noise::NoiseGridSpec::from_domain(1.0, 1.0, 16, 8), HurstPair(0.3, 0.4), 99);
    const auto coarse = noise::aggregate(fine, 4, 2);
    double total_fine = 0.0, total_coarse = 0.0;
    for (double v : fine.values.data()) total_fine += v;
    for (double v : coarse.values.data()) total_coarse += v;
    check_abs(report, "aggregation preserves the total sum", total_coarse, total_fine, 1e-12);
  }

  {
    const auto cov = noise::increment_covariance_1d(0.25, 1.0, 8);
    const auto factor = noise::cholesky_factor(cov);
    double num = 0.0, den = 0.0;
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) {
        double r = 0.0;
        for (int k = 0; k < 8; ++k) r += factor.lower(i, k) * factor.lower(j, k);
        num += (r - cov(i, j)) * (r - cov(i, j));
        den += cov(i, j) * cov(i, j);
      }
    check_true(report, "cholesky reconstruction, H = 0.25, n = 8",
               std::sqrt(num / den) <= 1e-10, "relative Frobenius " + fmt(std::sqrt(num / den)));
  }

  {
    // aggregated fine field vs directly sampled coarse field: same law
    const HurstPair hurst(0.3, 0.4);
    const auto fine_grid = noise::NoiseGridSpec::from_domain(1.0, 1.0, 8, 8);
    const auto coarse_grid = noise::NoiseGridSpec::from_domain(1.0, 1.0, 4, 4);
    const int n = 20000;
    double var_agg = 0.0, var_direct = 0.0;
    for (int s = 0; s < n; ++s) {
      const auto agg = noise::aggregate(
          noise::sample_sheet_increments(fine_grid, hurst, 400000ULL + s), 2, 2);
      const auto direct = noise::sample_sheet_increments(coarse_grid, hurst, 800000ULL + s);
      var_agg += agg.values(1, 2) * agg.values(1, 2);
      var_direct += direct.values(1, 2) * direct.values(1, 2);
    }
    var_agg /= n;
    var_direct /= n;
    const double se = std::sqrt(2.0 / n) * (var_agg + var_direct) * 0.5 * std::sqrt(2.0);
    check_true(report, "aggregated field matches the direct coarse law",
               std::abs(var_agg - var_direct) <= 5.0 * se,
               "variances " + fmt(var_agg) + " vs " + fmt(var_direct));
  }

  return report;
}

// ---- oracle suite ---------------------------------------------------------

double l2_error_vs_reference(const fem::FemFunction& u, const spectral::SpectralSolution& ref) {
  const int n = u.mesh.n;
  const double h = u.mesh.h();
  const GaussRule& rule = gauss_legendre(5);
  double total = 0.0;
  for (int e = 0; e < n; ++e) {
    const double left = e >= 1 ? u.coeffs[e - 1] : 0.0;
    const double right = e < n - 1 ? u.coeffs[e] : 0.0;
    const double x0 = e * h;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double s = 0.5 * (rule.nodes[q] + 1.0);
      const double diff = left * (1.0 - s) + right * s - ref.eval(x0 + s * h);
      total += rule.weights[q] * 0.5 * h * diff * diff;
    }
  }
  return std::sqrt(total);
}

Report suite_oracle() {
  Report report{"oracle", {}};
  const double T = 0.05, l = 1.0;

  for (double alpha : {0.5, 0.8}) {
    const ProblemSpec spec(alpha, HurstPair(0.5, 0.5), 0.0, l, T, NonlinearSource::constant(1.0));
    const auto ref = spectral::spectral_reference_constant_source(
        spectral::SpatialProfile::constant(1.0), T, 200, spec);

    std::vector<double> errs;
    for (int n_x : {16, 32, 64}) {
      const auto grid = noise::NoiseGridSpec::from_domain(T, l, 2048, n_x);
      const auto u = cq::run_trajectory(spec, 2048, n_x, noise::zero_field(grid, spec.hurst));
      errs.push_back(l2_error_vs_reference(u.final, ref));
    }
    auto rates = experiments::successive_rates(errs);
    double mean = (rates[0] + rates[1]) / 2.0;
    check_true(report, "deterministic spatial order 2, alpha = " + fmt(alpha),
               std::abs(mean - 2.0) <= 0.25,
               "orders " + fmt(rates[0]) + ", " + fmt(rates[1]) + ", mean " + fmt(mean));

    errs.clear();
    for (int m_t : {32, 64, 128}) {
      const auto grid = noise::NoiseGridSpec::from_domain(T, l, m_t, 512);
      const auto u = cq::run_trajectory(spec, m_t, 512, noise::zero_field(grid, spec.hurst));
      errs.push_back(l2_error_vs_reference(u.final, ref));
    }
    rates = experiments::successive_rates(errs);
    mean = (rates[0] + rates[1]) / 2.0;
    check_true(report, "deterministic temporal order 1, alpha = " + fmt(alpha),
               std::abs(mean - 1.0) <= 0.25,
               "orders " + fmt(rates[0]) + ", " + fmt(rates[1]) + ", mean " + fmt(mean));
  }
  return report;
}

}  // namespace

std::vector<std::string> suite_names() { return {"ml", "cq", "fem", "noise", "oracle"}; }

Report run_suite(const std::string& suite) {
  if (suite == "ml") return suite_ml();
  if (suite == "cq") return suite_cq();
  if (suite == "fem") return suite_fem();
  if (suite == "noise") return suite_noise();
  if (suite == "oracle") return suite_oracle();
  throw std::invalid_argument("unknown verify suite '" + suite +
                              "' (expected ml|cq|fem|noise|oracle)");
}

}  // namespace fracspde::verify
