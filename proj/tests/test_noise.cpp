#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <sstream>

#include "fracspde/noise.hpp"
#include "fracspde/rng.hpp"

using namespace fracspde;
using namespace fracspde::noise;

TEST_CASE("increment covariance: Brownian increments are independent") {
  const double tau = 0.125;
  const auto cov = increment_covariance_1d(0.5, tau, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      if (i == j)
        CHECK(cov(i, j) == doctest::Approx(tau).epsilon(1e-14));
      else
        CHECK(std::abs(cov(i, j)) < 1e-15);
    }
}

TEST_CASE("increment covariance: rough lag-1 value, frozen") {
  // 0.5*(2^{0.5} + 0 - 2) evaluated once by hand
  const auto cov = increment_covariance_1d(0.25, 1.0, 4);
  CHECK(cov(0, 1) == doctest::Approx(-0.29289321881345254).epsilon(1e-14));
}

TEST_CASE("increment covariance: symmetric Toeplitz for generic hurst") {
  const auto cov = increment_covariance_1d(0.37, 0.2, 9);
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 9; ++j) {
      CHECK(cov(i, j) == cov(j, i));
      if (i + 1 < 9 && j + 1 < 9) CHECK(cov(i, j) == cov(i + 1, j + 1));
    }
}

TEST_CASE("increment covariance: domain errors") {
  CHECK_THROWS_AS(increment_covariance_1d(0.6, 1.0, 4), std::domain_error);
  CHECK_THROWS_AS(increment_covariance_1d(0.0, 1.0, 4), std::domain_error);
  CHECK_THROWS_AS(increment_covariance_1d(0.3, -1.0, 4), std::domain_error);
  CHECK_THROWS_AS(increment_covariance_1d(0.3, 1.0, 0), std::domain_error);
}

TEST_CASE("cholesky: identity and 1x1") {
  DenseMatrix eye(3, 3);
  for (int i = 0; i < 3; ++i) eye(i, i) = 1.0;
  const auto f = cholesky_factor(eye);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(f.lower(i, j) == (i == j ? 1.0 : 0.0));

  DenseMatrix one(1, 1);
  one(0, 0) = 7.29;
  CHECK(cholesky_factor(one).lower(0, 0) == doctest::Approx(2.7).epsilon(1e-15));
}

TEST_CASE("cholesky: reconstruction of a rough increment covariance") {
  const auto cov = increment_covariance_1d(0.25, 1.0, 8);
  const auto f = cholesky_factor(cov);
  double num = 0.0, den = 0.0;
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) {
      double r = 0.0;
      for (int k = 0; k < 8; ++k) r += f.lower(i, k) * f.lower(j, k);
      num += (r - cov(i, j)) * (r - cov(i, j));
      den += cov(i, j) * cov(i, j);
    }
  CHECK(std::sqrt(num / den) < 1e-10);
}

TEST_CASE("cholesky: non-PSD input is rejected with the pivot index") {
  DenseMatrix bad(2, 2);
  bad(0, 0) = 1.0;
  bad(0, 1) = bad(1, 0) = 2.0;
  bad(1, 1) = 1.0;
  CHECK_THROWS_WITH_AS(cholesky_factor(bad),
                       doctest::Contains("index 1"), std::runtime_error);
}

TEST_CASE("sampling: pure function of (spec, hurst, seed)") {
  const auto grid = NoiseGridSpec::from_domain(1.0, 2.0, 6, 10);
  const HurstPair hurst(0.3, 0.45);
  const auto a = sample_sheet_increments(grid, hurst, 1234);
  const auto b = sample_sheet_increments(grid, hurst, 1234);
  CHECK(a.values.data() == b.values.data());
  const auto c = sample_sheet_increments(grid, hurst, 1235);
  CHECK(a.values.data() != c.values.data());
  CHECK(a.seed == 1234);
}

TEST_CASE("sampling: variance matches tau^{2 h2} h^{2 h1}") {
  const auto grid = NoiseGridSpec::from_domain(0.5, 0.5, 3, 3);
  const HurstPair hurst(0.2, 0.4);
  const double want = std::pow(grid.tau, 2 * hurst.h2) * std::pow(grid.h, 2 * hurst.h1);
  const int n = 12000;
  double acc = 0.0;
  for (int s = 0; s < n; ++s) {
    const auto field = sample_sheet_increments(grid, hurst, 50000 + s);
    acc += field.values(1, 2) * field.values(1, 2);
  }
  acc /= n;
  const double se = want * std::sqrt(2.0 / n);
  CHECK(std::abs(acc - want) < 5 * se);
}

TEST_CASE("sampling: Brownian sheet gives iid N(0, tau h) entries") {
  const auto grid = NoiseGridSpec::from_domain(1.0, 1.0, 2, 2);
  const HurstPair hurst(0.5, 0.5);
  const int n = 20000;
  double var = 0.0, cross = 0.0;
  for (int s = 0; s < n; ++s) {
    const auto field = sample_sheet_increments(grid, hurst, 90000 + s);
    var += field.values(0, 0) * field.values(0, 0);
    cross += field.values(0, 0) * field.values(1, 1);
  }
  var /= n;
  cross /= n;
  const double want = grid.tau * grid.h;
  CHECK(std::abs(var - want) < 5 * want * std::sqrt(2.0 / n));
  CHECK(std::abs(cross) < 5 * want / std::sqrt(n));
}

TEST_CASE("aggregate: identity, block sums, exact total") {
  const auto grid = NoiseGridSpec::from_domain(1.0, 1.0, 4, 6);
  const auto field = sample_sheet_increments(grid, HurstPair(0.3, 0.3), 7);

  const auto same = aggregate(field, 1, 1);
  CHECK(same.values.data() == field.values.data());
  CHECK(same.spec == field.spec);

  BoxIncrementField ones{NoiseGridSpec::from_domain(1.0, 1.0, 2, 2), HurstPair(0.5, 0.5), 0,
                         DenseMatrix(2, 2, 1.0)};
  const auto single = aggregate(ones, 2, 2);
  CHECK(single.spec.m_t == 1);
  CHECK(single.spec.n_x == 1);
  CHECK(single.values(0, 0) == doctest::Approx(4.0).epsilon(1e-15));

  const auto coarse = aggregate(field, 2, 3);
  double total_fine = 0.0, total_coarse = 0.0;
  for (double v : field.values.data()) total_fine += v;
  for (double v : coarse.values.data()) total_coarse += v;
  CHECK(total_coarse == doctest::Approx(total_fine).epsilon(1e-12));
  CHECK(coarse.spec.tau == doctest::Approx(2 * field.spec.tau));
  CHECK(coarse.spec.h == doctest::Approx(3 * field.spec.h));
}

TEST_CASE("aggregate: non-divisibility names the offending dimension") {
  const auto grid = NoiseGridSpec::from_domain(1.0, 1.0, 4, 6);
  const auto field = sample_sheet_increments(grid, HurstPair(0.3, 0.3), 7);
  CHECK_THROWS_WITH_AS(aggregate(field, 3, 1), doctest::Contains("m_t"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(aggregate(field, 1, 4), doctest::Contains("n_x"), std::invalid_argument);
}

TEST_CASE("wong-zakai: levels are increments over tau*h") {
  BoxIncrementField field{NoiseGridSpec(1, 1, 0.5, 0.5), HurstPair(0.5, 0.5), 0,
                          DenseMatrix(1, 1, 0.5)};
  const auto levels = wong_zakai_values(field);
  CHECK(levels(0, 0) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("wong-zakai: zero field and scaling linearity") {
  const auto grid = NoiseGridSpec::from_domain(1.0, 1.0, 3, 5);
  const auto zeros = wong_zakai_values(zero_field(grid, HurstPair(0.4, 0.4)));
  for (double v : zeros.data()) CHECK(v == 0.0);

  auto field = sample_sheet_increments(grid, HurstPair(0.4, 0.4), 11);
  const auto base = wong_zakai_values(field);
  for (double& v : field.values.data()) v *= -3.75;
  const auto scaled = wong_zakai_values(field);
  for (std::size_t i = 0; i < base.data().size(); ++i)
    CHECK(scaled.data()[i] == doctest::Approx(-3.75 * base.data()[i]).epsilon(1e-14));
}

TEST_CASE("field csv dump carries the grid header") {
  const auto grid = NoiseGridSpec::from_domain(1.0, 0.5, 2, 2);
  const auto field = sample_sheet_increments(grid, HurstPair(0.25, 0.5), 77);
  std::ostringstream out;
  write_field_csv(out, field);
  const std::string text = out.str();
  CHECK(text.substr(0, 2) == "# ");
  CHECK(text.find("# 2 2 0.5 0.25 0.25 0.5 77") == 0);
  int lines = 0;
  for (char ch : text)
    if (ch == '\n') ++lines;
  CHECK(lines == 3);  // header + one line per time box
}

TEST_CASE("noise grid: consistency checks") {
  CHECK_THROWS_AS(NoiseGridSpec(0, 2, 0.1, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(NoiseGridSpec(2, 2, -0.1, 0.1), std::invalid_argument);
  const auto grid = NoiseGridSpec::from_domain(1.0, 3.0, 8, 16);
  CHECK(grid.time_extent() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(grid.space_extent() == doctest::Approx(3.0).epsilon(1e-12));
}
