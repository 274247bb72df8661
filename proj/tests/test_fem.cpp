#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <numbers>

#include "fracspde/dense.hpp"
#include "fracspde/fem.hpp"
#include "fracspde/rng.hpp"

using namespace fracspde;
using namespace fracspde::fem;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> random_vector(int n, std::uint64_t seed) {
  NormalStream rng(seed);
  std::vector<double> v(n);
  for (double& x : v) x = rng.next();
  return v;
}

// smallest k generalized eigenvalues of (S, M) by inverse iteration with
// M-orthogonal deflation
std::vector<double> generalized_eigs(const Mesh1D& mesh, int count) {
  const auto mass = assemble_mass(mesh);
  const auto stiff = assemble_stiffness(mesh);
  const TridiagonalFactor sf(stiff);
  std::vector<std::vector<double>> modes;
  std::vector<double> lambdas;
  for (int mode = 0; mode < count; ++mode) {
    std::vector<double> x = random_vector(mesh.interior(), 4321 + mode);
    for (int it = 0; it < 400; ++it) {
      auto y = sf.solve(mass.apply(x));
      for (const auto& prev : modes) {
        const auto mp = mass.apply(prev);
        double proj = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) proj += y[i] * mp[i];
        for (std::size_t i = 0; i < y.size(); ++i) y[i] -= proj * prev[i];
      }
      double norm = 0.0;
      const auto my = mass.apply(y);
      for (std::size_t i = 0; i < y.size(); ++i) norm += y[i] * my[i];
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
    lambdas.push_back(num / den);
    modes.push_back(x);
  }
  return lambdas;
}

}  // namespace

TEST_CASE("mass matrix bands and row sums") {
  const Mesh1D mesh(1.0, 4);
  const auto m = assemble_mass(mesh);
  CHECK(m.dim == 3);
  for (double d : m.diag) CHECK(d == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  for (double s : m.sub) CHECK(s == doctest::Approx(1.0 / 24.0).epsilon(1e-15));
  // strictly interior row sum equals h
  CHECK(m.sub[0] + m.diag[1] + m.super[1] == doctest::Approx(mesh.h()).epsilon(1e-14));
}

TEST_CASE("stiffness matrix bands") {
  const auto s2 = assemble_stiffness(Mesh1D(1.0, 2));
  CHECK(s2.dim == 1);
  CHECK(s2.diag[0] == doctest::Approx(4.0).epsilon(1e-15));

  const auto s = assemble_stiffness(Mesh1D(2.0, 8));
  CHECK(s.diag[3] == doctest::Approx(2.0 / 0.25).epsilon(1e-15));
  CHECK(s.sub[3] == doctest::Approx(-1.0 / 0.25).epsilon(1e-15));
  // image of a single hat has the band pattern
  std::vector<double> hat(s.dim, 0.0);
  hat[3] = 1.0;
  const auto img = s.apply(hat);
  CHECK(img[2] == doctest::Approx(-4.0));
  CHECK(img[3] == doctest::Approx(8.0));
  CHECK(img[4] == doctest::Approx(-4.0));
  CHECK(img[0] == 0.0);
}

TEST_CASE("generalized eigenvalues approach (k pi / l)^2 at order h^2") {
  const double l = 1.0;
  std::vector<std::vector<double>> errs;
  for (int n : {32, 64, 128}) {
    const auto lambdas = generalized_eigs(Mesh1D(l, n), 3);
    std::vector<double> e;
    for (int k = 1; k <= 3; ++k)
      e.push_back(std::abs(lambdas[k - 1] - std::pow(k * kPi / l, 2)));
    errs.push_back(e);
  }
  for (int k = 0; k < 3; ++k) {
    const double r1 = errs[0][k] / errs[1][k];
    const double r2 = errs[1][k] / errs[2][k];
    CHECK(r1 > 3.0);
    CHECK(r1 < 5.5);
    CHECK(r2 > 3.0);
    CHECK(r2 < 5.5);
  }
  // 1% proximity at n = 64 for the fundamental mode
  const auto l64 = generalized_eigs(Mesh1D(l, 64), 1);
  CHECK(std::abs(l64[0] - kPi * kPi) < 0.01 * kPi * kPi);
}

TEST_CASE("nonlinear load: zero, constant, and mass consistency") {
  const Mesh1D mesh(1.0, 8);
  FemFunction u{mesh, random_vector(mesh.interior(), 99)};

  const auto zero = load_nonlinear(u, NonlinearSource::zero());
  for (double v : zero) CHECK(v == 0.0);

  const auto ones = load_nonlinear(u, NonlinearSource::constant(1.0));
  for (double v : ones) CHECK(v == doctest::Approx(mesh.h()).epsilon(1e-14));

  // f(u) = u integrates exactly: load equals M u
  const auto linear = load_nonlinear(u, NonlinearSource::linear(1.0));
  const auto mu = assemble_mass(mesh).apply(u.coeffs);
  for (std::size_t i = 0; i < mu.size(); ++i)
    CHECK(linear[i] == doctest::Approx(mu[i]).epsilon(1e-13));
}

TEST_CASE("noise load: box alignment and linearity") {
  const Mesh1D mesh(1.0, 5);
  const double h = mesh.h();

  std::vector<double> ones(5, 1.0);
  for (double v : load_noise(mesh, ones)) CHECK(v == doctest::Approx(h).epsilon(1e-15));

  std::vector<double> single(5, 0.0);
  single[2] = 3.0;  // box (x_2, x_3] touches nodes 2 and 3
  const auto load = load_noise(mesh, single);
  CHECK(load[0] == 0.0);
  CHECK(load[1] == doctest::Approx(3.0 * h / 2).epsilon(1e-15));
  CHECK(load[2] == doctest::Approx(3.0 * h / 2).epsilon(1e-15));
  CHECK(load[3] == 0.0);

  const auto a = random_vector(5, 1);
  const auto b = random_vector(5, 2);
  std::vector<double> combo(5);
  for (int i = 0; i < 5; ++i) combo[i] = 2.0 * a[i] - 0.5 * b[i];
  const auto la = load_noise(mesh, a);
  const auto lb = load_noise(mesh, b);
  const auto lc = load_noise(mesh, combo);
  for (int i = 0; i < 4; ++i)
    CHECK(lc[i] == doctest::Approx(2.0 * la[i] - 0.5 * lb[i]).epsilon(1e-13));

  CHECK_THROWS_AS(load_noise(mesh, std::vector<double>(4, 1.0)), std::invalid_argument);
}

TEST_CASE("thomas solve: identity, roundtrip, dense oracle") {
  TridiagonalMatrix eye;
  eye.dim = 4;
  eye.diag.assign(4, 1.0);
  eye.sub.assign(3, 0.0);
  eye.super = eye.sub;
  const auto rhs = random_vector(4, 5);
  const auto same = thomas_solve(eye, rhs);
  for (int i = 0; i < 4; ++i) CHECK(same[i] == rhs[i]);

  const Mesh1D mesh(1.0, 4);
  const auto mass = assemble_mass(mesh);
  const std::vector<double> x{1.0, 2.0, 3.0};
  const auto back = thomas_solve(mass, mass.apply(x));
  for (int i = 0; i < 3; ++i) CHECK(back[i] == doctest::Approx(x[i]).epsilon(1e-13));

  const int dim = 50;
  NormalStream rng(777);
  TridiagonalMatrix m;
  m.dim = dim;
  m.sub.resize(dim - 1);
  m.diag.resize(dim);
  for (double& v : m.sub) v = rng.next();
  for (int i = 0; i < dim; ++i) {
    double row = 0.2 + std::abs(rng.next());
    if (i > 0) row += std::abs(m.sub[i - 1]);
    if (i < dim - 1) row += std::abs(m.sub[i]);
    m.diag[i] = row;
  }
  m.super = m.sub;
  const auto rhs50 = random_vector(dim, 6);
  const auto fast = thomas_solve(m, rhs50);
  DenseMatrix dm(dim, dim, 0.0);
  for (int i = 0; i < dim; ++i) {
    dm(i, i) = m.diag[i];
    if (i > 0) dm(i, i - 1) = m.sub[i - 1];
    if (i < dim - 1) dm(i, i + 1) = m.super[i];
  }
  const auto slow = dense_solve(dm, rhs50);
  for (int i = 0; i < dim; ++i) CHECK(fast[i] == doctest::Approx(slow[i]).epsilon(1e-10));

  TridiagonalMatrix singular;
  singular.dim = 2;
  singular.diag.assign(2, 0.0);
  singular.sub.assign(1, 0.0);
  singular.super = singular.sub;
  CHECK_THROWS_AS(thomas_solve(singular, std::vector<double>{1.0, 1.0}), std::runtime_error);
}

TEST_CASE("l2 norm: zero, scaling, eigenfunction normalization") {
  const Mesh1D mesh(1.0, 256);
  FemFunction zero{mesh, std::vector<double>(mesh.interior(), 0.0)};
  CHECK(l2_norm(zero) == 0.0);

  FemFunction u{mesh, random_vector(mesh.interior(), 11)};
  FemFunction scaled = u;
  for (double& v : scaled.coeffs) v *= -2.5;
  CHECK(l2_norm(scaled) == doctest::Approx(2.5 * l2_norm(u)).epsilon(1e-13));

  FemFunction phi1{mesh, std::vector<double>(mesh.interior())};
  for (int j = 1; j < mesh.n; ++j)
    phi1.coeffs[j - 1] = std::sqrt(2.0) * std::sin(kPi * mesh.node(j));
  CHECK(l2_norm(phi1) == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("refine_embed: nesting is exact") {
  const Mesh1D coarse(1.0, 2);
  FemFunction u{coarse, {1.0}};
  const auto fine = refine_embed(u, 1);
  CHECK(fine.mesh.n == 4);
  CHECK(fine.coeffs == std::vector<double>{0.5, 1.0, 0.5});

  const auto same = refine_embed(u, 0);
  CHECK(same.coeffs == u.coeffs);

  FemFunction v{Mesh1D(2.0, 8), random_vector(7, 3)};
  const auto vv = refine_embed(v, 2);
  CHECK(vv.mesh.n == 32);
  // original nodes keep their values exactly
  for (int j = 1; j < 8; ++j) CHECK(vv.coeffs[4 * j - 1] == v.coeffs[j - 1]);
  CHECK(l2_norm(vv) == doctest::Approx(l2_norm(v)).epsilon(1e-12));
  // pointwise agreement at arbitrary points
  for (double x : {0.13, 0.77, 1.313, 1.99})
    CHECK(vv.eval(x) == doctest::Approx(v.eval(x)).epsilon(1e-13));
}

TEST_CASE("mesh validation") {
  CHECK_THROWS_AS(Mesh1D(1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(Mesh1D(-1.0, 4), std::invalid_argument);
}
