#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "../support/oracle_assembly.hpp"
#include "../support/random_state.hpp"
#include "pfrac/material.hpp"

using namespace pfrac;

namespace {

MaterialParams params(SplitMode s) {
  MaterialParams m;
  m.mu = 0.42;
  m.lambda = 0.28;
  m.G_c = 1.3;
  m.eps = 0.3;
  m.kappa = 1e-3;
  m.pressure = 0.2;
  m.E = 1.0;
  m.split = s;
  return m;
}

SymTensor2 rotate(const SymTensor2& e, double th) {
  const double c = std::cos(th), s = std::sin(th);
  // R e R^T
  return {c * c * e.xx - 2 * c * s * e.xy + s * s * e.yy, s * s * e.xx + 2 * c * s * e.xy + c * c * e.yy,
          c * s * (e.xx - e.yy) + (c * c - s * s) * e.xy};
}

void check_close(const SymTensor2& a, const SymTensor2& b, double tol) {
  CHECK(std::abs(a.xx - b.xx) <= tol);
  CHECK(std::abs(a.yy - b.yy) <= tol);
  CHECK(std::abs(a.xy - b.xy) <= tol);
}

}  // namespace

TEST_CASE("degradation") {
  CHECK(degradation(1.0, 1e-10) == doctest::Approx(1.0));
  CHECK(degradation(0.0, 1e-3) == 1e-3);
  CHECK(degradation(0.5, 0.0) == 0.25);
}

TEST_CASE("stress split without splitting") {
  const auto m = params(SplitMode::none);
  const SymTensor2 e{0.1, -0.3, 0.05};
  const auto s = stress_split(e, m);
  check_close(s.plus, stress(e, m), 0.0);
  check_close(s.minus, {}, 0.0);
}

TEST_CASE("spectral split sums to the full stress and is rotation invariant") {
  const auto m = params(SplitMode::spectral);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int k = 0; k < 200; ++k) {
    const SymTensor2 e{u(rng), u(rng), u(rng)};
    const auto s = stress_split(e, m);
    check_close(s.plus + s.minus, stress(e, m), 1e-14);
    CHECK(s.plus.ddot(e) >= -1e-14);
    CHECK(s.minus.ddot(e) >= -1e-14);
    const double th = std::numbers::pi * u(rng);
    const auto r = stress_split(rotate(e, th), m);
    check_close(r.plus, rotate(s.plus, th), 1e-13);
    check_close(r.minus, rotate(s.minus, th), 1e-13);
  }
}

TEST_CASE("spectral split special states") {
  const auto m = params(SplitMode::spectral);
  // pure tension and pure compression are entirely one-sided
  check_close(stress_split({0.2, 0.2, 0.0}, m).minus, {}, 0.0);
  check_close(stress_split({-0.2, -0.2, 0.0}, m).plus, {}, 0.0);
  check_close(stress_split({0.0, 0.0, 0.0}, m).plus, {}, 0.0);
  // uniaxial strain: only the positive eigen-direction carries 2 mu e
  const auto s = stress_split({0.1, -0.1, 0.0}, m);
  CHECK(s.plus.xx == doctest::Approx(2 * m.mu * 0.1));
  CHECK(s.plus.yy == doctest::Approx(0.0));
  CHECK(s.minus.yy == doctest::Approx(-2 * m.mu * 0.1));
}

TEST_CASE("split tangent matches central differences") {
  for (auto mode : {SplitMode::none, SplitMode::spectral}) {
    const auto m = params(mode);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int k = 0; k < 100; ++k) {
      const SymTensor2 e{u(rng), u(rng), u(rng)}, de{u(rng), u(rng), u(rng)};
      const double h = 1e-6;
      const auto sp = stress_split(e + de * h, m), sm = stress_split(e - de * h, m);
      const auto t = SplitTangent(e, m).apply(de);
      check_close(t.plus, (sp.plus - sm.plus) * (0.5 / h), 1e-7);
      check_close(t.minus, (sp.minus - sm.minus) * (0.5 / h), 1e-7);
    }
  }
}

TEST_CASE("phase-field extrapolation") {
  const std::vector<double> a{1.0, 0.5, -2.0}, b{3.0, 0.25, 4.0};
  const auto x = extrapolate_phase(a, b, 3.0, 1.0, 0.0);
  for (int i = 0; i < 3; ++i) CHECK(x[i] == doctest::Approx(-2 * a[i] + 3 * b[i]));
  const auto y = extrapolate_phase(a, b, 0.3, 0.2, 0.1);
  for (int i = 0; i < 3; ++i) CHECK(y[i] == doctest::Approx(2 * b[i] - a[i]));
  CHECK_THROWS_AS(extrapolate_phase(a, b, 1.0, 0.5, 0.5), AssemblyError);
  CHECK(previous_step_linearization(b) == b);
}

TEST_CASE("residual of an unloaded broken state") {
  const Mesh mesh = build_rectangle_mesh({0, 0, 1, 2}, 2, 3, 1, {{{0, 0, 0.3, 0.3}, 1}});
  const DofMap d = build_dof_map(mesh);
  auto m = params(SplitMode::spectral);
  std::vector<double> U(d.total(), 0.0);
  const std::vector<double> phit(d.n_phi(), 0.0);
  const auto F = assemble_residual(mesh, d, m, U, phit);
  const auto B = assemble_mass_diagonal(mesh, d);
  for (Index i = 0; i < d.n_u(); ++i) CHECK(F[i] == 0.0);
  for (Index i = 0; i < d.n_phi(); ++i) CHECK(F[d.phi_dof(i)] == doctest::Approx(m.G_c / m.eps * B[i]).epsilon(1e-13));
}

TEST_CASE("residual and Jacobian agree with the independent complex-step assembly") {
  const Mesh mesh = build_rectangle_mesh({0, 0, 1.5, 1}, 3, 2, 0, {{{0, 0, 0.2, 0.2}, 1}});
  const DofMap d = build_dof_map(mesh);
  std::mt19937 rng(17);
  for (auto mode : {SplitMode::none, SplitMode::spectral}) {
    const auto m = params(mode);
    for (int trial = 0; trial < 5; ++trial) {
      const auto U = testing_support::random_state(mesh, d, rng, 0.1);
      const auto phit = testing_support::random_phase(d, rng);
      const auto F = assemble_residual(mesh, d, m, U, phit);
      const auto Fo = oracle::residual<double>(mesh, d, m, U, phit);
      const double fs = l2_norm(Fo);
      for (Index i = 0; i < d.total(); ++i) CHECK(std::abs(F[i] - Fo[i]) <= 1e-12 * fs);

      const auto M = assemble_jacobian(mesh, d, m, U, phit).to_dense();
      const auto J = oracle::jacobian(mesh, d, m, U, phit);
      double js = 0.0;
      for (const auto& r : J)
        for (double v : r) js = std::max(js, std::abs(v));
      for (Index i = 0; i < d.total(); ++i)
        for (Index j = 0; j < d.total(); ++j) CHECK(std::abs(M[i][j] - J[i][j]) <= 1e-12 * js);
      // displacement rows never couple to the phase field
      for (Index i = 0; i < d.n_u(); ++i)
        for (Index j = d.n_u(); j < d.total(); ++j) CHECK(M[i][j] == 0.0);
    }
  }
}

TEST_CASE("elastic block is symmetric positive definite without split and pressure") {
  const Mesh mesh = build_rectangle_mesh({0, 0, 1, 1}, 2, 2, 0);
  const DofMap d = build_dof_map(mesh);
  auto m = params(SplitMode::none);
  m.pressure = 0.0;
  std::mt19937 rng(2);
  const auto U = testing_support::random_state(mesh, d, rng);
  const auto phit = testing_support::random_phase(d, rng);
  const auto M = assemble_jacobian(mesh, d, m, U, phit).to_dense();
  for (Index i = 0; i < d.n_u(); ++i)
    for (Index j = 0; j < d.n_u(); ++j) CHECK(M[i][j] == doctest::Approx(M[j][i]).epsilon(1e-14));
  // positive semi-definite on the full space (rigid modes), definite once a node pair is removed
  std::uniform_real_distribution<double> u(-1, 1);
  for (int k = 0; k < 50; ++k) {
    std::vector<double> v(d.n_u());
    for (auto& x : v) x = u(rng);
    double q = 0.0;
    for (Index i = 0; i < d.n_u(); ++i)
      for (Index j = 0; j < d.n_u(); ++j) q += v[i] * M[i][j] * v[j];
    CHECK(q >= -1e-14);
  }
}

TEST_CASE("material validation") {
  MaterialParams m = params(SplitMode::none);
  CHECK_NOTHROW(m.validate());
  m.eps = 0.0;
  CHECK_THROWS_AS(m.validate(), ConfigError);
  m = params(SplitMode::none);
  m.kappa = 1.0;
  CHECK_THROWS_AS(m.validate(), ConfigError);
}
