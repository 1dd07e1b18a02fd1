#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "pfrac/qoi.hpp"

using namespace pfrac;

namespace {

MaterialParams params() {
  MaterialParams m;
  m.mu = 0.42;
  m.lambda = 0.28;
  m.G_c = 1.5;
  m.eps = 0.2;
  m.E = 1.0;
  return m;
}

template <class Fu, class Fp>
std::vector<double> interpolate(const Mesh& mesh, const DofMap& d, Fu u, Fp phi) {
  std::vector<double> U(d.total());
  for (Index n = 0; n < mesh.n_nodes(); ++n) {
    const auto x = mesh.nodes[n];
    const auto v = u(x);
    U[d.u_dof(n, 0)] = v[0];
    U[d.u_dof(n, 1)] = v[1];
    U[d.phi_dof(n)] = phi(x);
  }
  return U;
}

}  // namespace

TEST_CASE("total crack volume of manufactured fields") {
  const Mesh mesh = build_rectangle_mesh({0, 0, 1, 1}, 3, 3, 1);
  const DofMap d = build_dof_map(mesh);
  const auto U = interpolate(
      mesh, d, [](Point2 p) { return std::array<double, 2>{p.x, 0.0}; }, [](Point2 p) { return p.x; });
  CHECK(total_crack_volume(mesh, d, U) == doctest::Approx(0.5).epsilon(1e-14));
  const auto C = interpolate(
      mesh, d, [](Point2 p) { return std::array<double, 2>{p.x * p.y, 2.0}; }, [](Point2) { return 0.7; });
  CHECK(std::abs(total_crack_volume(mesh, d, C)) <= 1e-15);
}

TEST_CASE("total crack volume is symmetric under reflection") {
  const Mesh mesh = build_rectangle_mesh({-1, -1, 1, 1}, 4, 4, 1, {{{-0.5, -0.25, 0.5, 0.25}, 1}});
  const DofMap d = build_dof_map(mesh);
  auto u = [](Point2 p) { return std::array<double, 2>{0.1 * p.x * (1 - p.y * p.y), 0.2 * p.y * (1 - p.x * p.x)}; };
  auto phi = [](Point2 p) { return std::min(1.0, std::abs(p.y) * 3 + 0.2 * p.x * p.x); };
  auto ur = [&](Point2 p) {
    const auto v = u({p.x, -p.y});
    return std::array<double, 2>{v[0], -v[1]};
  };
  auto phir = [&](Point2 p) { return phi({p.x, -p.y}); };
  const double a = total_crack_volume(mesh, d, interpolate(mesh, d, u, phi));
  const double b = total_crack_volume(mesh, d, interpolate(mesh, d, ur, phir));
  CHECK(std::abs(a - b) <= 1e-10 * std::abs(a));
}

TEST_CASE("analytic Sneddon crack volume") {
  CHECK(analytic_sneddon_tcv(0.0, 0.25, 1.0, 0.2, PlaneMode::strain) == 0.0);
  CHECK(analytic_sneddon_tcv(1e-3, 0.25, 1.0, 0.2, PlaneMode::stress) == doctest::Approx(3.92699e-4).epsilon(1e-5));
  CHECK(analytic_sneddon_tcv(1e-3, 0.25, 1.0, 0.2, PlaneMode::strain) == doctest::Approx(3.76991e-4).epsilon(1e-5));
  CHECK(analytic_sneddon_tcv(1e-3, 0.25, 1.0, 0.0, PlaneMode::strain) ==
        analytic_sneddon_tcv(1e-3, 0.25, 1.0, 0.7, PlaneMode::stress));
  CHECK_THROWS_AS(analytic_sneddon_tcv(1e-3, 0.25, 0.0, 0.2, PlaneMode::strain), ConfigError);
}

TEST_CASE("crack energy of constant fields") {
  const Mesh mesh = build_rectangle_mesh({0, 0, 2, 1}, 4, 2, 1, {{{0, 0, 0.5, 0.5}, 1}});
  const DofMap d = build_dof_map(mesh);
  const auto m = params();
  std::vector<double> U(d.total(), 0.0);
  CHECK(crack_energy(mesh, d, U, m) == doctest::Approx(m.G_c * 2.0 / (2 * m.eps)).epsilon(1e-14));
  for (Index i = 0; i < d.n_phi(); ++i) U[d.phi_dof(i)] = 1.0;
  CHECK(crack_energy(mesh, d, U, m) <= 1e-28);
}

TEST_CASE("crack energy of a bilinear ramp matches a subdivided quadrature") {
  const Mesh mesh = build_rectangle_mesh({0.5, -0.2, 1.3, 0.4}, 1, 1, 0);
  const DofMap d = build_dof_map(mesh);
  const auto m = params();
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> U(d.total(), 0.0);
  for (Index i = 0; i < d.n_phi(); ++i) U[d.phi_dof(i)] = u(rng);
  const Box b = mesh.cells[0].bounds;
  auto phi_at = [&](double x, double y) {
    const double s = (x - b.x0) / b.width(), t = (y - b.y0) / b.height();
    double v = 0.0;
    for (Index n = 0; n < 4; ++n) {
      const auto p = mesh.nodes[n];
      const double ws = p.x == b.x0 ? 1 - s : s, wt = p.y == b.y0 ? 1 - t : t;
      v += ws * wt * U[d.phi_dof(n)];
    }
    return v;
  };
  const int k = 64;
  const double hx = b.width() / k, hy = b.height() / k;
  const double g[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)}, w[3] = {5.0 / 9, 8.0 / 9, 5.0 / 9};
  double ref = 0.0;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      for (int a = 0; a < 3; ++a)
        for (int c = 0; c < 3; ++c) {
          const double x = b.x0 + (i + 0.5 + 0.5 * g[a]) * hx, y = b.y0 + (j + 0.5 + 0.5 * g[c]) * hy;
          const double e = phi_at(x, y) - 1.0;
          ref += w[a] * w[c] * 0.25 * hx * hy * e * e;
        }
  ref *= m.G_c / (2 * m.eps);
  CHECK(std::abs(crack_energy(mesh, d, U, m) - ref) <= 1e-10 * ref);
}

TEST_CASE("crack energy is unchanged by refinement for bilinear fields") {
  const auto m = params();
  auto phi = [](Point2 p) { return 0.3 + 0.5 * p.x * p.y; };
  auto zero = [](Point2) { return std::array<double, 2>{0.0, 0.0}; };
  const Mesh a = build_rectangle_mesh({0, 0, 1, 1}, 1, 1, 0);
  const Mesh b = build_rectangle_mesh({0, 0, 1, 1}, 1, 1, 3);
  const DofMap da = build_dof_map(a), db = build_dof_map(b);
  CHECK(crack_energy(a, da, interpolate(a, da, zero, phi), m) ==
        doctest::Approx(crack_energy(b, db, interpolate(b, db, zero, phi), m)).epsilon(1e-13));
}

TEST_CASE("boundary loads") {
  const Mesh mesh = build_rectangle_mesh({0, 0, 1, 1}, 2, 2, 1, {{{0.5, 0.5, 1, 1}, 1}});
  const DofMap d = build_dof_map(mesh);
  const auto m = params();
  auto one = [](Point2) { return 1.0; };
  const auto Z = interpolate(mesh, d, [](Point2) { return std::array<double, 2>{0.0, 0.0}; }, one);
  const auto z = boundary_load(mesh, d, Z, m, Boundary::top);
  CHECK(z[0] == 0.0);
  CHECK(z[1] == 0.0);

  const double a = 0.01;
  const auto U = interpolate(mesh, d, [&](Point2 p) { return std::array<double, 2>{0.0, a * p.y}; }, one);
  const auto t = boundary_load(mesh, d, U, m, Boundary::top);
  CHECK(std::abs(t[0]) <= 1e-15);
  CHECK(t[1] == doctest::Approx((2 * m.mu + m.lambda) * a).epsilon(1e-13));
  const auto bottom = boundary_load(mesh, d, U, m, "bottom");
  CHECK(bottom[1] == doctest::Approx(-(2 * m.mu + m.lambda) * a).epsilon(1e-13));
  const auto right = boundary_load(mesh, d, U, m, Boundary::right);
  CHECK(right[0] == doctest::Approx(m.lambda * a).epsilon(1e-13));

  // linear in u for fixed phi without split
  auto U2 = U;
  for (auto& v : U2) v *= 3.0;
  for (Index i = 0; i < d.n_phi(); ++i) U2[d.phi_dof(i)] = 1.0;
  CHECK(boundary_load(mesh, d, U2, m, Boundary::top)[1] == doctest::Approx(3.0 * t[1]).epsilon(1e-13));

  CHECK_THROWS_AS(boundary_load(mesh, d, U, m, "nowhere"), ConfigError);
}

TEST_CASE("degraded boundary load scales the tensile part") {
  const Mesh mesh = build_rectangle_mesh({0, 0, 1, 1}, 2, 2, 0);
  const DofMap d = build_dof_map(mesh);
  auto m = params();
  m.kappa = 0.0;
  const double a = 0.01;
  const auto U = interpolate(
      mesh, d, [&](Point2 p) { return std::array<double, 2>{0.0, a * p.y}; }, [](Point2) { return 0.5; });
  const auto full = boundary_load(mesh, d, U, m, Boundary::top);
  const auto deg = boundary_load(mesh, d, U, m, Boundary::top, true);
  CHECK(deg[1] == doctest::Approx(0.25 * full[1]).epsilon(1e-13));
}
