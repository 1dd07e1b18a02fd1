#include <doctest.h>

#include <cmath>
#include <random>

#include "pfrac/mesh.hpp"

using namespace pfrac;

TEST_CASE("unit square without refinement") {
  const Mesh m = build_rectangle_mesh({0, 0, 1, 1}, 1, 1, 0);
  CHECK(m.n_cells() == 1);
  CHECK(m.n_nodes() == 4);
  CHECK(m.h_min() == doctest::Approx(std::sqrt(2.0)));
  CHECK(m.facets.size() == 4);
}

TEST_CASE("global refinement of the Sneddon square") {
  const Mesh m = build_rectangle_mesh({-10, -10, 10, 10}, 10, 10, 2);
  CHECK(m.n_cells() == 1600);
  for (const auto& c : m.cells) CHECK(c.bounds.width() == doctest::Approx(0.5));
  CHECK(m.n_nodes() == 41 * 41);
}

TEST_CASE("local refinement box reaches the requested level") {
  const Mesh m = build_rectangle_mesh({-10, -10, 10, 10}, 10, 10, 2, {{{-4, -4, 4, 4}, 5}});
  CHECK(m.h_min() == doctest::Approx(20.0 / (10 * 128) * std::sqrt(2.0)).epsilon(1e-12));
  CHECK(m.h_min() == doctest::Approx(0.0221).epsilon(1e-2));
  for (const auto& c : m.cells)
    if (c.bounds.intersects({-4, -4, 4, 4})) CHECK(c.level == 7);
  CHECK(m.area() == doctest::Approx(400.0).epsilon(1e-13));
}

TEST_CASE("degenerate input is rejected") {
  CHECK_THROWS_AS(build_rectangle_mesh({0, 0, 0, 1}, 1, 1, 0), MeshError);
  CHECK_THROWS_AS(build_rectangle_mesh({0, 1, 1, 0}, 1, 1, 0), MeshError);
  CHECK_THROWS_AS(build_rectangle_mesh({0, 0, 1, 1}, 0, 1, 0), MeshError);
  CHECK_THROWS_AS(build_rectangle_mesh({0, 0, 1, 1}, 1, 1, -1), MeshError);
  CHECK_THROWS_AS(build_rectangle_mesh({0, 0, 1, 1}, 1, 1, 1, {{{0, 0, 1, 1}, 40}}), MeshError);
}

TEST_CASE("L-shaped panel") {
  const Mesh m0 = build_lshape_mesh(0);
  CHECK(m0.n_cells() == 3);
  CHECK(m0.n_nodes() == 8);
  const Mesh m2 = build_lshape_mesh(2);
  CHECK(m2.n_cells() == 48);
  CHECK(m2.area() == doctest::Approx(3 * 250.0 * 250.0));

  double bottom = 0, reentrant = 0, top = 0, left = 0, right = 0;
  for (const auto& f : m2.facets) {
    const double len = std::hypot(m2.nodes[f.nodes[1]].x - m2.nodes[f.nodes[0]].x,
                                  m2.nodes[f.nodes[1]].y - m2.nodes[f.nodes[0]].y);
    switch (f.marker) {
      case Boundary::bottom: bottom += len; CHECK(m2.nodes[f.nodes[0]].y == 0.0); break;
      case Boundary::reentrant: reentrant += len; break;
      case Boundary::top: top += len; break;
      case Boundary::left: left += len; break;
      case Boundary::right: right += len; break;
    }
  }
  CHECK(bottom == doctest::Approx(250));
  CHECK(reentrant == doctest::Approx(500));
  CHECK(top == doctest::Approx(500));
  CHECK(left == doctest::Approx(500));
  CHECK(right == doctest::Approx(250));

  // five coarse cells per block edge and five refinements: 77441 nodes
  CHECK(build_lshape_mesh(5, 5).n_nodes() * 3 == 232323);
}

TEST_CASE("hanging constraints interpolate linear functions exactly") {
  const Mesh m = build_rectangle_mesh({-1, -1, 1, 1}, 2, 2, 1, {{{-0.3, -0.2, 0.1, 0.4}, 3}});
  const ConstraintSet cs = compute_hanging_constraints(m);
  REQUIRE(!cs.hanging.empty());
  auto f = [](Point2 p) { return 0.7 * p.x - 1.3 * p.y + 0.25; };
  for (const auto& h : cs.hanging) {
    CHECK(h.weights[0] == 0.5);
    CHECK(h.weights[1] == 0.5);
    CHECK_FALSE(cs.is_hanging(h.masters[0]));
    CHECK_FALSE(cs.is_hanging(h.masters[1]));
    const double interp = h.weights[0] * f(m.nodes[h.masters[0]]) + h.weights[1] * f(m.nodes[h.masters[1]]);
    CHECK(interp == doctest::Approx(f(m.nodes[h.node])).epsilon(1e-14));
  }
}

TEST_CASE("refinement keeps neighbours within one level") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double x0 = u(rng), y0 = u(rng);
    const Box b{x0, y0, x0 + 0.2 * u(rng) + 1e-3, y0 + 0.2 * u(rng) + 1e-3};
    const int levels = 1 + trial % 4;
    const Mesh m = build_rectangle_mesh({0, 0, 1.2, 1.2}, 3, 2, 1, {{b, levels}});
    CHECK_NOTHROW(compute_hanging_constraints(m));
    CHECK(m.area() == doctest::Approx(1.44).epsilon(1e-13));
  }
}

TEST_CASE("refining every cell quadruples cells and halves h") {
  const Mesh m = build_rectangle_mesh({0, 0, 2, 1}, 2, 1, 1, {{{0.1, 0.1, 0.3, 0.3}, 2}});
  const Mesh r = refine_all(m);
  CHECK(r.n_cells() == 4 * m.n_cells());
  CHECK(r.h_min() == doctest::Approx(0.5 * m.h_min()));
  CHECK(r.area() == doctest::Approx(m.area()));
  CHECK(compute_hanging_constraints(r).hanging.size() == 2 * compute_hanging_constraints(m).hanging.size());
}

TEST_CASE("two-level jumps are structural errors") {
  LatticeGrid g;
  const auto S = LatticeGrid::scale;
  std::vector<LatticeCell> leaves{{0, 0, 0}};
  // neighbour to the right split twice along the shared edge
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 4; ++i) leaves.push_back({S + i * (S / 4), j * (S / 4), 2});
  const Mesh m = assemble_lattice_mesh(g, leaves, {{0, 0}, {1, 0}});
  CHECK_THROWS_AS(compute_hanging_constraints(m), MeshError);
}

TEST_CASE("constraint set validation") {
  ConstraintSet cs;
  cs.hanging_slot.assign(5, -1);
  cs.hanging.push_back({2, {0, 1}, {0.5, 0.5}});
  cs.hanging_slot[2] = 0;
  CHECK_NOTHROW(cs.validate());
  cs.hanging.push_back({3, {2, 4}, {0.5, 0.5}});
  cs.hanging_slot[3] = 1;
  CHECK_THROWS_AS(cs.validate(), MeshError);

  ConstraintSet d;
  d.hanging_slot.assign(3, -1);
  d.hanging.push_back({1, {0, 2}, {0.5, 0.5}});
  d.hanging_slot[1] = 0;
  CHECK_FALSE(d.add_dirichlet(1, Component::ux, 1.0));
  CHECK(d.add_dirichlet(0, Component::ux, 1.0));
  CHECK(d.is_dirichlet(0, Component::ux));
  d.dirichlet[{1, 0}] = 0.0;
  CHECK_THROWS_AS(d.validate(), MeshError);
}

TEST_CASE("boundary names round-trip") {
  for (auto b : {Boundary::bottom, Boundary::top, Boundary::left, Boundary::right, Boundary::reentrant})
    CHECK(boundary_from_string(to_string(b)) == b);
  CHECK_FALSE(boundary_from_string("nowhere").has_value());
}
