#include "pfrac/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>

namespace pfrac {

namespace {

using Key = std::uint64_t;

Key pack(std::int64_t ix, std::int64_t iy) {
  return (static_cast<Key>(ix) << 32) | static_cast<Key>(static_cast<std::uint32_t>(iy));
}

struct BaseSet {
  std::set<std::pair<std::int64_t, std::int64_t>> cells;
  std::int64_t max_i = 0, max_j = 0;

  explicit BaseSet(const std::vector<std::array<std::int64_t, 2>>& base) {
    for (auto [i, j] : base) {
      cells.insert({i, j});
      max_i = std::max(max_i, i);
      max_j = std::max(max_j, j);
    }
  }
  bool inside(std::int64_t px, std::int64_t py) const {
    if (px < 0 || py < 0) return false;
    return cells.count({px / LatticeGrid::scale, py / LatticeGrid::scale}) > 0;
  }
};

std::array<LatticeCell, 4> split(const LatticeCell& c) {
  const std::int64_t h = c.size() / 2;
  const int l = c.level + 1;
  return {LatticeCell{c.ix, c.iy, l}, LatticeCell{c.ix + h, c.iy, l}, LatticeCell{c.ix, c.iy + h, l},
          LatticeCell{c.ix + h, c.iy + h, l}};
}

Box physical_box(const LatticeGrid& g, const LatticeCell& c) {
  const Point2 a = g.to_point(c.ix, c.iy);
  const Point2 b = g.to_point(c.ix + c.size(), c.iy + c.size());
  return {a.x, a.y, b.x, b.y};
}

std::unordered_set<Key> corner_set(const std::vector<LatticeCell>& leaves) {
  std::unordered_set<Key> s;
  s.reserve(leaves.size() * 2);
  for (const auto& c : leaves) {
    const auto n = c.size();
    s.insert(pack(c.ix, c.iy));
    s.insert(pack(c.ix + n, c.iy));
    s.insert(pack(c.ix + n, c.iy + n));
    s.insert(pack(c.ix, c.iy + n));
  }
  return s;
}

// Lattice points at fraction num/4 along each of the four edges.
template <class F>
void for_edge_points(const LatticeCell& c, int num, F&& f) {
  const auto n = c.size();
  const auto o = n * num / 4;
  f(c.ix + o, c.iy);
  f(c.ix + n, c.iy + o);
  f(c.ix + n - o, c.iy + n);
  f(c.ix, c.iy + n - o);
}

bool needs_closure(const LatticeCell& c, const std::unordered_set<Key>& corners) {
  if (c.size() < 4) return false;
  bool hit = false;
  for (int q : {1, 3})
    for_edge_points(c, q, [&](std::int64_t x, std::int64_t y) { hit = hit || corners.count(pack(x, y)); });
  return hit;
}

void close_mesh(std::vector<LatticeCell>& leaves) {
  for (;;) {
    const auto corners = corner_set(leaves);
    std::vector<LatticeCell> next;
    next.reserve(leaves.size());
    bool changed = false;
    for (const auto& c : leaves) {
      if (needs_closure(c, corners)) {
        if (c.level >= LatticeGrid::max_level) throw MeshError("refinement level limit reached");
        for (const auto& k : split(c)) next.push_back(k);
        changed = true;
      } else {
        next.push_back(c);
      }
    }
    leaves.swap(next);
    if (!changed) return;
  }
}

std::vector<LatticeCell> refine_leaves(const LatticeGrid& grid, std::vector<LatticeCell> leaves,
                                       int global_refines, const std::vector<RefineBox>& boxes) {
  if (global_refines < 0) throw MeshError("negative global refinement count");
  int max_extra = 0;
  for (const auto& rb : boxes) {
    if (rb.box.degenerate()) throw MeshError("degenerate refinement box");
    if (rb.extra_levels < 0) throw MeshError("negative local refinement count");
    max_extra = std::max(max_extra, rb.extra_levels);
  }
  if (global_refines + max_extra > LatticeGrid::max_level - 1)
    throw MeshError(fmt::format("refinement depth {} exceeds the supported maximum",
                                global_refines + max_extra));

  for (int r = 0; r < global_refines; ++r) {
    std::vector<LatticeCell> next;
    next.reserve(leaves.size() * 4);
    for (const auto& c : leaves)
      for (const auto& k : split(c)) next.push_back(k);
    leaves.swap(next);
  }
  for (int pass = 1; pass <= max_extra; ++pass) {
    const int target = global_refines + pass;
    std::vector<LatticeCell> next;
    next.reserve(leaves.size());
    for (const auto& c : leaves) {
      bool mark = false;
      if (c.level < target) {
        const Box b = physical_box(grid, c);
        for (const auto& rb : boxes)
          if (rb.extra_levels >= pass && b.intersects(rb.box)) mark = true;
      }
      if (mark) {
        for (const auto& k : split(c)) next.push_back(k);
      } else {
        next.push_back(c);
      }
    }
    leaves.swap(next);
    close_mesh(leaves);
  }
  return leaves;
}

std::vector<LatticeCell> base_leaves(const std::vector<std::array<std::int64_t, 2>>& base) {
  std::vector<LatticeCell> leaves;
  leaves.reserve(base.size());
  for (auto [i, j] : base) leaves.push_back({i * LatticeGrid::scale, j * LatticeGrid::scale, 0});
  return leaves;
}

}  // namespace

std::string_view to_string(Boundary b) {
  switch (b) {
    case Boundary::bottom: return "bottom";
    case Boundary::top: return "top";
    case Boundary::left: return "left";
    case Boundary::right: return "right";
    case Boundary::reentrant: return "reentrant";
  }
  return "?";
}

std::optional<Boundary> boundary_from_string(std::string_view s) {
  for (auto b : {Boundary::bottom, Boundary::top, Boundary::left, Boundary::right, Boundary::reentrant})
    if (to_string(b) == s) return b;
  return std::nullopt;
}

Point2 LatticeGrid::to_point(std::int64_t ix, std::int64_t iy) const {
  const double s = static_cast<double>(scale);
  return {origin_x + base_dx * (static_cast<double>(ix) / s), origin_y + base_dy * (static_cast<double>(iy) / s)};
}

double Cell::diameter() const { return std::hypot(bounds.width(), bounds.height()); }

double Mesh::h_min() const {
  double h = std::numeric_limits<double>::infinity();
  for (const auto& c : cells) h = std::min(h, c.diameter());
  return h;
}

double Mesh::h_max() const {
  double h = 0.0;
  for (const auto& c : cells) h = std::max(h, c.diameter());
  return h;
}

double Mesh::area() const {
  double a = 0.0;
  for (const auto& c : cells) a += c.area();
  return a;
}

std::vector<Index> Mesh::boundary_nodes(Boundary marker) const {
  std::vector<Index> out;
  for (const auto& f : facets)
    if (f.marker == marker) out.insert(out.end(), f.nodes.begin(), f.nodes.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Mesh assemble_lattice_mesh(const LatticeGrid& grid, std::vector<LatticeCell> leaves,
                           const std::vector<std::array<std::int64_t, 2>>& base_cells) {
  Mesh mesh;
  mesh.grid = grid;
  mesh.base_cells = base_cells;
  std::sort(leaves.begin(), leaves.end(), [](const LatticeCell& a, const LatticeCell& b) {
    return std::tie(a.iy, a.ix, a.level) < std::tie(b.iy, b.ix, b.level);
  });

  std::vector<std::array<std::int64_t, 2>> pts;
  pts.reserve(leaves.size() * 4);
  for (const auto& c : leaves) {
    const auto n = c.size();
    pts.push_back({c.ix, c.iy});
    pts.push_back({c.ix + n, c.iy});
    pts.push_back({c.ix + n, c.iy + n});
    pts.push_back({c.ix, c.iy + n});
  }
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return std::tie(a[1], a[0]) < std::tie(b[1], b[0]);
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  std::unordered_map<Key, Index> id;
  id.reserve(pts.size() * 2);
  mesh.nodes.reserve(pts.size());
  mesh.node_lattice = pts;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    id.emplace(pack(pts[k][0], pts[k][1]), static_cast<Index>(k));
    mesh.nodes.push_back(grid.to_point(pts[k][0], pts[k][1]));
  }

  BaseSet domain(base_cells);
  double ymin = std::numeric_limits<double>::infinity(), xmax = -ymin;
  for (const auto& p : mesh.nodes) {
    ymin = std::min(ymin, p.y);
    xmax = std::max(xmax, p.x);
  }

  mesh.cells.reserve(leaves.size());
  for (const auto& c : leaves) {
    const auto n = c.size();
    Cell cell;
    cell.lattice = c;
    cell.level = c.level;
    cell.nodes = {id.at(pack(c.ix, c.iy)), id.at(pack(c.ix + n, c.iy)), id.at(pack(c.ix + n, c.iy + n)),
                  id.at(pack(c.ix, c.iy + n))};
    cell.bounds = physical_box(grid, c);
    const Index ci = static_cast<Index>(mesh.cells.size());
    mesh.cells.push_back(cell);

    const auto h = n / 2;
    // outward probe one lattice unit beyond each edge midpoint
    const std::array<std::array<std::int64_t, 2>, 4> probe = {
        {{c.ix + h, c.iy - 1}, {c.ix + n, c.iy + h}, {c.ix + h, c.iy + n}, {c.ix - 1, c.iy + h}}};
    for (int e = 0; e < 4; ++e) {
      if (domain.inside(probe[e][0], probe[e][1])) continue;
      BoundaryFacet f;
      f.cell = ci;
      f.nodes = {cell.nodes[e], cell.nodes[(e + 1) % 4]};
      switch (e) {
        case 0: f.marker = cell.bounds.y0 <= ymin ? Boundary::bottom : Boundary::reentrant; break;
        case 1: f.marker = cell.bounds.x1 >= xmax ? Boundary::right : Boundary::reentrant; break;
        case 2: f.marker = Boundary::top; break;
        default: f.marker = Boundary::left; break;
      }
      mesh.facets.push_back(f);
    }
  }
  return mesh;
}

Mesh build_rectangle_mesh(const Box& bounds, int nx, int ny, int global_refines,
                          const std::vector<RefineBox>& refine_boxes) {
  if (bounds.degenerate()) throw MeshError("degenerate domain bounds");
  if (nx < 1 || ny < 1) throw MeshError("base subdivisions must be positive");
  LatticeGrid grid;
  grid.origin_x = bounds.x0;
  grid.origin_y = bounds.y0;
  grid.base_dx = bounds.width() / nx;
  grid.base_dy = bounds.height() / ny;
  std::vector<std::array<std::int64_t, 2>> base;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) base.push_back({i, j});
  auto leaves = refine_leaves(grid, base_leaves(base), global_refines, refine_boxes);
  return assemble_lattice_mesh(grid, std::move(leaves), base);
}

Mesh build_lshape_mesh(int global_refines, int base_per_block, const std::vector<RefineBox>& refine_boxes) {
  if (base_per_block < 1) throw MeshError("base subdivisions must be positive");
  LatticeGrid grid;
  grid.base_dx = grid.base_dy = 250.0 / base_per_block;
  const int n = base_per_block;
  std::vector<std::array<std::int64_t, 2>> base;
  for (int j = 0; j < 2 * n; ++j)
    for (int i = 0; i < 2 * n; ++i)
      if (!(i >= n && j < n)) base.push_back({i, j});
  auto leaves = refine_leaves(grid, base_leaves(base), global_refines, refine_boxes);
  return assemble_lattice_mesh(grid, std::move(leaves), base);
}

Mesh refine_all(const Mesh& mesh) {
  std::vector<LatticeCell> leaves;
  leaves.reserve(mesh.cells.size() * 4);
  for (const auto& c : mesh.cells) {
    if (c.level >= LatticeGrid::max_level - 1) throw MeshError("refinement level limit reached");
    for (const auto& k : split(c.lattice)) leaves.push_back(k);
  }
  return assemble_lattice_mesh(mesh.grid, std::move(leaves), mesh.base_cells);
}

void cut_slit(Mesh& mesh, double y, double x0, double x1) {
  const double tol = 1e-12 * std::max(1.0, mesh.h_max());
  std::vector<Index> copy(mesh.nodes.size(), -1);
  const Index n0 = mesh.n_nodes();
  for (Index n = 0; n < n0; ++n) {
    const Point2 p = mesh.nodes[n];
    if (std::abs(p.y - y) > tol || p.x <= x0 + tol || p.x > x1 + tol) continue;
    copy[n] = mesh.n_nodes();
    mesh.nodes.push_back(p);
    mesh.node_lattice.push_back(mesh.node_lattice[n]);
  }
  if (mesh.n_nodes() == n0) throw MeshError("slit does not pass through any node");

  // every cut node must be a corner on both sides, otherwise a hanging node sits on the cut
  std::vector<char> below(n0, 0), above(n0, 0);
  std::vector<char> upper(mesh.cells.size(), 0);
  for (std::size_t ci = 0; ci < mesh.cells.size(); ++ci) {
    auto& cell = mesh.cells[ci];
    const bool up = 0.5 * (cell.bounds.y0 + cell.bounds.y1) > y;
    upper[ci] = up;
    for (Index& n : cell.nodes) {
      if (copy[n] < 0) continue;
      (up ? above : below)[n] = 1;
      if (up) n = copy[n];
    }
  }
  for (Index n = 0; n < n0; ++n)
    if (copy[n] >= 0 && !(above[n] && below[n]))
      throw MeshError(fmt::format("slit node {} is not shared by cells of equal size on both sides", n));
  for (auto& f : mesh.facets)
    if (upper[f.cell])
      for (Index& n : f.nodes)
        if (n < n0 && copy[n] >= 0) n = copy[n];
}

bool ConstraintSet::add_dirichlet(Index node, Component c, double value) {
  if (is_hanging(node)) return false;
  dirichlet[{node, static_cast<int>(c)}] = value;
  return true;
}

void ConstraintSet::validate() const {
  for (const auto& h : hanging) {
    for (Index m : h.masters)
      if (is_hanging(m))
        throw MeshError(fmt::format("hanging node {} uses constrained node {} as master", h.node, m));
    if (std::abs(h.weights[0] + h.weights[1] - 1.0) > 1e-14)
      throw MeshError(fmt::format("hanging weights at node {} do not sum to one", h.node));
  }
  for (const auto& [key, v] : dirichlet)
    if (is_hanging(key.first))
      throw MeshError(fmt::format("node {} is both hanging and prescribed", key.first));
}

ConstraintSet compute_hanging_constraints(const Mesh& mesh) {
  std::unordered_map<Key, Index> id;
  id.reserve(mesh.node_lattice.size() * 2);
  for (std::size_t k = 0; k < mesh.node_lattice.size(); ++k)
    id.emplace(pack(mesh.node_lattice[k][0], mesh.node_lattice[k][1]), static_cast<Index>(k));

  ConstraintSet cs;
  cs.hanging_slot.assign(mesh.nodes.size(), -1);
  for (const auto& cell : mesh.cells) {
    const auto& c = cell.lattice;
    if (c.size() >= 4) {
      for (int q : {1, 3})
        for_edge_points(c, q, [&](std::int64_t x, std::int64_t y) {
          if (id.count(pack(x, y)))
            throw MeshError("neighbouring cells differ by more than one refinement level");
        });
    }
    int e = 0;
    for_edge_points(c, 2, [&](std::int64_t x, std::int64_t y) {
      auto it = id.find(pack(x, y));
      if (it != id.end() && cs.hanging_slot[it->second] < 0) {
        HangingConstraint h;
        h.node = it->second;
        h.masters = {cell.nodes[e], cell.nodes[(e + 1) % 4]};
        cs.hanging_slot[h.node] = static_cast<int>(cs.hanging.size());
        cs.hanging.push_back(h);
      }
      ++e;
    });
  }
  cs.validate();
  return cs;
}

}  // namespace pfrac
