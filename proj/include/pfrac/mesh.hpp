#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "pfrac/errors.hpp"

namespace pfrac {

using Index = int;

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct Box {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  bool degenerate() const { return !(x1 > x0) || !(y1 > y0); }
  // closed sets: touching counts
  bool intersects(const Box& o) const {
    return x0 <= o.x1 && o.x0 <= x1 && y0 <= o.y1 && o.y0 <= y1;
  }
  bool contains(Point2 p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }
};

enum class Boundary : std::uint8_t { bottom, top, left, right, reentrant };

std::string_view to_string(Boundary b);
std::optional<Boundary> boundary_from_string(std::string_view s);

/// Integer lattice underlying every mesh. A base cell spans `scale` lattice units per axis.
struct LatticeGrid {
  static constexpr int max_level = 20;
  static constexpr std::int64_t scale = std::int64_t{1} << max_level;

  double origin_x = 0.0, origin_y = 0.0;
  double base_dx = 1.0, base_dy = 1.0;

  Point2 to_point(std::int64_t ix, std::int64_t iy) const;
};

struct LatticeCell {
  std::int64_t ix = 0, iy = 0;  // lower-left corner
  int level = 0;

  std::int64_t size() const { return LatticeGrid::scale >> level; }
};

struct Cell {
  std::array<Index, 4> nodes{};  // counterclockwise from the lower-left corner
  int level = 0;
  Box bounds;
  LatticeCell lattice;

  double area() const { return bounds.width() * bounds.height(); }
  double diameter() const;
};

struct BoundaryFacet {
  std::array<Index, 2> nodes{};
  Index cell = 0;
  Boundary marker = Boundary::bottom;
};

struct Mesh {
  LatticeGrid grid;
  std::vector<std::array<std::int64_t, 2>> base_cells;
  std::vector<Point2> nodes;
  std::vector<std::array<std::int64_t, 2>> node_lattice;
  std::vector<Cell> cells;
  std::vector<BoundaryFacet> facets;

  Index n_nodes() const { return static_cast<Index>(nodes.size()); }
  Index n_cells() const { return static_cast<Index>(cells.size()); }
  double h_min() const;
  double h_max() const;
  double area() const;
  std::vector<Index> boundary_nodes(Boundary marker) const;
};

struct RefineBox {
  Box box;
  int extra_levels = 1;
};

Mesh build_rectangle_mesh(const Box& bounds, int nx, int ny, int global_refines,
                          const std::vector<RefineBox>& refine_boxes = {});

/// L-shaped panel made of three 250x250 blocks; `base_per_block` coarse cells per block edge.
Mesh build_lshape_mesh(int global_refines, int base_per_block = 1,
                       const std::vector<RefineBox>& refine_boxes = {});

/// Builds the mesh for an explicit leaf set without enforcing one-irregularity.
Mesh assemble_lattice_mesh(const LatticeGrid& grid, std::vector<LatticeCell> leaves,
                           const std::vector<std::array<std::int64_t, 2>>& base_cells);

/// Uniformly splits every cell once more.
Mesh refine_all(const Mesh& mesh);

/// Opens a traction-free cut along y = `y` for x in (`x0`, `x1`]: nodes on the cut get a copy used by the
/// cells above it. The cut must not carry hanging nodes. Apply after all refinement.
void cut_slit(Mesh& mesh, double y, double x0, double x1);

enum class Component : std::uint8_t { ux = 0, uy = 1, phi = 2 };

struct HangingConstraint {
  Index node = 0;
  std::array<Index, 2> masters{};
  std::array<double, 2> weights{0.5, 0.5};
};

struct ConstraintSet {
  std::vector<HangingConstraint> hanging;
  std::vector<int> hanging_slot;  // per node, index into `hanging` or -1
  std::map<std::pair<Index, int>, double> dirichlet;

  bool is_hanging(Index node) const {
    return node < static_cast<Index>(hanging_slot.size()) && hanging_slot[node] >= 0;
  }
  const HangingConstraint* find_hanging(Index node) const {
    return is_hanging(node) ? &hanging[hanging_slot[node]] : nullptr;
  }
  /// Hanging constraints take precedence: returns false if the node is hanging.
  bool add_dirichlet(Index node, Component c, double value);
  bool is_dirichlet(Index node, Component c) const {
    return dirichlet.count({node, static_cast<int>(c)}) > 0;
  }
  void clear_dirichlet() { dirichlet.clear(); }
  void validate() const;
};

ConstraintSet compute_hanging_constraints(const Mesh& mesh);

}  // namespace pfrac
