#pragma once

#include <array>
#include <span>
#include <vector>

#include "pfrac/mesh.hpp"

namespace pfrac {

struct DofMap {
  Index n_nodes = 0;

  Index u_dof(Index node, int comp) const { return 2 * node + comp; }
  Index phi_dof(Index node) const { return 2 * n_nodes + node; }
  Index n_u() const { return 2 * n_nodes; }
  Index n_phi() const { return n_nodes; }
  Index total() const { return 3 * n_nodes; }
  Index dof(Index node, Component c) const {
    return c == Component::phi ? phi_dof(node) : u_dof(node, static_cast<int>(c));
  }
};

DofMap build_dof_map(const Mesh& mesh);

/// Compressed sparse row matrix with sorted column indices per row.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(Index rows, Index cols, std::vector<Index> row_ptr, std::vector<Index> col_idx,
               std::vector<double> values);

  static SparseMatrix from_triplets(Index rows, Index cols, std::vector<std::array<double, 3>> triplets);
  static SparseMatrix from_dense(const std::vector<std::vector<double>>& a);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  std::size_t nnz() const { return col_idx_.size(); }

  const std::vector<Index>& row_ptr() const { return row_ptr_; }
  const std::vector<Index>& col_idx() const { return col_idx_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  /// Position of (i,j) in the value array, or -1 if structurally absent.
  std::ptrdiff_t find(Index i, Index j) const;
  double at(Index i, Index j) const;
  void add(Index i, Index j, double v);

  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> multiply(std::span<const double> x) const;
  std::vector<double> diagonal() const;
  void set_zero();
  std::vector<std::vector<double>> to_dense() const;

 private:
  Index rows_ = 0, cols_ = 0;
  std::vector<Index> row_ptr_{0};
  std::vector<Index> col_idx_;
  std::vector<double> values_;
};

/// Pattern of the coupled system on the full (unconstrained) dof set: uu, phi-u and phi-phi blocks.
SparseMatrix make_system_pattern(const Mesh& mesh, const DofMap& dofs);

struct QuadPoint {
  Point2 x;
  double weight = 0.0;
};

/// 2x2 Gauss rule mapped to the cell.
std::array<QuadPoint, 4> quadrature_points(const Cell& cell);

/// Q1 shape values and gradients at the four Gauss points of a rectangular cell.
struct CellValues {
  std::array<std::array<double, 4>, 4> N{};                 // [q][a]
  std::array<std::array<std::array<double, 2>, 4>, 4> dN{};  // [q][a][dir]
  std::array<double, 4> JxW{};
  std::array<Point2, 4> x{};

  void reinit(const Cell& cell);
};

std::vector<double> assemble_mass_diagonal(const Mesh& mesh, const DofMap& dofs);

/// Activity flags over the phase-field dofs (indexed by node).
struct ActiveSetMask {
  std::vector<char> active;

  ActiveSetMask() = default;
  explicit ActiveSetMask(std::size_t n) : active(n, 0) {}
  std::size_t size() const { return active.size(); }
  std::size_t count() const;
  bool operator[](std::size_t i) const { return active[i] != 0; }
  bool operator==(const ActiveSetMask& o) const { return active == o.active; }
};

struct ReducedSystem {
  SparseMatrix matrix;
  std::vector<double> rhs;
};

/// Fixed-dof flags: hanging, Dirichlet and active phase-field dofs.
std::vector<char> fixed_dofs(const DofMap& dofs, const ConstraintSet& constraints, const ActiveSetMask* active);

/// Adds hanging-node rows onto their masters. Hanging entries stay in place.
std::vector<double> condense_vector(std::span<const double> v, const DofMap& dofs, const ConstraintSet& constraints);

/// Condensed residual with every fixed dof zeroed.
std::vector<double> reduce_residual(std::span<const double> rhs, const DofMap& dofs,
                                    const ConstraintSet& constraints, const ActiveSetMask* active);

/// Eliminates hanging dofs onto their masters, then replaces Dirichlet and active
/// phase-field rows and columns by identity rows with zero right-hand side.
ReducedSystem condense_system(const SparseMatrix& matrix, std::span<const double> rhs, const DofMap& dofs,
                              const ConstraintSet& constraints, const ActiveSetMask* active);

/// Sets hanging values from their masters, for every component.
void distribute_hanging(std::span<double> v, const DofMap& dofs, const ConstraintSet& constraints);
void distribute_hanging_scalar(std::span<double> v, const ConstraintSet& constraints);

/// Applies Dirichlet values and hanging interpolation to a full solution vector.
void apply_constraints(std::span<double> v, const DofMap& dofs, const ConstraintSet& constraints);

double l2_norm(std::span<const double> v);

}  // namespace pfrac
