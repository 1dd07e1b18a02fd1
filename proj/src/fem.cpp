#include "pfrac/fem.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace pfrac {

DofMap build_dof_map(const Mesh& mesh) { return DofMap{mesh.n_nodes()}; }

SparseMatrix::SparseMatrix(Index rows, Index cols, std::vector<Index> row_ptr, std::vector<Index> col_idx,
                           std::vector<double> values)
    : rows_(rows), cols_(cols), row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
  if (static_cast<Index>(row_ptr_.size()) != rows_ + 1 || col_idx_.size() != values_.size() ||
      static_cast<std::size_t>(row_ptr_.back()) != col_idx_.size())
    throw AssemblyError("inconsistent CSR arrays");
}

SparseMatrix SparseMatrix::from_triplets(Index rows, Index cols, std::vector<std::array<double, 3>> t) {
  std::sort(t.begin(), t.end(), [](const auto& a, const auto& b) {
    return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
  });
  std::vector<Index> rp(rows + 1, 0), ci;
  std::vector<double> v;
  for (std::size_t k = 0; k < t.size(); ++k) {
    const Index i = static_cast<Index>(t[k][0]), j = static_cast<Index>(t[k][1]);
    if (i < 0 || i >= rows || j < 0 || j >= cols) throw AssemblyError("triplet index out of range");
    if (!ci.empty() && k > 0 && static_cast<Index>(t[k - 1][0]) == i && ci.back() == j) {
      v.back() += t[k][2];
      continue;
    }
    ci.push_back(j);
    v.push_back(t[k][2]);
    rp[i + 1]++;
  }
  for (Index i = 0; i < rows; ++i) rp[i + 1] += rp[i];
  return SparseMatrix(rows, cols, std::move(rp), std::move(ci), std::move(v));
}

SparseMatrix SparseMatrix::from_dense(const std::vector<std::vector<double>>& a) {
  const Index n = static_cast<Index>(a.size());
  const Index m = n ? static_cast<Index>(a[0].size()) : 0;
  std::vector<Index> rp{0}, ci;
  std::vector<double> v;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < m; ++j)
      if (a[i][j] != 0.0 || i == j) {
        ci.push_back(j);
        v.push_back(a[i][j]);
      }
    rp.push_back(static_cast<Index>(ci.size()));
  }
  return SparseMatrix(n, m, std::move(rp), std::move(ci), std::move(v));
}

std::ptrdiff_t SparseMatrix::find(Index i, Index j) const {
  auto b = col_idx_.begin() + row_ptr_[i], e = col_idx_.begin() + row_ptr_[i + 1];
  auto it = std::lower_bound(b, e, j);
  if (it == e || *it != j) return -1;
  return it - col_idx_.begin();
}

double SparseMatrix::at(Index i, Index j) const {
  const auto p = find(i, j);
  return p < 0 ? 0.0 : values_[p];
}

void SparseMatrix::add(Index i, Index j, double v) {
  const auto p = find(i, j);
  if (p < 0) throw AssemblyError(fmt::format("entry ({}, {}) not in sparsity pattern", i, j));
  values_[p] += v;
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  for (Index i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (Index k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += values_[k] * x[col_idx_[k]];
    y[i] = s;
  }
}

std::vector<double> SparseMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(rows_);
  multiply(x, y);
  return y;
}

std::vector<double> SparseMatrix::diagonal() const {
  std::vector<double> d(rows_, 0.0);
  for (Index i = 0; i < rows_; ++i) d[i] = at(i, i);
  return d;
}

void SparseMatrix::set_zero() { std::fill(values_.begin(), values_.end(), 0.0); }

std::vector<std::vector<double>> SparseMatrix::to_dense() const {
  std::vector<std::vector<double>> a(rows_, std::vector<double>(cols_, 0.0));
  for (Index i = 0; i < rows_; ++i)
    for (Index k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) a[i][col_idx_[k]] = values_[k];
  return a;
}

SparseMatrix make_system_pattern(const Mesh& mesh, const DofMap& dofs) {
  const Index n = dofs.total();
  std::vector<std::vector<Index>> rows(n);
  for (const auto& cell : mesh.cells) {
    std::array<Index, 8> ud;
    std::array<Index, 4> pd;
    for (int a = 0; a < 4; ++a) {
      ud[2 * a] = dofs.u_dof(cell.nodes[a], 0);
      ud[2 * a + 1] = dofs.u_dof(cell.nodes[a], 1);
      pd[a] = dofs.phi_dof(cell.nodes[a]);
    }
    for (Index i : ud) rows[i].insert(rows[i].end(), ud.begin(), ud.end());
    for (Index i : pd) {
      rows[i].insert(rows[i].end(), ud.begin(), ud.end());
      rows[i].insert(rows[i].end(), pd.begin(), pd.end());
    }
  }
  std::vector<Index> rp(n + 1, 0), ci;
  for (Index i = 0; i < n; ++i) {
    auto& r = rows[i];
    r.push_back(i);
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    rp[i + 1] = rp[i] + static_cast<Index>(r.size());
  }
  ci.reserve(rp[n]);
  for (auto& r : rows) {
    ci.insert(ci.end(), r.begin(), r.end());
    std::vector<Index>().swap(r);
  }
  std::vector<double> v(ci.size(), 0.0);
  return SparseMatrix(n, n, std::move(rp), std::move(ci), std::move(v));
}

std::array<QuadPoint, 4> quadrature_points(const Cell& cell) {
  const double g = 0.5 / std::sqrt(3.0);
  const std::array<double, 2> r = {0.5 - g, 0.5 + g};
  const auto& b = cell.bounds;
  std::array<QuadPoint, 4> q;
  int k = 0;
  for (double eta : r)
    for (double xi : r) q[k++] = {{b.x0 + xi * b.width(), b.y0 + eta * b.height()}, 0.25 * cell.area()};
  return q;
}

void CellValues::reinit(const Cell& cell) {
  const double g = 0.5 / std::sqrt(3.0);
  const std::array<double, 2> r = {0.5 - g, 0.5 + g};
  const double w = cell.bounds.width(), h = cell.bounds.height();
  int q = 0;
  for (double eta : r)
    for (double xi : r) {
      N[q] = {(1 - xi) * (1 - eta), xi * (1 - eta), xi * eta, (1 - xi) * eta};
      dN[q][0] = {-(1 - eta) / w, -(1 - xi) / h};
      dN[q][1] = {(1 - eta) / w, -xi / h};
      dN[q][2] = {eta / w, xi / h};
      dN[q][3] = {-eta / w, (1 - xi) / h};
      JxW[q] = 0.25 * w * h;
      x[q] = {cell.bounds.x0 + xi * w, cell.bounds.y0 + eta * h};
      ++q;
    }
}

std::vector<double> assemble_mass_diagonal(const Mesh& mesh, const DofMap& dofs) {
  std::vector<double> m(dofs.n_phi(), 0.0);
  CellValues cv;
  for (const auto& cell : mesh.cells) {
    cv.reinit(cell);
    for (int q = 0; q < 4; ++q)
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) m[cell.nodes[a]] += cv.N[q][a] * cv.N[q][b] * cv.JxW[q];
  }
  return m;
}

std::size_t ActiveSetMask::count() const {
  return static_cast<std::size_t>(std::count(active.begin(), active.end(), 1));
}

namespace {

void check_sizes(std::size_t n, const DofMap& dofs, const ConstraintSet& cs, const ActiveSetMask* active) {
  if (static_cast<Index>(n) != dofs.total())
    throw AssemblyError(fmt::format("vector of size {} does not match {} dofs", n, dofs.total()));
  if (!cs.hanging_slot.empty() && static_cast<Index>(cs.hanging_slot.size()) != dofs.n_nodes)
    throw AssemblyError("constraint set does not match the dof map");
  if (active && static_cast<Index>(active->size()) != dofs.n_phi())
    throw AssemblyError(fmt::format("active set of size {} does not match {} phase-field dofs", active->size(),
                                    dofs.n_phi()));
  for (const auto& [key, v] : cs.dirichlet)
    if (key.first < 0 || key.first >= dofs.n_nodes || key.second < 0 || key.second > 2)
      throw AssemblyError("Dirichlet entry outside the dof range");
}

struct DofConstraint {
  int n = 0;
  std::array<Index, 2> m{};
  std::array<double, 2> w{};
};

DofConstraint dof_masters(Index d, const DofMap& dofs, const ConstraintSet& cs) {
  const Index nu = dofs.n_u();
  const Index node = d < nu ? d / 2 : d - nu;
  const auto* h = cs.find_hanging(node);
  if (!h) return {};
  DofConstraint r;
  r.n = 2;
  for (int k = 0; k < 2; ++k) {
    r.m[k] = d < nu ? dofs.u_dof(h->masters[k], d % 2) : dofs.phi_dof(h->masters[k]);
    r.w[k] = h->weights[k];
  }
  return r;
}

}  // namespace

std::vector<char> fixed_dofs(const DofMap& dofs, const ConstraintSet& cs, const ActiveSetMask* active) {
  std::vector<char> f(dofs.total(), 0);
  for (const auto& h : cs.hanging) {
    f[dofs.u_dof(h.node, 0)] = f[dofs.u_dof(h.node, 1)] = f[dofs.phi_dof(h.node)] = 1;
  }
  for (const auto& [key, v] : cs.dirichlet) f[dofs.dof(key.first, static_cast<Component>(key.second))] = 1;
  if (active)
    for (Index i = 0; i < dofs.n_phi(); ++i)
      if ((*active)[i]) f[dofs.phi_dof(i)] = 1;
  return f;
}

std::vector<double> condense_vector(std::span<const double> v, const DofMap& dofs, const ConstraintSet& cs) {
  check_sizes(v.size(), dofs, cs, nullptr);
  std::vector<double> r(v.begin(), v.end());
  for (const auto& h : cs.hanging) {
    for (int c = 0; c < 3; ++c) {
      const Index d = c < 2 ? dofs.u_dof(h.node, c) : dofs.phi_dof(h.node);
      const auto dc = dof_masters(d, dofs, cs);
      for (int k = 0; k < 2; ++k) r[dc.m[k]] += dc.w[k] * v[d];
    }
  }
  return r;
}

std::vector<double> reduce_residual(std::span<const double> rhs, const DofMap& dofs, const ConstraintSet& cs,
                                    const ActiveSetMask* active) {
  check_sizes(rhs.size(), dofs, cs, active);
  auto r = condense_vector(rhs, dofs, cs);
  const auto f = fixed_dofs(dofs, cs, active);
  for (std::size_t i = 0; i < r.size(); ++i)
    if (f[i]) r[i] = 0.0;
  return r;
}

ReducedSystem condense_system(const SparseMatrix& a, std::span<const double> rhs, const DofMap& dofs,
                              const ConstraintSet& cs, const ActiveSetMask* active) {
  const Index n = dofs.total();
  if (a.rows() != n || a.cols() != n)
    throw AssemblyError(fmt::format("matrix {}x{} does not match {} dofs", a.rows(), a.cols(), n));
  check_sizes(rhs.size(), dofs, cs, active);

  const auto fixed = fixed_dofs(dofs, cs, active);
  std::vector<DofConstraint> dc(n);
  for (const auto& h : cs.hanging)
    for (int c = 0; c < 3; ++c) {
      const Index d = c < 2 ? dofs.u_dof(h.node, c) : dofs.phi_dof(h.node);
      dc[d] = dof_masters(d, dofs, cs);
    }
  // contributors: hanging rows folded into each master row
  std::vector<std::vector<std::pair<Index, double>>> contrib;
  if (!cs.hanging.empty()) {
    contrib.resize(n);
    for (Index d = 0; d < n; ++d)
      for (int k = 0; k < dc[d].n; ++k) contrib[dc[d].m[k]].push_back({d, dc[d].w[k]});
  }

  ReducedSystem out;
  out.rhs.assign(n, 0.0);
  std::vector<Index> rp(n + 1, 0), ci;
  std::vector<double> vals;
  ci.reserve(a.nnz());
  vals.reserve(a.nnz());
  std::vector<double> acc(n, 0.0);
  std::vector<Index> marker(n, -1);
  std::vector<Index> touched;

  const auto& arp = a.row_ptr();
  const auto& aci = a.col_idx();
  const auto& av = a.values();

  auto scatter = [&](Index i, Index r, double wr) {
    for (Index k = arp[r]; k < arp[r + 1]; ++k) {
      const Index c = aci[k];
      const double v = wr * av[k];
      auto put = [&](Index col, double x) {
        if (fixed[col]) return;
        if (marker[col] != i) {
          marker[col] = i;
          acc[col] = 0.0;
          touched.push_back(col);
        }
        acc[col] += x;
      };
      if (dc[c].n)
        for (int m = 0; m < dc[c].n; ++m) put(dc[c].m[m], dc[c].w[m] * v);
      else
        put(c, v);
    }
  };

  for (Index i = 0; i < n; ++i) {
    if (fixed[i]) {
      ci.push_back(i);
      vals.push_back(1.0);
      rp[i + 1] = static_cast<Index>(ci.size());
      continue;
    }
    touched.clear();
    marker[i] = i;
    acc[i] = 0.0;
    touched.push_back(i);
    scatter(i, i, 1.0);
    double b = rhs[i];
    if (!contrib.empty())
      for (auto [h, w] : contrib[i]) {
        scatter(i, h, w);
        b += w * rhs[h];
      }
    out.rhs[i] = b;
    std::sort(touched.begin(), touched.end());
    for (Index c : touched) {
      ci.push_back(c);
      vals.push_back(acc[c]);
    }
    rp[i + 1] = static_cast<Index>(ci.size());
  }
  out.matrix = SparseMatrix(n, n, std::move(rp), std::move(ci), std::move(vals));
  return out;
}

void distribute_hanging_scalar(std::span<double> v, const ConstraintSet& cs) {
  for (const auto& h : cs.hanging) v[h.node] = h.weights[0] * v[h.masters[0]] + h.weights[1] * v[h.masters[1]];
}

void distribute_hanging(std::span<double> v, const DofMap& dofs, const ConstraintSet& cs) {
  for (const auto& h : cs.hanging) {
    for (int c = 0; c < 3; ++c) {
      const Index d = c < 2 ? dofs.u_dof(h.node, c) : dofs.phi_dof(h.node);
      const auto m = dof_masters(d, dofs, cs);
      v[d] = m.w[0] * v[m.m[0]] + m.w[1] * v[m.m[1]];
    }
  }
}

void apply_constraints(std::span<double> v, const DofMap& dofs, const ConstraintSet& cs) {
  for (const auto& [key, val] : cs.dirichlet) v[dofs.dof(key.first, static_cast<Component>(key.second))] = val;
  distribute_hanging(v, dofs, cs);
}

double l2_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace pfrac
