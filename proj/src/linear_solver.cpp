#include "pfrac/linear_solver.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

namespace pfrac {

std::string_view to_string(PreconditionerKind k) {
  switch (k) {
    case PreconditionerKind::none: return "none";
    case PreconditionerKind::jacobi: return "jacobi";
    case PreconditionerKind::ilu0: return "ilu0";
    case PreconditionerKind::block: return "block";
  }
  return "?";
}

namespace {

using EigenCsc = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using EigenCsr = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

EigenCsc to_eigen(const SparseMatrix& a) {
  Eigen::Map<const EigenCsr> m(a.rows(), a.cols(), static_cast<int>(a.nnz()), a.row_ptr().data(),
                               a.col_idx().data(), a.values().data());
  EigenCsc c(m);
  c.makeCompressed();
  return c;
}

class IdentityPc final : public Preconditioner {
 public:
  void apply(std::span<const double> r, std::span<double> z) const override { std::copy(r.begin(), r.end(), z.begin()); }
};

class JacobiPc final : public Preconditioner {
 public:
  explicit JacobiPc(const SparseMatrix& a) : inv_(a.diagonal()) {
    for (std::size_t i = 0; i < inv_.size(); ++i) {
      if (inv_[i] == 0.0) throw SolverError(fmt::format("zero diagonal in row {}", i));
      inv_[i] = 1.0 / inv_[i];
    }
  }
  void apply(std::span<const double> r, std::span<double> z) const override {
    for (std::size_t i = 0; i < inv_.size(); ++i) z[i] = inv_[i] * r[i];
  }

 private:
  std::vector<double> inv_;
};

class Ilu0Pc final : public Preconditioner {
 public:
  explicit Ilu0Pc(const SparseMatrix& a) : lu_(a), diag_(a.rows(), -1) {
    const Index n = a.rows();
    const auto& rp = lu_.row_ptr();
    const auto& ci = lu_.col_idx();
    auto& v = lu_.values();
    for (Index i = 0; i < n; ++i) {
      const auto p = lu_.find(i, i);
      if (p < 0 || v[p] == 0.0) throw SolverError(fmt::format("zero diagonal in row {}", i));
      diag_[i] = static_cast<Index>(p);
    }
    std::vector<Index> pos(n, -1);
    for (Index i = 0; i < n; ++i) {
      for (Index k = rp[i]; k < rp[i + 1]; ++k) pos[ci[k]] = k;
      for (Index k = rp[i]; k < rp[i + 1] && ci[k] < i; ++k) {
        const Index c = ci[k];
        v[k] /= v[diag_[c]];
        const double lik = v[k];
        for (Index kk = diag_[c] + 1; kk < rp[c + 1]; ++kk) {
          const Index p = pos[ci[kk]];
          if (p >= 0) v[p] -= lik * v[kk];
        }
      }
      if (v[diag_[i]] == 0.0) throw SolverError(fmt::format("zero pivot in row {}", i));
      for (Index k = rp[i]; k < rp[i + 1]; ++k) pos[ci[k]] = -1;
    }
  }

  void apply(std::span<const double> r, std::span<double> z) const override {
    const Index n = lu_.rows();
    const auto& rp = lu_.row_ptr();
    const auto& ci = lu_.col_idx();
    const auto& v = lu_.values();
    for (Index i = 0; i < n; ++i) {
      double s = r[i];
      for (Index k = rp[i]; k < diag_[i]; ++k) s -= v[k] * z[ci[k]];
      z[i] = s;
    }
    for (Index i = n - 1; i >= 0; --i) {
      double s = z[i];
      for (Index k = diag_[i] + 1; k < rp[i + 1]; ++k) s -= v[k] * z[ci[k]];
      z[i] = s / v[diag_[i]];
    }
  }

 private:
  SparseMatrix lu_;
  std::vector<Index> diag_;
};

struct DirectBlock {
  Eigen::SimplicialLDLT<EigenCsc> ldlt;
  Eigen::SparseLU<EigenCsc> lu;
  bool use_lu = false;

  void factor(const SparseMatrix& a) {
    for (Index i = 0; i < a.rows(); ++i)
      if (a.row_ptr()[i] == a.row_ptr()[i + 1]) throw SolverError(fmt::format("empty row {}", i));
    EigenCsc m = to_eigen(a);
    ldlt.compute(m);
    use_lu = ldlt.info() != Eigen::Success;
    if (!use_lu) {
      const auto& d = ldlt.vectorD();
      for (Index i = 0; i < d.size(); ++i)
        if (!(std::abs(d[i]) > 0.0) || !std::isfinite(d[i])) use_lu = true;
    }
    if (use_lu) {
      lu.compute(m);
      if (lu.info() != Eigen::Success) throw SolverError("structurally singular block");
    }
  }
  void solve(std::span<const double> r, std::span<double> z) const {
    Eigen::Map<const Eigen::VectorXd> rr(r.data(), static_cast<Eigen::Index>(r.size()));
    Eigen::Map<Eigen::VectorXd> zz(z.data(), static_cast<Eigen::Index>(z.size()));
    if (use_lu)
      zz = lu.solve(rr);
    else
      zz = ldlt.solve(rr);
  }
};

class BlockPc final : public Preconditioner {
 public:
  BlockPc(std::shared_ptr<const DirectBlock> uu, const SparseMatrix& a, Index split)
      : uu_(std::move(uu)), split_(split), n_(a.rows()) {
    if (split_ == n_) return;
    pu_ = extract_block(a, split, n_, 0, split);
    auto pp = std::make_shared<DirectBlock>();
    pp->factor(extract_block(a, split, n_, split, n_));
    pp_ = std::move(pp);
  }
  void apply(std::span<const double> r, std::span<double> z) const override {
    auto zu = z.subspan(0, split_);
    auto zp = z.subspan(split_);
    uu_->solve(r.subspan(0, split_), zu);
    if (split_ == n_) return;
    std::vector<double> rp(r.begin() + split_, r.end());
    const auto& rpt = pu_.row_ptr();
    const auto& ci = pu_.col_idx();
    const auto& v = pu_.values();
    for (Index i = 0; i < pu_.rows(); ++i)
      for (Index k = rpt[i]; k < rpt[i + 1]; ++k) rp[i] -= v[k] * zu[ci[k]];
    pp_->solve(rp, zp);
  }

 private:
  std::shared_ptr<const DirectBlock> uu_;
  std::shared_ptr<const DirectBlock> pp_;
  SparseMatrix pu_;
  Index split_, n_;
};

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

SparseMatrix extract_block(const SparseMatrix& a, Index r0, Index r1, Index c0, Index c1) {
  std::vector<Index> rp{0}, ci;
  std::vector<double> v;
  for (Index i = r0; i < r1; ++i) {
    for (Index k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k) {
      const Index c = a.col_idx()[k];
      if (c >= c0 && c < c1) {
        ci.push_back(c - c0);
        v.push_back(a.values()[k]);
      }
    }
    rp.push_back(static_cast<Index>(ci.size()));
  }
  return SparseMatrix(r1 - r0, c1 - c0, std::move(rp), std::move(ci), std::move(v));
}

std::unique_ptr<Preconditioner> build_preconditioner(const SparseMatrix& a, PreconditionerKind kind, Index split) {
  if (a.rows() != a.cols()) throw SolverError("preconditioner needs a square matrix");
  switch (kind) {
    case PreconditionerKind::none: return std::make_unique<IdentityPc>();
    case PreconditionerKind::jacobi: return std::make_unique<JacobiPc>(a);
    case PreconditionerKind::ilu0: return std::make_unique<Ilu0Pc>(a);
    case PreconditionerKind::block: {
      if (split <= 0 || split >= a.rows()) {
        auto d = std::make_shared<DirectBlock>();
        d->factor(a);
        return std::make_unique<BlockPc>(d, a, a.rows());
      }
      auto uu = std::make_shared<DirectBlock>();
      uu->factor(extract_block(a, 0, split, 0, split));
      return std::make_unique<BlockPc>(uu, a, split);
    }
  }
  throw SolverError("unknown preconditioner");
}

GmresResult gmres_solve(const SparseMatrix& a, std::span<const double> b, const GmresSettings& s,
                        const Preconditioner* pc, std::span<const double> x0) {
  const Index n = a.rows();
  if (a.cols() != n || static_cast<Index>(b.size()) != n) throw SolverError("GMRES size mismatch");
  if (s.restart < 1) throw SolverError("GMRES restart must be positive");
  std::unique_ptr<Preconditioner> own;
  if (!pc) {
    own = build_preconditioner(a, s.preconditioner, 0);
    pc = own.get();
  }
  GmresResult res;
  res.x.assign(n, 0.0);
  if (!x0.empty()) std::copy(x0.begin(), x0.end(), res.x.begin());
  const double bnorm = l2_norm(b);
  if (bnorm == 0.0) {
    std::fill(res.x.begin(), res.x.end(), 0.0);
    res.converged = true;
    return res;
  }
  const double target = s.tolerance_factor * bnorm;

  std::vector<double> r(n), w(n), z(n);
  auto true_residual = [&]() {
    a.multiply(res.x, r);
    for (Index i = 0; i < n; ++i) r[i] = b[i] - r[i];
    return l2_norm(r);
  };
  double beta = true_residual();
  const int m = s.restart;
  std::vector<std::vector<double>> V;
  std::vector<std::vector<double>> H(m + 1, std::vector<double>(m, 0.0));
  std::vector<double> cs(m), sn(m), g(m + 1);

  while (beta > target && res.iterations < s.max_iterations) {
    if (V.empty()) V.emplace_back(n);
    for (Index i = 0; i < n; ++i) V[0][i] = r[i] / beta;
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = beta;
    int k = 0;
    for (int j = 0; j < m; ++j) {
      pc->apply(V[j], z);
      a.multiply(z, w);
      for (int i = 0; i <= j; ++i) {
        H[i][j] = dot(w, V[i]);
        for (Index t = 0; t < n; ++t) w[t] -= H[i][j] * V[i][t];
      }
      const double hn = l2_norm(w);
      H[j + 1][j] = hn;
      if (static_cast<int>(V.size()) < j + 2) V.emplace_back(n);
      if (hn > 0.0)
        for (Index t = 0; t < n; ++t) V[j + 1][t] = w[t] / hn;
      for (int i = 0; i < j; ++i) {
        const double t = cs[i] * H[i][j] + sn[i] * H[i + 1][j];
        H[i + 1][j] = -sn[i] * H[i][j] + cs[i] * H[i + 1][j];
        H[i][j] = t;
      }
      const double den = std::hypot(H[j][j], H[j + 1][j]);
      cs[j] = den == 0.0 ? 1.0 : H[j][j] / den;
      sn[j] = den == 0.0 ? 0.0 : H[j + 1][j] / den;
      H[j][j] = den;
      H[j + 1][j] = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];
      ++res.iterations;
      k = j + 1;
      const double est = std::abs(g[j + 1]);
      res.history.push_back(est);
      if (est <= target || res.iterations >= s.max_iterations || hn == 0.0) break;
    }
    std::vector<double> y(k, 0.0);
    for (int i = k - 1; i >= 0; --i) {
      double t = g[i];
      for (int j = i + 1; j < k; ++j) t -= H[i][j] * y[j];
      y[i] = H[i][i] == 0.0 ? 0.0 : t / H[i][i];
    }
    std::fill(w.begin(), w.end(), 0.0);
    for (int j = 0; j < k; ++j)
      for (Index t = 0; t < n; ++t) w[t] += y[j] * V[j][t];
    pc->apply(w, z);
    for (Index t = 0; t < n; ++t) res.x[t] += z[t];
    const double prev = beta;
    beta = true_residual();
    if (!(beta < prev) && k < m) break;  // stagnation
  }
  res.residual = beta;
  res.converged = beta <= target;
  return res;
}

GmresResult block_triangular_solve(const SparseMatrix& a, std::span<const double> b, Index n_u,
                                   const GmresSettings& s) {
  const Index n = a.rows();
  if (n_u <= 0 || n_u >= n || static_cast<Index>(b.size()) != n) throw SolverError("invalid block split");
  GmresSettings bs = s;
  if (bs.preconditioner == PreconditionerKind::block) bs.preconditioner = PreconditionerKind::ilu0;
  const SparseMatrix auu = extract_block(a, 0, n_u, 0, n_u);
  const SparseMatrix apu = extract_block(a, n_u, n, 0, n_u);
  const SparseMatrix app = extract_block(a, n_u, n, n_u, n);
  auto ru = gmres_solve(auu, b.subspan(0, n_u), bs);
  std::vector<double> bp(b.begin() + n_u, b.end());
  const auto c = apu.multiply(ru.x);
  for (std::size_t i = 0; i < bp.size(); ++i) bp[i] -= c[i];
  auto rp = gmres_solve(app, bp, bs);
  GmresResult out;
  out.x = ru.x;
  out.x.insert(out.x.end(), rp.x.begin(), rp.x.end());
  out.iterations = ru.iterations + rp.iterations;
  auto ax = a.multiply(out.x);
  for (Index i = 0; i < n; ++i) ax[i] = b[i] - ax[i];
  out.residual = l2_norm(ax);
  out.converged = ru.converged && rp.converged;
  return out;
}

struct LinearSolver::Cache {
  std::vector<Index> rp, ci;
  std::vector<double> v;
  std::shared_ptr<const DirectBlock> uu;
};

LinearSolver::LinearSolver(GmresSettings s, Index block_split)
    : settings_(s), split_(block_split), cache_(std::make_unique<Cache>()) {}

LinearSolver::~LinearSolver() = default;

GmresResult LinearSolver::solve(const SparseMatrix& a, std::span<const double> b) {
  std::unique_ptr<Preconditioner> pc;
  if (settings_.preconditioner == PreconditionerKind::block && split_ > 0 && split_ < a.rows()) {
    SparseMatrix uu = extract_block(a, 0, split_, 0, split_);
    if (!cache_->uu || cache_->rp != uu.row_ptr() || cache_->ci != uu.col_idx() || cache_->v != uu.values()) {
      auto d = std::make_shared<DirectBlock>();
      d->factor(uu);
      cache_->uu = d;
      cache_->rp = uu.row_ptr();
      cache_->ci = uu.col_idx();
      cache_->v = uu.values();
      ++factorizations_;
    }
    pc = std::make_unique<BlockPc>(cache_->uu, a, split_);
  } else {
    pc = build_preconditioner(a, settings_.preconditioner, split_);
  }
  auto r = gmres_solve(a, b, settings_, pc.get());
  total_iterations_ += r.iterations;
  if (!r.converged)
    spdlog::warn("GMRES stopped after {} iterations at residual {:.3e} (target {:.3e})", r.iterations, r.residual,
                 settings_.tolerance_factor * l2_norm(b));
  return r;
}

}  // namespace pfrac
