#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "pfrac/active_set.hpp"

namespace testing_support {

using pfrac::ActiveSetMask;
using pfrac::Index;
using pfrac::ReducedSystem;
using pfrac::SparseMatrix;

/// Screened 1-D Laplacian with an upper obstacle: K u = f subject to u <= psi.
class ObstacleToy final : public pfrac::PdasProblem {
 public:
  ObstacleToy(int n, double load, double screen = 1.0, double cubic = 0.0) : n_(n), cubic_(cubic) {
    const double h = 1.0 / (n + 1);
    K_ = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      K_(i, i) = 2.0 / h + screen * h;
      if (i > 0) K_(i, i - 1) = K_(i - 1, i) = -1.0 / h;
      const double x = (i + 1) * h;
      f_.push_back(load * h * (1.0 + std::sin(7.0 * x)));
      psi_.push_back(0.02 + 0.3 * (x - 0.4) * (x - 0.4));
      mass_.push_back(h);
    }
    eligible_.assign(n, 1);
  }

  /// Replaces the load vector (length n).
  void set_load(std::vector<double> f) { f_ = std::move(f); }
  double mesh_size() const { return 1.0 / (n_ + 1); }

  std::size_t size() const override { return n_; }
  std::size_t n_obstacle() const override { return n_; }
  Index obstacle_dof(std::size_t i) const override { return static_cast<Index>(i); }
  std::span<const double> bound() const override { return psi_; }
  std::span<const double> mass() const override { return mass_; }
  std::span<const char> eligible() const override { return eligible_; }

  void assemble(std::span<const double> U, std::vector<double>& F, SparseMatrix* M) override {
    Eigen::Map<const Eigen::VectorXd> u(U.data(), n_);
    Eigen::VectorXd r = Eigen::Map<const Eigen::VectorXd>(f_.data(), n_) - K_ * u;
    for (int i = 0; i < n_; ++i) r(i) -= cubic_ * mass_[i] * u(i) * u(i) * u(i);
    F.assign(r.data(), r.data() + n_);
    if (M) {
      std::vector<std::vector<double>> d(n_, std::vector<double>(n_));
      for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) d[i][j] = K_(i, j) + (i == j ? 3.0 * cubic_ * mass_[i] * u(i) * u(i) : 0.0);
      *M = SparseMatrix::from_dense(d);
    }
  }
  std::vector<double> obstacle_residual(std::span<const double> F) override { return {F.begin(), F.end()}; }
  std::vector<double> reduced(std::span<const double> F, const ActiveSetMask& a) override {
    std::vector<double> r(F.begin(), F.end());
    for (int i = 0; i < n_; ++i)
      if (a[i]) r[i] = 0.0;
    return r;
  }
  ReducedSystem reduce(const SparseMatrix& M, std::span<const double> F, const ActiveSetMask& a) override {
    auto d = M.to_dense();
    for (int i = 0; i < n_; ++i)
      if (a[i])
        for (int j = 0; j < n_; ++j) d[i][j] = d[j][i] = i == j ? 1.0 : 0.0;
    return {SparseMatrix::from_dense(d), reduced(F, a)};
  }
  void distribute(std::span<double>) override {}

  /// Enumerates every active subset and returns the unique one satisfying the KKT conditions.
  std::optional<std::pair<std::vector<double>, std::vector<double>>> brute_force() const {
    for (unsigned mask = 0; mask < (1u << n_); ++mask) {
      std::vector<int> I, S;
      for (int i = 0; i < n_; ++i) (mask >> i & 1u ? S : I).push_back(i);
      Eigen::VectorXd u = Eigen::VectorXd::Zero(n_);
      for (int s : S) u(s) = psi_[s];
      if (!I.empty()) {
        Eigen::MatrixXd A(I.size(), I.size());
        Eigen::VectorXd b(I.size());
        for (std::size_t a = 0; a < I.size(); ++a) {
          b(a) = f_[I[a]];
          for (int s : S) b(a) -= K_(I[a], s) * psi_[s];
          for (std::size_t c = 0; c < I.size(); ++c) A(a, c) = K_(I[a], I[c]);
        }
        const Eigen::VectorXd x = A.ldlt().solve(b);
        for (std::size_t a = 0; a < I.size(); ++a) u(I[a]) = x(a);
      }
      const Eigen::VectorXd r = Eigen::Map<const Eigen::VectorXd>(f_.data(), n_) - K_ * u;
      bool ok = true;
      for (int i : I) ok = ok && u(i) <= psi_[i] + 1e-13;
      for (int s : S) ok = ok && r(s) >= -1e-13;
      if (ok) {
        std::vector<double> lam(n_, 0.0);
        for (int s : S) lam[s] = r(s) / mass_[s];
        return std::make_pair(std::vector<double>(u.data(), u.data() + n_), lam);
      }
    }
    return std::nullopt;
  }

 private:
  int n_;
  double cubic_;
  Eigen::MatrixXd K_;
  std::vector<double> f_, psi_, mass_;
  std::vector<char> eligible_;
};

}  // namespace testing_support
