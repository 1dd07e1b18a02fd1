#pragma once

#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "pfrac/fem.hpp"

namespace pfrac {

enum class PreconditionerKind { none, jacobi, ilu0, block };

std::string_view to_string(PreconditionerKind k);

struct GmresSettings {
  double tolerance_factor = 1e-8;  // stop once |b - Ax| <= factor * |b|
  int restart = 100;
  int max_iterations = 10000;
  PreconditionerKind preconditioner = PreconditionerKind::block;
};

struct GmresResult {
  std::vector<double> x;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
  std::vector<double> history;  // preconditioned-system residual estimate per iteration
};

class Preconditioner {
 public:
  virtual ~Preconditioner() = default;
  virtual void apply(std::span<const double> r, std::span<double> z) const = 0;
};

/// `block_split` separates the displacement rows from the phase-field rows for the block variant.
std::unique_ptr<Preconditioner> build_preconditioner(const SparseMatrix& a, PreconditionerKind kind,
                                                     Index block_split = 0);

/// Restarted GMRES, right preconditioned.
GmresResult gmres_solve(const SparseMatrix& a, std::span<const double> b, const GmresSettings& s,
                        const Preconditioner* pc = nullptr, std::span<const double> x0 = {});

/// Solves the displacement block first, then the phase-field block with the coupling moved to the
/// right-hand side. Assumes no displacement row couples to phase-field columns.
GmresResult block_triangular_solve(const SparseMatrix& a, std::span<const double> b, Index n_u,
                                   const GmresSettings& s);

SparseMatrix extract_block(const SparseMatrix& a, Index r0, Index r1, Index c0, Index c1);

/// GMRES with a preconditioner rebuilt per matrix; reuses the displacement factorization while
/// that block is unchanged.
class LinearSolver {
 public:
  LinearSolver(GmresSettings s, Index block_split);
  ~LinearSolver();
  GmresResult solve(const SparseMatrix& a, std::span<const double> b);

  const GmresSettings& settings() const { return settings_; }
  long total_iterations() const { return total_iterations_; }
  int factorizations() const { return factorizations_; }

 private:
  struct Cache;
  GmresSettings settings_;
  Index split_;
  std::unique_ptr<Cache> cache_;
  long total_iterations_ = 0;
  int factorizations_ = 0;
};

}  // namespace pfrac
