#pragma once

#include <span>
#include <string>
#include <vector>

#include "pfrac/fem.hpp"
#include "pfrac/linear_solver.hpp"
#include "pfrac/material.hpp"

namespace pfrac {

enum class ToleranceMode { absolute, relative };
enum class CScope { per_dof, max_over_dofs };

struct SolverSettings {
  int active_set_case = 1;           // 1..4
  double c = 0.0;                    // constant for Cases 1, 3, 4; <= 0 means 10*E
  double c_fallback = 0.0;           // Case 2 fallback; <= 0 means the resolved constant
  CScope c_scope = CScope::per_dof;
  double c_factor = 2.0;             // Case 2: c = c_factor |lambda / dphi|
  double tol_newton = 1e-7;
  ToleranceMode tol_mode = ToleranceMode::absolute;
  int max_iterations = 100;
  int line_search_max = 10;
  double line_search_damping = 0.6;
  int case3_extra_iterations = 10;

  void validate() const;
};

struct NewtonReport {
  int iterations = 0;
  std::vector<double> residuals;          // reduced residual after each iteration
  std::vector<std::size_t> active_sizes;  // active-set size used in each iteration
  std::vector<int> line_search_steps;     // damping reductions per iteration
  std::vector<char> line_search_exhausted;
  int first_converged = -1;               // first iteration reaching the tolerance
  double initial_residual = 0.0;
  long linear_iterations = 0;
  bool converged = false;
  std::string reason;
};

double complementarity_residual(double lambda, double dphi, double c);

/// factor |lambda/dphi| where both are nonzero, otherwise `fallback`.
double adaptive_c(double lambda, double dphi, double fallback, double factor = 2.0);

/// `residual` is the condensed phase-field residual per node, `eligible` excludes constrained nodes.
ActiveSetMask classify_active_set(std::span<const double> residual, std::span<const double> mass,
                                  std::span<const double> phi, std::span<const double> phi_old,
                                  const SolverSettings& s, double c_resolved,
                                  std::span<const char> eligible = {});

/// Nonlinear problem with the pointwise constraint U[obstacle_dof(i)] <= bound[i].
class PdasProblem {
 public:
  virtual ~PdasProblem() = default;
  virtual std::size_t size() const = 0;
  virtual std::size_t n_obstacle() const = 0;
  virtual Index obstacle_dof(std::size_t i) const = 0;
  virtual std::span<const double> bound() const = 0;
  virtual std::span<const double> mass() const = 0;
  virtual std::span<const char> eligible() const = 0;
  /// Unconstrained residual F = -A(U), and the Jacobian when requested.
  virtual void assemble(std::span<const double> U, std::vector<double>& F, SparseMatrix* M) = 0;
  /// Residual seen by the constraint test, per obstacle entry.
  virtual std::vector<double> obstacle_residual(std::span<const double> F) = 0;
  virtual std::vector<double> reduced(std::span<const double> F, const ActiveSetMask& active) = 0;
  virtual ReducedSystem reduce(const SparseMatrix& M, std::span<const double> F, const ActiveSetMask& active) = 0;
  virtual void distribute(std::span<double> dU) = 0;
};

struct PdasResult {
  NewtonReport report;
  ActiveSetMask active;
  std::vector<double> lambda;
};

PdasResult pdas_solve(PdasProblem& problem, std::vector<double>& U, const SolverSettings& s, double c_resolved,
                      LinearSolver& solver);

/// The phase-field problem on a mesh with hanging and Dirichlet constraints.
class PhaseFieldProblem final : public PdasProblem {
 public:
  PhaseFieldProblem(const Mesh& mesh, const DofMap& dofs, const ConstraintSet& constraints,
                    const MaterialParams& params, std::span<const double> phi_old, std::span<const double> phi_tilde,
                    std::span<const double> mass, const SparseMatrix* pattern = nullptr);

  std::size_t size() const override { return dofs_.total(); }
  std::size_t n_obstacle() const override { return dofs_.n_phi(); }
  Index obstacle_dof(std::size_t i) const override { return dofs_.phi_dof(static_cast<Index>(i)); }
  std::span<const double> bound() const override { return phi_old_; }
  std::span<const double> mass() const override { return mass_; }
  std::span<const char> eligible() const override { return eligible_; }
  void assemble(std::span<const double> U, std::vector<double>& F, SparseMatrix* M) override;
  std::vector<double> obstacle_residual(std::span<const double> F) override;
  std::vector<double> reduced(std::span<const double> F, const ActiveSetMask& active) override;
  ReducedSystem reduce(const SparseMatrix& M, std::span<const double> F, const ActiveSetMask& active) override;
  void distribute(std::span<double> dU) override;

  SparseMatrix& pattern() { return pattern_; }

 private:
  const Mesh& mesh_;
  const DofMap& dofs_;
  const ConstraintSet& cs_;
  const MaterialParams& params_;
  std::span<const double> phi_old_, phi_tilde_, mass_;
  std::vector<char> eligible_;
  SparseMatrix pattern_;
};

struct KktReport {
  double irreversibility = 0.0;   // max(phi - phi_old, 0)
  double sign = 0.0;              // max(-lambda, 0)
  double complementarity = 0.0;   // max |lambda * (phi - phi_old)|
  bool satisfied = false;
};

KktReport kkt_check(std::span<const double> phi, std::span<const double> phi_old, std::span<const double> lambda,
                    double tol);

}  // namespace pfrac
