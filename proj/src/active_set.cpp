#include "pfrac/active_set.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

namespace pfrac {

void SolverSettings::validate() const {
  if (active_set_case < 1 || active_set_case > 4)
    throw ConfigError(fmt::format("active-set case must be 1..4, got {}", active_set_case));
  if (!(tol_newton > 0.0)) throw ConfigError("Newton tolerance must be positive");
  if (!(c_factor > 0.0)) throw ConfigError("adaptive c factor must be positive");
  if (max_iterations < 1) throw ConfigError("Newton iteration limit must be positive");
  if (line_search_max < 0) throw ConfigError("line-search limit must be non-negative");
  if (!(line_search_damping > 0.0 && line_search_damping < 1.0)) throw ConfigError("damping must lie in (0, 1)");
  if (case3_extra_iterations < 0) throw ConfigError("extra iteration count must be non-negative");
}

double complementarity_residual(double lambda, double dphi, double c) {
  return lambda - std::max(0.0, lambda + c * dphi);
}

double adaptive_c(double lambda, double dphi, double fallback, double factor) {
  if (lambda != 0.0 && dphi != 0.0)
    return factor * std::abs(lambda / dphi);
  return fallback;
}

ActiveSetMask classify_active_set(std::span<const double> R, std::span<const double> mass,
                                  std::span<const double> phi, std::span<const double> phi_old,
                                  const SolverSettings& s, double c_resolved, std::span<const char> eligible) {
  const std::size_t n = R.size();
  if (mass.size() != n || phi.size() != n || phi_old.size() != n || (!eligible.empty() && eligible.size() != n))
    throw SolverError("active-set inputs differ in length");
  ActiveSetMask a(n);
  auto ok = [&](std::size_t i) { return eligible.empty() || eligible[i]; };
  const double fallback = s.c_fallback > 0.0 ? s.c_fallback : c_resolved;
  auto lam_of = [&](std::size_t i) { return R[i] / mass[i]; };
  auto dphi_of = [&](std::size_t i) { return phi[i] - phi_old[i]; };
  double cmax = 0.0;
  if (s.active_set_case == 2 && s.c_scope == CScope::max_over_dofs) {
    for (std::size_t i = 0; i < n; ++i)
      if (ok(i)) cmax = std::max(cmax, adaptive_c(lam_of(i), dphi_of(i), fallback, s.c_factor));
    if (cmax == 0.0) cmax = fallback;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!ok(i)) continue;
    const double lam = lam_of(i);
    const double d = dphi_of(i);
    double c = c_resolved;
    if (s.active_set_case == 2) c = s.c_scope == CScope::max_over_dofs ? cmax : adaptive_c(lam, d, fallback, s.c_factor);
    a.active[i] = lam + c * d > 0.0 ? 1 : 0;
  }
  return a;
}

PdasResult pdas_solve(PdasProblem& P, std::vector<double>& U, const SolverSettings& s, double c, LinearSolver& solver) {
  s.validate();
  if (!(c > 0.0)) throw ConfigError("complementarity constant must be positive");
  if (U.size() != P.size()) throw SolverError("solution size does not match the problem");
  const std::size_t m = P.n_obstacle();
  const auto bound = P.bound();
  const auto mass = P.mass();
  const auto eligible = P.eligible();

  PdasResult out;
  NewtonReport& rep = out.report;
  std::vector<double> F, Ftry, dU(U.size()), Utry(U.size()), phi(m);
  SparseMatrix M;
  double tol = s.tol_newton;

  std::vector<double> R;
  auto classify = [&] {
    for (std::size_t i = 0; i < m; ++i) phi[i] = U[P.obstacle_dof(i)];
    R = P.obstacle_residual(F);
    return classify_active_set(R, mass, phi, bound, s, c, eligible);
  };
  // A label change is ignored when the dof is degenerate at roundoff level: its residual entry is within 64
  // ulps of its diagonal stiffness and phi sits on the bound to the same accuracy, so either label
  // describes the same KKT point. Exact set equality lets roundoff flip such dofs back and forth indefinitely.
  std::vector<double> diag;
  auto settled = [&](const ActiveSetMask& a, const ActiveSetMask& b) {
    constexpr double ulps = 64.0 * std::numeric_limits<double>::epsilon();
    for (std::size_t i = 0; i < m; ++i) {
      if (a[i] == b[i]) continue;
      const double d = std::abs(diag[P.obstacle_dof(i)]);
      if (std::abs(R[i]) > ulps * d || std::abs(phi[i] - bound[i]) > ulps * std::max(1.0, std::abs(bound[i])))
        return false;
    }
    return true;
  };
  P.assemble(U, F, nullptr);
  ActiveSetMask act = classify();
  for (int k = 1;; ++k) {
    for (std::size_t i = 0; i < m; ++i)
      if (act[i]) U[P.obstacle_dof(i)] = bound[i];
    P.distribute(U);  // constrained dofs follow their pinned masters

    P.assemble(U, F, &M);
    diag = M.diagonal();
    ReducedSystem red = P.reduce(M, F, act);
    const double r0 = l2_norm(red.rhs);
    if (k == 1) {
      rep.initial_residual = r0;
      if (s.tol_mode == ToleranceMode::relative) tol = s.tol_newton * std::max(r0, std::numeric_limits<double>::min());
    }

    GmresResult lin;
    try {
      lin = solver.solve(red.matrix, red.rhs);
    } catch (const SolverError& e) {
      rep.reason = fmt::format("linear solver failed: {}", e.what());
      out.active = act;
      break;
    }
    rep.linear_iterations += lin.iterations;
    dU = lin.x;
    P.distribute(dU);

    int l = 0;
    double r1 = 0.0;
    bool accepted = false;
    for (;; ++l) {
      for (std::size_t i = 0; i < U.size(); ++i) Utry[i] = U[i] + dU[i];
      P.assemble(Utry, Ftry, nullptr);
      r1 = l2_norm(P.reduced(Ftry, act));
      if (r1 < r0) {
        accepted = true;
        break;
      }
      if (l == s.line_search_max) break;
      for (double& x : dU) x *= s.line_search_damping;
    }
    U.swap(Utry);
    F.swap(Ftry);
    rep.iterations = k;
    rep.residuals.push_back(r1);
    rep.active_sizes.push_back(act.count());
    rep.line_search_steps.push_back(l);
    rep.line_search_exhausted.push_back(accepted ? 0 : 1);
    spdlog::debug("pdas it {:3d} residual {:.4e} active {} ls {} gmres {}", k, r1, act.count(), l, lin.iterations);

    const bool small = r1 <= tol;
    if (small && rep.first_converged < 0) rep.first_converged = k;
    ActiveSetMask next = classify();
    bool stop = false;
    switch (s.active_set_case) {
      case 1:
      case 2: stop = small && settled(next, act); break;
      case 3: stop = rep.first_converged > 0 && k >= rep.first_converged + s.case3_extra_iterations; break;
      default: stop = small; break;
    }
    out.active = act;
    if (stop) {
      rep.converged = true;
      rep.reason = "converged";
      break;
    }
    if (!std::isfinite(r1)) {
      rep.reason = "non-finite residual";
      break;
    }
    if (k >= s.max_iterations) {
      rep.reason = "max_iterations";
      break;
    }
    act = std::move(next);
  }
  if (out.active.size() != m) out.active = act;

  R = P.obstacle_residual(F);
  out.lambda.assign(m, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    if (out.active[i]) out.lambda[i] = R[i] / mass[i];
  return out;
}

PhaseFieldProblem::PhaseFieldProblem(const Mesh& mesh, const DofMap& dofs, const ConstraintSet& cs,
                                     const MaterialParams& params, std::span<const double> phi_old,
                                     std::span<const double> phi_tilde, std::span<const double> mass,
                                     const SparseMatrix* pattern)
    : mesh_(mesh), dofs_(dofs), cs_(cs), params_(params), phi_old_(phi_old), phi_tilde_(phi_tilde), mass_(mass),
      eligible_(dofs.n_phi(), 1), pattern_(pattern ? *pattern : make_system_pattern(mesh, dofs)) {
  if (static_cast<Index>(phi_old.size()) != dofs.n_phi() || static_cast<Index>(phi_tilde.size()) != dofs.n_phi() ||
      static_cast<Index>(mass.size()) != dofs.n_phi())
    throw SolverError("phase-field vectors do not match the dof map");
  for (Index i = 0; i < dofs.n_phi(); ++i)
    if (cs.is_hanging(i) || cs.is_dirichlet(i, Component::phi)) eligible_[i] = 0;
}

void PhaseFieldProblem::assemble(std::span<const double> U, std::vector<double>& F, SparseMatrix* M) {
  if (M && M->rows() != dofs_.total()) *M = pattern_;
  assemble_system(mesh_, dofs_, params_, U, phi_tilde_, F, M);
}

std::vector<double> PhaseFieldProblem::obstacle_residual(std::span<const double> F) {
  const auto c = condense_vector(F, dofs_, cs_);
  return {c.begin() + dofs_.n_u(), c.end()};
}

std::vector<double> PhaseFieldProblem::reduced(std::span<const double> F, const ActiveSetMask& active) {
  return reduce_residual(F, dofs_, cs_, &active);
}

ReducedSystem PhaseFieldProblem::reduce(const SparseMatrix& M, std::span<const double> F, const ActiveSetMask& active) {
  return condense_system(M, F, dofs_, cs_, &active);
}

void PhaseFieldProblem::distribute(std::span<double> dU) { distribute_hanging(dU, dofs_, cs_); }

KktReport kkt_check(std::span<const double> phi, std::span<const double> phi_old, std::span<const double> lambda,
                    double tol) {
  if (phi.size() != phi_old.size() || phi.size() != lambda.size()) throw SolverError("KKT inputs differ in length");
  KktReport r;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double d = phi[i] - phi_old[i];
    r.irreversibility = std::max(r.irreversibility, d);
    r.sign = std::max(r.sign, -lambda[i]);
    r.complementarity = std::max(r.complementarity, std::abs(lambda[i] * d));
  }
  r.satisfied = r.irreversibility <= tol && r.sign <= tol && r.complementarity <= tol;
  return r;
}

}  // namespace pfrac
