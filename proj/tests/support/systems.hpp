#pragma once

#include "pfrac/active_set.hpp"
#include "pfrac/driver.hpp"

namespace testing_support {

/// Condensed first Newton system of the Sneddon preset, with the active set classified at the initial state.
inline pfrac::ReducedSystem sneddon_newton_system(int global_refines, int local_refines, pfrac::Index* n_u = nullptr) {
  using namespace pfrac;
  RunConfig cfg = preset(BenchmarkId::sneddon2d);
  cfg.global_refines = global_refines;
  cfg.local_refines = local_refines;
  Setup S = build_setup(cfg);
  apply_constraints(S.state.U, S.dofs, S.constraints);
  PhaseFieldProblem P(S.mesh, S.dofs, S.constraints, S.params, S.state.phi_old, S.state.phi_tilde, S.mass);
  std::vector<double> F;
  SparseMatrix M;
  P.assemble(S.state.U, F, &M);
  // give the phase field a nontrivial active set
  ActiveSetMask act(S.dofs.n_phi());
  for (std::size_t i = 0; i < act.size(); i += 3) act.active[i] = S.state.phi_old[i] == 0.0 ? 1 : 0;
  if (n_u) *n_u = S.dofs.n_u();
  return P.reduce(M, F, act);
}

}  // namespace testing_support
