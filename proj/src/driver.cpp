#include "pfrac/driver.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

namespace pfrac {

std::string_view to_string(BenchmarkId b) {
  switch (b) {
    case BenchmarkId::sneddon2d: return "sneddon2d";
    case BenchmarkId::sens: return "sens";
    case BenchmarkId::lpanel: return "lpanel";
  }
  return "?";
}

std::string_view to_string(ItlMode m) {
  switch (m) {
    case ItlMode::none: return "none";
    case ItlMode::ite: return "ite";
    case ItlMode::itots: return "itots";
  }
  return "?";
}

std::string_view to_string(Linearization l) { return l == Linearization::extrapolation ? "extrapolation" : "previous"; }

void RunConfig::validate() const {
  if (base_nx < 1 || base_ny < 1) throw ConfigError("base subdivisions must be positive");
  if (global_refines < 0 || local_refines < 0) throw ConfigError("refinement counts must be non-negative");
  if (increments < 1) throw ConfigError("at least one increment is required");
  if (!(time_step > 0.0)) throw ConfigError("time step must be positive");
  if (!(eps_factor > 0.0)) throw ConfigError("eps factor must be positive");
  if (itl != ItlMode::none && !(tol_itl > 0.0)) throw ConfigError("ItL tolerance must be positive");
  if (max_itl < 1) throw ConfigError("ItL iteration limit must be positive");
  if (vtk_every < 0) throw ConfigError("vtk frequency must be non-negative");
  if (!(rupture_fraction > 0.0 && rupture_fraction < 1.0)) throw ConfigError("rupture fraction must lie in (0, 1)");
  newton.validate();
  if (gmres.restart < 1 || gmres.max_iterations < 1 || !(gmres.tolerance_factor > 0.0))
    throw ConfigError("invalid GMRES settings");
}

double resolved_c(const SolverSettings& s, const MaterialParams& m) { return s.c > 0.0 ? s.c : 10.0 * m.E; }

RunResult run_incremental_loop(Setup& S, const StepCallback& on_step) {
  const RunConfig& cfg = S.config;
  const DofMap& dofs = S.dofs;
  const Index np = dofs.n_phi();
  auto& st = S.state;
  LinearSolver solver(cfg.gmres, dofs.n_u());
  const SparseMatrix pattern = make_system_pattern(S.mesh, dofs);
  const double c = resolved_c(cfg.newton, S.params);
  const double dt = cfg.time_step;
  double peak_load = 0.0;

  RunResult run;
  for (int n = 1; n <= cfg.increments; ++n) {
    st.step = n;
    st.t_n = n * dt;
    st.t_nm1 = (n - 1) * dt;
    st.t_nm2 = (n - 2) * dt;
    apply_boundary_conditions(cfg.benchmark, S.mesh, st.t_n, S.constraints);
    apply_constraints(st.U, dofs, S.constraints);

    StepResult step;
    // inner history: phi^{n,-1}, phi^{n,0}, phi^{n,1}, ...
    std::deque<std::vector<double>> hist{st.phi_old2, st.phi_old};
    const bool extrapolate_mode =
        cfg.itl == ItlMode::ite || (cfg.itl == ItlMode::none && cfg.linearization == Linearization::extrapolation);
    PdasResult last;
    int j = 0;
    for (;;) {
      const std::size_t h = hist.size();
      const std::vector<double>* older = &hist[h - 2];
      const std::vector<double>* newer = &hist[h - 1];
      if (cfg.literal_indexing && j >= 1) {
        older = h >= 3 ? &hist[h - 3] : &hist[h - 2];
        newer = &hist[h - 2];
      }
      if (extrapolate_mode && n >= 2)
        st.phi_tilde = extrapolate_phase(*older, *newer, st.t_n, st.t_nm1, st.t_nm2);
      else
        st.phi_tilde = previous_step_linearization(*newer);
      if (cfg.clamp_linearization)
        for (double& v : st.phi_tilde) v = std::clamp(v, 0.0, 1.0);
      ++j;

      PhaseFieldProblem P(S.mesh, dofs, S.constraints, S.params, st.phi_old, st.phi_tilde, S.mass, &pattern);
      last = pdas_solve(P, st.U, cfg.newton, c, solver);
      if (!last.report.converged)
        spdlog::warn("step {} inner {}: Newton stopped ({}) after {} iterations, residual {:.3e}", n, j,
                     last.report.reason, last.report.iterations,
                     last.report.residuals.empty() ? 0.0 : last.report.residuals.back());
      step.solves.push_back(last.report);

      auto phi = st.phi(dofs);
      hist.emplace_back(phi.begin(), phi.end());
      if (hist.size() > 4) hist.pop_front();
      const auto& a = hist[hist.size() - 1];
      const auto& b = hist[hist.size() - 2];
      double d = 0.0;
      for (Index i = 0; i < np; ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
      d = std::sqrt(d);
      step.itl_differences.push_back(d);
      spdlog::debug("step {} inner {}: newton {} |dphi| {:.3e}", n, j, last.report.iterations, d);
      if (cfg.itl == ItlMode::none) break;
      if (d < cfg.tol_itl && j >= 1) break;
      if (j >= cfg.max_itl) {
        step.itl_converged = false;
        spdlog::warn("step {}: ItL limit {} reached, |dphi| = {:.3e}", n, cfg.max_itl, d);
        break;
      }
    }
    st.lambda = last.lambda;
    step.active = last.active;

    QoiRecord& r = step.record;
    r.step = n;
    r.time = st.t_n;
    for (const auto& rep : step.solves) r.newton_iterations += rep.iterations;
    r.itl_iterations = j;
    r.active_set_size = last.active.count();
    r.residual = last.report.residuals.empty() ? 0.0 : last.report.residuals.back();
    r.tcv = total_crack_volume(S.mesh, dofs, st.U);
    r.tcv_error = S.tcv_reference != 0.0 ? std::abs(r.tcv - S.tcv_reference) : 0.0;
    r.crack_energy = crack_energy(S.mesh, dofs, st.U, S.params);
    if (S.load_marker) {
      const auto f = boundary_load(S.mesh, dofs, st.U, S.params, *S.load_marker);
      r.load_x = f[0];
      r.load_y = f[1];
    }
    step.kkt = kkt_check(st.phi(dofs), st.phi_old, st.lambda, 10.0 * cfg.newton.tol_newton);
    step.converged = step.itl_converged;
    for (const auto& rep : step.solves) step.converged = step.converged && rep.converged;
    run.all_converged = run.all_converged && step.converged;

    spdlog::info("step {:4d} t={:.6g} newton {:4d} itl {:3d} active {:6d} tcv {:.6e} energy {:.6e} load ({:.4e}, {:.4e})",
                 n, r.time, r.newton_iterations, r.itl_iterations, r.active_set_size, r.tcv, r.crack_energy,
                 r.load_x, r.load_y);

    st.phi_old2 = st.phi_old;
    auto phi = st.phi(dofs);
    st.phi_old.assign(phi.begin(), phi.end());
    if (on_step) on_step(step, S);
    run.steps.push_back(std::move(step));

    if (cfg.stop_on_rupture && S.load_marker) {
      const double load = std::abs(r.load_x);
      peak_load = std::max(peak_load, load);
      if (peak_load > 0.0 && load < cfg.rupture_fraction * peak_load) {
        spdlog::info("load fell below {} of its peak; stopping", cfg.rupture_fraction);
        run.ruptured = true;
        break;
      }
    }
  }
  return run;
}

}  // namespace pfrac
