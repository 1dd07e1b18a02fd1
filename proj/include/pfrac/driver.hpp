#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pfrac/active_set.hpp"
#include "pfrac/linear_solver.hpp"
#include "pfrac/material.hpp"
#include "pfrac/mesh.hpp"
#include "pfrac/qoi.hpp"

namespace pfrac {

enum class BenchmarkId { sneddon2d, sens, lpanel };
enum class ItlMode { none, ite, itots };
enum class Linearization { extrapolation, previous };

std::string_view to_string(BenchmarkId b);
std::string_view to_string(ItlMode m);
std::string_view to_string(Linearization l);

struct RunConfig {
  BenchmarkId benchmark = BenchmarkId::sneddon2d;
  int base_nx = 10, base_ny = 10;
  int global_refines = 2;
  int local_refines = 5;
  Box refine_box{-2.5, -1.25, 2.5, 1.25};
  int increments = 1;
  double time_step = 1.0;

  // material; eps and kappa scale with the smallest cell diameter h
  double G_c = 1.0, mu = 0.42, lambda = 0.28, E = 1.0, nu = 0.2;
  double pressure = 0.0;
  double eps_factor = 2.0;
  double kappa = 1e-10;
  double kappa_per_h = 0.0;
  SplitMode split = SplitMode::none;
  PlaneMode plane = PlaneMode::strain;

  double crack_half_length = 0.25;  // Sneddon
  double crack_band = 1.0;          // half-thickness of the initial crack strip in units of h_min

  SolverSettings newton;
  GmresSettings gmres;

  ItlMode itl = ItlMode::none;
  double tol_itl = 1e-1;
  int max_itl = 100;
  Linearization linearization = Linearization::extrapolation;  // used with itl = none
  bool literal_indexing = false;
  bool clamp_linearization = true;

  bool stop_on_rupture = false;
  double rupture_fraction = 0.1;

  std::string out_dir;
  int vtk_every = 0;

  std::vector<std::string> notes;  // derived-value remarks for the echo

  void validate() const;
};

RunConfig preset(BenchmarkId b);

struct Setup {
  RunConfig config;
  Mesh mesh;
  DofMap dofs;
  ConstraintSet constraints;
  MaterialParams params;
  StateFields state;
  std::vector<double> mass;
  std::optional<Boundary> load_marker;
  double tcv_reference = 0.0;
};

Setup build_setup(const RunConfig& cfg);

/// Dirichlet data at time t. Replaces any previous Dirichlet entries.
void apply_boundary_conditions(BenchmarkId b, const Mesh& mesh, double t, ConstraintSet& cs);

struct StepResult {
  QoiRecord record;
  std::vector<NewtonReport> solves;
  std::vector<double> itl_differences;  // |phi^{n,j} - phi^{n,j-1}| per inner iteration
  ActiveSetMask active;
  bool itl_converged = true;
  bool converged = true;
  KktReport kkt;
};

struct RunResult {
  std::vector<StepResult> steps;
  bool all_converged = true;
  bool ruptured = false;
};

using StepCallback = std::function<void(const StepResult&, const Setup&)>;

RunResult run_incremental_loop(Setup& setup, const StepCallback& on_step = {});

/// Resolved constant for Cases 1, 3 and 4.
double resolved_c(const SolverSettings& s, const MaterialParams& m);

}  // namespace pfrac
