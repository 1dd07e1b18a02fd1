#pragma once

#include <cmath>
#include <span>
#include <string_view>
#include <vector>

#include "pfrac/fem.hpp"

namespace pfrac {

enum class SplitMode { none, spectral };

std::string_view to_string(SplitMode s);

struct MaterialParams {
  double mu = 0.0;
  double lambda = 0.0;  // Lame's first parameter
  double G_c = 1.0;
  double kappa = 1e-10;
  double eps = 1.0;
  double pressure = 0.0;
  double E = 1.0;
  double nu = 0.0;
  SplitMode split = SplitMode::none;

  void validate() const;
};

struct SymTensor2 {
  double xx = 0.0, yy = 0.0, xy = 0.0;

  double trace() const { return xx + yy; }
  double ddot(const SymTensor2& o) const { return xx * o.xx + yy * o.yy + 2.0 * xy * o.xy; }
  double norm() const { return std::sqrt(ddot(*this)); }
  SymTensor2 operator+(const SymTensor2& o) const { return {xx + o.xx, yy + o.yy, xy + o.xy}; }
  SymTensor2 operator-(const SymTensor2& o) const { return {xx - o.xx, yy - o.yy, xy - o.xy}; }
  SymTensor2 operator*(double s) const { return {xx * s, yy * s, xy * s}; }
};

/// Symmetric gradient of the vector field N*e_comp.
inline SymTensor2 basis_strain(const std::array<double, 2>& grad, int comp) {
  return comp == 0 ? SymTensor2{grad[0], 0.0, 0.5 * grad[1]} : SymTensor2{0.0, grad[1], 0.5 * grad[0]};
}

double degradation(double phi, double kappa);

SymTensor2 stress(const SymTensor2& e, const MaterialParams& m);

struct StressSplit {
  SymTensor2 plus, minus;
};

StressSplit stress_split(const SymTensor2& e, const MaterialParams& m);

/// Linearization of the stress split at a fixed strain.
class SplitTangent {
 public:
  SplitTangent(const SymTensor2& e, const MaterialParams& m);
  StressSplit apply(const SymTensor2& de) const;

 private:
  double mu_, lambda_;
  bool full_ = true;  // tension/compression decided by the trace alone
  bool tensile_ = true;
  double c_ = 1.0, s_ = 0.0;
  double h1_ = 1.0, h2_ = 1.0, w_ = 1.0, htr_ = 1.0;
};

std::vector<double> extrapolate_phase(std::span<const double> phi_nm2, std::span<const double> phi_nm1,
                                      double t_n, double t_nm1, double t_nm2);

std::vector<double> previous_step_linearization(std::span<const double> phi_nm1);

/// Solution vector layout follows DofMap: displacements first, then the phase field.
struct StateFields {
  std::vector<double> U;
  std::vector<double> phi_old;   // previous step
  std::vector<double> phi_old2;  // two steps back
  std::vector<double> phi_tilde;
  std::vector<double> lambda;    // multiplier per phase-field dof
  double t_n = 0.0, t_nm1 = 0.0, t_nm2 = 0.0;
  int step = 0;

  void resize(const DofMap& dofs);
  std::span<double> u(const DofMap& d) { return {U.data(), static_cast<std::size_t>(d.n_u())}; }
  std::span<double> phi(const DofMap& d) {
    return {U.data() + d.n_u(), static_cast<std::size_t>(d.n_phi())};
  }
  std::span<const double> phi(const DofMap& d) const {
    return {U.data() + d.n_u(), static_cast<std::size_t>(d.n_phi())};
  }
};

/// F = -A(U)(chi) on the full dof set, unconstrained.
std::vector<double> assemble_residual(const Mesh& mesh, const DofMap& dofs, const MaterialParams& m,
                                      std::span<const double> U, std::span<const double> phi_tilde);

/// dA/dU in the pattern of make_system_pattern.
SparseMatrix assemble_jacobian(const Mesh& mesh, const DofMap& dofs, const MaterialParams& m,
                               std::span<const double> U, std::span<const double> phi_tilde);

/// Fills both in one sweep; `matrix` must carry the system pattern when `with_matrix` is set.
void assemble_system(const Mesh& mesh, const DofMap& dofs, const MaterialParams& m, std::span<const double> U,
                     std::span<const double> phi_tilde, std::vector<double>& residual, SparseMatrix* matrix);

}  // namespace pfrac
