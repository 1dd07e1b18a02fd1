#include "pfrac/material.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace pfrac {

std::string_view to_string(SplitMode s) { return s == SplitMode::none ? "none" : "spectral"; }

void MaterialParams::validate() const {
  if (!(mu > 0.0)) throw ConfigError("shear modulus must be positive");
  if (!(lambda + mu > 0.0)) throw ConfigError("lambda + mu must be positive");
  if (!(G_c > 0.0)) throw ConfigError("critical energy release rate must be positive");
  if (!(eps > 0.0)) throw ConfigError("regularization length must be positive");
  if (!(kappa >= 0.0 && kappa < 1.0)) throw ConfigError("kappa must lie in [0, 1)");
}

double degradation(double phi, double kappa) { return (1.0 - kappa) * phi * phi + kappa; }

SymTensor2 stress(const SymTensor2& e, const MaterialParams& m) {
  const double lt = m.lambda * e.trace();
  return {2.0 * m.mu * e.xx + lt, 2.0 * m.mu * e.yy + lt, 2.0 * m.mu * e.xy};
}

namespace {

struct Spectral {
  bool isotropic = false;
  double l1 = 0.0, l2 = 0.0, c = 1.0, s = 0.0;
};

Spectral decompose(const SymTensor2& e) {
  Spectral d;
  const double mean = 0.5 * e.trace();
  const double r = std::hypot(0.5 * (e.xx - e.yy), e.xy);
  d.l1 = mean + r;
  d.l2 = mean - r;
  if (2.0 * r <= 1e-12 * e.norm() || e.norm() == 0.0) {
    d.isotropic = true;
    return d;
  }
  const double th = 0.5 * std::atan2(2.0 * e.xy, e.xx - e.yy);
  d.c = std::cos(th);
  d.s = std::sin(th);
  return d;
}

// P diag-plus-offdiag P^T with P = [n1 n2], n1 = (c,s), n2 = (-s,c)
SymTensor2 from_eigenbasis(double a11, double a22, double a12, double c, double s) {
  return {c * c * a11 + s * s * a22 - 2.0 * c * s * a12, s * s * a11 + c * c * a22 + 2.0 * c * s * a12,
          c * s * (a11 - a22) + (c * c - s * s) * a12};
}

double pos(double x) { return x > 0.0 ? x : 0.0; }

}  // namespace

StressSplit stress_split(const SymTensor2& e, const MaterialParams& m) {
  const SymTensor2 sig = stress(e, m);
  if (m.split == SplitMode::none) return {sig, {}};
  const Spectral d = decompose(e);
  if (d.isotropic) {
    if (e.trace() >= 0.0) return {sig, {}};
    return {{}, sig};
  }
  const SymTensor2 ep = from_eigenbasis(pos(d.l1), pos(d.l2), 0.0, d.c, d.s);
  const double lt = m.lambda * pos(e.trace());
  const SymTensor2 plus{2.0 * m.mu * ep.xx + lt, 2.0 * m.mu * ep.yy + lt, 2.0 * m.mu * ep.xy};
  return {plus, sig - plus};
}

SplitTangent::SplitTangent(const SymTensor2& e, const MaterialParams& m) : mu_(m.mu), lambda_(m.lambda) {
  if (m.split == SplitMode::none) return;
  const Spectral d = decompose(e);
  if (d.isotropic) {
    tensile_ = e.trace() >= 0.0;
    return;
  }
  full_ = false;
  c_ = d.c;
  s_ = d.s;
  h1_ = d.l1 >= 0.0 ? 1.0 : 0.0;
  h2_ = d.l2 >= 0.0 ? 1.0 : 0.0;
  w_ = (pos(d.l1) - pos(d.l2)) / (d.l1 - d.l2);
  htr_ = e.trace() >= 0.0 ? 1.0 : 0.0;
}

StressSplit SplitTangent::apply(const SymTensor2& de) const {
  const double lt = lambda_ * de.trace();
  const SymTensor2 full{2.0 * mu_ * de.xx + lt, 2.0 * mu_ * de.yy + lt, 2.0 * mu_ * de.xy};
  if (full_) {
    if (tensile_) return {full, {}};
    return {{}, full};
  }
  // rotate into the eigenbasis
  const double a11 = c_ * c_ * de.xx + s_ * s_ * de.yy + 2.0 * c_ * s_ * de.xy;
  const double a22 = s_ * s_ * de.xx + c_ * c_ * de.yy - 2.0 * c_ * s_ * de.xy;
  const double a12 = -c_ * s_ * de.xx + c_ * s_ * de.yy + (c_ * c_ - s_ * s_) * de.xy;
  const SymTensor2 dp = from_eigenbasis(h1_ * a11, h2_ * a22, w_ * a12, c_, s_);
  const double ltp = htr_ * lt;
  const SymTensor2 plus{2.0 * mu_ * dp.xx + ltp, 2.0 * mu_ * dp.yy + ltp, 2.0 * mu_ * dp.xy};
  return {plus, full - plus};
}

std::vector<double> extrapolate_phase(std::span<const double> phi_nm2, std::span<const double> phi_nm1,
                                      double t_n, double t_nm1, double t_nm2) {
  if (phi_nm2.size() != phi_nm1.size()) throw AssemblyError("phase-field histories differ in length");
  if (t_nm1 == t_nm2) throw AssemblyError("extrapolation needs distinct previous times");
  const double a = (t_n - t_nm1) / (t_nm2 - t_nm1);
  const double b = (t_n - t_nm2) / (t_nm1 - t_nm2);
  std::vector<double> out(phi_nm1.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a * phi_nm2[i] + b * phi_nm1[i];
  return out;
}

std::vector<double> previous_step_linearization(std::span<const double> phi_nm1) {
  return {phi_nm1.begin(), phi_nm1.end()};
}

void StateFields::resize(const DofMap& dofs) {
  U.assign(dofs.total(), 0.0);
  phi_old.assign(dofs.n_phi(), 1.0);
  phi_old2.assign(dofs.n_phi(), 1.0);
  phi_tilde.assign(dofs.n_phi(), 1.0);
  lambda.assign(dofs.n_phi(), 0.0);
}

void assemble_system(const Mesh& mesh, const DofMap& dofs, const MaterialParams& m, std::span<const double> U,
                     std::span<const double> phi_tilde, std::vector<double>& F, SparseMatrix* M) {
  if (static_cast<Index>(U.size()) != dofs.total() || static_cast<Index>(phi_tilde.size()) != dofs.n_phi())
    throw AssemblyError("state vectors do not match the dof map");
  F.assign(dofs.total(), 0.0);
  if (M) {
    if (M->rows() != dofs.total()) throw AssemblyError("matrix does not carry the system pattern");
    M->set_zero();
  }
  const double omk = 1.0 - m.kappa;
  const double p = m.pressure;
  CellValues cv;
  std::array<Index, 12> gd;
  std::array<double, 12> fl;
  std::array<std::array<double, 12>, 12> ml;
  std::array<SymTensor2, 8> eb;
  std::array<StressSplit, 8> db;

  for (const auto& cell : mesh.cells) {
    cv.reinit(cell);
    std::array<double, 8> ue;
    std::array<double, 4> pe, pt;
    for (int a = 0; a < 4; ++a) {
      const Index nd = cell.nodes[a];
      gd[2 * a] = dofs.u_dof(nd, 0);
      gd[2 * a + 1] = dofs.u_dof(nd, 1);
      gd[8 + a] = dofs.phi_dof(nd);
      ue[2 * a] = U[gd[2 * a]];
      ue[2 * a + 1] = U[gd[2 * a + 1]];
      pe[a] = U[gd[8 + a]];
      pt[a] = phi_tilde[nd];
    }
    fl.fill(0.0);
    if (M)
      for (auto& r : ml) r.fill(0.0);

    for (int q = 0; q < 4; ++q) {
      const auto& N = cv.N[q];
      const auto& dN = cv.dN[q];
      const double w = cv.JxW[q];
      SymTensor2 e;
      // 1 - phi is interpolated from nodal values so an intact cell gives exactly zero
      double ph = 0.0, omph = 0.0, pht = 0.0, gx = 0.0, gy = 0.0;
      for (int a = 0; a < 4; ++a) {
        e.xx += dN[a][0] * ue[2 * a];
        e.yy += dN[a][1] * ue[2 * a + 1];
        e.xy += 0.5 * (dN[a][1] * ue[2 * a] + dN[a][0] * ue[2 * a + 1]);
        ph += N[a] * pe[a];
        omph += N[a] * (1.0 - pe[a]);
        pht += N[a] * pt[a];
        gx += dN[a][0] * pe[a];
        gy += dN[a][1] * pe[a];
      }
      const double divu = e.trace();
      const StressSplit s = stress_split(e, m);
      const double g = degradation(pht, m.kappa);
      const double psi = s.plus.ddot(e);  // sigma+ : e
      const SymTensor2 su = s.plus * g + s.minus;

      for (int a = 0; a < 4; ++a) {
        const double ax = dN[a][0], ay = dN[a][1];
        fl[2 * a] -= w * (su.xx * ax + su.xy * ay + pht * pht * p * ax);
        fl[2 * a + 1] -= w * (su.xy * ax + su.yy * ay + pht * pht * p * ay);
        fl[8 + a] -= w * (omk * ph * psi * N[a] + 2.0 * ph * p * divu * N[a] - m.G_c / m.eps * omph * N[a] +
                          m.G_c * m.eps * (gx * ax + gy * ay));
      }
      if (!M) continue;

      const SplitTangent tan(e, m);
      for (int b = 0; b < 8; ++b) {
        eb[b] = basis_strain(dN[b / 2], b % 2);
        db[b] = tan.apply(eb[b]);
      }
      for (int j = 0; j < 8; ++j) {
        const SymTensor2 dsj = db[j].plus * g + db[j].minus;
        for (int i = 0; i < 8; ++i) ml[i][j] += w * dsj.ddot(eb[i]);
        const double sj = s.plus.ddot(eb[j]);
        const double divj = eb[j].trace();
        for (int a = 0; a < 4; ++a) ml[8 + a][j] += w * N[a] * (2.0 * omk * ph * sj + 2.0 * p * ph * divj);
      }
      const double react = omk * psi + 2.0 * p * divu + m.G_c / m.eps;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          ml[8 + a][8 + b] += w * (react * N[a] * N[b] + m.G_c * m.eps * (dN[a][0] * dN[b][0] + dN[a][1] * dN[b][1]));
    }

    for (int i = 0; i < 12; ++i) F[gd[i]] += fl[i];
    if (M) {
      auto& vals = M->values();
      for (int i = 0; i < 12; ++i) {
        const int jmax = i < 8 ? 8 : 12;
        for (int j = 0; j < jmax; ++j) {
          const auto pos = M->find(gd[i], gd[j]);
          if (pos < 0) throw AssemblyError("matrix does not carry the system pattern");
          vals[pos] += ml[i][j];
        }
      }
    }
  }
}

std::vector<double> assemble_residual(const Mesh& mesh, const DofMap& dofs, const MaterialParams& m,
                                      std::span<const double> U, std::span<const double> phi_tilde) {
  std::vector<double> F;
  assemble_system(mesh, dofs, m, U, phi_tilde, F, nullptr);
  return F;
}

SparseMatrix assemble_jacobian(const Mesh& mesh, const DofMap& dofs, const MaterialParams& m,
                               std::span<const double> U, std::span<const double> phi_tilde) {
  SparseMatrix M = make_system_pattern(mesh, dofs);
  std::vector<double> F;
  assemble_system(mesh, dofs, m, U, phi_tilde, F, &M);
  return M;
}

}  // namespace pfrac
