#include "pfrac/qoi.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace pfrac {

std::string_view to_string(PlaneMode p) { return p == PlaneMode::strain ? "strain" : "stress"; }

double total_crack_volume(const Mesh& mesh, const DofMap& dofs, std::span<const double> U) {
  if (static_cast<Index>(U.size()) != dofs.total()) throw AssemblyError("state does not match the dof map");
  CellValues cv;
  double tcv = 0.0;
  for (const auto& cell : mesh.cells) {
    cv.reinit(cell);
    for (int q = 0; q < 4; ++q) {
      double ux = 0, uy = 0, gx = 0, gy = 0;
      for (int a = 0; a < 4; ++a) {
        const Index n = cell.nodes[a];
        ux += cv.N[q][a] * U[dofs.u_dof(n, 0)];
        uy += cv.N[q][a] * U[dofs.u_dof(n, 1)];
        gx += cv.dN[q][a][0] * U[dofs.phi_dof(n)];
        gy += cv.dN[q][a][1] * U[dofs.phi_dof(n)];
      }
      tcv += cv.JxW[q] * (ux * gx + uy * gy);
    }
  }
  return tcv;
}

double analytic_sneddon_tcv(double p, double l0, double E, double nu, PlaneMode mode) {
  if (!(E > 0.0)) throw ConfigError("Young's modulus must be positive");
  const double Ep = mode == PlaneMode::strain ? E / (1.0 - nu * nu) : E;
  return 2.0 * std::numbers::pi * p * l0 * l0 / Ep;
}

double crack_energy(const Mesh& mesh, const DofMap& dofs, std::span<const double> U, const MaterialParams& m) {
  if (static_cast<Index>(U.size()) != dofs.total()) throw AssemblyError("state does not match the dof map");
  CellValues cv;
  double e = 0.0;
  for (const auto& cell : mesh.cells) {
    cv.reinit(cell);
    for (int q = 0; q < 4; ++q) {
      double ph = 0.0;
      for (int a = 0; a < 4; ++a) ph += cv.N[q][a] * U[dofs.phi_dof(cell.nodes[a])];
      e += cv.JxW[q] * (ph - 1.0) * (ph - 1.0);
    }
  }
  return 0.5 * m.G_c * e / m.eps;
}

std::array<double, 2> boundary_load(const Mesh& mesh, const DofMap& dofs, std::span<const double> U,
                                    const MaterialParams& m, Boundary marker, bool degraded) {
  if (static_cast<Index>(U.size()) != dofs.total()) throw AssemblyError("state does not match the dof map");
  const double g = 0.5 / std::sqrt(3.0);
  std::array<double, 2> f{0.0, 0.0};
  for (const auto& fa : mesh.facets) {
    if (fa.marker != marker) continue;
    const Cell& cell = mesh.cells[fa.cell];
    const Point2 p0 = mesh.nodes[fa.nodes[0]], p1 = mesh.nodes[fa.nodes[1]];
    const double len = std::hypot(p1.x - p0.x, p1.y - p0.y);
    const double nx = (p1.y - p0.y) / len, ny = -(p1.x - p0.x) / len;
    const double w = cell.bounds.width(), h = cell.bounds.height();
    for (double s : {0.5 - g, 0.5 + g}) {
      const double x = p0.x + s * (p1.x - p0.x), y = p0.y + s * (p1.y - p0.y);
      const double xi = (x - cell.bounds.x0) / w, eta = (y - cell.bounds.y0) / h;
      const std::array<double, 4> N = {(1 - xi) * (1 - eta), xi * (1 - eta), xi * eta, (1 - xi) * eta};
      const std::array<std::array<double, 2>, 4> dN = {{{-(1 - eta) / w, -(1 - xi) / h},
                                                         {(1 - eta) / w, -xi / h},
                                                         {eta / w, xi / h},
                                                         {-eta / w, (1 - xi) / h}}};
      SymTensor2 e;
      double ph = 0.0;
      for (int a = 0; a < 4; ++a) {
        const Index n = cell.nodes[a];
        const double ux = U[dofs.u_dof(n, 0)], uy = U[dofs.u_dof(n, 1)];
        e.xx += dN[a][0] * ux;
        e.yy += dN[a][1] * uy;
        e.xy += 0.5 * (dN[a][1] * ux + dN[a][0] * uy);
        ph += N[a] * U[dofs.phi_dof(n)];
      }
      SymTensor2 sig;
      if (degraded) {
        const auto sp = stress_split(e, m);
        sig = sp.plus * degradation(ph, m.kappa) + sp.minus;
      } else {
        sig = stress(e, m);
      }
      const double jw = 0.5 * len;
      f[0] += jw * (sig.xx * nx + sig.xy * ny);
      f[1] += jw * (sig.xy * nx + sig.yy * ny);
    }
  }
  return f;
}

std::array<double, 2> boundary_load(const Mesh& mesh, const DofMap& dofs, std::span<const double> U,
                                    const MaterialParams& m, std::string_view marker, bool degraded) {
  const auto b = boundary_from_string(marker);
  if (!b) throw ConfigError(fmt::format("unknown boundary marker '{}'", marker));
  return boundary_load(mesh, dofs, U, m, *b, degraded);
}

}  // namespace pfrac
