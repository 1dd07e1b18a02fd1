#pragma once

#include <random>
#include <vector>

#include "pfrac/fem.hpp"

namespace testing_support {

/// Displacements of size `scale` with a random affine part, phase field in (0.05, 0.95).
inline std::vector<double> random_state(const pfrac::Mesh& mesh, const pfrac::DofMap& dofs, std::mt19937& rng,
                                        double scale = 1e-2) {
  std::uniform_real_distribution<double> u(-1.0, 1.0), p(0.05, 0.95);
  std::vector<double> U(dofs.total());
  const double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
  for (pfrac::Index n = 0; n < mesh.n_nodes(); ++n) {
    const auto x = mesh.nodes[n];
    U[dofs.u_dof(n, 0)] = scale * (a * x.x + b * x.y + 0.3 * u(rng));
    U[dofs.u_dof(n, 1)] = scale * (c * x.x + d * x.y + 0.3 * u(rng));
    U[dofs.phi_dof(n)] = p(rng);
  }
  return U;
}

inline std::vector<double> random_phase(const pfrac::DofMap& dofs, std::mt19937& rng) {
  std::uniform_real_distribution<double> p(0.0, 1.0);
  std::vector<double> v(dofs.n_phi());
  for (auto& x : v) x = p(rng);
  return v;
}

}  // namespace testing_support
