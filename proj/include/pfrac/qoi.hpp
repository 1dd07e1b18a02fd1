#pragma once

#include <array>
#include <span>
#include <string_view>

#include "pfrac/fem.hpp"
#include "pfrac/material.hpp"

namespace pfrac {

struct QoiRecord {
  int step = 0;
  double time = 0.0;
  int newton_iterations = 0;
  int itl_iterations = 0;
  std::size_t active_set_size = 0;
  double residual = 0.0;
  double tcv = 0.0;
  double tcv_error = 0.0;
  double crack_energy = 0.0;
  double load_x = 0.0;
  double load_y = 0.0;
};

enum class PlaneMode { strain, stress };

std::string_view to_string(PlaneMode p);

/// Integral of u . grad(phi) over the domain.
double total_crack_volume(const Mesh& mesh, const DofMap& dofs, std::span<const double> U);

double analytic_sneddon_tcv(double pressure, double half_length, double E, double nu, PlaneMode mode);

/// (G_c / 2) * integral of (phi - 1)^2 / eps.
double crack_energy(const Mesh& mesh, const DofMap& dofs, std::span<const double> U, const MaterialParams& m);

/// Boundary traction resultant of sigma(u) over the facets carrying `marker`. With `degraded`
/// the stress is split and the tensile part scaled by g(phi).
std::array<double, 2> boundary_load(const Mesh& mesh, const DofMap& dofs, std::span<const double> U,
                                    const MaterialParams& m, Boundary marker, bool degraded = false);

/// Same, with the marker given by name; unknown names throw.
std::array<double, 2> boundary_load(const Mesh& mesh, const DofMap& dofs, std::span<const double> U,
                                    const MaterialParams& m, std::string_view marker, bool degraded = false);

}  // namespace pfrac
