#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "pfrac/fem.hpp"
#include "pfrac/qoi.hpp"

namespace pfrac {

inline constexpr const char* csv_header =
    "step,time,newton_iters,itl_iters,active_set_size,residual,tcv,tcv_error,crack_energy,load_x,load_y";

std::string format_csv(const std::vector<QoiRecord>& records);
void write_csv(const std::vector<QoiRecord>& records, const std::filesystem::path& path);

/// Legacy ASCII unstructured grid with nodal displacement, phasefield, multiplier and active flags.
void write_vtk(const Mesh& mesh, std::span<const double> u, std::span<const double> phi,
               std::span<const double> lambda, const ActiveSetMask& active, const std::filesystem::path& path);

}  // namespace pfrac
