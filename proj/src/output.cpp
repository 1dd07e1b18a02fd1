#include "pfrac/output.hpp"

#include <fstream>

#include <fmt/format.h>
#include <fmt/os.h>

namespace pfrac {

std::string format_csv(const std::vector<QoiRecord>& records) {
  std::string s = std::string(csv_header) + "\n";
  for (const auto& r : records)
    s += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", r.step, r.time, r.newton_iterations, r.itl_iterations,
                     r.active_set_size, r.residual, r.tcv, r.tcv_error, r.crack_energy, r.load_x, r.load_y);
  return s;
}

void write_csv(const std::vector<QoiRecord>& records, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error(fmt::format("cannot open {}", path.string()));
  f << format_csv(records);
}

void write_vtk(const Mesh& mesh, std::span<const double> u, std::span<const double> phi,
               std::span<const double> lambda, const ActiveSetMask& active, const std::filesystem::path& path) {
  const auto n = static_cast<std::size_t>(mesh.n_nodes());
  if (u.size() != 2 * n || phi.size() != n || lambda.size() != n || active.size() != n)
    throw std::runtime_error("field sizes do not match the mesh");
  auto out = fmt::output_file(path.string());
  out.print("# vtk DataFile Version 3.0\nphase-field fracture\nASCII\nDATASET UNSTRUCTURED_GRID\n");
  out.print("POINTS {} double\n", n);
  for (const auto& p : mesh.nodes) out.print("{} {} 0\n", p.x, p.y);
  out.print("CELLS {} {}\n", mesh.cells.size(), 5 * mesh.cells.size());
  for (const auto& c : mesh.cells) out.print("4 {} {} {} {}\n", c.nodes[0], c.nodes[1], c.nodes[2], c.nodes[3]);
  out.print("CELL_TYPES {}\n", mesh.cells.size());
  for (std::size_t i = 0; i < mesh.cells.size(); ++i) out.print("9\n");
  out.print("POINT_DATA {}\nVECTORS displacement double\n", n);
  for (std::size_t i = 0; i < n; ++i) out.print("{} {} 0\n", u[2 * i], u[2 * i + 1]);
  out.print("SCALARS phasefield double 1\nLOOKUP_TABLE default\n");
  for (double v : phi) out.print("{}\n", v);
  out.print("SCALARS multiplier double 1\nLOOKUP_TABLE default\n");
  for (double v : lambda) out.print("{}\n", v);
  out.print("SCALARS active int 1\nLOOKUP_TABLE default\n");
  for (std::size_t i = 0; i < n; ++i) out.print("{}\n", active[i] ? 1 : 0);
}

}  // namespace pfrac
