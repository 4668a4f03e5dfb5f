#pragma once

// Legacy ASCII VTK (unstructured grid) output for meshes and field
// snapshots. Cells are written as VTK_QUADRATIC_QUAD (type 23).

#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hafcg/errors.hpp"
#include "hafcg/mesh.hpp"

namespace hafcg {

inline void write_vtk(const std::string& path, const Mesh& mesh,
                      const std::map<std::string, const Eigen::VectorXd*>& point_scalars = {},
                      const Eigen::VectorXd* displacement = nullptr,
                      const std::map<std::string, const std::vector<double>*>& cell_scalars = {}) {
  std::ofstream os(path);
  if (!os) throw ConfigError("vtk: cannot open '" + path + "'");
  os << "# vtk DataFile Version 3.0\n";
  os << "hafcg snapshot\n";
  os << "ASCII\n";
  os << "DATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << mesh.n_nodes() << " double\n";
  os.precision(12);
  for (const auto& X : mesh.nodes) os << X[0] << " " << X[1] << " 0\n";
  os << "CELLS " << mesh.n_elements() << " " << mesh.n_elements() * 9 << "\n";
  for (const auto& conn : mesh.elements) {
    os << 8;
    for (int a : conn) os << " " << a;
    os << "\n";
  }
  os << "CELL_TYPES " << mesh.n_elements() << "\n";
  for (int e = 0; e < mesh.n_elements(); ++e) os << 23 << "\n";

  if (!point_scalars.empty() || displacement) {
    os << "POINT_DATA " << mesh.n_nodes() << "\n";
    if (displacement) {
      os << "VECTORS displacement double\n";
      for (int n = 0; n < mesh.n_nodes(); ++n)
        os << (*displacement)[2 * n] << " " << (*displacement)[2 * n + 1] << " 0\n";
    }
    for (const auto& [name, field] : point_scalars) {
      os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
      for (int n = 0; n < mesh.n_nodes(); ++n) os << (*field)[n] << "\n";
    }
  }
  if (!cell_scalars.empty()) {
    os << "CELL_DATA " << mesh.n_elements() << "\n";
    for (const auto& [name, field] : cell_scalars) {
      os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
      for (int e = 0; e < mesh.n_elements(); ++e) os << (*field)[e] << "\n";
    }
  }
  if (!os) throw ConfigError("vtk: write failed on '" + path + "'");
}

} // namespace hafcg
