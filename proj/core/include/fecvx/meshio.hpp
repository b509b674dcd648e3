#pragma once

#include "fecvx/mesh.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <string>

namespace fecvx {

/// Plain-text mesh dump used by the CLI and golden tests: vertex count and
/// coordinates followed by element connectivity (with refinement edge and
/// generation). Lossless with respect to `load_mesh`.
void dump_mesh(const Mesh& mesh, std::ostream& os);
void dump_mesh_file(const Mesh& mesh, const std::string& path);

Mesh load_mesh(std::istream& is);
Mesh load_mesh_file(const std::string& path);

/// Flat CSV serialization of DOF vectors (one value per line).
void write_dof_csv(const Eigen::VectorXd& coeffs, const std::string& path);
Eigen::VectorXd read_dof_csv(const std::string& path);

}  // namespace fecvx
