#pragma once

#include "fecvx/mesh.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>

namespace fecvx {

/// Legacy ASCII VTK (UNSTRUCTURED_GRID) writer for triangle meshes with an
/// optional point scalar field (e.g. the solution at vertices) and an optional
/// cell scalar field (e.g. error indicators).
void write_vtk(const std::string& path, const Mesh& mesh,
               const std::optional<Eigen::VectorXd>& point_scalars = std::nullopt,
               const std::string& point_name = "u",
               const std::optional<Eigen::VectorXd>& cell_scalars = std::nullopt,
               const std::string& cell_name = "eta");

}  // namespace fecvx
