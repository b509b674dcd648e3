#include "fecvx/vtk.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace fecvx {

void write_vtk(const std::string& path, const Mesh& mesh,
               const std::optional<Eigen::VectorXd>& point_scalars, const std::string& point_name,
               const std::optional<Eigen::VectorXd>& cell_scalars, const std::string& cell_name) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");

    char buf[96];
    os << "# vtk DataFile Version 3.0\n";
    os << "fecvx mesh\n";
    os << "ASCII\n";
    os << "DATASET UNSTRUCTURED_GRID\n";
    os << "POINTS " << mesh.num_vertices() << " double\n";
    for (const Vertex& v : mesh.vertices()) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g 0\n", v.coords.x(), v.coords.y());
        os << buf;
    }
    os << "CELLS " << mesh.num_elements() << " " << 4 * mesh.num_elements() << "\n";
    for (const Element& el : mesh.elements())
        os << "3 " << el.vertex_ids[0] << " " << el.vertex_ids[1] << " " << el.vertex_ids[2]
           << "\n";
    os << "CELL_TYPES " << mesh.num_elements() << "\n";
    for (int i = 0; i < mesh.num_elements(); ++i) os << "5\n";

    if (point_scalars) {
        if (point_scalars->size() != mesh.num_vertices())
            throw std::invalid_argument("write_vtk: point scalar size mismatch");
        os << "POINT_DATA " << mesh.num_vertices() << "\n";
        os << "SCALARS " << point_name << " double 1\n";
        os << "LOOKUP_TABLE default\n";
        for (Eigen::Index i = 0; i < point_scalars->size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g\n", (*point_scalars)[i]);
            os << buf;
        }
    }
    if (cell_scalars) {
        if (cell_scalars->size() != mesh.num_elements())
            throw std::invalid_argument("write_vtk: cell scalar size mismatch");
        os << "CELL_DATA " << mesh.num_elements() << "\n";
        os << "SCALARS " << cell_name << " double 1\n";
        os << "LOOKUP_TABLE default\n";
        for (Eigen::Index i = 0; i < cell_scalars->size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g\n", (*cell_scalars)[i]);
            os << buf;
        }
    }
}

}  // namespace fecvx
