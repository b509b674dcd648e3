#include "fecvx/meshio.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace fecvx {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void dump_mesh(const Mesh& mesh, std::ostream& os) {
    os << "fecvx-mesh 1\n";
    os << "domain " << to_string(mesh.domain_tag());
    if (mesh.domain_tag() == DomainTag::disk) os << " " << fmt(mesh.disk_radius());
    os << "\n";
    os << "vertices " << mesh.num_vertices() << "\n";
    for (const Vertex& v : mesh.vertices())
        os << fmt(v.coords.x()) << " " << fmt(v.coords.y()) << "\n";
    os << "elements " << mesh.num_elements() << "\n";
    for (const Element& el : mesh.elements())
        os << el.vertex_ids[0] << " " << el.vertex_ids[1] << " " << el.vertex_ids[2] << " "
           << el.refinement_edge << " " << el.generation << "\n";
}

void dump_mesh_file(const Mesh& mesh, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    dump_mesh(mesh, os);
}

Mesh load_mesh(std::istream& is) {
    std::string magic;
    int version = 0;
    if (!(is >> magic >> version) || magic != "fecvx-mesh" || version != 1)
        throw std::runtime_error("not a fecvx mesh dump");

    std::string kw, tag_name;
    if (!(is >> kw >> tag_name) || kw != "domain") throw std::runtime_error("bad mesh dump: domain");
    DomainTag tag;
    double radius = 0.0;
    if (tag_name == "unit_square") tag = DomainTag::unit_square;
    else if (tag_name == "rectangle") tag = DomainTag::rectangle;
    else if (tag_name == "disk") { tag = DomainTag::disk; is >> radius; }
    else if (tag_name == "polygon") tag = DomainTag::polygon;
    else throw std::runtime_error("bad mesh dump: unknown domain tag " + tag_name);

    int nv = 0;
    if (!(is >> kw >> nv) || kw != "vertices") throw std::runtime_error("bad mesh dump: vertices");
    std::vector<Vertex> vertices(nv);
    for (int i = 0; i < nv; ++i)
        if (!(is >> vertices[i].coords.x() >> vertices[i].coords.y()))
            throw std::runtime_error("bad mesh dump: vertex coordinates");

    int ne = 0;
    if (!(is >> kw >> ne) || kw != "elements") throw std::runtime_error("bad mesh dump: elements");
    std::vector<Element> elements(ne);
    for (int i = 0; i < ne; ++i) {
        Element& el = elements[i];
        if (!(is >> el.vertex_ids[0] >> el.vertex_ids[1] >> el.vertex_ids[2] >>
              el.refinement_edge >> el.generation))
            throw std::runtime_error("bad mesh dump: element connectivity");
    }
    return Mesh::build(std::move(vertices), std::move(elements), tag, radius);
}

Mesh load_mesh_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    return load_mesh(is);
}

void write_dof_csv(const Eigen::VectorXd& coeffs, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    for (Eigen::Index i = 0; i < coeffs.size(); ++i) os << fmt(coeffs[i]) << "\n";
}

Eigen::VectorXd read_dof_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    std::vector<double> vals;
    std::string line;
    while (std::getline(is, line)) {
        std::istringstream ls(line);
        double v;
        while (ls >> v) {
            vals.push_back(v);
            // tolerate comma separators
            if (ls.peek() == ',') ls.ignore();
        }
    }
    Eigen::VectorXd out(static_cast<Eigen::Index>(vals.size()));
    for (std::size_t i = 0; i < vals.size(); ++i) out[static_cast<Eigen::Index>(i)] = vals[i];
    return out;
}

}  // namespace fecvx
