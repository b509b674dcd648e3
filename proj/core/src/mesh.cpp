#include "fecvx/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace fecvx {

namespace {

// Canonical (min,max) vertex pair used as an edge key.
std::pair<int, int> edge_key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

int longest_local_edge(const std::array<Vec2, 3>& p) {
    double best = -1.0;
    int arg = 0;
    for (int k = 0; k < 3; ++k) {
        const double len = (p[(k + 2) % 3] - p[(k + 1) % 3]).norm();
        if (len > best + 1e-14) {
            best = len;
            arg = k;
        }
    }
    return arg;
}

}  // namespace

Pattern pattern_from_string(const std::string& name) {
    if (name == "diagonal") return Pattern::diagonal;
    if (name == "chevron") return Pattern::chevron;
    if (name == "crisscross") return Pattern::crisscross;
    if (name == "union_jack" || name == "union-jack") return Pattern::union_jack;
    throw std::invalid_argument("unknown mesh pattern: " + name);
}

std::string to_string(Pattern p) {
    switch (p) {
        case Pattern::diagonal: return "diagonal";
        case Pattern::chevron: return "chevron";
        case Pattern::crisscross: return "crisscross";
        case Pattern::union_jack: return "union_jack";
    }
    return "?";
}

std::string to_string(DomainTag t) {
    switch (t) {
        case DomainTag::unit_square: return "unit_square";
        case DomainTag::rectangle: return "rectangle";
        case DomainTag::disk: return "disk";
        case DomainTag::polygon: return "polygon";
    }
    return "?";
}

Mesh Mesh::build(std::vector<Vertex> vertices, std::vector<Element> elements,
                 DomainTag tag, double disk_radius) {
    Mesh m;
    m.domain_tag_ = tag;
    m.disk_radius_ = disk_radius;

    for (std::size_t i = 0; i < vertices.size(); ++i) {
        vertices[i].id = static_cast<int>(i);
        if (!vertices[i].coords.allFinite())
            throw std::invalid_argument("mesh vertex with non-finite coordinates");
    }
    m.vertices_ = std::move(vertices);

    for (std::size_t i = 0; i < elements.size(); ++i) {
        Element& el = elements[i];
        el.id = static_cast<int>(i);
        for (int v : el.vertex_ids)
            if (v < 0 || v >= m.num_vertices())
                throw std::invalid_argument("element references unknown vertex");
        const Vec2 a = m.vertices_[el.vertex_ids[0]].coords;
        const Vec2 b = m.vertices_[el.vertex_ids[1]].coords;
        const Vec2 c = m.vertices_[el.vertex_ids[2]].coords;
        const double sa = signed_area(a, b, c);
        if (std::abs(sa) < 1e-15) throw std::invalid_argument("degenerate (collinear) element");
        if (sa < 0.0) {
            // Re-orient CCW; swapping v1 and v2 exchanges local edges 1 and 2.
            std::swap(el.vertex_ids[1], el.vertex_ids[2]);
            if (el.refinement_edge == 1)
                el.refinement_edge = 2;
            else if (el.refinement_edge == 2)
                el.refinement_edge = 1;
        }
    }
    m.elements_ = std::move(elements);

    std::map<std::pair<int, int>, int> edge_of;
    m.element_edges_.assign(m.elements_.size(), {-1, -1, -1});
    for (const Element& el : m.elements_) {
        for (int k = 0; k < 3; ++k) {
            const auto [va, vb] = el.edge_vertices(k);
            const auto key = edge_key(va, vb);
            auto it = edge_of.find(key);
            if (it == edge_of.end()) {
                Edge e;
                e.id = static_cast<int>(m.edges_.size());
                e.vertex_ids = {key.first, key.second};
                e.adjacent_element_ids = {el.id, -1};
                edge_of.emplace(key, e.id);
                m.edges_.push_back(e);
                m.element_edges_[el.id][k] = e.id;
            } else {
                Edge& e = m.edges_[it->second];
                if (e.adjacent_element_ids[1] >= 0)
                    throw std::invalid_argument("edge shared by more than two elements");
                e.adjacent_element_ids[1] = el.id;
                m.element_edges_[el.id][k] = it->second;
            }
        }
    }

    m.vertex_star_.assign(m.vertices_.size(), {});
    for (const Element& el : m.elements_)
        for (int v : el.vertex_ids) m.vertex_star_[v].push_back(el.id);

    m.vertex_on_boundary_.assign(m.vertices_.size(), false);
    for (Edge& e : m.edges_) {
        if (!e.is_boundary()) continue;
        m.vertex_on_boundary_[e.vertex_ids[0]] = true;
        m.vertex_on_boundary_[e.vertex_ids[1]] = true;
        const Element& el = m.elements_[e.adjacent_element_ids[0]];
        const Vec2 pa = m.vertices_[e.vertex_ids[0]].coords;
        const Vec2 pb = m.vertices_[e.vertex_ids[1]].coords;
        int opposite = -1;
        for (int v : el.vertex_ids)
            if (v != e.vertex_ids[0] && v != e.vertex_ids[1]) opposite = v;
        Vec2 n = rotate90(pb - pa).normalized();
        if (n.dot(m.vertices_[opposite].coords - pa) > 0.0) n = -n;
        e.outward_normal = n;
    }
    return m;
}

double Mesh::element_area(int e) const {
    const auto p = element_coords(e);
    return signed_area(p[0], p[1], p[2]);
}

double Mesh::element_diameter(int e) const {
    const auto p = element_coords(e);
    double d = 0.0;
    for (int k = 0; k < 3; ++k) d = std::max(d, (p[(k + 1) % 3] - p[k]).norm());
    return d;
}

double Mesh::min_angle() const {
    double a = std::numbers::pi;
    for (const Element& el : elements_) {
        const auto p = element_coords(el.id);
        for (int k = 0; k < 3; ++k)
            a = std::min(a, corner_angle(p[k], p[(k + 1) % 3], p[(k + 2) % 3]));
    }
    return a;
}

double Mesh::total_area() const {
    double s = 0.0;
    for (const Element& el : elements_) s += element_area(el.id);
    return s;
}

double Mesh::mesh_size() const {
    double h = 0.0;
    for (const Element& el : elements_) h = std::max(h, element_diameter(el.id));
    return h;
}

Vec2 Mesh::element_centroid(int e) const {
    const auto p = element_coords(e);
    return (p[0] + p[1] + p[2]) / 3.0;
}

std::array<Vec2, 3> Mesh::element_coords(int e) const {
    const Element& el = elements_[e];
    return {vertices_[el.vertex_ids[0]].coords, vertices_[el.vertex_ids[1]].coords,
            vertices_[el.vertex_ids[2]].coords};
}

int Mesh::find_vertex(const Vec2& p, double tol) const {
    for (const Vertex& v : vertices_)
        if ((v.coords - p).norm() <= tol) return v.id;
    return -1;
}

Mesh structured_mesh(Pattern pattern, int n, const Rect& rect) {
    if (n < 1) throw std::invalid_argument("structured_mesh: n must be >= 1");
    if (rect.degenerate()) throw std::invalid_argument("structured_mesh: degenerate rectangle");

    const double hx = rect.width() / n, hy = rect.height() / n;
    std::vector<Vertex> vertices;
    const auto grid = [&](int i, int j) { return j * (n + 1) + i; };
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            vertices.push_back({grid(i, j), Vec2(rect.xmin + i * hx, rect.ymin + j * hy)});

    std::vector<Element> elements;
    const auto add = [&](int a, int b, int c) {
        Element el;
        el.vertex_ids = {a, b, c};
        elements.push_back(el);
    };

    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const int v00 = grid(i, j), v10 = grid(i + 1, j);
            const int v11 = grid(i + 1, j + 1), v01 = grid(i, j + 1);
            switch (pattern) {
                case Pattern::diagonal:
                    add(v00, v10, v11);
                    add(v00, v11, v01);
                    break;
                case Pattern::chevron:
                    if (j % 2 == 0) {
                        add(v00, v10, v11);
                        add(v00, v11, v01);
                    } else {
                        add(v00, v10, v01);
                        add(v10, v11, v01);
                    }
                    break;
                case Pattern::union_jack:
                    if ((i + j) % 2 == 0) {
                        add(v00, v10, v11);
                        add(v00, v11, v01);
                    } else {
                        add(v00, v10, v01);
                        add(v10, v11, v01);
                    }
                    break;
                case Pattern::crisscross: {
                    const int center = static_cast<int>(vertices.size());
                    vertices.push_back(
                        {center, Vec2(rect.xmin + (i + 0.5) * hx, rect.ymin + (j + 0.5) * hy)});
                    add(v00, v10, center);
                    add(v10, v11, center);
                    add(v11, v01, center);
                    add(v01, v00, center);
                    break;
                }
            }
        }
    }

    // Initial refinement edges: longest edge of each element.
    for (Element& el : elements) {
        const std::array<Vec2, 3> p = {vertices[el.vertex_ids[0]].coords,
                                       vertices[el.vertex_ids[1]].coords,
                                       vertices[el.vertex_ids[2]].coords};
        el.refinement_edge = longest_local_edge(p);
    }

    const bool unit = rect.xmin == 0.0 && rect.ymin == 0.0 && rect.xmax == 1.0 && rect.ymax == 1.0;
    return Mesh::build(std::move(vertices), std::move(elements),
                       unit ? DomainTag::unit_square : DomainTag::rectangle);
}

Mesh disk_mesh(double radius, int refinement_level) {
    if (radius <= 0.0) throw std::invalid_argument("disk_mesh: radius must be positive");
    if (refinement_level < 0) throw std::invalid_argument("disk_mesh: negative refinement level");

    std::vector<Vertex> vertices;
    vertices.push_back({0, Vec2::Zero()});
    for (int k = 0; k < 6; ++k) {
        const double a = k * std::numbers::pi / 3.0;
        vertices.push_back({k + 1, radius * Vec2(std::cos(a), std::sin(a))});
    }
    std::vector<Element> elements;
    for (int k = 0; k < 6; ++k) {
        Element el;
        el.vertex_ids = {1 + k, 1 + (k + 1) % 6, 0};
        el.refinement_edge = 2;  // the chord, so refinement tracks the circle
        elements.push_back(el);
    }
    Mesh m = Mesh::build(std::move(vertices), std::move(elements), DomainTag::disk, radius);
    for (int l = 0; l < refinement_level; ++l) m = bisect_all(m);
    return m;
}

Mesh bisect(const Mesh& mesh, const std::unordered_set<int>& marked) {
    for (int id : marked)
        if (id < 0 || id >= mesh.num_elements())
            throw std::invalid_argument("bisect: unknown element id");
    if (marked.empty()) return mesh;

    // Closure on marked edges: an element with any marked edge must have its
    // refinement edge marked, so every bisection is compatible.
    std::vector<bool> edge_marked(mesh.num_edges(), false);
    for (int id : marked)
        edge_marked[mesh.element_edges(id)[mesh.elements()[id].refinement_edge]] = true;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const Element& el : mesh.elements()) {
            const auto& ee = mesh.element_edges(el.id);
            const int ref = ee[el.refinement_edge];
            if (edge_marked[ref]) continue;
            if (edge_marked[ee[0]] || edge_marked[ee[1]] || edge_marked[ee[2]]) {
                edge_marked[ref] = true;
                changed = true;
            }
        }
    }

    std::vector<Vertex> vertices = mesh.vertices();
    std::vector<int> midpoint_of_edge(mesh.num_edges(), -1);
    for (const Edge& e : mesh.edges()) {
        if (!edge_marked[e.id]) continue;
        Vec2 p = 0.5 * (vertices[e.vertex_ids[0]].coords + vertices[e.vertex_ids[1]].coords);
        if (mesh.domain_tag() == DomainTag::disk && e.is_boundary() && p.norm() > 0.0)
            p *= mesh.disk_radius() / p.norm();
        midpoint_of_edge[e.id] = static_cast<int>(vertices.size());
        vertices.push_back({midpoint_of_edge[e.id], p});
    }

    // Midpoint lookup for edges of child triangles (which are not edges of the
    // input mesh): marked original edges only ever appear whole in a child.
    std::map<std::pair<int, int>, int> midpoint_of_pair;
    for (const Edge& e : mesh.edges())
        if (midpoint_of_edge[e.id] >= 0)
            midpoint_of_pair[{e.vertex_ids[0], e.vertex_ids[1]}] = midpoint_of_edge[e.id];

    std::vector<Element> out;
    const auto split = [&](const auto& self, std::array<int, 3> v, int refedge, int gen) -> void {
        const int a = v[(refedge + 1) % 3], b = v[(refedge + 2) % 3], c = v[refedge];
        const auto it = midpoint_of_pair.find(edge_key(a, b));
        if (it == midpoint_of_pair.end()) {
            Element el;
            el.vertex_ids = v;
            el.refinement_edge = refedge;
            el.generation = gen;
            out.push_back(el);
            return;
        }
        const int mid = it->second;
        // Children (a, mid, c) and (mid, b, c); the new vertex `mid` is newest,
        // so each child refines next through the edge opposite `mid`.
        self(self, {a, mid, c}, 1, gen + 1);
        self(self, {mid, b, c}, 0, gen + 1);
    };
    for (const Element& el : mesh.elements())
        split(split, el.vertex_ids, el.refinement_edge, el.generation);

    return Mesh::build(std::move(vertices), std::move(out), mesh.domain_tag(),
                       mesh.disk_radius());
}

Mesh bisect_all(const Mesh& mesh) {
    std::unordered_set<int> all;
    for (const Element& el : mesh.elements()) all.insert(el.id);
    return bisect(mesh, all);
}

std::vector<Edge> boundary(const Mesh& mesh) {
    std::vector<Edge> out;
    for (const Edge& e : mesh.edges())
        if (e.is_boundary()) out.push_back(e);
    return out;
}

std::string check_conforming(const Mesh& mesh) {
    std::ostringstream oss;
    for (const Edge& e : mesh.edges()) {
        const int na = (e.adjacent_element_ids[0] >= 0) + (e.adjacent_element_ids[1] >= 0);
        if (na < 1 || na > 2) {
            oss << "edge " << e.id << " has " << na << " adjacent elements";
            return oss.str();
        }
    }
    // Angle sums: 2*pi around interior vertices, <= 2*pi on the boundary.
    std::vector<double> angle(mesh.num_vertices(), 0.0);
    for (const Element& el : mesh.elements()) {
        const auto p = mesh.element_coords(el.id);
        for (int k = 0; k < 3; ++k)
            angle[el.vertex_ids[k]] += corner_angle(p[k], p[(k + 1) % 3], p[(k + 2) % 3]);
    }
    for (const Vertex& v : mesh.vertices()) {
        const double target = 2.0 * std::numbers::pi;
        if (!mesh.vertex_on_boundary(v.id) && std::abs(angle[v.id] - target) > 1e-9) {
            oss << "interior vertex " << v.id << " has angle sum " << angle[v.id];
            return oss.str();
        }
        if (mesh.vertex_on_boundary(v.id) && angle[v.id] > target + 1e-9) {
            oss << "boundary vertex " << v.id << " has angle sum " << angle[v.id];
            return oss.str();
        }
    }
    // Hanging nodes: two edges meeting at a vertex must not overlap collinearly.
    for (const Vertex& v : mesh.vertices()) {
        std::vector<int> incident;
        for (int el : mesh.vertex_star(v.id))
            for (int e : mesh.element_edges(el)) {
                const Edge& ed = mesh.edges()[e];
                if (ed.vertex_ids[0] == v.id || ed.vertex_ids[1] == v.id) incident.push_back(e);
            }
        std::sort(incident.begin(), incident.end());
        incident.erase(std::unique(incident.begin(), incident.end()), incident.end());
        for (std::size_t i = 0; i < incident.size(); ++i) {
            for (std::size_t j = i + 1; j < incident.size(); ++j) {
                const Edge& a = mesh.edges()[incident[i]];
                const Edge& b = mesh.edges()[incident[j]];
                const int oa = a.vertex_ids[0] == v.id ? a.vertex_ids[1] : a.vertex_ids[0];
                const int ob = b.vertex_ids[0] == v.id ? b.vertex_ids[1] : b.vertex_ids[0];
                if (oa == ob) continue;
                const Vec2 da = mesh.vertices()[oa].coords - mesh.vertices()[v.id].coords;
                const Vec2 db = mesh.vertices()[ob].coords - mesh.vertices()[v.id].coords;
                const double cross = da.x() * db.y() - da.y() * db.x();
                if (std::abs(cross) < 1e-14 * da.norm() * db.norm() && da.dot(db) > 0.0) {
                    oss << "hanging node at vertex " << v.id;
                    return oss.str();
                }
            }
        }
    }
    return {};
}

}  // namespace fecvx
