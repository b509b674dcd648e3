#pragma once

#include "fecvx/geometry.hpp"

#include <array>
#include <string>
#include <unordered_set>
#include <vector>

namespace fecvx {

struct Vertex {
    int id = -1;
    Vec2 coords = Vec2::Zero();
};

/// Triangle with counter-clockwise vertex ordering. Local edge k is the edge
/// opposite vertex k, i.e. (v_{k+1}, v_{k+2}) modulo 3.
struct Element {
    int id = -1;
    std::array<int, 3> vertex_ids{-1, -1, -1};
    int refinement_edge = 0;  // local edge index used by newest-vertex bisection
    int generation = 0;

    std::array<int, 2> edge_vertices(int local_edge) const {
        return {vertex_ids[(local_edge + 1) % 3], vertex_ids[(local_edge + 2) % 3]};
    }
};

struct Edge {
    int id = -1;
    std::array<int, 2> vertex_ids{-1, -1};            // stored as (min, max)
    std::array<int, 2> adjacent_element_ids{-1, -1};  // second is -1 on the boundary
    Vec2 outward_normal = Vec2::Zero();               // unit normal, boundary edges only

    bool is_boundary() const { return adjacent_element_ids[1] < 0; }
};

enum class DomainTag { unit_square, rectangle, disk, polygon };

enum class Pattern { diagonal, chevron, crisscross, union_jack };

Pattern pattern_from_string(const std::string& name);
std::string to_string(Pattern p);
std::string to_string(DomainTag t);

/// Conforming 2D simplicial triangulation. Immutable after construction;
/// refinement returns a new mesh.
class Mesh {
  public:
    Mesh() = default;

    /// Builds edges, adjacency and normals from raw vertex/element data.
    /// Elements are re-oriented counter-clockwise if needed (the refinement
    /// edge index is remapped accordingly). Throws on degenerate elements or
    /// edges shared by more than two elements.
    static Mesh build(std::vector<Vertex> vertices, std::vector<Element> elements,
                      DomainTag tag, double disk_radius = 0.0);

    const std::vector<Vertex>& vertices() const { return vertices_; }
    const std::vector<Element>& elements() const { return elements_; }
    const std::vector<Edge>& edges() const { return edges_; }

    int num_vertices() const { return static_cast<int>(vertices_.size()); }
    int num_elements() const { return static_cast<int>(elements_.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }

    DomainTag domain_tag() const { return domain_tag_; }
    double disk_radius() const { return disk_radius_; }

    /// Global edge ids of element `e`, indexed by local edge.
    const std::array<int, 3>& element_edges(int e) const { return element_edges_[e]; }
    /// Ids of elements containing vertex `v`.
    const std::vector<int>& vertex_star(int v) const { return vertex_star_[v]; }

    bool vertex_on_boundary(int v) const { return vertex_on_boundary_[v]; }

    double element_area(int e) const;
    /// Longest edge length of element `e` (its diameter).
    double element_diameter(int e) const;
    double min_angle() const;
    double total_area() const;
    /// Largest element diameter.
    double mesh_size() const;

    Vec2 element_centroid(int e) const;
    std::array<Vec2, 3> element_coords(int e) const;

    /// Index of a vertex coinciding with `p` within `tol`, or -1.
    int find_vertex(const Vec2& p, double tol = 1e-12) const;

  private:
    std::vector<Vertex> vertices_;
    std::vector<Element> elements_;
    std::vector<Edge> edges_;
    std::vector<std::array<int, 3>> element_edges_;
    std::vector<std::vector<int>> vertex_star_;
    std::vector<bool> vertex_on_boundary_;
    DomainTag domain_tag_ = DomainTag::polygon;
    double disk_radius_ = 0.0;
};

/// Structured triangulations of a rectangle. `n` is the number of subdivisions
/// per side. Element counts: diagonal and chevron 2n^2, crisscross 4n^2,
/// union_jack 2n^2 (checkerboard-alternating diagonals; interior grid nodes
/// have 8 or 4 incident edges).
Mesh structured_mesh(Pattern pattern, int n, const Rect& rect = Rect::unit_square());

/// Polygonal approximation of the disk of given radius centered at the origin:
/// a fan of six equilateral triangles refined `level` times, with new boundary
/// vertices snapped radially onto the circle.
Mesh disk_mesh(double radius, int refinement_level);

/// Newest-vertex bisection of the marked elements, with recursive closure so
/// the result is conforming. Returns a new mesh; the input is not modified.
Mesh bisect(const Mesh& mesh, const std::unordered_set<int>& marked);

/// Convenience overload: bisect every element once (plus closure).
Mesh bisect_all(const Mesh& mesh);

/// The boundary edges of the mesh, with outward unit normals.
std::vector<Edge> boundary(const Mesh& mesh);

/// Checks conformity: edge adjacency counts, vertex angle sums, and absence of
/// hanging nodes on collinear edge pairs. Returns an empty string when the
/// mesh is conforming, otherwise a diagnostic.
std::string check_conforming(const Mesh& mesh);

}  // namespace fecvx
