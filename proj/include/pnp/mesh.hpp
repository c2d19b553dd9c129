#pragma once

#include "pnp/geometry.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace pnp {

using Triangle = std::array<Index, 3>;
using EdgeVertices = std::array<Index, 2>;

inline constexpr Index kNoTriangle = -1;

/// Conforming 2D triangulation.
///
/// Triangles are stored counter-clockwise. Local edge k of a triangle is the
/// edge opposite local vertex k. The refinement edge of triangle t is local
/// edge refinement_edge(t); its opposite vertex is the "newest vertex" of
/// newest-vertex bisection.
///
/// A Mesh is immutable once constructed; refinement produces a new Mesh whose
/// first num_vertices() of the parent are the parent's vertices, unchanged.
class Mesh {
 public:
  /// Builds topology and validates orientation and conformity. When
  /// refinement_edge is empty, each triangle's longest edge is chosen (ties
  /// broken by the smallest opposite-vertex index).
  Mesh(std::vector<Vec2> vertices, std::vector<Triangle> triangles,
       std::vector<std::uint8_t> refinement_edge = {});

  std::uint64_t id() const { return id_; }

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_triangles() const { return triangles_.size(); }
  std::size_t num_edges() const { return edges_.size(); }

  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const std::vector<EdgeVertices>& edges() const { return edges_; }

  const Vec2& vertex(Index v) const { return vertices_[v]; }
  const Triangle& triangle(Index t) const { return triangles_[t]; }
  std::array<Vec2, 3> corners(Index t) const;

  /// Edge indices of triangle t, local edge k opposite local vertex k.
  const std::array<Index, 3>& triangle_edges(Index t) const { return triangle_edges_[t]; }
  /// Incident triangles of edge e; the second entry is kNoTriangle on ∂Ω.
  const std::array<Index, 2>& edge_triangles(Index e) const { return edge_triangles_[e]; }

  bool is_boundary_vertex(Index v) const { return boundary_vertex_[v] != 0; }
  bool is_boundary_edge(Index e) const { return edge_triangles_[e][1] == kNoTriangle; }
  const std::vector<std::uint8_t>& boundary_vertex_flags() const { return boundary_vertex_; }

  std::uint8_t refinement_edge(Index t) const { return refinement_edge_[t]; }
  const std::vector<std::uint8_t>& refinement_edges() const { return refinement_edge_; }

  double signed_area(Index t) const;
  /// Longest edge length of triangle t.
  double diameter(Index t) const;
  double edge_length(Index e) const;

  /// For meshes produced by refinement: parent-edge endpoints of every vertex
  /// created by the last refinement step, i.e. of vertices
  /// [first_new_vertex(), num_vertices()). Empty for initial meshes.
  Index first_new_vertex() const { return first_new_vertex_; }
  const std::vector<EdgeVertices>& new_vertex_parents() const { return new_vertex_parents_; }

  /// Smallest interior angle over all triangles, in degrees.
  double min_angle_degrees() const;

 private:
  friend Mesh with_refinement_history(Mesh, Index, std::vector<EdgeVertices>);

  void build_topology();

  std::uint64_t id_;
  std::vector<Vec2> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<std::uint8_t> refinement_edge_;
  std::vector<EdgeVertices> edges_;
  std::vector<std::array<Index, 3>> triangle_edges_;
  std::vector<std::array<Index, 2>> edge_triangles_;
  std::vector<std::uint8_t> boundary_vertex_;
  Index first_new_vertex_ = 0;
  std::vector<EdgeVertices> new_vertex_parents_;
};

/// ω_z, ω_l and ω_τ for every vertex, edge and triangle.
struct PatchIndex {
  std::vector<std::vector<Index>> vertex_to_triangles;
  std::vector<std::array<Index, 2>> edge_to_triangles;
  /// Includes the triangle itself.
  std::vector<std::vector<Index>> triangle_to_neighbors_sharing_vertex;
};

using MarkSet = std::vector<Index>;

struct MeshSize {
  double h_max = 0.0;
  std::vector<double> per_triangle_diameter;
};

/// (n+1)^2 vertices on [0,1]^2, each cell split along its (0,0)-(1,1) diagonal.
Mesh make_uniform_unit_square(int n);

PatchIndex patches(const Mesh& m);

/// Red refinement: every triangle into four similar children.
Mesh refine_uniform(const Mesh& m);

/// Newest-vertex bisection of the marked triangles plus the closure needed to
/// keep the mesh conforming. Marked indices must be valid triangle indices.
Mesh refine_marked(const Mesh& m, const MarkSet& marks);

MeshSize mesh_size(const Mesh& m);

/// Throws MeshError if any edge has more than two incident triangles, any
/// boundary edge is not on the outer boundary loop, or any area is
/// non-positive. Used after refinement and in tests.
void audit_conformity(const Mesh& m);

/// Throws MeshError if m.min_angle_degrees() < floor_degrees.
void assert_shape_regular(const Mesh& m, double floor_degrees = 20.0);

}  // namespace pnp
