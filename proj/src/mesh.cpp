#include "pnp/mesh.hpp"

#include "pnp/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>

namespace pnp {

namespace {

std::atomic<std::uint64_t> g_next_mesh_id{1};

std::uint64_t edge_key(Index a, Index b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

std::uint8_t longest_edge(const std::vector<Vec2>& v, const Triangle& t) {
  std::uint8_t best = 0;
  double best_len = -1.0;
  for (std::uint8_t k = 0; k < 3; ++k) {
    const double len = norm(v[t[(k + 2) % 3]] - v[t[(k + 1) % 3]]);
    // Exact ties keep the smaller opposite-vertex index.
    if (len > best_len || (len == best_len && t[k] < t[best])) {
      best = k;
      best_len = len;
    }
  }
  return best;
}

}  // namespace

Mesh::Mesh(std::vector<Vec2> vertices, std::vector<Triangle> triangles,
           std::vector<std::uint8_t> refinement_edge)
    : id_(g_next_mesh_id.fetch_add(1)),
      vertices_(std::move(vertices)),
      triangles_(std::move(triangles)),
      refinement_edge_(std::move(refinement_edge)) {
  const auto nv = static_cast<Index>(vertices_.size());
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    for (Index v : triangles_[t])
      if (v < 0 || v >= nv)
        throw MeshError("triangle " + std::to_string(t) + " references vertex " + std::to_string(v) +
                        " out of range");
    if (!(signed_area(static_cast<Index>(t)) > 0.0))
      throw MeshError("triangle " + std::to_string(t) + " has non-positive signed area");
  }
  if (refinement_edge_.empty()) {
    refinement_edge_.resize(triangles_.size());
    for (std::size_t t = 0; t < triangles_.size(); ++t)
      refinement_edge_[t] = longest_edge(vertices_, triangles_[t]);
  } else if (refinement_edge_.size() != triangles_.size()) {
    throw MeshError("refinement edge list size does not match triangle count");
  }
  build_topology();
}

void Mesh::build_topology() {
  const std::size_t nt = triangles_.size();
  std::unordered_map<std::uint64_t, Index> lookup;
  lookup.reserve(3 * nt);
  triangle_edges_.assign(nt, {0, 0, 0});
  edges_.clear();
  edge_triangles_.clear();
  edges_.reserve(3 * nt / 2 + 4);
  edge_triangles_.reserve(3 * nt / 2 + 4);

  for (std::size_t t = 0; t < nt; ++t) {
    const Triangle& tri = triangles_[t];
    for (int k = 0; k < 3; ++k) {
      const Index a = tri[(k + 1) % 3];
      const Index b = tri[(k + 2) % 3];
      const auto [it, inserted] = lookup.try_emplace(edge_key(a, b), static_cast<Index>(edges_.size()));
      if (inserted) {
        edges_.push_back({std::min(a, b), std::max(a, b)});
        edge_triangles_.push_back({static_cast<Index>(t), kNoTriangle});
      } else {
        auto& adj = edge_triangles_[it->second];
        if (adj[1] != kNoTriangle)
          throw MeshError("edge (" + std::to_string(a) + "," + std::to_string(b) +
                          ") has more than two incident triangles");
        adj[1] = static_cast<Index>(t);
      }
      triangle_edges_[t][k] = it->second;
    }
  }

  boundary_vertex_.assign(vertices_.size(), 0);
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    if (edge_triangles_[e][1] == kNoTriangle) {
      boundary_vertex_[edges_[e][0]] = 1;
      boundary_vertex_[edges_[e][1]] = 1;
    }
  }
}

std::array<Vec2, 3> Mesh::corners(Index t) const {
  const Triangle& tri = triangles_[t];
  return {vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]};
}

double Mesh::signed_area(Index t) const {
  const auto p = corners(t);
  return 0.5 * cross(p[1] - p[0], p[2] - p[0]);
}

double Mesh::diameter(Index t) const {
  const auto p = corners(t);
  return std::max({norm(p[1] - p[0]), norm(p[2] - p[1]), norm(p[0] - p[2])});
}

double Mesh::edge_length(Index e) const { return norm(vertices_[edges_[e][1]] - vertices_[edges_[e][0]]); }

double Mesh::min_angle_degrees() const {
  double min_angle = 180.0;
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto p = corners(static_cast<Index>(t));
    for (int k = 0; k < 3; ++k) {
      const Vec2 u = p[(k + 1) % 3] - p[k];
      const Vec2 w = p[(k + 2) % 3] - p[k];
      const double angle = std::atan2(std::abs(cross(u, w)), dot(u, w));
      min_angle = std::min(min_angle, angle * 180.0 / std::numbers::pi);
    }
  }
  return min_angle;
}

Mesh with_refinement_history(Mesh m, Index first_new, std::vector<EdgeVertices> parents) {
  m.first_new_vertex_ = first_new;
  m.new_vertex_parents_ = std::move(parents);
  return m;
}

Mesh make_uniform_unit_square(int n) {
  if (n < 1) throw MeshError("make_uniform_unit_square requires n >= 1");
  std::vector<Vec2> vertices;
  vertices.reserve(static_cast<std::size_t>((n + 1) * (n + 1)));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      vertices.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});

  const auto id = [n](int i, int j) { return static_cast<Index>(j * (n + 1) + i); };
  std::vector<Triangle> triangles;
  triangles.reserve(static_cast<std::size_t>(2 * n * n));
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return Mesh(std::move(vertices), std::move(triangles));
}

PatchIndex patches(const Mesh& m) {
  PatchIndex p;
  p.vertex_to_triangles.resize(m.num_vertices());
  for (std::size_t t = 0; t < m.num_triangles(); ++t)
    for (Index v : m.triangle(static_cast<Index>(t))) p.vertex_to_triangles[v].push_back(static_cast<Index>(t));

  p.edge_to_triangles.resize(m.num_edges());
  for (std::size_t e = 0; e < m.num_edges(); ++e) p.edge_to_triangles[e] = m.edge_triangles(static_cast<Index>(e));

  p.triangle_to_neighbors_sharing_vertex.resize(m.num_triangles());
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    auto& nb = p.triangle_to_neighbors_sharing_vertex[t];
    for (Index v : m.triangle(static_cast<Index>(t)))
      nb.insert(nb.end(), p.vertex_to_triangles[v].begin(), p.vertex_to_triangles[v].end());
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
  return p;
}

Mesh refine_uniform(const Mesh& m) {
  std::vector<Vec2> vertices = m.vertices();
  const auto first_new = static_cast<Index>(vertices.size());
  std::vector<EdgeVertices> parents;
  parents.reserve(m.num_edges());

  // One midpoint per edge, numbered in edge order.
  for (const auto& e : m.edges()) {
    vertices.push_back(midpoint(m.vertex(e[0]), m.vertex(e[1])));
    parents.push_back(e);
  }

  std::vector<Triangle> triangles;
  triangles.reserve(4 * m.num_triangles());
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    const Triangle& v = m.triangle(static_cast<Index>(t));
    const auto& e = m.triangle_edges(static_cast<Index>(t));
    const Index m0 = first_new + e[0];
    const Index m1 = first_new + e[1];
    const Index m2 = first_new + e[2];
    triangles.push_back({v[0], m2, m1});
    triangles.push_back({m2, v[1], m0});
    triangles.push_back({m1, m0, v[2]});
    triangles.push_back({m0, m1, m2});
  }

  Mesh fine(std::move(vertices), std::move(triangles));
  audit_conformity(fine);
  assert_shape_regular(fine);
  return with_refinement_history(std::move(fine), first_new, std::move(parents));
}

Mesh refine_marked(const Mesh& m, const MarkSet& marks) {
  if (marks.empty()) return m;

  const auto nt = static_cast<Index>(m.num_triangles());
  std::vector<std::uint8_t> edge_marked(m.num_edges(), 0);
  std::vector<Index> work;
  for (Index t : marks) {
    if (t < 0 || t >= nt) throw MeshError("mark index " + std::to_string(t) + " out of range");
    edge_marked[m.triangle_edges(t)[m.refinement_edge(t)]] = 1;
    work.push_back(t);
  }

  // Closure: a triangle with any marked edge must also bisect its refinement
  // edge. Marking a new edge can force both of its incident triangles.
  const auto enqueue_edge_neighbors = [&](Index e) {
    for (Index t : m.edge_triangles(e))
      if (t != kNoTriangle) work.push_back(t);
  };
  for (Index t : marks) enqueue_edge_neighbors(m.triangle_edges(t)[m.refinement_edge(t)]);
  while (!work.empty()) {
    const Index t = work.back();
    work.pop_back();
    const auto& te = m.triangle_edges(t);
    const Index ref = te[m.refinement_edge(t)];
    if (edge_marked[ref]) continue;
    if (edge_marked[te[0]] || edge_marked[te[1]] || edge_marked[te[2]]) {
      edge_marked[ref] = 1;
      enqueue_edge_neighbors(ref);
    }
  }

  std::vector<Vec2> vertices = m.vertices();
  const auto first_new = static_cast<Index>(vertices.size());
  std::vector<EdgeVertices> parents;
  std::unordered_map<std::uint64_t, Index> midpoints;
  for (std::size_t e = 0; e < m.num_edges(); ++e) {
    if (!edge_marked[e]) continue;
    const auto& ev = m.edges()[e];
    midpoints.emplace(edge_key(ev[0], ev[1]), static_cast<Index>(vertices.size()));
    vertices.push_back(midpoint(m.vertex(ev[0]), m.vertex(ev[1])));
    parents.push_back(ev);
  }

  std::vector<Triangle> triangles;
  std::vector<std::uint8_t> ref_edges;
  triangles.reserve(m.num_triangles() + 3 * parents.size());
  ref_edges.reserve(triangles.capacity());

  // Triangles are carried as (newest, b, c) with refinement edge (b, c).
  // Children's refinement edges are edges of the parent mesh, so every
  // bisected edge has a precomputed midpoint.
  struct Pending {
    Index newest, b, c;
  };
  std::vector<Pending> stack;
  for (Index t = 0; t < nt; ++t) {
    const Triangle& v = m.triangle(t);
    const int r = m.refinement_edge(t);
    stack.push_back({v[r], v[(r + 1) % 3], v[(r + 2) % 3]});
    while (!stack.empty()) {
      const Pending p = stack.back();
      stack.pop_back();
      const auto it = midpoints.find(edge_key(p.b, p.c));
      if (it == midpoints.end()) {
        triangles.push_back({p.newest, p.b, p.c});
        ref_edges.push_back(0);
        continue;
      }
      const Index mid = it->second;
      stack.push_back({mid, p.c, p.newest});
      stack.push_back({mid, p.newest, p.b});
    }
  }

  Mesh fine(std::move(vertices), std::move(triangles), std::move(ref_edges));
  audit_conformity(fine);
  assert_shape_regular(fine);
  return with_refinement_history(std::move(fine), first_new, std::move(parents));
}

MeshSize mesh_size(const Mesh& m) {
  MeshSize s;
  s.per_triangle_diameter.resize(m.num_triangles());
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    s.per_triangle_diameter[t] = m.diameter(static_cast<Index>(t));
    s.h_max = std::max(s.h_max, s.per_triangle_diameter[t]);
  }
  return s;
}

void audit_conformity(const Mesh& m) {
  // Edge multiplicity and orientation are enforced by the Mesh constructor.
  // A hanging node shows up as a vertex sitting at the midpoint of an edge
  // that topologically lies on the boundary.
  struct Hash {
    std::size_t operator()(const std::pair<double, double>& p) const {
      return std::hash<double>()(p.first) * 31u ^ std::hash<double>()(p.second);
    }
  };
  std::unordered_set<std::pair<double, double>, Hash> coords;
  coords.reserve(m.num_vertices());
  for (const auto& v : m.vertices()) coords.insert({v.x, v.y});
  for (std::size_t e = 0; e < m.num_edges(); ++e) {
    if (!m.is_boundary_edge(static_cast<Index>(e))) continue;
    const auto& ev = m.edges()[e];
    const Vec2 mid = midpoint(m.vertex(ev[0]), m.vertex(ev[1]));
    if (coords.contains({mid.x, mid.y}))
      throw MeshError("hanging node at the midpoint of edge (" + std::to_string(ev[0]) + "," +
                      std::to_string(ev[1]) + ")");
  }
}

void assert_shape_regular(const Mesh& m, double floor_degrees) {
  const double angle = m.min_angle_degrees();
  if (angle < floor_degrees)
    throw MeshError("minimum angle " + std::to_string(angle) + " below floor " + std::to_string(floor_degrees));
}

}  // namespace pnp
