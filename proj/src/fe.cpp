#include "pnp/fe.hpp"

#include "pnp/errors.hpp"

#include <string>

namespace pnp {

ElementGeometry element_geometry(const std::array<Vec2, 3>& p) {
  ElementGeometry g;
  g.corners = p;
  const double twice_area = cross(p[1] - p[0], p[2] - p[0]);
  g.area = 0.5 * twice_area;
  const double inv = 1.0 / twice_area;
  g.grad_lambda[0] = Vec2{p[1].y - p[2].y, p[2].x - p[1].x} * inv;
  g.grad_lambda[1] = Vec2{p[2].y - p[0].y, p[0].x - p[2].x} * inv;
  g.grad_lambda[2] = Vec2{p[0].y - p[1].y, p[1].x - p[0].x} * inv;
  return g;
}

ElementGeometry element_geometry(const Mesh& m, Index t) { return element_geometry(m.corners(t)); }

FeFunction::FeFunction(const Mesh& m, std::vector<double> coefficients)
    : mesh_id_(m.id()), coefficients_(std::move(coefficients)) {
  if (coefficients_.size() != m.num_vertices())
    throw MeshMismatchError("FeFunction has " + std::to_string(coefficients_.size()) +
                            " coefficients but the mesh has " + std::to_string(m.num_vertices()) + " vertices");
}

void FeFunction::check_mesh(const Mesh& m) const {
  if (mesh_id_ != m.id() || coefficients_.size() != m.num_vertices())
    throw MeshMismatchError("FeFunction does not live on mesh " + std::to_string(m.id()));
}

double FeFunction::value(const Mesh& m, Index t, const std::array<double, 3>& bary) const {
  return value_at(*this, m.triangle(t), bary);
}

Vec2 FeFunction::gradient(const ElementGeometry& g, const Triangle& tri) const {
  return g.grad_lambda[0] * coefficients_[tri[0]] + g.grad_lambda[1] * coefficients_[tri[1]] +
         g.grad_lambda[2] * coefficients_[tri[2]];
}

Vec2 FeFunction::gradient(const Mesh& m, Index t) const { return gradient(element_geometry(m, t), m.triangle(t)); }

PointEvaluation evaluate(const FeFunction& f, const Mesh& m, Index t, const std::array<double, 3>& bary) {
  f.check_mesh(m);
  return {f.value(m, t, bary), f.gradient(m, t)};
}

FeFunction interpolate(const Mesh& m, const std::function<double(Vec2)>& fn) {
  std::vector<double> c(m.num_vertices());
  for (std::size_t v = 0; v < c.size(); ++v) c[v] = fn(m.vertex(static_cast<Index>(v)));
  return FeFunction(m, std::move(c));
}

}  // namespace pnp
