#pragma once

#include "pnp/geometry.hpp"
#include "pnp/mesh.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

namespace pnp {

/// Affine data of one triangle. The P1 basis on it is the barycentric
/// coordinates λ_k, with constant gradients grad_lambda[k].
struct ElementGeometry {
  std::array<Vec2, 3> corners;
  double area = 0.0;
  std::array<Vec2, 3> grad_lambda;

  Vec2 map(const std::array<double, 3>& bary) const {
    return corners[0] * bary[0] + corners[1] * bary[1] + corners[2] * bary[2];
  }
};

ElementGeometry element_geometry(const std::array<Vec2, 3>& corners);
ElementGeometry element_geometry(const Mesh& m, Index t);

/// Context handed to coefficient fields at each quadrature point.
struct QuadPoint {
  Index triangle = 0;
  Vec2 x;
  std::array<double, 3> bary{};
};

using ScalarField = std::function<double(const QuadPoint&)>;
using VectorField = std::function<Vec2(const QuadPoint&)>;

/// Continuous piecewise-linear function: one coefficient per mesh vertex.
class FeFunction {
 public:
  FeFunction() = default;
  explicit FeFunction(const Mesh& m) : mesh_id_(m.id()), coefficients_(m.num_vertices(), 0.0) {}
  FeFunction(const Mesh& m, std::vector<double> coefficients);

  std::uint64_t mesh_id() const { return mesh_id_; }
  const std::vector<double>& coefficients() const { return coefficients_; }
  std::vector<double>& coefficients() { return coefficients_; }
  std::size_t size() const { return coefficients_.size(); }
  double operator[](std::size_t v) const { return coefficients_[v]; }

  /// Throws MeshMismatchError unless this function lives on m.
  void check_mesh(const Mesh& m) const;

  double value(const Mesh& m, Index t, const std::array<double, 3>& bary) const;
  /// Constant on each triangle.
  Vec2 gradient(const Mesh& m, Index t) const;
  Vec2 gradient(const ElementGeometry& g, const Triangle& tri) const;

 private:
  std::uint64_t mesh_id_ = 0;
  std::vector<double> coefficients_;
};

struct PointEvaluation {
  double value = 0.0;
  Vec2 gradient;
};

PointEvaluation evaluate(const FeFunction& f, const Mesh& m, Index t, const std::array<double, 3>& bary);

/// Nodal interpolant of a pointwise function.
FeFunction interpolate(const Mesh& m, const std::function<double(Vec2)>& fn);

/// Value of f at a quadrature point, from the three vertex coefficients.
inline double value_at(const FeFunction& f, const Triangle& tri, const std::array<double, 3>& bary) {
  return f[tri[0]] * bary[0] + f[tri[1]] * bary[1] + f[tri[2]] * bary[2];
}

}  // namespace pnp
