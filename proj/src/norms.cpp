#include "pnp/norms.hpp"

#include "pnp/parallel.hpp"

#include <cmath>
#include <vector>

namespace pnp {

ErrorNorms h1_l2_errors(const FeFunction& f, const Mesh& m, const ExactField& exact, int quad_degree) {
  f.check_mesh(m);
  const QuadratureRule& rule = triangle_rule(quad_degree);
  const std::size_t nt = m.num_triangles();
  std::vector<double> l2(nt), semi(nt);
  parallel_for(nt, [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      const auto ti = static_cast<Index>(t);
      const ElementGeometry g = element_geometry(m, ti);
      const Triangle& tri = m.triangle(ti);
      const Vec2 grad = f.gradient(g, tri);
      double a = 0.0, b = 0.0;
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const Vec2 x = g.map(rule.points[q]);
        const double dv = exact.value(x) - value_at(f, tri, rule.points[q]);
        const Vec2 dg = exact.gradient(x) - grad;
        a += rule.weights[q] * dv * dv;
        b += rule.weights[q] * dot(dg, dg);
      }
      l2[t] = a * g.area;
      semi[t] = b * g.area;
    }
  });
  ErrorNorms e;
  for (std::size_t t = 0; t < nt; ++t) {
    e.l2 += l2[t];
    e.h1_seminorm += semi[t];
  }
  e.h1 = std::sqrt(e.l2 + e.h1_seminorm);
  e.l2 = std::sqrt(e.l2);
  e.h1_seminorm = std::sqrt(e.h1_seminorm);
  return e;
}

double h1_norm(const FeFunction& f, const Mesh& m) {
  f.check_mesh(m);
  double sum = 0.0;
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    const auto ti = static_cast<Index>(t);
    const ElementGeometry g = element_geometry(m, ti);
    const Triangle& tri = m.triangle(ti);
    const Vec2 grad = f.gradient(g, tri);
    const double a = f[tri[0]], b = f[tri[1]], c = f[tri[2]];
    // ∫ u^2 over a triangle for linear u, exact.
    const double mass = g.area / 6.0 * (a * a + b * b + c * c + a * b + b * c + c * a);
    sum += mass + g.area * dot(grad, grad);
  }
  return std::sqrt(sum);
}

}  // namespace pnp
