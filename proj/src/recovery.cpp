#include "pnp/recovery.hpp"

#include "pnp/errors.hpp"
#include "pnp/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace pnp {

namespace {

void check_field(const RecoveredField& r, const Mesh& m) {
  if (r.mesh_id != m.id() || r.values.size() != m.num_vertices())
    throw MeshMismatchError("recovered field does not belong to this mesh");
}

// Σ_j w_j c_j / Σ_j w_j over each vertex patch, where c_j = contribution(t, k)
// for local vertex k of element t.
template <class T, class Contribution>
std::vector<T> average_over_patches(const Mesh& m, WeightScheme scheme, const Contribution& contribution) {
  std::vector<T> sum(m.num_vertices(), T{});
  std::vector<double> total(m.num_vertices(), 0.0);
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    const auto ti = static_cast<Index>(t);
    const double w = scheme == WeightScheme::area ? std::abs(m.signed_area(ti)) : 1.0;
    const Triangle& tri = m.triangle(ti);
    for (int k = 0; k < 3; ++k) {
      sum[tri[k]] = sum[tri[k]] + contribution(ti, k) * w;
      total[tri[k]] += w;
    }
  }
  for (std::size_t v = 0; v < sum.size(); ++v)
    if (total[v] > 0.0) sum[v] = sum[v] * (1.0 / total[v]);
  return sum;
}

}  // namespace

WeightScheme parse_weight_scheme(const std::string& name) {
  if (name == "area") return WeightScheme::area;
  if (name == "uniform") return WeightScheme::uniform;
  throw std::invalid_argument("unknown weight scheme '" + name + "' (expected 'area' or 'uniform')");
}

std::string to_string(WeightScheme w) { return w == WeightScheme::area ? "area" : "uniform"; }

std::vector<std::vector<double>> patch_weights(const Mesh& m, WeightScheme scheme) {
  const PatchIndex p = patches(m);
  std::vector<std::vector<double>> weights(m.num_vertices());
  for (std::size_t z = 0; z < m.num_vertices(); ++z) {
    const auto& tris = p.vertex_to_triangles[z];
    double total = 0.0;
    for (Index t : tris) {
      const double w = scheme == WeightScheme::area ? std::abs(m.signed_area(t)) : 1.0;
      weights[z].push_back(w);
      total += w;
    }
    for (double& w : weights[z]) w /= total;
  }
  return weights;
}

Vec2 RecoveredField::evaluate(const Mesh& m, Index t, const std::array<double, 3>& bary) const {
  const Triangle& tri = m.triangle(t);
  return values[tri[0]] * bary[0] + values[tri[1]] * bary[1] + values[tri[2]] * bary[2];
}

RecoveredField gradient_recover(const FeFunction& v, const Mesh& m, WeightScheme scheme) {
  return flux_recover(v, m, [](Vec2, double) { return 1.0; }, scheme);
}

RecoveredField flux_recover(const FeFunction& v, const Mesh& m, const StateCoefficient& coefficient,
                            WeightScheme scheme) {
  v.check_mesh(m);
  std::vector<Vec2> grads(m.num_triangles());
  for (std::size_t t = 0; t < grads.size(); ++t) grads[t] = v.gradient(m, static_cast<Index>(t));
  std::vector<double> vertex_coef(m.num_vertices());
  for (std::size_t z = 0; z < vertex_coef.size(); ++z) {
    const double a = coefficient(m.vertex(static_cast<Index>(z)), v[z]);
    if (!std::isfinite(a))
      throw AssemblyError("recovery coefficient is not finite at vertex " + std::to_string(z));
    vertex_coef[z] = a;
  }
  RecoveredField r;
  r.mesh_id = m.id();
  r.values = average_over_patches<Vec2>(
      m, scheme, [&](Index t, int k) { return grads[t] * vertex_coef[m.triangle(t)[k]]; });
  return r;
}

FeFunction clement_pi(const Mesh& m, const ScalarField& v, int quad_degree) {
  const QuadratureRule& rule = triangle_rule(quad_degree);
  std::vector<double> num(m.num_vertices(), 0.0), den(m.num_vertices(), 0.0);
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    const auto ti = static_cast<Index>(t);
    const ElementGeometry g = element_geometry(m, ti);
    const Triangle& tri = m.triangle(ti);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto& bary = rule.points[q];
      const double val = v({ti, g.map(bary), bary});
      const double w = rule.weights[q] * g.area;
      for (int k = 0; k < 3; ++k) num[tri[k]] += w * val * bary[k];
    }
    // (φ_z, 1) = |τ|/3 on each incident element.
    for (int k = 0; k < 3; ++k) den[tri[k]] += g.area / 3.0;
  }
  std::vector<double> c(m.num_vertices(), 0.0);
  for (std::size_t z = 0; z < c.size(); ++z)
    if (!m.is_boundary_vertex(static_cast<Index>(z))) c[z] = num[z] / den[z];
  return FeFunction(m, std::move(c));
}

FeFunction clement_Pi(const Mesh& m, const ElementTrace& v, WeightScheme scheme) {
  return FeFunction(m, average_over_patches<double>(m, scheme, v));
}

std::vector<double> recovered_divergence(const RecoveredField& r, const Mesh& m) {
  check_field(r, m);
  std::vector<double> div(m.num_triangles());
  for (std::size_t t = 0; t < div.size(); ++t) {
    const auto ti = static_cast<Index>(t);
    const ElementGeometry g = element_geometry(m, ti);
    const Triangle& tri = m.triangle(ti);
    double d = 0.0;
    for (int k = 0; k < 3; ++k) d += dot(r.values[tri[k]], g.grad_lambda[k]);
    div[t] = d;
  }
  return div;
}

}  // namespace pnp
