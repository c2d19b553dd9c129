#pragma once

#include "pnp/fe.hpp"
#include "pnp/mesh.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace pnp {

/// How element contributions are averaged at a vertex z with patch ω_z:
/// uniform gives 1/J_z each, area gives |τ|/|ω_z|.
enum class WeightScheme { uniform, area };

WeightScheme parse_weight_scheme(const std::string& name);
std::string to_string(WeightScheme w);

/// Convex weights α_z^j, listed in the order of patches(m).vertex_to_triangles[z].
std::vector<std::vector<double>> patch_weights(const Mesh& m, WeightScheme scheme);

/// Continuous piecewise-linear vector field given by its vertex values.
struct RecoveredField {
  std::uint64_t mesh_id = 0;
  std::vector<Vec2> values;

  Vec2 evaluate(const Mesh& m, Index t, const std::array<double, 3>& bary) const;
};

/// G̃_h v: averaged element gradients.
RecoveredField gradient_recover(const FeFunction& v, const Mesh& m, WeightScheme scheme = WeightScheme::area);

/// Coefficient a(x, y) with y the state value.
using StateCoefficient = std::function<double(Vec2, double)>;

/// G_h v: each incident element gradient is scaled by a(z, v(z)) evaluated at
/// the vertex itself, then averaged.
RecoveredField flux_recover(const FeFunction& v, const Mesh& m, const StateCoefficient& coefficient,
                            WeightScheme scheme = WeightScheme::area);

/// π_h v with v_z = (v, φ_z)/(φ_z, 1) at interior vertices and 0 on ∂Ω.
FeFunction clement_pi(const Mesh& m, const ScalarField& v, int quad_degree = 4);

/// One-sided vertex value of a field on element t at local vertex k.
using ElementTrace = std::function<double(Index t, int k)>;

/// Π_h v with v^z = Σ_j α_z^j v|_{τ_j}(z) at every vertex.
FeFunction clement_Pi(const Mesh& m, const ElementTrace& v, WeightScheme scheme = WeightScheme::area);

/// Element-wise divergence (constant per triangle) of a recovered field.
std::vector<double> recovered_divergence(const RecoveredField& r, const Mesh& m);

}  // namespace pnp
