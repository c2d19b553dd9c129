#pragma once

#include "pnp/fe.hpp"
#include "pnp/mesh.hpp"
#include "pnp/quadrature.hpp"

#include <functional>

namespace pnp {

/// Pointwise field with its gradient and Laplacian (the Laplacian is only
/// needed for manufactured-source checks and may be left empty elsewhere).
struct ExactField {
  std::function<double(Vec2)> value;
  std::function<Vec2(Vec2)> gradient;
  std::function<double(Vec2)> laplacian;
};

struct ErrorNorms {
  double l2 = 0.0;
  double h1_seminorm = 0.0;
  double h1 = 0.0;  // sqrt(l2^2 + h1_seminorm^2)
};

ErrorNorms h1_l2_errors(const FeFunction& f, const Mesh& m, const ExactField& exact,
                        int quad_degree = kDefaultQuadratureDegree);

/// Discrete H1 norm of an FeFunction (exact for P1 with a degree >= 2 rule).
double h1_norm(const FeFunction& f, const Mesh& m);

}  // namespace pnp
