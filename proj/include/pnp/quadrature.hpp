#pragma once

#include <array>
#include <vector>

namespace pnp {

/// Quadrature on the reference triangle. Points are barycentric coordinates;
/// weights sum to 1, so a physical integral is area * sum(w_q f(x_q)).
struct QuadratureRule {
  int degree = 0;
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
};

/// Smallest built-in rule exact to at least the requested degree. Built-in
/// degrees are 1, 2, 4 (6 points) and 10 (36-point collapsed Gauss rule, no
/// nodes on the boundary). Requests above 10 throw std::invalid_argument.
const QuadratureRule& triangle_rule(int degree);

inline constexpr int kDefaultQuadratureDegree = 4;
inline constexpr int kReferenceQuadratureDegree = 10;

/// Gauss-Legendre rule on [0, 1] with n points (exact to degree 2n-1).
struct LineRule {
  std::vector<double> points;
  std::vector<double> weights;
};
LineRule gauss_legendre_unit(int n);

}  // namespace pnp
