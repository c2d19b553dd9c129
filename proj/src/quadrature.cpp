#include "pnp/quadrature.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace pnp {

namespace {

void add_orbit3(QuadratureRule& r, double a, double w) {
  const double b = 1.0 - 2.0 * a;
  r.points.push_back({b, a, a});
  r.points.push_back({a, b, a});
  r.points.push_back({a, a, b});
  r.weights.insert(r.weights.end(), 3, w);
}

QuadratureRule make_degree1() {
  QuadratureRule r;
  r.degree = 1;
  r.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
  r.weights.push_back(1.0);
  return r;
}

QuadratureRule make_degree2() {
  QuadratureRule r;
  r.degree = 2;
  add_orbit3(r, 1.0 / 6.0, 1.0 / 3.0);
  return r;
}

// Strang-Fix / Dunavant 6-point rule, closed-form nodes and weights.
QuadratureRule make_degree4() {
  QuadratureRule r;
  r.degree = 4;
  const double s = std::sqrt(38.0 - 44.0 * std::sqrt(2.0 / 5.0));
  const double t = std::sqrt(213125.0 - 53320.0 * std::sqrt(10.0));
  add_orbit3(r, (8.0 - std::sqrt(10.0) + s) / 18.0, (620.0 + t) / 3720.0);
  add_orbit3(r, (8.0 - std::sqrt(10.0) - s) / 18.0, (620.0 - t) / 3720.0);
  return r;
}

// Collapsed (Duffy) tensor rule: x = u, y = (1-u) v on the unit square, with
// Jacobian (1-u). n Gauss points per direction integrate degree 2n-2 exactly.
QuadratureRule make_collapsed(int n, int degree) {
  const LineRule g = gauss_legendre_unit(n);
  QuadratureRule r;
  r.degree = degree;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double u = g.points[i];
      const double v = g.points[j];
      const double x = u;
      const double y = (1.0 - u) * v;
      r.points.push_back({1.0 - x - y, x, y});
      // Reference area 1/2 is normalised away.
      r.weights.push_back(2.0 * g.weights[i] * g.weights[j] * (1.0 - u));
    }
  }
  return r;
}

}  // namespace

LineRule gauss_legendre_unit(int n) {
  if (n < 1) throw std::invalid_argument("Gauss-Legendre rule needs n >= 1");
  // Golub-Welsch on the Legendre Jacobi matrix.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  LineRule rule;
  for (int k = 0; k < n; ++k) {
    const double v0 = eig.eigenvectors()(0, k);
    rule.points.push_back(0.5 * (eig.eigenvalues()(k) + 1.0));
    rule.weights.push_back(v0 * v0);
  }
  return rule;
}

const QuadratureRule& triangle_rule(int degree) {
  static const QuadratureRule d1 = make_degree1();
  static const QuadratureRule d2 = make_degree2();
  static const QuadratureRule d4 = make_degree4();
  static const QuadratureRule d10 = make_collapsed(6, 10);
  if (degree <= 1) return d1;
  if (degree <= 2) return d2;
  if (degree <= 4) return d4;
  if (degree <= 10) return d10;
  throw std::invalid_argument("no built-in triangle rule of degree " + std::to_string(degree));
}

}  // namespace pnp
