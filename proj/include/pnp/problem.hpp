#pragma once

#include "pnp/geometry.hpp"
#include "pnp/mesh.hpp"
#include "pnp/norms.hpp"

#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace pnp {

/// Coefficients of the steady nonlinear PNP system
///
///   -div(α(x,p_i)∇p_i + β(x,p_i) + γ(x,p_i)∇φ) + g(x,p_i) = 0,   i = 1..n
///   -div(ε(x)∇φ) - Σ q_i p_i = f
///
/// Species coefficients take (species index, x, state value y). The `_y`
/// members are partial derivatives in y; `_grad_x` / `_div_x` are spatial
/// derivatives at fixed y (needed by the strong residual and by the
/// chain-rule divergences of the estimator).
struct CoefficientBundle {
  using Species = std::function<double(int, Vec2, double)>;
  using SpeciesVec = std::function<Vec2(int, Vec2, double)>;

  int n_species = 0;
  std::vector<double> charges;

  Species alpha, alpha_y;
  SpeciesVec alpha_grad_x;
  SpeciesVec beta, beta_y;
  Species beta_div_x;
  Species gamma, gamma_y;
  SpeciesVec gamma_grad_x;
  Species g, g_y;

  std::function<double(Vec2)> epsilon;
  std::function<Vec2(Vec2)> epsilon_grad;
  std::function<double(Vec2)> f;

  /// α is only known to stay positive for states in [state_min, state_max];
  /// the nonlinear solver aborts if a sample leaves this range.
  double state_min = -std::numeric_limits<double>::infinity();
  double state_max = std::numeric_limits<double>::infinity();
};

/// Bundle with α = ε = 1 and β = γ = g = f = 0 for n species.
CoefficientBundle make_trivial_bundle(int n_species, std::vector<double> charges);

/// Coefficients plus Dirichlet data. boundary_data[0] is for φ and
/// boundary_data[1+i] for p_i; an empty function means homogeneous data.
struct PnpProblem {
  CoefficientBundle coefficients;
  std::vector<std::function<double(Vec2)>> boundary_data;
  int quadrature_degree = 4;

  int n_species() const { return coefficients.n_species; }
};

/// Nodal Dirichlet values of unknown `unknown` (0 = φ, 1+i = p_i): boundary
/// vertices get the data, interior vertices 0.
std::vector<double> dirichlet_values(const Mesh& m, const PnpProblem& problem, int unknown);

/// A problem with a known exact solution.
struct ManufacturedCase {
  std::string name;
  PnpProblem problem;
  ExactField phi;
  std::vector<ExactField> p;
  std::vector<std::function<double(Vec2)>> species_sources;  // f_i
  std::function<double(Vec2)> poisson_source;                // f
  Vec2 singular_point;
  double exclusion_radius = 0.0;  // strong-residual checks skip this ball
};

/// Smooth ion-channel model on [0,1]^2: α(p) = 1 - 2p tanh(p) sech²(p),
/// γ = q_i p, g = -f_i, exact φ = sin(πx)sin(πy), p_k = sin(kπx)sin(kπy)
/// for k = 2, 3 and charges (1, -1).
ManufacturedCase make_sech2_case();

/// Case with a point singularity at the origin: α = 1, γ = q_i p,
/// g = p³ - f_i, exact φ = (x²+y²)^0.1 and p_k = sin(kπx)sin(kπy)/(2x²+2y²).
/// Uses the exact trace as Dirichlet data; p_k(0,0) is taken as 0.
ManufacturedCase make_singular_case();

/// "sech" or "singular"; throws std::invalid_argument otherwise.
ManufacturedCase make_case(const std::string& id);

/// Strong-form residuals (LHS - RHS) of each Nernst-Planck equation followed
/// by the Poisson equation, with the exact fields inserted. Throws
/// std::domain_error inside the exclusion ball.
std::vector<double> strong_residual(const ManufacturedCase& c, Vec2 x);

}  // namespace pnp
