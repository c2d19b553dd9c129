#pragma once

#include "pnp/assembly.hpp"
#include "pnp/fe.hpp"
#include "pnp/mesh.hpp"
#include "pnp/problem.hpp"

#include <string>
#include <vector>

namespace pnp {

struct SolverConfig {
  double gummel_tol = 1e-12;  // relative H1 update between sweeps
  int gummel_max_iter = 50;
  double newton_tol = 1e-10;  // 2-norm of the free-DOF residual vector
  int newton_max_iter = 25;
  double damping_min = 1.0 / 1024.0;

  /// Throws std::invalid_argument on non-positive tolerances, iteration
  /// counts below 1, or damping_min outside (0, 1].
  void validate() const;
};

struct ConvergenceEntry {
  int iteration = 0;
  std::string unknown;  // "phi", "p1", ..., or "gummel" for the sweep update
  double residual = 0.0;
};

/// Discrete solution (φ_h, p_h^1..p_h^n) on one mesh.
struct CoupledState {
  FeFunction phi;
  std::vector<FeFunction> p;
  std::vector<ConvergenceEntry> log;
  std::vector<double> gummel_updates;
  int gummel_iterations = 0;
  bool converged = false;
};

struct NewtonResult {
  FeFunction solution;
  int iterations = 0;
  std::vector<double> residuals;  // residuals[0] is the initial residual
};

/// φ_h with ã(φ_h, w) = (Σ q_i p_i + f, w) for all w in S_0^h.
FeFunction solve_poisson_given_p(const Mesh& m, const PnpProblem& problem, const std::vector<FeFunction>& p);

/// Damped Newton for a(p, v) + b(p, φ, v) = 0 with φ frozen. The Jacobian is
/// the full linearization (α∇δ + (α_y∇p + β_y + γ_y∇φ)δ, ∇v) + (g_y δ, v).
NewtonResult solve_np_given_phi(const Mesh& m, const PnpProblem& problem, int species, const FeFunction& phi,
                                const FeFunction& initial_guess, const SolverConfig& cfg);

/// Gummel iteration: Poisson solve, then each Nernst-Planck species in index
/// order, until the largest relative H1 update is at most cfg.gummel_tol.
/// Non-convergence is reported through CoupledState::converged.
CoupledState solve_coupled(const Mesh& m, const PnpProblem& problem, const SolverConfig& cfg,
                           const CoupledState* warm_start = nullptr);

/// Free-DOF weak residual vectors of the discrete equations.
Vector np_residual(const Mesh& m, const PnpProblem& problem, int species, const FeFunction& p,
                   const FeFunction& phi);
Vector poisson_residual(const Mesh& m, const PnpProblem& problem, const FeFunction& phi,
                        const std::vector<FeFunction>& p);

struct ResidualAudit {
  double poisson = 0.0;
  std::vector<double> species;
};
ResidualAudit audit_residuals(const Mesh& m, const PnpProblem& problem, const CoupledState& state);

/// Nodal transfer onto a mesh refined from `coarse`: inherited vertices keep
/// their values, new vertices take the mean of their parent edge.
FeFunction prolongate(const FeFunction& f, const Mesh& coarse, const Mesh& fine);
CoupledState transfer_state(const CoupledState& state, const Mesh& coarse, const Mesh& fine);

}  // namespace pnp
