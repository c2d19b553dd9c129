#pragma once

#include "pnp/mesh.hpp"
#include "pnp/problem.hpp"
#include "pnp/recovery.hpp"
#include "pnp/solver.hpp"

#include <optional>
#include <vector>

namespace pnp {

/// Per-element terms of the potential indicator.
struct PhiTerms {
  std::vector<double> d_phi;  // ‖G_h φ_h − ε∇φ_h‖_τ
  std::vector<double> h_r1;   // h_τ ‖Σ q_i p_i + div G_h φ_h + f‖_τ
};

/// Per-element terms of one species indicator.
struct SpeciesTerms {
  std::vector<double> d_p;    // ‖G_h p_h − α(x,p_h)∇p_h‖_τ
  std::vector<double> drift;  // ‖γ(x,p_h)(G̃_h φ_h − ∇φ_h)‖_τ
  std::vector<double> h_r2;   // h_τ ‖R_2h‖_τ
};

struct EstimatorReport {
  std::uint64_t mesh_id = 0;
  std::vector<double> eta_phi;
  std::vector<std::vector<double>> eta_p;
  PhiTerms phi_terms;
  std::vector<SpeciesTerms> p_terms;
  double global_eta_phi = 0.0;
  std::vector<double> global_eta_p;
};

/// η_τ,φ = ‖D_h φ_h‖ + h_τ‖R_1h‖ per element.
std::vector<double> estimate_phi(const Mesh& m, const PnpProblem& problem, const CoupledState& state,
                                 WeightScheme scheme = WeightScheme::area, PhiTerms* terms = nullptr);

/// η_τ,p = ‖D_h p_h‖ + ‖D_h φ_h‖ + ‖γ(G̃_h φ_h − ∇φ_h)‖ + h_τ(‖R_1h‖ + ‖R_2h‖).
std::vector<double> estimate_p(const Mesh& m, const PnpProblem& problem, const CoupledState& state, int species,
                               WeightScheme scheme = WeightScheme::area, SpeciesTerms* terms = nullptr);

/// All indicators and their root-sum-square aggregates.
EstimatorReport estimate(const Mesh& m, const PnpProblem& problem, const CoupledState& state,
                         WeightScheme scheme = WeightScheme::area);

double aggregate(const std::vector<double>& eta);

/// h_l^{1/2} ‖[coefficient ∇u · n]‖_{0,l} on each interior edge, for φ_h with ε
/// and for each p_h with α(x, p_h). Boundary edges hold 0.
struct JumpDiagnostics {
  std::vector<double> phi;
  std::vector<std::vector<double>> p;
};
JumpDiagnostics jump_diagnostics(const Mesh& m, const PnpProblem& problem, const CoupledState& state);

/// η / e for each unknown (φ first). Throws std::invalid_argument on a zero
/// or missing error.
std::vector<double> effectivity(const EstimatorReport& report, const std::vector<double>& true_errors);

}  // namespace pnp
