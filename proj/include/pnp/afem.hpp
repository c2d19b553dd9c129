#pragma once

#include "pnp/estimator.hpp"
#include "pnp/mesh.hpp"
#include "pnp/problem.hpp"
#include "pnp/recovery.hpp"
#include "pnp/solver.hpp"

#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pnp {

enum class RefinementMode { uniform, adaptive };

RefinementMode parse_refinement_mode(const std::string& name);
std::string to_string(RefinementMode mode);

struct LoopConfig {
  double tol = 1e-2;
  double theta = 0.5;
  std::size_t max_dofs = 100000;  // no record is made on a mesh with more vertices
  int max_steps = 50;
  RefinementMode mode = RefinementMode::adaptive;
  WeightScheme weights = WeightScheme::area;
  int initial_n = 8;

  void validate() const;
};

/// One solve-estimate step. True errors are full H1 norms ‖u − u_h‖_{1,Ω}.
struct RunRecord {
  int step = 0;
  std::size_t dofs = 0;
  double h_max = 0.0;
  std::optional<double> e_phi;
  std::vector<std::optional<double>> e_p;
  double eta_phi = 0.0;
  std::vector<double> eta_p;
  std::optional<double> eff_phi;
  std::vector<std::optional<double>> eff_p;
  std::size_t marked = 0;
  int gummel_iterations = 0;
  double wall_seconds = 0.0;
};

/// Everything a caller may want to inspect after one step.
struct StepView {
  const RunRecord& record;
  const Mesh& mesh;
  const CoupledState& state;
  const EstimatorReport& report;
  const MarkSet& marks;  // empty on the final step and in uniform mode
};
using StepObserver = std::function<void(const StepView&)>;

/// Elements with η_φ ≥ θ max η_φ or η_{p_i} ≥ θ max η_{p_i} for some i. A family
/// whose indicators are all zero marks nothing.
MarkSet mark_maximum(const std::vector<double>& eta_phi, const std::vector<std::vector<double>>& eta_p, double theta);

/// Solve, estimate, stop if η_φ and every η_{p_i} are ≤ tol, mark, refine.
std::vector<RunRecord> adaptive_loop(const ManufacturedCase& c, const LoopConfig& cfg, const SolverConfig& solver_cfg,
                                     const StepObserver& observer = {});

/// Red refinement from the initial mesh until the next mesh would exceed max_dofs.
std::vector<RunRecord> uniform_loop(const ManufacturedCase& c, const LoopConfig& cfg, const SolverConfig& solver_cfg,
                                    const StepObserver& observer = {});

/// Dispatches on cfg.mode.
std::vector<RunRecord> run_study(const ManufacturedCase& c, const LoopConfig& cfg, const SolverConfig& solver_cfg,
                                 const StepObserver& observer = {});

/// Least-squares slope of log(value) against log(dofs) over the last
/// min(4, n) points. Throws std::invalid_argument for fewer than 3 points or
/// non-positive values.
double fit_slope(const std::vector<double>& dofs, const std::vector<double>& values);

/// Slopes keyed e_phi, e_p1, ..., eta_phi, eta_p1, ... (error keys only when
/// all records carry true errors).
std::map<std::string, double> fit_rate(const std::vector<RunRecord>& records);

}  // namespace pnp
