#include "pnp/afem.hpp"

#include "pnp/errors.hpp"
#include "pnp/norms.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace pnp {

namespace {

using Clock = std::chrono::steady_clock;

RunRecord make_record(int step, const Mesh& m, const ManufacturedCase& c, const CoupledState& state,
                      const EstimatorReport& report) {
  RunRecord r;
  r.step = step;
  r.dofs = m.num_vertices();
  r.h_max = mesh_size(m).h_max;
  r.eta_phi = report.global_eta_phi;
  r.eta_p = report.global_eta_p;
  r.gummel_iterations = state.gummel_iterations;
  const int n = c.problem.n_species();
  r.e_p.assign(static_cast<std::size_t>(n), std::nullopt);
  r.eff_p.assign(static_cast<std::size_t>(n), std::nullopt);
  if (c.phi.value && c.phi.gradient) {
    const int degree = c.problem.quadrature_degree;
    r.e_phi = h1_l2_errors(state.phi, m, c.phi, degree).h1;
    if (*r.e_phi > 0.0) r.eff_phi = r.eta_phi / *r.e_phi;
    for (int i = 0; i < n && i < static_cast<int>(c.p.size()); ++i) {
      const double e = h1_l2_errors(state.p[i], m, c.p[i], degree).h1;
      r.e_p[i] = e;
      if (e > 0.0) r.eff_p[i] = r.eta_p[i] / e;
    }
  }
  return r;
}

bool below_tolerance(const EstimatorReport& rep, double tol) {
  if (rep.global_eta_phi > tol) return false;
  return std::all_of(rep.global_eta_p.begin(), rep.global_eta_p.end(), [tol](double e) { return e <= tol; });
}

CoupledState solve_step(const Mesh& m, const ManufacturedCase& c, const SolverConfig& solver_cfg,
                        const CoupledState* warm, int step) {
  CoupledState state;
  try {
    state = solve_coupled(m, c.problem, solver_cfg, warm);
  } catch (const Error& e) {
    throw Error("step " + std::to_string(step) + " (" + std::to_string(m.num_vertices()) + " dofs): " + e.what());
  }
  if (!state.converged)
    throw NewtonError("step " + std::to_string(step) + ": Gummel iteration did not converge in " +
                      std::to_string(solver_cfg.gummel_max_iter) + " sweeps (last update " +
                      std::to_string(state.gummel_updates.back()) + ")");
  return state;
}

}  // namespace

RefinementMode parse_refinement_mode(const std::string& name) {
  if (name == "adaptive") return RefinementMode::adaptive;
  if (name == "uniform") return RefinementMode::uniform;
  throw std::invalid_argument("unknown mode '" + name + "' (expected 'uniform' or 'adaptive')");
}

std::string to_string(RefinementMode mode) { return mode == RefinementMode::adaptive ? "adaptive" : "uniform"; }

void LoopConfig::validate() const {
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("theta must lie in (0, 1)");
  if (max_steps < 1) throw std::invalid_argument("max_steps must be at least 1");
  if (initial_n < 1) throw std::invalid_argument("initial mesh size must be at least 1");
  const auto n0 = static_cast<std::size_t>(initial_n + 1);
  if (max_dofs < n0 * n0) throw std::invalid_argument("max_dofs is below the initial mesh size");
}

MarkSet mark_maximum(const std::vector<double>& eta_phi, const std::vector<std::vector<double>>& eta_p, double theta) {
  if (eta_phi.empty()) throw std::invalid_argument("indicator list is empty");
  for (const auto& e : eta_p)
    if (e.size() != eta_phi.size()) throw std::invalid_argument("indicator lists differ in length");
  std::vector<char> marked(eta_phi.size(), 0);
  const auto mark_family = [&](const std::vector<double>& eta) {
    const double mx = *std::max_element(eta.begin(), eta.end());
    if (!(mx > 0.0)) return;
    const double threshold = theta * mx;
    for (std::size_t t = 0; t < eta.size(); ++t)
      if (eta[t] >= threshold) marked[t] = 1;
  };
  mark_family(eta_phi);
  for (const auto& e : eta_p) mark_family(e);
  MarkSet out;
  for (std::size_t t = 0; t < marked.size(); ++t)
    if (marked[t]) out.push_back(static_cast<Index>(t));
  return out;
}

std::vector<RunRecord> adaptive_loop(const ManufacturedCase& c, const LoopConfig& cfg, const SolverConfig& solver_cfg,
                                     const StepObserver& observer) {
  cfg.validate();
  solver_cfg.validate();
  std::vector<RunRecord> records;
  Mesh mesh = make_uniform_unit_square(cfg.initial_n);
  std::optional<CoupledState> warm;
  for (int step = 0; step < cfg.max_steps; ++step) {
    const auto t0 = Clock::now();
    const CoupledState state = solve_step(mesh, c, solver_cfg, warm ? &*warm : nullptr, step);
    const EstimatorReport report = estimate(mesh, c.problem, state, cfg.weights);
    RunRecord rec = make_record(step, mesh, c, state, report);

    const bool last_step = step + 1 >= cfg.max_steps;
    MarkSet marks;
    if (!below_tolerance(report, cfg.tol) && !last_step) marks = mark_maximum(report.eta_phi, report.eta_p, cfg.theta);
    std::optional<Mesh> next;
    if (!marks.empty()) {
      next = refine_marked(mesh, marks);
      if (next->num_vertices() > cfg.max_dofs) {
        next.reset();
        marks.clear();
      }
    }
    rec.marked = marks.size();
    rec.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    records.push_back(rec);
    if (observer) observer(StepView{records.back(), mesh, state, report, marks});
    if (!next) break;
    warm = transfer_state(state, mesh, *next);
    mesh = std::move(*next);
  }
  return records;
}

std::vector<RunRecord> uniform_loop(const ManufacturedCase& c, const LoopConfig& cfg, const SolverConfig& solver_cfg,
                                    const StepObserver& observer) {
  cfg.validate();
  solver_cfg.validate();
  std::vector<RunRecord> records;
  Mesh mesh = make_uniform_unit_square(cfg.initial_n);
  std::optional<CoupledState> warm;
  const MarkSet no_marks;
  for (int step = 0; step < cfg.max_steps; ++step) {
    const auto t0 = Clock::now();
    const CoupledState state = solve_step(mesh, c, solver_cfg, warm ? &*warm : nullptr, step);
    const EstimatorReport report = estimate(mesh, c.problem, state, cfg.weights);
    RunRecord rec = make_record(step, mesh, c, state, report);
    rec.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    records.push_back(rec);
    if (observer) observer(StepView{records.back(), mesh, state, report, no_marks});

    // Red refinement adds one vertex per edge.
    if (step + 1 >= cfg.max_steps || mesh.num_vertices() + mesh.num_edges() > cfg.max_dofs) break;
    Mesh next = refine_uniform(mesh);
    warm = transfer_state(state, mesh, next);
    mesh = std::move(next);
  }
  return records;
}

std::vector<RunRecord> run_study(const ManufacturedCase& c, const LoopConfig& cfg, const SolverConfig& solver_cfg,
                                 const StepObserver& observer) {
  return cfg.mode == RefinementMode::adaptive ? adaptive_loop(c, cfg, solver_cfg, observer)
                                              : uniform_loop(c, cfg, solver_cfg, observer);
}

double fit_slope(const std::vector<double>& dofs, const std::vector<double>& values) {
  if (dofs.size() != values.size()) throw std::invalid_argument("dofs and values differ in length");
  if (dofs.size() < 3) throw std::invalid_argument("at least 3 points are needed to fit a rate");
  const std::size_t k = std::min<std::size_t>(4, dofs.size());
  const std::size_t first = dofs.size() - k;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t j = first; j < dofs.size(); ++j) {
    if (!(dofs[j] > 0.0) || !(values[j] > 0.0)) throw std::invalid_argument("rates need positive data");
    const double x = std::log(dofs[j]), y = std::log(values[j]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(k);
  const double den = n * sxx - sx * sx;
  if (!(den > 0.0)) throw std::invalid_argument("DOF counts must not all coincide");
  return (n * sxy - sx * sy) / den;
}

std::map<std::string, double> fit_rate(const std::vector<RunRecord>& records) {
  if (records.size() < 3) throw std::invalid_argument("at least 3 records are needed to fit a rate");
  std::vector<double> dofs;
  for (const auto& r : records) dofs.push_back(static_cast<double>(r.dofs));
  const std::size_t n = records.front().eta_p.size();

  std::map<std::string, double> out;
  const auto add = [&](const std::string& key, const auto& get) {
    std::vector<double> v;
    for (const auto& r : records) {
      const std::optional<double> x = get(r);
      if (!x) return;
      v.push_back(*x);
    }
    out[key] = fit_slope(dofs, v);
  };
  add("e_phi", [](const RunRecord& r) { return r.e_phi; });
  for (std::size_t i = 0; i < n; ++i)
    add("e_p" + std::to_string(i + 1), [i](const RunRecord& r) { return r.e_p[i]; });
  add("eta_phi", [](const RunRecord& r) { return std::optional<double>(r.eta_phi); });
  for (std::size_t i = 0; i < n; ++i)
    add("eta_p" + std::to_string(i + 1), [i](const RunRecord& r) { return std::optional<double>(r.eta_p[i]); });
  return out;
}

}  // namespace pnp
