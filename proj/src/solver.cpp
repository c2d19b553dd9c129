#include "pnp/solver.hpp"

#include "pnp/errors.hpp"
#include "pnp/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace pnp {

namespace {

std::string species_name(int i) { return "p" + std::to_string(i + 1); }

void check_state_range(const CoefficientBundle& b, double y, Index t) {
  if (y < b.state_min || y > b.state_max)
    throw AssemblyError("state sample " + std::to_string(y) + " on triangle " + std::to_string(t) +
                        " leaves the admissible range [" + std::to_string(b.state_min) + ", " +
                        std::to_string(b.state_max) + "]");
}

// Full-length residual a(p, φ_j) + b(p, φ, φ_j) for every vertex j.
Vector np_residual_full(const Mesh& m, const PnpProblem& problem, int i, const FeFunction& p, const FeFunction& phi) {
  const CoefficientBundle& b = problem.coefficients;
  const QuadratureRule& rule = triangle_rule(problem.quadrature_degree);
  Vector r = Vector::Zero(static_cast<Eigen::Index>(m.num_vertices()));
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    const auto ti = static_cast<Index>(t);
    const ElementGeometry g = element_geometry(m, ti);
    const Triangle& tri = m.triangle(ti);
    const Vec2 gp = p.gradient(g, tri);
    const Vec2 gphi = phi.gradient(g, tri);
    LocalVector local{};
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto& bary = rule.points[q];
      const Vec2 x = g.map(bary);
      const double y = value_at(p, tri, bary);
      check_state_range(b, y, ti);
      const Vec2 flux = gp * b.alpha(i, x, y) + b.beta(i, x, y) + gphi * b.gamma(i, x, y);
      const double react = b.g(i, x, y);
      const double w = rule.weights[q] * g.area;
      for (int k = 0; k < 3; ++k) local[k] += w * (dot(flux, g.grad_lambda[k]) + react * bary[k]);
    }
    for (int k = 0; k < 3; ++k) r[tri[k]] += local[k];
  }
  if (!r.allFinite()) throw AssemblyError("non-finite Nernst-Planck residual for species " + species_name(i));
  return r;
}

SparseMatrix np_jacobian(const Mesh& m, const PnpProblem& problem, int i, const FeFunction& p, const FeFunction& phi) {
  const CoefficientBundle& b = problem.coefficients;
  const QuadratureRule& rule = triangle_rule(problem.quadrature_degree);
  return assemble_elementwise(m, [&](const ElementGeometry& g, Index t) {
    const Triangle& tri = m.triangle(t);
    const Vec2 gp = p.gradient(g, tri);
    const Vec2 gphi = phi.gradient(g, tri);
    const auto state = [&](const QuadPoint& qp) {
      const double y = value_at(p, tri, qp.bary);
      check_state_range(b, y, t);
      return y;
    };
    const ScalarField alpha = [&](const QuadPoint& qp) {
      const double a = b.alpha(i, qp.x, state(qp));
      if (!(a > 0.0))
        throw NewtonError("singular Jacobian: alpha = " + std::to_string(a) + " at (" + std::to_string(qp.x.x) + ", " +
                          std::to_string(qp.x.y) + ") on triangle " + std::to_string(t));
      return a;
    };
    const VectorField drift = [&](const QuadPoint& qp) {
      const double y = state(qp);
      return gp * b.alpha_y(i, qp.x, y) + b.beta_y(i, qp.x, y) + gphi * b.gamma_y(i, qp.x, y);
    };
    const ScalarField reaction = [&](const QuadPoint& qp) { return b.g_y(i, qp.x, state(qp)); };

    LocalMatrix a = local_stiffness(g, t, alpha, rule);
    const LocalMatrix c = local_convection(g, t, drift, rule);
    const LocalMatrix mm = local_mass(g, t, reaction, rule);
    for (int r = 0; r < 3; ++r)
      for (int s = 0; s < 3; ++s) a[r][s] += c[r][s] + mm[r][s];
    return a;
  });
}

FeFunction difference(const Mesh& m, const FeFunction& a, const FeFunction& b) {
  std::vector<double> d(a.size());
  for (std::size_t v = 0; v < d.size(); ++v) d[v] = a[v] - b[v];
  return FeFunction(m, std::move(d));
}

double relative_update(const Mesh& m, const FeFunction& next, const FeFunction& prev) {
  const double delta = h1_norm(difference(m, next, prev), m);
  const double scale = h1_norm(next, m);
  return scale > 0.0 ? delta / scale : delta;
}

void check_species(const PnpProblem& problem, int species) {
  if (species < 0 || species >= problem.n_species())
    throw std::out_of_range("species index " + std::to_string(species) + " out of range");
}

}  // namespace

void SolverConfig::validate() const {
  if (!(gummel_tol > 0.0) || !(newton_tol > 0.0)) throw std::invalid_argument("solver tolerances must be positive");
  if (gummel_max_iter < 1 || newton_max_iter < 1) throw std::invalid_argument("iteration caps must be at least 1");
  if (!(damping_min > 0.0 && damping_min <= 1.0)) throw std::invalid_argument("damping_min must lie in (0, 1]");
}

FeFunction solve_poisson_given_p(const Mesh& m, const PnpProblem& problem, const std::vector<FeFunction>& p) {
  const CoefficientBundle& b = problem.coefficients;
  if (static_cast<int>(p.size()) != b.n_species) throw std::invalid_argument("species count mismatch");
  for (const auto& pi : p) pi.check_mesh(m);

  const SparseMatrix A =
      assemble_weighted_stiffness(m, [&](const QuadPoint& qp) { return b.epsilon(qp.x); }, problem.quadrature_degree);
  const Vector load = assemble_load(
      m,
      [&](const QuadPoint& qp) {
        const Triangle& tri = m.triangle(qp.triangle);
        double s = b.f(qp.x);
        for (int i = 0; i < b.n_species; ++i) s += b.charges[i] * value_at(p[i], tri, qp.bary);
        return s;
      },
      problem.quadrature_degree);
  const SparseSystem sys = apply_dirichlet(m, A, load, dirichlet_values(m, problem, 0));
  return solve_spd(m, sys);
}

Vector np_residual(const Mesh& m, const PnpProblem& problem, int species, const FeFunction& p,
                   const FeFunction& phi) {
  check_species(problem, species);
  p.check_mesh(m);
  phi.check_mesh(m);
  return restrict_to_free(make_dof_map(m), [&] {
    const Vector full = np_residual_full(m, problem, species, p, phi);
    return std::vector<double>(full.data(), full.data() + full.size());
  }());
}

Vector poisson_residual(const Mesh& m, const PnpProblem& problem, const FeFunction& phi,
                        const std::vector<FeFunction>& p) {
  const CoefficientBundle& b = problem.coefficients;
  phi.check_mesh(m);
  for (const auto& pi : p) pi.check_mesh(m);
  const SparseMatrix A =
      assemble_weighted_stiffness(m, [&](const QuadPoint& qp) { return b.epsilon(qp.x); }, problem.quadrature_degree);
  const Vector load = assemble_load(
      m,
      [&](const QuadPoint& qp) {
        const Triangle& tri = m.triangle(qp.triangle);
        double s = b.f(qp.x);
        for (int i = 0; i < b.n_species; ++i) s += b.charges[i] * value_at(p[i], tri, qp.bary);
        return s;
      },
      problem.quadrature_degree);
  const Eigen::Map<const Vector> u(phi.coefficients().data(), static_cast<Eigen::Index>(phi.size()));
  const Vector full = A * u - load;
  return restrict_to_free(make_dof_map(m), std::vector<double>(full.data(), full.data() + full.size()));
}

NewtonResult solve_np_given_phi(const Mesh& m, const PnpProblem& problem, int species, const FeFunction& phi,
                                const FeFunction& initial_guess, const SolverConfig& cfg) {
  cfg.validate();
  check_species(problem, species);
  phi.check_mesh(m);
  initial_guess.check_mesh(m);

  const DofMap dofs = make_dof_map(m);
  const std::vector<double> bc = dirichlet_values(m, problem, species + 1);
  std::vector<double> w = initial_guess.coefficients();
  for (std::size_t v = 0; v < w.size(); ++v)
    if (m.is_boundary_vertex(static_cast<Index>(v))) w[v] = bc[v];

  NewtonResult result;
  result.solution = FeFunction(m, std::move(w));
  const auto residual_of = [&](const FeFunction& f) {
    const Vector full = np_residual_full(m, problem, species, f, phi);
    return restrict_to_free(dofs, std::vector<double>(full.data(), full.data() + full.size()));
  };

  Vector r = residual_of(result.solution);
  double rnorm = r.norm();
  result.residuals.push_back(rnorm);

  while (rnorm > cfg.newton_tol) {
    if (result.iterations >= cfg.newton_max_iter)
      throw NewtonError("Newton for species " + species_name(species) + " did not converge in " +
                        std::to_string(cfg.newton_max_iter) + " iterations (last residual " + std::to_string(rnorm) +
                        ")");
    const SparseMatrix J_full = np_jacobian(m, problem, species, result.solution, phi);
    const SparseSystem sys = apply_dirichlet_zero(m, J_full, Vector::Zero(J_full.rows()));
    const Vector delta = solve_general(sys.matrix, -r);

    double lambda = 1.0;
    while (true) {
      std::vector<double> trial = result.solution.coefficients();
      for (std::size_t k = 0; k < dofs.num_free(); ++k)
        trial[dofs.free_to_vertex[k]] += lambda * delta[static_cast<Eigen::Index>(k)];
      FeFunction candidate(m, std::move(trial));
      double trial_norm = std::numeric_limits<double>::infinity();
      Vector trial_r;
      try {
        trial_r = residual_of(candidate);
        trial_norm = trial_r.norm();
      } catch (const AssemblyError&) {
        // Trial left the admissible state range; damp further.
      }
      if (trial_norm < rnorm) {
        result.solution = std::move(candidate);
        r = std::move(trial_r);
        rnorm = trial_norm;
        break;
      }
      lambda *= 0.5;
      if (lambda < cfg.damping_min)
        throw NewtonError("Newton line search for species " + species_name(species) +
                          " failed to reduce the residual " + std::to_string(rnorm) + " at iteration " +
                          std::to_string(result.iterations + 1));
    }
    ++result.iterations;
    result.residuals.push_back(rnorm);
  }
  return result;
}

CoupledState solve_coupled(const Mesh& m, const PnpProblem& problem, const SolverConfig& cfg,
                           const CoupledState* warm_start) {
  cfg.validate();
  const int n = problem.n_species();
  CoupledState state;
  if (warm_start != nullptr) {
    warm_start->phi.check_mesh(m);
    if (static_cast<int>(warm_start->p.size()) != n) throw std::invalid_argument("warm start species count mismatch");
    for (const auto& pi : warm_start->p) pi.check_mesh(m);
    state.phi = warm_start->phi;
    state.p = warm_start->p;
  } else {
    state.phi = FeFunction(m);
    state.p.assign(static_cast<std::size_t>(n), FeFunction(m));
  }

  for (int sweep = 1; sweep <= cfg.gummel_max_iter; ++sweep) {
    FeFunction phi_next = solve_poisson_given_p(m, problem, state.p);
    double update = relative_update(m, phi_next, state.phi);
    state.log.push_back({sweep, "phi", poisson_residual(m, problem, phi_next, state.p).norm()});

    std::vector<FeFunction> p_next;
    p_next.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      NewtonResult nr;
      try {
        nr = solve_np_given_phi(m, problem, i, phi_next, state.p[i], cfg);
      } catch (const NewtonError& e) {
        throw NewtonError("Gummel sweep " + std::to_string(sweep) + ": " + e.what());
      } catch (const AssemblyError& e) {
        throw AssemblyError("Gummel sweep " + std::to_string(sweep) + ": " + e.what());
      }
      for (double res : nr.residuals) state.log.push_back({sweep, species_name(i), res});
      update = std::max(update, relative_update(m, nr.solution, state.p[i]));
      p_next.push_back(std::move(nr.solution));
    }

    state.phi = std::move(phi_next);
    state.p = std::move(p_next);
    state.gummel_iterations = sweep;
    state.gummel_updates.push_back(update);
    state.log.push_back({sweep, "gummel", update});
    if (update <= cfg.gummel_tol) {
      state.converged = true;
      break;
    }
  }
  return state;
}

ResidualAudit audit_residuals(const Mesh& m, const PnpProblem& problem, const CoupledState& state) {
  ResidualAudit audit;
  audit.poisson = poisson_residual(m, problem, state.phi, state.p).norm();
  for (int i = 0; i < problem.n_species(); ++i)
    audit.species.push_back(np_residual(m, problem, i, state.p[static_cast<std::size_t>(i)], state.phi).norm());
  return audit;
}

FeFunction prolongate(const FeFunction& f, const Mesh& coarse, const Mesh& fine) {
  f.check_mesh(coarse);
  if (fine.id() == coarse.id()) return f;
  const auto first_new = static_cast<std::size_t>(fine.first_new_vertex());
  if (first_new != coarse.num_vertices() || fine.new_vertex_parents().size() != fine.num_vertices() - first_new)
    throw MeshMismatchError("fine mesh was not produced by refining the given coarse mesh");
  std::vector<double> c(fine.num_vertices());
  std::copy(f.coefficients().begin(), f.coefficients().end(), c.begin());
  for (std::size_t k = 0; k < fine.new_vertex_parents().size(); ++k) {
    const auto& e = fine.new_vertex_parents()[k];
    c[first_new + k] = 0.5 * (f[e[0]] + f[e[1]]);
  }
  return FeFunction(fine, std::move(c));
}

CoupledState transfer_state(const CoupledState& state, const Mesh& coarse, const Mesh& fine) {
  CoupledState out;
  out.phi = prolongate(state.phi, coarse, fine);
  for (const auto& pi : state.p) out.p.push_back(prolongate(pi, coarse, fine));
  return out;
}

}  // namespace pnp
