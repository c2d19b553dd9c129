#include "pnp/estimator.hpp"

#include "pnp/errors.hpp"
#include "pnp/parallel.hpp"
#include "pnp/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace pnp {

namespace {

void check_state(const Mesh& m, const PnpProblem& problem, const CoupledState& state) {
  state.phi.check_mesh(m);
  if (static_cast<int>(state.p.size()) != problem.n_species())
    throw std::invalid_argument("state species count does not match the problem");
  for (const auto& pi : state.p) pi.check_mesh(m);
}

RecoveredField recover_phi_flux(const Mesh& m, const PnpProblem& problem, const CoupledState& state,
                                WeightScheme scheme) {
  const auto& eps = problem.coefficients.epsilon;
  return flux_recover(state.phi, m, [&](Vec2 x, double) { return eps(x); }, scheme);
}

}  // namespace

double aggregate(const std::vector<double>& eta) {
  double s = 0.0;
  for (double e : eta) s += e * e;
  return std::sqrt(s);
}

std::vector<double> estimate_phi(const Mesh& m, const PnpProblem& problem, const CoupledState& state,
                                 WeightScheme scheme, PhiTerms* terms) {
  check_state(m, problem, state);
  const CoefficientBundle& b = problem.coefficients;
  const QuadratureRule& rule = triangle_rule(problem.quadrature_degree);
  const RecoveredField G = recover_phi_flux(m, problem, state, scheme);
  const std::vector<double> divG = recovered_divergence(G, m);

  const std::size_t nt = m.num_triangles();
  std::vector<double> d(nt), r(nt), eta(nt);
  parallel_for(nt, [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      const auto ti = static_cast<Index>(t);
      const ElementGeometry g = element_geometry(m, ti);
      const Triangle& tri = m.triangle(ti);
      const Vec2 gphi = state.phi.gradient(g, tri);
      double dd = 0.0, rr = 0.0;
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const auto& bary = rule.points[q];
        const Vec2 x = g.map(bary);
        const Vec2 mismatch = G.evaluate(m, ti, bary) - gphi * b.epsilon(x);
        double res = divG[t] + b.f(x);
        for (int i = 0; i < b.n_species; ++i) res += b.charges[i] * value_at(state.p[i], tri, bary);
        dd += rule.weights[q] * dot(mismatch, mismatch);
        rr += rule.weights[q] * res * res;
      }
      d[t] = std::sqrt(dd * g.area);
      r[t] = m.diameter(ti) * std::sqrt(rr * g.area);
      eta[t] = d[t] + r[t];
    }
  });
  if (terms != nullptr) {
    terms->d_phi = std::move(d);
    terms->h_r1 = std::move(r);
  }
  return eta;
}

std::vector<double> estimate_p(const Mesh& m, const PnpProblem& problem, const CoupledState& state, int species,
                               WeightScheme scheme, SpeciesTerms* terms) {
  check_state(m, problem, state);
  if (species < 0 || species >= problem.n_species())
    throw std::out_of_range("species index " + std::to_string(species) + " out of range");
  const CoefficientBundle& b = problem.coefficients;
  const int i = species;
  const FeFunction& p = state.p[static_cast<std::size_t>(i)];
  const QuadratureRule& rule = triangle_rule(problem.quadrature_degree);

  PhiTerms phi_terms;
  estimate_phi(m, problem, state, scheme, &phi_terms);
  const RecoveredField Gp = flux_recover(p, m, [&](Vec2 x, double y) { return b.alpha(i, x, y); }, scheme);
  const std::vector<double> divGp = recovered_divergence(Gp, m);
  const RecoveredField Gt = gradient_recover(state.phi, m, scheme);
  const std::vector<double> divGt = recovered_divergence(Gt, m);

  const std::size_t nt = m.num_triangles();
  std::vector<double> dp(nt), drift(nt), r2(nt), eta(nt);
  parallel_for(nt, [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      const auto ti = static_cast<Index>(t);
      const ElementGeometry g = element_geometry(m, ti);
      const Triangle& tri = m.triangle(ti);
      const Vec2 gp = p.gradient(g, tri);
      const Vec2 gphi = state.phi.gradient(g, tri);
      double sd = 0.0, sdrift = 0.0, sr = 0.0;
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const auto& bary = rule.points[q];
        const Vec2 x = g.map(bary);
        const double y = value_at(p, tri, bary);
        const Vec2 gt = Gt.evaluate(m, ti, bary);
        const double gam = b.gamma(i, x, y);

        const Vec2 mismatch = Gp.evaluate(m, ti, bary) - gp * b.alpha(i, x, y);
        const Vec2 dr = (gt - gphi) * gam;
        const double div_beta = b.beta_div_x(i, x, y) + dot(b.beta_y(i, x, y), gp);
        const double div_drift = dot(b.gamma_grad_x(i, x, y) + gp * b.gamma_y(i, x, y), gt) + gam * divGt[t];
        const double res = divGp[t] + div_beta - b.g(i, x, y) + div_drift;
        if (!std::isfinite(res) || !std::isfinite(mismatch.x) || !std::isfinite(mismatch.y))
          throw AssemblyError("non-finite estimator term on triangle " + std::to_string(t));

        sd += rule.weights[q] * dot(mismatch, mismatch);
        sdrift += rule.weights[q] * dot(dr, dr);
        sr += rule.weights[q] * res * res;
      }
      dp[t] = std::sqrt(sd * g.area);
      drift[t] = std::sqrt(sdrift * g.area);
      r2[t] = m.diameter(ti) * std::sqrt(sr * g.area);
      eta[t] = dp[t] + phi_terms.d_phi[t] + drift[t] + phi_terms.h_r1[t] + r2[t];
    }
  });
  if (terms != nullptr) {
    terms->d_p = std::move(dp);
    terms->drift = std::move(drift);
    terms->h_r2 = std::move(r2);
  }
  return eta;
}

EstimatorReport estimate(const Mesh& m, const PnpProblem& problem, const CoupledState& state, WeightScheme scheme) {
  EstimatorReport rep;
  rep.mesh_id = m.id();
  rep.eta_phi = estimate_phi(m, problem, state, scheme, &rep.phi_terms);
  rep.global_eta_phi = aggregate(rep.eta_phi);
  for (int i = 0; i < problem.n_species(); ++i) {
    SpeciesTerms terms;
    rep.eta_p.push_back(estimate_p(m, problem, state, i, scheme, &terms));
    rep.p_terms.push_back(std::move(terms));
    rep.global_eta_p.push_back(aggregate(rep.eta_p.back()));
  }
  return rep;
}

JumpDiagnostics jump_diagnostics(const Mesh& m, const PnpProblem& problem, const CoupledState& state) {
  check_state(m, problem, state);
  const CoefficientBundle& b = problem.coefficients;
  const LineRule gauss = gauss_legendre_unit(2);
  const int n = problem.n_species();

  JumpDiagnostics out;
  out.phi.assign(m.num_edges(), 0.0);
  out.p.assign(static_cast<std::size_t>(n), std::vector<double>(m.num_edges(), 0.0));

  for (std::size_t e = 0; e < m.num_edges(); ++e) {
    const auto ei = static_cast<Index>(e);
    if (m.is_boundary_edge(ei)) continue;
    const auto [t1, t2] = m.edge_triangles(ei);
    const EdgeVertices& ev = m.edges()[e];
    const Vec2 a = m.vertex(ev[0]), c = m.vertex(ev[1]);
    const double len = norm(c - a);
    const Vec2 normal{(c - a).y / len, -(c - a).x / len};
    const double scale = std::sqrt(len);

    const Vec2 gphi1 = state.phi.gradient(m, t1), gphi2 = state.phi.gradient(m, t2);
    double sphi = 0.0;
    std::vector<double> sp(static_cast<std::size_t>(n), 0.0);
    for (std::size_t q = 0; q < gauss.points.size(); ++q) {
      const double s = gauss.points[q];
      const Vec2 x = a * (1.0 - s) + c * s;
      const double w = gauss.weights[q] * len;
      const double jphi = b.epsilon(x) * dot(gphi1 - gphi2, normal);
      sphi += w * jphi * jphi;
      for (int i = 0; i < n; ++i) {
        const FeFunction& p = state.p[static_cast<std::size_t>(i)];
        const double y = p[ev[0]] * (1.0 - s) + p[ev[1]] * s;
        const double jp = b.alpha(i, x, y) * dot(p.gradient(m, t1) - p.gradient(m, t2), normal);
        sp[i] += w * jp * jp;
      }
    }
    out.phi[e] = scale * std::sqrt(sphi);
    for (int i = 0; i < n; ++i) out.p[i][e] = scale * std::sqrt(sp[i]);
  }
  return out;
}

std::vector<double> effectivity(const EstimatorReport& report, const std::vector<double>& true_errors) {
  std::vector<double> eta{report.global_eta_phi};
  eta.insert(eta.end(), report.global_eta_p.begin(), report.global_eta_p.end());
  if (true_errors.size() != eta.size()) throw std::invalid_argument("one true error per unknown is required");
  std::vector<double> idx;
  for (std::size_t k = 0; k < eta.size(); ++k) {
    if (!(true_errors[k] > 0.0)) throw std::invalid_argument("effectivity needs a positive true error");
    idx.push_back(eta[k] / true_errors[k]);
  }
  return idx;
}

}  // namespace pnp
