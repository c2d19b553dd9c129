#include "pnp/afem.hpp"
#include "pnp/errors.hpp"
#include "pnp/estimator.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <iostream>

namespace pnp {
namespace {

PnpProblem trivial_problem(int n_species, std::vector<double> charges) {
  PnpProblem pr;
  pr.coefficients = make_trivial_bundle(n_species, std::move(charges));
  pr.boundary_data.resize(static_cast<std::size_t>(n_species + 1));
  return pr;
}

CoupledState state_of(const FeFunction& phi, std::vector<FeFunction> p) {
  CoupledState s;
  s.phi = phi;
  s.p = std::move(p);
  s.converged = true;
  return s;
}

void expect_all_below(const std::vector<double>& v, double bound) {
  for (double x : v) {
    EXPECT_GE(x, 0.0);
    EXPECT_LE(x, bound);
  }
}

TEST(Estimator, ZeroDataGivesZeroIndicators) {
  const Mesh m = refine_marked(make_uniform_unit_square(4), {3, 11});
  const PnpProblem pr = trivial_problem(2, {1.0, -1.0});
  const EstimatorReport r = estimate(m, pr, state_of(FeFunction(m), {FeFunction(m), FeFunction(m)}));
  expect_all_below(r.eta_phi, 0.0);
  for (const auto& e : r.eta_p) expect_all_below(e, 0.0);
  EXPECT_EQ(r.global_eta_phi, 0.0);
}

TEST(Estimator, LinearFieldsWithConstantCoefficients) {
  const Mesh m = refine_marked(make_uniform_unit_square(5), {0, 17, 40});
  // Zero charges decouple the species from the potential's residual.
  PnpProblem pr = trivial_problem(1, {0.0});
  const FeFunction phi = interpolate(m, [](Vec2 x) { return 1.0 + 2.0 * x.x - 0.5 * x.y; });
  const FeFunction p = interpolate(m, [](Vec2 x) { return 0.3 - x.x + 4.0 * x.y; });
  const EstimatorReport r = estimate(m, pr, state_of(phi, {p}));
  expect_all_below(r.eta_phi, 1e-12);
  expect_all_below(r.eta_p[0], 1e-12);

  pr.coefficients.epsilon = [](Vec2) { return 2.5; };
  const EstimatorReport r2 = estimate(m, pr, state_of(phi, {p}));
  expect_all_below(r2.eta_phi, 1e-12);
}

TEST(Estimator, SolenoidalBetaPath) {
  const Mesh m = make_uniform_unit_square(6);
  PnpProblem pr = trivial_problem(1, {1.0});
  pr.coefficients.gamma = [](int, Vec2, double y) { return y; };
  pr.coefficients.gamma_y = [](int, Vec2, double) { return 1.0; };
  const FeFunction phi = interpolate(m, [](Vec2 x) { return std::sin(3 * x.x) * x.y; });
  const FeFunction p = interpolate(m, [](Vec2 x) { return x.x * x.x + std::cos(2 * x.y); });
  const CoupledState s = state_of(phi, {p});
  const std::vector<double> base = estimate_p(m, pr, s, 0);

  pr.coefficients.beta = [](int, Vec2 x, double) { return Vec2{x.y, -x.x}; };
  pr.coefficients.beta_div_x = [](int, Vec2, double) { return 0.0; };
  const std::vector<double> solenoidal = estimate_p(m, pr, s, 0);
  for (std::size_t t = 0; t < base.size(); ++t) EXPECT_NEAR(solenoidal[t], base[t], 1e-14);

  pr.coefficients.beta = [](int, Vec2 x, double) { return Vec2{x.x, 0.0}; };
  pr.coefficients.beta_div_x = [](int, Vec2, double) { return 1.0; };
  SpeciesTerms shifted;
  estimate_p(m, pr, s, 0, WeightScheme::area, &shifted);
  SpeciesTerms plain;
  pr.coefficients.beta = [](int, Vec2, double) { return Vec2{}; };
  pr.coefficients.beta_div_x = [](int, Vec2, double) { return 0.0; };
  estimate_p(m, pr, s, 0, WeightScheme::area, &plain);
  double diff = 0.0;
  for (std::size_t t = 0; t < base.size(); ++t) diff = std::max(diff, std::abs(shifted.h_r2[t] - plain.h_r2[t]));
  EXPECT_GT(diff, 1e-3);
  EXPECT_EQ(shifted.d_p, plain.d_p);
}

class SechEstimator : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    c_ = new ManufacturedCase(make_sech2_case());
    m_ = new Mesh(make_uniform_unit_square(8));
    state_ = new CoupledState(solve_coupled(*m_, c_->problem, SolverConfig{}));
    report_ = new EstimatorReport(estimate(*m_, c_->problem, *state_));
  }
  static void TearDownTestSuite() {
    delete report_;
    delete state_;
    delete m_;
    delete c_;
  }
  static ManufacturedCase* c_;
  static Mesh* m_;
  static CoupledState* state_;
  static EstimatorReport* report_;
};
ManufacturedCase* SechEstimator::c_ = nullptr;
Mesh* SechEstimator::m_ = nullptr;
CoupledState* SechEstimator::state_ = nullptr;
EstimatorReport* SechEstimator::report_ = nullptr;

TEST_F(SechEstimator, AggregationIdentityAndNonnegativity) {
  double s = 0.0;
  for (double e : report_->eta_phi) {
    EXPECT_GE(e, 0.0);
    s += e * e;
  }
  EXPECT_NEAR(report_->global_eta_phi, std::sqrt(s), 1e-13 * std::max(1.0, std::sqrt(s)));
  for (std::size_t i = 0; i < report_->eta_p.size(); ++i) {
    double si = 0.0;
    for (double e : report_->eta_p[i]) {
      EXPECT_GE(e, 0.0);
      si += e * e;
    }
    EXPECT_NEAR(report_->global_eta_p[i], std::sqrt(si), 1e-13 * std::max(1.0, std::sqrt(si)));
  }
}

TEST_F(SechEstimator, SpeciesIndicatorContainsPotentialTerms) {
  const PhiTerms& ph = report_->phi_terms;
  for (std::size_t i = 0; i < report_->eta_p.size(); ++i) {
    const SpeciesTerms& sp = report_->p_terms[i];
    for (std::size_t t = 0; t < m_->num_triangles(); ++t) {
      EXPECT_GE(report_->eta_p[i][t], ph.d_phi[t] + ph.h_r1[t] - 1e-15);
      EXPECT_NEAR(report_->eta_p[i][t], sp.d_p[t] + ph.d_phi[t] + sp.drift[t] + ph.h_r1[t] + sp.h_r2[t], 1e-13);
    }
  }
  for (std::size_t t = 0; t < m_->num_triangles(); ++t)
    EXPECT_NEAR(report_->eta_phi[t], ph.d_phi[t] + ph.h_r1[t], 1e-14);
}

TEST_F(SechEstimator, EffectivityWindowAtNEqualsEight) {
  const ErrorNorms e = h1_l2_errors(state_->phi, *m_, c_->phi, c_->problem.quadrature_degree);
  const double ratio = report_->global_eta_phi / e.h1_seminorm;
  std::cout << "sech n=8: eta_phi=" << report_->global_eta_phi << " |e_phi|_1=" << e.h1_seminorm
            << " ratio=" << ratio << '\n';
  EXPECT_GE(ratio, 0.2);
  EXPECT_LE(ratio, 5.0);
}

TEST_F(SechEstimator, MismatchedStateIsRejected) {
  const Mesh other = make_uniform_unit_square(8);
  EXPECT_THROW(estimate(other, c_->problem, *state_), MeshMismatchError);
}

TEST(Effectivity, RatiosAndErrors) {
  EstimatorReport r;
  r.global_eta_phi = 0.4;
  r.global_eta_p = {0.2, 0.6};
  const std::vector<double> idx = effectivity(r, {0.4, 0.1, 0.3});
  EXPECT_DOUBLE_EQ(idx[0], 1.0);
  EXPECT_DOUBLE_EQ(idx[1], 2.0);
  EXPECT_DOUBLE_EQ(idx[2], 2.0);
  EXPECT_THROW(effectivity(r, {0.4, 0.0, 0.3}), std::invalid_argument);
  EXPECT_THROW(effectivity(r, {0.4, 0.1}), std::invalid_argument);
}

TEST(JumpDiagnostics, LinearFieldsHaveNoJumps) {
  const Mesh m = refine_marked(make_uniform_unit_square(4), {5, 6});
  const PnpProblem pr = trivial_problem(1, {0.0});
  const FeFunction lin = interpolate(m, [](Vec2 x) { return 3.0 * x.x - x.y; });
  const JumpDiagnostics j = jump_diagnostics(m, pr, state_of(lin, {lin}));
  expect_all_below(j.phi, 1e-13);
  expect_all_below(j.p[0], 1e-13);
}

TEST(JumpDiagnostics, HatFunctionOnTwoTriangles) {
  // Hat at (0,0): 1 - x on {(0,0),(1,0),(1,1)}, 1 - y on {(0,0),(1,1),(0,1)}.
  // Normal jump across the diagonal is √2 on an edge of length √2, so
  // h^{1/2}‖·‖_{0,l} = 2^{1/4} · √2 · 2^{1/4} = 2.
  const Mesh m = make_uniform_unit_square(1);
  const PnpProblem pr = trivial_problem(1, {0.0});
  const FeFunction hat(m, {1.0, 0.0, 0.0, 0.0});
  const JumpDiagnostics j = jump_diagnostics(m, pr, state_of(hat, {FeFunction(m)}));
  int interior = 0;
  for (std::size_t e = 0; e < m.num_edges(); ++e) {
    if (m.is_boundary_edge(static_cast<Index>(e))) {
      EXPECT_EQ(j.phi[e], 0.0);
      continue;
    }
    ++interior;
    EXPECT_NEAR(j.phi[e], 2.0, 1e-14);
  }
  EXPECT_EQ(interior, 1);

  PnpProblem scaled = pr;
  scaled.coefficients.epsilon = [](Vec2) { return 3.0; };
  const JumpDiagnostics j3 = jump_diagnostics(m, scaled, state_of(hat, {FeFunction(m)}));
  for (std::size_t e = 0; e < m.num_edges(); ++e) EXPECT_NEAR(j3.phi[e], 3.0 * j.phi[e], 1e-14);
}

}  // namespace
}  // namespace pnp
