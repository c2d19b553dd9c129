#include "oracles.hpp"

#include "pnp/assembly.hpp"
#include "pnp/errors.hpp"
#include "pnp/fe.hpp"
#include "pnp/norms.hpp"
#include "pnp/parallel.hpp"
#include "pnp/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

namespace pnp {
namespace {

constexpr double kPi = std::numbers::pi;

double rule_integral(const QuadratureRule& r, const std::array<Vec2, 3>& c, const std::function<double(Vec2)>& f) {
  const ElementGeometry g = element_geometry(c);
  double s = 0.0;
  for (std::size_t q = 0; q < r.size(); ++q) s += r.weights[q] * f(g.map(r.points[q]));
  return s * g.area;
}


double max_abs_diff(const SparseMatrix& A, const SparseMatrix& B) { return (Eigen::MatrixXd(A) - Eigen::MatrixXd(B)).cwiseAbs().maxCoeff(); }

TEST(Quadrature, WeightsSumToOneAndPointsInside) {
  for (int d : {1, 2, 4, 10}) {
    const QuadratureRule& r = triangle_rule(d);
    EXPECT_GE(r.degree, d);
    double s = 0.0;
    for (std::size_t q = 0; q < r.size(); ++q) {
      s += r.weights[q];
      EXPECT_GT(r.weights[q], 0.0);
      for (double b : r.points[q]) EXPECT_GT(b, 0.0);
      EXPECT_NEAR(r.points[q][0] + r.points[q][1] + r.points[q][2], 1.0, 1e-15);
    }
    EXPECT_NEAR(s, 1.0, 1e-14);
  }
  EXPECT_EQ(triangle_rule(4).size(), 6u);
  EXPECT_THROW(triangle_rule(11), std::invalid_argument);
}

TEST(Quadrature, ReferenceMonomialsExactToDeclaredDegree) {
  const std::array<Vec2, 3> ref{Vec2{0, 0}, Vec2{1, 0}, Vec2{0, 1}};
  for (int d : {1, 2, 4, 10}) {
    const QuadratureRule& r = triangle_rule(d);
    for (int a = 0; a <= r.degree; ++a)
      for (int b = 0; a + b <= r.degree; ++b) {
        const double exact = oracle::monomial_integral(a, b);
        const double got = rule_integral(r, ref, [a, b](Vec2 x) { return std::pow(x.x, a) * std::pow(x.y, b); });
        EXPECT_NEAR(got, exact, 1e-14 * std::max(1.0, std::abs(exact))) << "degree " << d << " x^" << a << " y^" << b;
      }
  }
}

TEST(Quadrature, DefaultRuleOnRandomTriangles) {
  std::mt19937_64 rng(11);
  const QuadratureRule& r = triangle_rule(kDefaultQuadratureDegree);
  for (int k = 0; k < 100; ++k) {
    const auto c = oracle::random_triangle(rng);
    for (int a = 0; a <= 4; ++a)
      for (int b = 0; a + b <= 4; ++b) {
        const auto f = [a, b](Vec2 x) { return std::pow(x.x, a) * std::pow(x.y, b); };
        const double exact = oracle::integrate(c, f, 8);
        const double got = rule_integral(r, c, f);
        EXPECT_LE(std::abs(got - exact), 1e-13 * std::max(1.0, std::abs(exact)));
      }
  }
}

TEST(Quadrature, GaussLegendreMatchesOracle) {
  for (int n : {1, 2, 5, 6, 12}) {
    const LineRule r = gauss_legendre_unit(n);
    const oracle::Line o = oracle::gauss_legendre(n);
    ASSERT_EQ(r.points.size(), static_cast<std::size_t>(n));
    std::vector<std::pair<double, double>> a, b;
    for (int k = 0; k < n; ++k) {
      a.emplace_back(r.points[k], r.weights[k]);
      b.emplace_back(o.x[k], o.w[k]);
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    for (int k = 0; k < n; ++k) {
      EXPECT_NEAR(a[k].first, b[k].first, 1e-14);
      EXPECT_NEAR(a[k].second, b[k].second, 1e-14);
    }
  }
}

TEST(LocalKernels, ReferenceStiffnessAndMass) {
  const ElementGeometry g = element_geometry({Vec2{0, 0}, Vec2{1, 0}, Vec2{0, 1}});
  const QuadratureRule& r = triangle_rule(4);
  const LocalMatrix K = local_stiffness(g, 0, [](const QuadPoint&) { return 1.0; }, r);
  const double expectedK[3][3] = {{1, -0.5, -0.5}, {-0.5, 0.5, 0}, {-0.5, 0, 0.5}};
  const LocalMatrix M = local_mass(g, 0, [](const QuadPoint&) { return 1.0; }, r);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      EXPECT_NEAR(K[i][j], expectedK[i][j], 1e-15);
      EXPECT_NEAR(M[i][j], 0.5 / 12.0 * (i == j ? 2.0 : 1.0), 1e-16);
    }
}

TEST(LocalKernels, ConstantConvectionField) {
  const ElementGeometry g = element_geometry({Vec2{0, 0}, Vec2{1, 0}, Vec2{0, 1}});
  const Vec2 F{0.3, -1.7};
  const LocalMatrix C = local_convection(g, 0, [F](const QuadPoint&) { return F; }, triangle_rule(4));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(C[i][j], dot(F, g.grad_lambda[i]) * g.area / 3.0, 1e-15);
  const LocalMatrix Z = local_convection(g, 0, [](const QuadPoint&) { return Vec2{}; }, triangle_rule(4));
  for (const auto& row : Z)
    for (double v : row) EXPECT_EQ(v, 0.0);
}

TEST(LocalKernels, RejectNonPositiveAndNonFiniteWeights) {
  const ElementGeometry g = element_geometry({Vec2{0, 0}, Vec2{1, 0}, Vec2{0, 1}});
  const QuadratureRule& r = triangle_rule(4);
  EXPECT_THROW(local_stiffness(g, 0, [](const QuadPoint&) { return 0.0; }, r), AssemblyError);
  EXPECT_THROW(local_stiffness(g, 0, [](const QuadPoint&) { return NAN; }, r), AssemblyError);
  EXPECT_THROW(local_mass(g, 0, [](const QuadPoint&) { return INFINITY; }, r), AssemblyError);
  EXPECT_THROW(local_load(g, 0, [](const QuadPoint&) { return NAN; }, r), AssemblyError);
  EXPECT_THROW(local_convection(g, 0, [](const QuadPoint&) { return Vec2{NAN, 0}; }, r), AssemblyError);
}

// Local kernels against the degree-10 reference oracle with polynomial data
// whose products stay within the default rule's degree.
TEST(LocalKernels, MatchReferenceOracleOnRandomTriangles) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    const auto c = oracle::random_triangle(rng);
    const ElementGeometry g = element_geometry(c);
    const double a0 = 2.0 + u(rng), a1 = u(rng), a2 = u(rng);
    const auto w = [&](Vec2 x) { return a0 + a1 * x.x * x.x + a2 * x.x * x.y; };  // degree 2, positive on [-1,1]^2
    const auto s = [&](Vec2 x) { return a1 + a2 * x.x * x.y * x.y - x.y * x.y * x.y; };  // degree 3
    const QuadratureRule& r = triangle_rule(4);
    const LocalMatrix K = local_stiffness(g, 0, [&](const QuadPoint& q) { return w(q.x); }, r);
    const LocalMatrix M = local_mass(g, 0, [&](const QuadPoint& q) { return w(q.x); }, r);
    const LocalVector L = local_load(g, 0, [&](const QuadPoint& q) { return s(q.x); }, r);
    const auto basis = [&](int i) { return [&, i](Vec2 x) { return oracle::barycentric(c, x)[i]; }; };
    const double W = oracle::integrate(c, w);
    for (int i = 0; i < 3; ++i) {
      const double Li = oracle::integrate(c, [&](Vec2 x) { return s(x) * basis(i)(x); });
      EXPECT_NEAR(L[i], Li, 1e-12 * std::max(1.0, std::abs(Li)));
      for (int j = 0; j < 3; ++j) {
        // ∇λ from the oracle's own barycentric map.
        const double h = 1e-1;
        const Vec2 gi{(basis(i)(c[0] + Vec2{h, 0}) - basis(i)(c[0])) / h, (basis(i)(c[0] + Vec2{0, h}) - basis(i)(c[0])) / h};
        const Vec2 gj{(basis(j)(c[0] + Vec2{h, 0}) - basis(j)(c[0])) / h, (basis(j)(c[0] + Vec2{0, h}) - basis(j)(c[0])) / h};
        const double Kij = W * dot(gi, gj);
        const double Mij = oracle::integrate(c, [&](Vec2 x) { return w(x) * basis(i)(x) * basis(j)(x); });
        EXPECT_NEAR(K[i][j], Kij, 1e-12 * std::max(1.0, std::abs(Kij)));
        EXPECT_NEAR(M[i][j], Mij, 1e-12 * std::max(1.0, std::abs(Mij)));
      }
    }
  }
}

TEST(GlobalAssembly, StiffnessProperties) {
  const Mesh m = make_uniform_unit_square(4);
  const SparseMatrix A = assemble_weighted_stiffness(m, [](const QuadPoint&) { return 1.0; });
  const SparseMatrix A3 = assemble_weighted_stiffness(m, [](const QuadPoint&) { return 3.0; });
  EXPECT_LT(max_abs_diff(A3, 3.0 * A), 1e-13);
  EXPECT_LT(max_abs_diff(A, SparseMatrix(A.transpose())), 1e-15);
  const Eigen::VectorXd rows = Eigen::MatrixXd(A).rowwise().sum();
  for (std::size_t v = 0; v < m.num_vertices(); ++v)
    if (!m.is_boundary_vertex(static_cast<Index>(v))) EXPECT_NEAR(rows[static_cast<Eigen::Index>(v)], 0.0, 1e-13);
}

TEST(GlobalAssembly, Linearity) {
  const Mesh m = refine_marked(make_uniform_unit_square(3), {1, 4});
  const ScalarField w1 = [](const QuadPoint& q) { return 1.0 + q.x.x * q.x.y; };
  const ScalarField w2 = [](const QuadPoint& q) { return 2.0 + std::sin(q.x.y); };
  const ScalarField w12 = [&](const QuadPoint& q) { return w1(q) + w2(q); };
  EXPECT_LT(max_abs_diff(assemble_weighted_stiffness(m, w12),
                         assemble_weighted_stiffness(m, w1) + assemble_weighted_stiffness(m, w2)),
            1e-13);
  EXPECT_LT(max_abs_diff(assemble_mass(m, w12), assemble_mass(m, w1) + assemble_mass(m, w2)), 1e-13);
  const VectorField f1 = [](const QuadPoint& q) { return Vec2{q.x.y, 1.0}; };
  const VectorField f2 = [](const QuadPoint& q) { return Vec2{-2.0, q.x.x}; };
  const VectorField f12 = [&](const QuadPoint& q) { return f1(q) + f2(q); };
  EXPECT_LT(max_abs_diff(assemble_convection(m, f12), assemble_convection(m, f1) + assemble_convection(m, f2)), 1e-13);
}

TEST(GlobalAssembly, MassAndLoadPartitionOfUnity) {
  const Mesh m = make_uniform_unit_square(5);
  const SparseMatrix M = assemble_mass(m, [](const QuadPoint&) { return 1.0; });
  const Vector b = assemble_load(m, [](const QuadPoint&) { return 1.0; });
  EXPECT_NEAR(b.sum(), 1.0, 1e-14);
  const Eigen::VectorXd rows = Eigen::MatrixXd(M).rowwise().sum();
  for (Eigen::Index v = 0; v < b.size(); ++v) EXPECT_NEAR(rows[v], b[v], 1e-15);
  EXPECT_EQ(assemble_mass(m, [](const QuadPoint&) { return 0.0; }).norm(), 0.0);
  EXPECT_EQ(assemble_load(m, [](const QuadPoint&) { return 0.0; }).norm(), 0.0);
  EXPECT_EQ(assemble_convection(m, [](const QuadPoint&) { return Vec2{}; }).norm(), 0.0);
}

TEST(GlobalAssembly, PolynomialLoadMatchesOracle) {
  const Mesh m = refine_marked(make_uniform_unit_square(3), {0, 7});
  const auto s = [](Vec2 x) { return 1.0 + x.x * x.x * x.y - 2.0 * x.y * x.y * x.y; };
  const Vector b = assemble_load(m, [&](const QuadPoint& q) { return s(q.x); });
  Vector ref = Vector::Zero(b.size());
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    const auto c = m.corners(static_cast<Index>(t));
    for (int k = 0; k < 3; ++k)
      ref[m.triangle(static_cast<Index>(t))[k]] += oracle::integrate(c, [&](Vec2 x) { return s(x) * oracle::barycentric(c, x)[k]; });
  }
  EXPECT_LT((b - ref).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(GlobalAssembly, ThreadCountDoesNotChangeResult) {
  const Mesh m = refine_uniform(refine_uniform(make_uniform_unit_square(8)));
  const ScalarField w = [](const QuadPoint& q) { return 1.0 + q.x.x; };
  set_num_threads(1);
  const SparseMatrix A1 = assemble_weighted_stiffness(m, w);
  const Vector b1 = assemble_load(m, w);
  set_num_threads(4);
  const SparseMatrix A4 = assemble_weighted_stiffness(m, w);
  const Vector b4 = assemble_load(m, w);
  set_num_threads(1);
  EXPECT_EQ(max_abs_diff(A1, A4), 0.0);
  EXPECT_EQ((b1 - b4).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Dirichlet, FreeCounts) {
  const Mesh m1 = make_uniform_unit_square(1);
  const SparseMatrix A1 = assemble_weighted_stiffness(m1, [](const QuadPoint&) { return 1.0; });
  const SparseSystem s1 = apply_dirichlet_zero(m1, A1, Vector::Zero(4));
  EXPECT_EQ(s1.matrix.rows(), 0);
  EXPECT_EQ(solve_spd(m1, s1).coefficients(), std::vector<double>(4, 0.0));

  const Mesh m2 = make_uniform_unit_square(2);
  const SparseMatrix A2 = assemble_weighted_stiffness(m2, [](const QuadPoint&) { return 1.0; });
  const Vector b2 = assemble_load(m2, [](const QuadPoint&) { return 1.0; });
  const SparseSystem s2 = apply_dirichlet_zero(m2, A2, b2);
  ASSERT_EQ(s2.matrix.rows(), 1);
  const FeFunction u = solve_spd(m2, s2);
  EXPECT_NEAR(u[4], s2.rhs[0] / s2.matrix.coeff(0, 0), 1e-15);
}

TEST(Dirichlet, EliminatedSystemIsSpd) {
  const Mesh m = refine_marked(make_uniform_unit_square(6), {2, 9, 30});
  const SparseMatrix A = assemble_weighted_stiffness(m, [](const QuadPoint& q) { return 1.0 + q.x.x * q.x.x; });
  const SparseSystem s = apply_dirichlet_zero(m, A, Vector::Zero(A.rows()));
  Eigen::SimplicialLLT<SparseMatrix> llt(s.matrix);
  EXPECT_EQ(llt.info(), Eigen::Success);
  EXPECT_LT((s.matrix - SparseMatrix(s.matrix.transpose())).norm(), 1e-15);
}

TEST(Dirichlet, NonHomogeneousDataReproducesLinearSolution) {
  // A linear u is discretely harmonic, so the solve must return it exactly.
  const Mesh m = refine_marked(make_uniform_unit_square(4), {3, 12});
  const auto u = [](Vec2 x) { return 1.0 + 2.0 * x.x - 3.0 * x.y; };
  std::vector<double> bc(m.num_vertices());
  for (std::size_t v = 0; v < bc.size(); ++v) bc[v] = u(m.vertex(static_cast<Index>(v)));
  const SparseMatrix A = assemble_weighted_stiffness(m, [](const QuadPoint&) { return 1.0; });
  const FeFunction sol = solve_spd(m, apply_dirichlet(m, A, Vector::Zero(A.rows()), bc));
  for (std::size_t v = 0; v < bc.size(); ++v) EXPECT_NEAR(sol[v], bc[v], 1e-12);
}

TEST(SolveSpd, IdentityReturnsRhs) {
  SparseSystem s;
  s.matrix.resize(3, 3);
  s.matrix.setIdentity();
  s.rhs = Vector::LinSpaced(3, 1.0, 3.0);
  EXPECT_LT((solve_spd(s) - s.rhs).norm(), 1e-15);
}

TEST(SolveSpd, RejectsIndefiniteMatrix) {
  SparseSystem s;
  s.matrix.resize(2, 2);
  s.matrix.insert(0, 0) = 1.0;
  s.matrix.insert(1, 1) = -1.0;
  s.rhs = Vector::Ones(2);
  EXPECT_THROW(solve_spd(s), LinearSolverError);
}

TEST(SolveSpd, IterativePathMatchesDirect) {
  const Mesh m = make_uniform_unit_square(24);
  const SparseMatrix A = assemble_weighted_stiffness(m, [](const QuadPoint& q) { return 1.0 + q.x.y; });
  const Vector b = assemble_load(m, [](const QuadPoint& q) { return std::cos(q.x.x); });
  const SparseSystem s = apply_dirichlet_zero(m, A, b);
  LinearSolveOptions iterative;
  iterative.direct_limit = 0;
  const Vector x1 = solve_spd(s);
  const Vector x2 = solve_spd(s, iterative);
  EXPECT_LT((x1 - x2).norm(), 1e-8 * x1.norm());
  EXPECT_LE((s.matrix * x2 - s.rhs).norm(), 1e-10 * s.rhs.norm());
}

TEST(SolveSpd, RejectsSystemFromAnotherMesh) {
  const Mesh a = make_uniform_unit_square(2), b = make_uniform_unit_square(2);
  const SparseMatrix A = assemble_weighted_stiffness(a, [](const QuadPoint&) { return 1.0; });
  const SparseSystem s = apply_dirichlet_zero(a, A, Vector::Ones(A.rows()));
  EXPECT_THROW(solve_spd(b, s), MeshMismatchError);
}

ErrorNorms poisson_error(int n) {
  const Mesh m = make_uniform_unit_square(n);
  const ExactField u{[](Vec2 x) { return std::sin(kPi * x.x) * std::sin(kPi * x.y); },
                     [](Vec2 x) {
                       return Vec2{kPi * std::cos(kPi * x.x) * std::sin(kPi * x.y),
                                   kPi * std::sin(kPi * x.x) * std::cos(kPi * x.y)};
                     },
                     {}};
  const SparseMatrix A = assemble_weighted_stiffness(m, [](const QuadPoint&) { return 1.0; });
  const Vector b = assemble_load(m, [&](const QuadPoint& q) { return 2.0 * kPi * kPi * u.value(q.x); });
  const SparseSystem s = apply_dirichlet_zero(m, A, b);
  const FeFunction uh = solve_spd(m, s);
  // Galerkin orthogonality: the free residual vanishes.
  const Vector r = s.matrix * restrict_to_free(s.dofs, uh.coefficients()) - s.rhs;
  EXPECT_LE(r.norm(), 1e-10 * std::max(1.0, s.rhs.norm()));
  return h1_l2_errors(uh, m, u);
}

TEST(Poisson, H1ErrorHalvesUnderRefinement) {
  const double e16 = poisson_error(16).h1, e32 = poisson_error(32).h1, e64 = poisson_error(64).h1;
  EXPECT_NEAR(e16 / e32, 2.0, 0.15);
  EXPECT_NEAR(e32 / e64, 2.0, 0.1);
}

TEST(Evaluate, NodalBasisAndLinearReproduction) {
  const Mesh m = refine_marked(make_uniform_unit_square(3), {4});
  std::vector<double> hat(m.num_vertices(), 0.0);
  hat[5] = 1.0;
  const FeFunction f(m, hat);
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    const Triangle& tri = m.triangle(static_cast<Index>(t));
    for (int k = 0; k < 3; ++k) {
      std::array<double, 3> bary{};
      bary[k] = 1.0;
      EXPECT_EQ(evaluate(f, m, static_cast<Index>(t), bary).value, tri[k] == 5 ? 1.0 : 0.0);
    }
  }
  const FeFunction lin = interpolate(m, [](Vec2 x) { return x.x + 2.0 * x.y; });
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    const Vec2 g = evaluate(lin, m, static_cast<Index>(t), {1.0 / 3, 1.0 / 3, 1.0 / 3}).gradient;
    EXPECT_NEAR(g.x, 1.0, 1e-13);
    EXPECT_NEAR(g.y, 2.0, 1e-13);
    const PointEvaluation mid = evaluate(lin, m, static_cast<Index>(t), {0.5, 0.5, 0.0});
    const Triangle& tri = m.triangle(static_cast<Index>(t));
    EXPECT_NEAR(mid.value, 0.5 * (lin[tri[0]] + lin[tri[1]]), 1e-15);
  }
}

TEST(FeFunction, MeshMismatchIsReported) {
  const Mesh a = make_uniform_unit_square(2), b = make_uniform_unit_square(2);
  const FeFunction f(a);
  EXPECT_THROW(f.check_mesh(b), MeshMismatchError);
  EXPECT_THROW(FeFunction(a, std::vector<double>(3)), MeshMismatchError);
}

TEST(Norms, LinearIsExactAndZeroAgainstSine) {
  const Mesh m = make_uniform_unit_square(6);
  const auto lin = [](Vec2 x) { return 0.5 - x.x + 3.0 * x.y; };
  const ErrorNorms e = h1_l2_errors(interpolate(m, lin), m, {lin, [](Vec2) { return Vec2{-1.0, 3.0}; }, {}});
  EXPECT_LE(e.h1, 1e-13);

  const ExactField s{[](Vec2 x) { return std::sin(kPi * x.x) * std::sin(kPi * x.y); },
                     [](Vec2 x) {
                       return Vec2{kPi * std::cos(kPi * x.x) * std::sin(kPi * x.y),
                                   kPi * std::sin(kPi * x.x) * std::cos(kPi * x.y)};
                     },
                     {}};
  const Mesh fine = make_uniform_unit_square(32);
  const ErrorNorms z = h1_l2_errors(FeFunction(fine), fine, s, 10);
  EXPECT_NEAR(z.l2, 0.5, 1e-10);
  EXPECT_NEAR(z.h1_seminorm, kPi / std::sqrt(2.0), 1e-9);
  EXPECT_NEAR(z.h1, std::hypot(z.l2, z.h1_seminorm), 1e-15);
}

TEST(Norms, InterpolantH1ErrorHalves) {
  const ExactField s{[](Vec2 x) { return std::sin(kPi * x.x) * std::sin(kPi * x.y); },
                     [](Vec2 x) {
                       return Vec2{kPi * std::cos(kPi * x.x) * std::sin(kPi * x.y),
                                   kPi * std::sin(kPi * x.x) * std::cos(kPi * x.y)};
                     },
                     {}};
  double prev = 0.0;
  for (int n : {8, 16, 32, 64}) {
    const Mesh m = make_uniform_unit_square(n);
    const double e = h1_l2_errors(interpolate(m, s.value), m, s).h1;
    if (prev > 0.0) EXPECT_NEAR(prev / e, 2.0, 0.3);
    prev = e;
  }
}

TEST(Norms, DiscreteH1NormOfConstant) {
  const Mesh m = make_uniform_unit_square(3);
  EXPECT_NEAR(h1_norm(interpolate(m, [](Vec2) { return 2.0; }), m), 2.0, 1e-14);
}

}  // namespace
}  // namespace pnp
