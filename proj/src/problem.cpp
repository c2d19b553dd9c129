#include "pnp/problem.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pnp {

namespace {

constexpr double kPi = std::numbers::pi;

// sin(kπx) sin(kπy) and its derivatives.
struct SineProduct {
  double k;
  double value(Vec2 x) const { return std::sin(k * kPi * x.x) * std::sin(k * kPi * x.y); }
  Vec2 gradient(Vec2 x) const {
    const double w = k * kPi;
    return {w * std::cos(w * x.x) * std::sin(w * x.y), w * std::sin(w * x.x) * std::cos(w * x.y)};
  }
  double laplacian(Vec2 x) const { return -2.0 * k * k * kPi * kPi * value(x); }
};

ExactField to_field(const SineProduct& s) {
  return {[s](Vec2 x) { return s.value(x); }, [s](Vec2 x) { return s.gradient(x); },
          [s](Vec2 x) { return s.laplacian(x); }};
}

double sech2(double y) {
  const double c = std::cosh(y);
  return 1.0 / (c * c);
}

double sech_alpha(double y) { return 1.0 - 2.0 * y * std::tanh(y) * sech2(y); }

double sech_alpha_y(double y) {
  const double t = std::tanh(y);
  const double s = sech2(y);
  return -2.0 * s * (t + y * s - 2.0 * y * t * t);
}

// Pulls the species coefficient out of a per-species source list.
CoefficientBundle::Species minus_source(std::vector<std::function<double(Vec2)>> sources) {
  return [sources = std::move(sources)](int i, Vec2 x, double) { return -sources[i](x); };
}

}  // namespace

CoefficientBundle make_trivial_bundle(int n_species, std::vector<double> charges) {
  CoefficientBundle b;
  b.n_species = n_species;
  b.charges = std::move(charges);
  if (static_cast<int>(b.charges.size()) != n_species)
    throw std::invalid_argument("charge count does not match species count");
  b.alpha = [](int, Vec2, double) { return 1.0; };
  b.alpha_y = [](int, Vec2, double) { return 0.0; };
  b.alpha_grad_x = [](int, Vec2, double) { return Vec2{}; };
  b.beta = [](int, Vec2, double) { return Vec2{}; };
  b.beta_y = [](int, Vec2, double) { return Vec2{}; };
  b.beta_div_x = [](int, Vec2, double) { return 0.0; };
  b.gamma = [](int, Vec2, double) { return 0.0; };
  b.gamma_y = [](int, Vec2, double) { return 0.0; };
  b.gamma_grad_x = [](int, Vec2, double) { return Vec2{}; };
  b.g = [](int, Vec2, double) { return 0.0; };
  b.g_y = [](int, Vec2, double) { return 0.0; };
  b.epsilon = [](Vec2) { return 1.0; };
  b.epsilon_grad = [](Vec2) { return Vec2{}; };
  b.f = [](Vec2) { return 0.0; };
  return b;
}

std::vector<double> dirichlet_values(const Mesh& m, const PnpProblem& problem, int unknown) {
  std::vector<double> values(m.num_vertices(), 0.0);
  if (unknown < 0 || unknown > problem.n_species())
    throw std::out_of_range("unknown index " + std::to_string(unknown) + " out of range");
  const auto idx = static_cast<std::size_t>(unknown);
  if (idx >= problem.boundary_data.size() || !problem.boundary_data[idx]) return values;
  const auto& data = problem.boundary_data[idx];
  for (std::size_t v = 0; v < m.num_vertices(); ++v)
    if (m.is_boundary_vertex(static_cast<Index>(v))) values[v] = data(m.vertex(static_cast<Index>(v)));
  return values;
}

ManufacturedCase make_sech2_case() {
  ManufacturedCase c;
  c.name = "sech";
  const SineProduct phi{1.0};
  const std::vector<SineProduct> p{{2.0}, {3.0}};
  const std::vector<double> q{1.0, -1.0};

  c.phi = to_field(phi);
  for (const auto& s : p) c.p.push_back(to_field(s));

  // f_i = -(α'(p)|∇p|² + α(p)Δp) - q_i(∇p·∇φ + pΔφ)
  for (int i = 0; i < 2; ++i) {
    const SineProduct pi = p[i];
    const double qi = q[i];
    c.species_sources.push_back([phi, pi, qi](Vec2 x) {
      const double v = pi.value(x);
      const Vec2 gp = pi.gradient(x);
      return -(sech_alpha_y(v) * dot(gp, gp) + sech_alpha(v) * pi.laplacian(x)) -
             qi * (dot(gp, phi.gradient(x)) + v * phi.laplacian(x));
    });
  }
  // f = -Δφ - (p1 - p2) = 2π² sin(πx)sin(πy) - sin(2πx)sin(2πy) + sin(3πx)sin(3πy)
  c.poisson_source = [](Vec2 x) {
    const auto s = [x](double k) { return std::sin(k * kPi * x.x) * std::sin(k * kPi * x.y); };
    return 2.0 * kPi * kPi * s(1.0) - s(2.0) + s(3.0);
  };

  CoefficientBundle b = make_trivial_bundle(2, q);
  b.alpha = [](int, Vec2, double y) { return sech_alpha(y); };
  b.alpha_y = [](int, Vec2, double y) { return sech_alpha_y(y); };
  b.gamma = [q](int i, Vec2, double y) { return q[i] * y; };
  b.gamma_y = [q](int i, Vec2, double) { return q[i]; };
  b.g = minus_source(c.species_sources);
  b.f = c.poisson_source;
  b.state_min = -1.5;
  b.state_max = 1.5;

  c.problem.coefficients = std::move(b);
  c.problem.boundary_data.resize(3);
  c.problem.quadrature_degree = 4;
  return c;
}

ManufacturedCase make_singular_case() {
  ManufacturedCase c;
  c.name = "singular";
  const std::vector<double> q{1.0, -1.0};
  c.singular_point = {0.0, 0.0};
  c.exclusion_radius = 1e-6;

  // φ = ρ^0.1 with ρ = x² + y²; ∇φ = 0.2 ρ^-0.9 x, Δφ = 0.04 ρ^-0.9.
  c.phi.value = [](Vec2 x) { return std::pow(x.x * x.x + x.y * x.y, 0.1); };
  c.phi.gradient = [](Vec2 x) {
    const double rho = x.x * x.x + x.y * x.y;
    if (rho == 0.0) return Vec2{};
    return x * (0.2 * std::pow(rho, -0.9));
  };
  c.phi.laplacian = [](Vec2 x) {
    const double rho = x.x * x.x + x.y * x.y;
    return rho == 0.0 ? 0.0 : 0.04 * std::pow(rho, -0.9);
  };

  // p = S/(2ρ): ∇p = ∇S/(2ρ) - S x/ρ², Δp = ΔS/(2ρ) - 2∇S·x/ρ² + 2S/ρ².
  for (double k : {2.0, 3.0}) {
    const SineProduct s{k};
    ExactField f;
    f.value = [s](Vec2 x) {
      const double rho = x.x * x.x + x.y * x.y;
      return rho == 0.0 ? 0.0 : s.value(x) / (2.0 * rho);
    };
    f.gradient = [s](Vec2 x) {
      const double rho = x.x * x.x + x.y * x.y;
      if (rho == 0.0) return Vec2{};
      return s.gradient(x) * (1.0 / (2.0 * rho)) - x * (s.value(x) / (rho * rho));
    };
    f.laplacian = [s](Vec2 x) {
      const double rho = x.x * x.x + x.y * x.y;
      if (rho == 0.0) return 0.0;
      return s.laplacian(x) / (2.0 * rho) - 2.0 * dot(s.gradient(x), x) / (rho * rho) +
             2.0 * s.value(x) / (rho * rho);
    };
    c.p.push_back(std::move(f));
  }

  // f_i = -Δp - q_i(∇p·∇φ + pΔφ) + p³
  for (int i = 0; i < 2; ++i) {
    const ExactField pi = c.p[i];
    const ExactField phi = c.phi;
    const double qi = q[i];
    c.species_sources.push_back([pi, phi, qi](Vec2 x) {
      if (x.x == 0.0 && x.y == 0.0) return 0.0;
      const double v = pi.value(x);
      return -pi.laplacian(x) - qi * (dot(pi.gradient(x), phi.gradient(x)) + v * phi.laplacian(x)) + v * v * v;
    });
  }
  // f = -Δφ - (p1 - p2)
  {
    const ExactField p1 = c.p[0], p2 = c.p[1], phi = c.phi;
    c.poisson_source = [p1, p2, phi](Vec2 x) { return -phi.laplacian(x) - (p1.value(x) - p2.value(x)); };
  }

  CoefficientBundle b = make_trivial_bundle(2, q);
  b.gamma = [q](int i, Vec2, double y) { return q[i] * y; };
  b.gamma_y = [q](int i, Vec2, double) { return q[i]; };
  {
    const auto sources = c.species_sources;
    b.g = [sources](int i, Vec2 x, double y) { return y * y * y - sources[i](x); };
  }
  b.g_y = [](int, Vec2, double y) { return 3.0 * y * y; };
  b.f = c.poisson_source;

  c.problem.coefficients = std::move(b);
  c.problem.boundary_data = {c.phi.value, c.p[0].value, c.p[1].value};
  c.problem.quadrature_degree = 10;
  return c;
}

ManufacturedCase make_case(const std::string& id) {
  if (id == "sech") return make_sech2_case();
  if (id == "singular") return make_singular_case();
  throw std::invalid_argument("unknown example '" + id + "' (expected 'sech' or 'singular')");
}

std::vector<double> strong_residual(const ManufacturedCase& c, Vec2 x) {
  if (c.exclusion_radius > 0.0 && norm(x - c.singular_point) < c.exclusion_radius)
    throw std::domain_error("point lies inside the exclusion ball around the singularity");
  const CoefficientBundle& b = c.problem.coefficients;
  const Vec2 gphi = c.phi.gradient(x);
  const double lphi = c.phi.laplacian(x);

  std::vector<double> r;
  double charge = 0.0;
  for (int i = 0; i < b.n_species; ++i) {
    const double p = c.p[i].value(x);
    const Vec2 gp = c.p[i].gradient(x);
    const double lp = c.p[i].laplacian(x);
    const double div_flux = dot(b.alpha_grad_x(i, x, p), gp) + b.alpha_y(i, x, p) * dot(gp, gp) +
                            b.alpha(i, x, p) * lp + b.beta_div_x(i, x, p) + dot(b.beta_y(i, x, p), gp) +
                            dot(b.gamma_grad_x(i, x, p) + gp * b.gamma_y(i, x, p), gphi) + b.gamma(i, x, p) * lphi;
    r.push_back(-div_flux + b.g(i, x, p));
    charge += b.charges[i] * p;
  }
  const double div_eps = dot(b.epsilon_grad(x), gphi) + b.epsilon(x) * lphi;
  r.push_back(-div_eps - charge - b.f(x));
  return r;
}

}  // namespace pnp
