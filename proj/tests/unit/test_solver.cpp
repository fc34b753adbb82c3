#include <doctest.h>

#include <cmath>
#include <vector>

#include "pfrac/errors.hpp"
#include "pfrac/fem.hpp"
#include "pfrac/solver.hpp"

using namespace pfrac;

namespace {

MaterialParams material() {
  MaterialParams m;
  m.mu = 1000.0;
  m.lambda = 1500.0;
  m.sigma_ts = 1.0;
  m.sigma_hs = 1.0;
  m.g_c = 2e-4;
  m.eps = 0.05;
  m.delta_eps = 1.7;
  return m;
}

/// Dirichlet data prescribing `field` on every boundary node.
DirichletData boundary_data(const Mesh& mesh, const std::function<std::array<double, 2>(const Point2&)>& field) {
  std::vector<int> nodes;
  for (const char* tag : {"left", "right", "bottom", "top"}) {
    const auto ids = mesh.nodes_on(tag);
    nodes.insert(nodes.end(), ids.begin(), ids.end());
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  DirichletData bc;
  for (int n : nodes) {
    const auto u = field(mesh.nodes()[n]);
    bc.dofs.push_back(2 * n);
    bc.values.push_back(u[0]);
    bc.dofs.push_back(2 * n + 1);
    bc.values.push_back(u[1]);
  }
  return bc;
}

}  // namespace

TEST_CASE("zero data gives the zero displacement") {
  const MaterialParams m = material();
  const Discretization d(generate_rect(1, 1, 3, 3));
  const auto bc = boundary_data(d.mesh(), [](const Point2&) { return std::array<double, 2>{0.0, 0.0}; });
  const Vector u = solve_u(tangent_d(d, Vector::Ones(d.num_nodes()), m), Vector::Zero(d.num_u_dofs()), bc, 1e-12);
  CHECK(u.norm() == 0.0);
}

TEST_CASE("patch test: linear boundary data reproduces the uniform strain") {
  const MaterialParams m = material();
  // Distorted interior nodes: bilinear elements must still pass.
  std::vector<Point2> nodes;
  std::vector<Quad> elements;
  const Mesh grid = generate_rect(1, 1, 3, 3);
  nodes = grid.nodes();
  nodes[5] = {0.41, 0.29};
  nodes[6] = {0.62, 0.37};
  nodes[9] = {0.30, 0.71};
  nodes[10] = {0.70, 0.64};
  const Mesh mesh(nodes, grid.elements(), grid.facets(), grid.node_sets());
  const Discretization d(mesh);
  const auto exact = [](const Point2& p) {
    return std::array<double, 2>{1e-3 * p.x + 4e-4 * p.y + 1e-5, 4e-4 * p.x - 2e-4 * p.y - 3e-5};
  };
  const auto bc = boundary_data(mesh, exact);

  for (auto kind : {LinearSolverKind::Cholesky, LinearSolverKind::ConjugateGradient}) {
    SolveReport report;
    const Vector u =
        solve_u(tangent_d(d, Vector::Ones(d.num_nodes()), m), Vector::Zero(d.num_u_dofs()), bc, 1e-14, kind, &report);
    CHECK(report.converged);
    for (std::size_t i = 0; i < mesh.num_nodes(); ++i) {
      const auto e = exact(mesh.nodes()[i]);
      CHECK(std::abs(u[2 * i] - e[0]) < 1e-10 * 1e-3);
      CHECK(std::abs(u[2 * i + 1] - e[1]) < 1e-10 * 1e-3);
    }
    for (std::size_t el = 0; el < d.num_elements(); ++el) {
      for (int g = 0; g < 4; ++g) {
        const SymTensor2 s = strain_at(d, u, el, g);
        CHECK(std::abs(s.xx - 1e-3) < 1e-13);
        CHECK(std::abs(s.yy + 2e-4) < 1e-13);
        CHECK(std::abs(s.xy - 4e-4) < 1e-13);
      }
    }
  }
}

TEST_CASE("manufactured solution converges at second order in L2") {
  const MaterialParams m = material();
  const double mu = m.mu, lam = m.lambda, scale = 1.0 + m.eta_eps;
  // u* = (x^2 y + y^3 / 3, x y^2 - x^3), b = -div sigma(u*) for stiffness (1 + eta) C.
  const auto exact = [](const Point2& p) {
    return std::array<double, 2>{p.x * p.x * p.y + p.y * p.y * p.y / 3.0, p.x * p.y * p.y - p.x * p.x * p.x};
  };
  Loads loads;
  loads.body_force = [=](const Point2& p) {
    return std::array<double, 2>{scale * -4.0 * (lam + 2.0 * mu) * p.y, scale * -4.0 * lam * p.x};
  };

  std::vector<double> errors;
  for (int n : {4, 8, 16, 32}) {
    const Discretization d(generate_rect(1, 1, n, n));
    const Vector u = solve_u(tangent_d(d, Vector::Ones(d.num_nodes()), m), external_force(d, loads),
                             boundary_data(d.mesh(), exact), 1e-14);
    double err2 = 0.0;
    for (std::size_t e = 0; e < d.num_elements(); ++e) {
      const Quad& q = d.mesh().elements()[e];
      for (const auto& g : d.gauss(e)) {
        double uh[2] = {0.0, 0.0};
        for (int a = 0; a < 4; ++a) {
          uh[0] += g.n[a] * u[2 * q[a]];
          uh[1] += g.n[a] * u[2 * q[a] + 1];
        }
        const auto ue = exact(g.x);
        err2 += g.weight * ((uh[0] - ue[0]) * (uh[0] - ue[0]) + (uh[1] - ue[1]) * (uh[1] - ue[1]));
      }
    }
    errors.push_back(std::sqrt(err2));
  }
  for (std::size_t k = 1; k < errors.size(); ++k) {
    const double order = std::log2(errors[k - 1] / errors[k]);
    CAPTURE(order);
    CHECK(std::abs(order - 2.0) <= 0.2);
  }
}

TEST_CASE("displacement solver checks its inputs") {
  const MaterialParams m = material();
  const Discretization d(generate_rect(1, 1, 2, 2));
  DisplacementSolver s(d.num_u_dofs(), {0, 1, 2});
  CHECK_THROWS(s.solve(tangent_d(d, Vector::Ones(d.num_nodes()), m), Vector::Zero(d.num_u_dofs()), {0.0}, 1e-12));
  // Only three constrained dofs leave a rigid rotation free: not positive definite.
  CHECK_THROWS_AS(
      s.solve(tangent_d(d, Vector::Ones(d.num_nodes()), m), Vector::Zero(d.num_u_dofs()), {0.0, 0.0, 1.0}, 1e-12),
      SolverError);
}

TEST_CASE("phase-field solve: undamaged unloaded state is stationary") {
  const MaterialParams m = material();
  const Discretization d(generate_rect(1, 1, 4, 4));
  const FractureFunctional f(d, Vector::Zero(d.num_u_dofs()), m, derive_constants(m), FractureModel::Strength);
  const Vector ones = Vector::Ones(d.num_nodes());
  BoxNewtonOptions opt;
  opt.tol = default_v_tolerance(f);
  const auto [v, report] = solve_v(f, ones, ones, opt);
  CHECK(report.converged);
  CHECK(v == ones);
}

TEST_CASE("phase-field solve pins nodes whose upper bound is zero") {
  const MaterialParams m = material();
  const Discretization d(generate_rect(1, 1, 6, 6));
  Vector u(d.num_u_dofs());
  for (std::size_t i = 0; i < d.num_nodes(); ++i) {
    u[2 * i] = 2e-3 * d.mesh().nodes()[i].x;
    u[2 * i + 1] = 0.0;
  }
  const FractureFunctional f(d, u, m, derive_constants(m), FractureModel::Strength);
  Vector upper = Vector::Ones(d.num_nodes());
  upper[10] = upper[11] = upper[24] = 0.0;
  BoxNewtonOptions opt;
  opt.tol = default_v_tolerance(f);
  const auto [v, report] = solve_v(f, upper, upper, opt);
  CHECK(report.converged);
  CHECK(v[10] == 0.0);
  CHECK(v[11] == 0.0);
  CHECK(v[24] == 0.0);
  CHECK(v.minCoeff() >= 0.0);
  CHECK((upper - v).minCoeff() >= 0.0);
  CHECK(report.final_energy <= report.initial_energy);
}

TEST_CASE("phase-field solve matches the scalar minimizer for a uniform state") {
  const MaterialParams m = material();
  const DerivedConstants dc = derive_constants(m);
  const Discretization d(generate_rect(1, 1, 5, 5));
  const SymTensor2 e = SymTensor2::diag(0.01, 0.0, 0.0);
  Vector u(d.num_u_dofs());
  for (std::size_t i = 0; i < d.num_nodes(); ++i) {
    u[2 * i] = e.xx * d.mesh().nodes()[i].x;
    u[2 * i + 1] = 0.0;
  }
  const double w = stored_energy(e, m);
  const double che = che_undamaged(e, m, dc);
  const double reg = 3.0 * m.delta_eps * m.g_c / (8.0 * m.eps);
  REQUIRE(che > 0.0);
  REQUIRE(w > 10.0 * reg);
  // Minimizer of c^2 w + c^3 che / 3 + reg (1 - c): 2 c w + c^2 che = reg.
  const double c = (-2.0 * w + std::sqrt(4.0 * w * w + 4.0 * che * reg)) / (2.0 * che);

  const FractureFunctional f(d, u, m, dc, FractureModel::Strength);
  const Vector ones = Vector::Ones(d.num_nodes());
  BoxNewtonOptions opt;
  opt.tol = default_v_tolerance(f);
  const auto [v, report] = solve_v(f, ones, ones, opt);
  CHECK(report.converged);
  for (Eigen::Index i = 0; i < v.size(); ++i) CHECK(v[i] == doctest::Approx(c).epsilon(1e-8));
}

TEST_CASE("stationarity check") {
  const Vector upper = Vector::Ones(4);
  Vector v(4), g(4);
  v << 1.0, 0.5, 0.0, 0.2;
  g << -1.0, 1e-12, 2.0, -1e-12;
  StationarityCheck c = check_stationarity(v, g, upper, 1e-10);
  CHECK(c.ok);
  CHECK(c.free_dofs == 2);
  CHECK(c.clamped_dofs == 2);

  g << 1.0, 0.0, 0.0, 0.0;  // wrong sign at the upper bound
  c = check_stationarity(v, g, upper, 1e-10);
  CHECK_FALSE(c.ok);
  CHECK(c.max_clamped_violation == doctest::Approx(1.0));

  CHECK(projected_gradient_norm(v, Vector::Zero(4), upper) == 0.0);
}
