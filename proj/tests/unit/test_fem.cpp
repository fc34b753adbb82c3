#include <doctest.h>

#include <cmath>
#include <random>

#include "pfrac/driver.hpp"
#include "pfrac/fem.hpp"
#include "pfrac/verification.hpp"

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

/// u = G x with G = [[a, b], [b, c]], a uniform strain field.
Vector linear_field(const Mesh& mesh, double a, double b, double c) {
  Vector u(2 * mesh.num_nodes());
  for (std::size_t i = 0; i < mesh.num_nodes(); ++i) {
    const auto& p = mesh.nodes()[i];
    u[2 * i] = a * p.x + b * p.y;
    u[2 * i + 1] = b * p.x + c * p.y;
  }
  return u;
}

Vector constant(const Discretization& d, double c) { return Vector::Constant(d.num_nodes(), c); }

}  // namespace

TEST_CASE("strain of simple displacement fields") {
  const Discretization one(generate_rect(1, 1, 1, 1));
  Vector u = Vector::Zero(8);
  for (int i = 0; i < 4; ++i) {
    u[2 * i] = 0.3;
    u[2 * i + 1] = -0.2;
  }
  for (int g = 0; g < 4; ++g) {
    const SymTensor2 e = strain_at(one, u, 0, g);
    CHECK(std::abs(e.xx) + std::abs(e.yy) + std::abs(e.xy) < 1e-15);
  }

  const Vector stretch = linear_field(one.mesh(), 1.0, 0.0, 0.0);
  for (int g = 0; g < 4; ++g) {
    const SymTensor2 e = strain_at(one, stretch, 0, g);
    CHECK(e.xx == doctest::Approx(1.0));
    CHECK(e.yy == doctest::Approx(0.0));
    CHECK(e.xy == doctest::Approx(0.0));
  }

  Vector rot(8);
  for (int i = 0; i < 4; ++i) {
    const auto& p = one.mesh().nodes()[i];
    rot[2 * i] = -p.y;
    rot[2 * i + 1] = p.x;
  }
  for (int g = 0; g < 4; ++g) {
    const SymTensor2 e = strain_at(one, rot, 0, g);
    CHECK(std::abs(e.xx) + std::abs(e.yy) + std::abs(e.xy) < 1e-15);
  }
}

TEST_CASE("deformation energy closed forms") {
  const MaterialParams m = material();
  const Discretization d(generate_rect(2, 1, 4, 3));
  const Loads none;
  CHECK(energy_d(d, Vector::Zero(d.num_u_dofs()), constant(d, 1.0), none, m) == 0.0);

  const Vector u = linear_field(d.mesh(), 1e-3, 0.0, 0.0);
  const double w = stored_energy(SymTensor2::diag(1e-3, 0, 0), m);
  CHECK(energy_d(d, u, constant(d, 1.0), none, m) == doctest::Approx(2.0 * (1.0 + m.eta_eps) * w).epsilon(1e-12));
  CHECK(energy_d(d, u, constant(d, 0.0), none, m) == doctest::Approx(2.0 * m.eta_eps * w).epsilon(1e-12));

  // Work of a uniform traction on the right edge.
  Loads t;
  t.tractions = {{"right", 0.7, 0.0}};
  CHECK(energy_d(d, u, constant(d, 1.0), t, m) ==
        doctest::Approx(2.0 * (1.0 + m.eta_eps) * w - 0.7 * 1.0 * 2e-3).epsilon(1e-12));
  const Vector f = external_force(d, t);
  CHECK(f.sum() == doctest::Approx(0.7));
}

TEST_CASE("deformation energy derivatives") {
  const MaterialParams m = material();
  const Discretization d(generate_rect(1, 1, 3, 3));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ud(-1e-3, 1e-3), vd(0.1, 1.0);
  Vector u1(d.num_u_dofs()), u2(d.num_u_dofs()), v(d.num_nodes());
  for (auto& x : u1.reshaped()) x = ud(rng);
  for (auto& x : u2.reshaped()) x = ud(rng);
  for (auto& x : v.reshaped()) x = vd(rng);
  Loads loads;
  loads.tractions = {{"top", 0.1, -0.3}};
  loads.body_force = [](const Point2& p) { return std::array<double, 2>{p.x, 1.0 - p.y}; };

  const Vector r = residual_d(d, u1, v, loads, m);
  double max_err = 0.0;
  for (Eigen::Index i = 0; i < u1.size(); ++i) {
    const double h = 1e-7;
    Vector a = u1, b = u1;
    a[i] += h;
    b[i] -= h;
    const double fd = (energy_d(d, a, v, loads, m) - energy_d(d, b, v, loads, m)) / (2 * h);
    max_err = std::max(max_err, std::abs(fd - r[i]) / std::max(1e-12, r.cwiseAbs().maxCoeff()));
  }
  CHECK(max_err < 1e-6);

  // E_d is quadratic in u: the tangent maps displacement differences to residual differences.
  const SparseMatrix k = tangent_d(d, v, m);
  const Vector dr = residual_d(d, u1, v, loads, m) - residual_d(d, u2, v, loads, m);
  CHECK((k * (u1 - u2) - dr).norm() <= 1e-10 * dr.norm());
}

TEST_CASE("residual vanishes on free dofs at the deformation-energy minimizer") {
  Problem p;
  p.material = material();
  p.disc = std::make_shared<Discretization>(generate_rect(1, 1, 4, 4));
  p.derived = derive_constants(p.material);
  p.dirichlet = {{"left", 0, 0.0}, {"bottom", 1, 0.0}, {"right", 0, 1e-3}};
  p.loads.tractions = {{"top", 0.0, 0.2}};
  Vector v = constant(*p.disc, 0.8);
  const DirichletData bc = dirichlet_data(p, 1.0);
  const Vector u = solve_u(tangent_d(*p.disc, v, p.material), external_force(*p.disc, p.loads), bc, 1e-12);
  Vector r = residual_d(*p.disc, u, v, p.loads, p.material);
  for (int dof : bc.dofs) r[dof] = 0.0;
  CHECK(r.cwiseAbs().maxCoeff() < 1e-10 * external_force(*p.disc, p.loads).norm() + 1e-14);
}

TEST_CASE("fracture functional closed forms") {
  const MaterialParams m = material();
  const DerivedConstants dc = derive_constants(m);
  const Discretization d(generate_rect(1, 2, 3, 5));
  const double area = 2.0;
  const SymTensor2 e = SymTensor2::diag(4e-4, -1e-4, 0);
  const Vector u = linear_field(d.mesh(), e.xx, e.xy, e.yy);
  const double w = stored_energy(e, m);
  const double che = che_undamaged(e, m, dc);
  const double reg = 3.0 * m.delta_eps * m.g_c / (8.0 * m.eps);

  const FractureTerms one = energy_f(d, constant(d, 1.0), u, m, dc);
  CHECK(one.elastic == doctest::Approx(w * area).epsilon(1e-12));
  CHECK(one.strength == doctest::Approx(che * area / 3.0).epsilon(1e-12));
  CHECK(std::abs(one.regularization) < 1e-15);

  const FractureTerms zero = energy_f(d, constant(d, 0.0), u, m, dc);
  CHECK(zero.total() == doctest::Approx(reg * area).epsilon(1e-12));

  const double c = 0.37;
  const FractureTerms mid = energy_f(d, constant(d, c), u, m, dc);
  CHECK(mid.total() ==
        doctest::Approx(c * c * w * area + c * c * c / 3.0 * che * area + reg * (1 - c) * area).epsilon(1e-12));
  CHECK(mid.total() == doctest::Approx(mid.elastic + mid.strength + mid.regularization).epsilon(1e-12));

  const FractureTerms g1 = energy_g(d, constant(d, 1.0), u, m);
  CHECK(g1.total() == doctest::Approx(w * area).epsilon(1e-12));
  const FractureTerms g0 = energy_g(d, constant(d, 0.0), u, m);
  CHECK(g0.total() == doctest::Approx(3.0 * m.g_c * area / (8.0 * m.eps)).epsilon(1e-12));
}

TEST_CASE("Griffith functional is the fracture functional without the strength term") {
  const MaterialParams m = material();
  const DerivedConstants dc = derive_constants(m);
  const Discretization d(generate_rect(1, 1, 4, 4));
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> ud(-1e-3, 1e-3), vd(0.0, 1.0);
  for (int k = 0; k < 5; ++k) {
    Vector u(d.num_u_dofs()), v(d.num_nodes());
    for (auto& x : u.reshaped()) x = ud(rng);
    for (auto& x : v.reshaped()) x = vd(rng);
    const FractureTerms f = energy_f(d, v, u, m, dc);
    const FractureTerms g = energy_g(d, v, u, m);
    CHECK(g.strength == 0.0);
    CHECK(g.elastic == doctest::Approx(f.elastic).epsilon(1e-14));
    CHECK(g.regularization == doctest::Approx(f.regularization / m.delta_eps).epsilon(1e-12));
  }
}

TEST_CASE("undamaged unloaded state pushes v against the upper bound") {
  const MaterialParams m = material();
  const DerivedConstants dc = derive_constants(m);
  const Discretization d(generate_rect(1, 1, 4, 4));
  const Vector r = residual_f(d, constant(d, 1.0), Vector::Zero(d.num_u_dofs()), m, dc);
  const double reg = 3.0 * m.delta_eps * m.g_c / (8.0 * m.eps);
  for (std::size_t i = 0; i < d.num_nodes(); ++i) {
    CHECK(r[static_cast<Eigen::Index>(i)] == doctest::Approx(-reg * d.lumped_area()[i]).epsilon(1e-12));
    CHECK(r[static_cast<Eigen::Index>(i)] < 0.0);
  }
}

TEST_CASE("phase-field derivatives match finite differences") {
  const MaterialParams m = material();
  const Discretization d(generate_rect(1, 1, 4, 4));
  GradientCheckOptions opt;
  opt.samples = 10;
  const GradientCheckReport r = check_gradients(d, m, opt);
  CHECK(r.residual_d < 1e-6);
  CHECK(r.tangent_d < 1e-5);
  CHECK(r.residual_f < 1e-6);
  CHECK(r.tangent_f < 1e-5);
  CHECK(r.residual_g < 1e-6);
  CHECK(r.tangent_g < 1e-5);
  CHECK(r.pass);

  // The assembled matrices agree with the functional object.
  const DerivedConstants dc = derive_constants(m);
  Vector u(d.num_u_dofs()), v(d.num_nodes());
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ud(-1e-3, 1e-3), vd(0.0, 1.0);
  for (auto& x : u.reshaped()) x = ud(rng);
  for (auto& x : v.reshaped()) x = vd(rng);
  const FractureFunctional f(d, u, m, dc, FractureModel::Strength);
  CHECK((f.gradient(v) - residual_f(d, v, u, m, dc)).norm() == 0.0);
  CHECK((SparseMatrix(f.hessian(v) - tangent_f(d, v, u, m, dc))).norm() == 0.0);
}

TEST_CASE("damaged measure") {
  const Discretization d(generate_rect(1, 1, 2, 2));
  Vector v = constant(d, 1.0);
  CHECK(damaged_measure(d, v, 0.05) == 0.0);
  v[4] = 0.0;  // centre node
  CHECK(damaged_measure(d, v, 0.05) == doctest::Approx(0.25));
  CHECK(damaged_measure(d, constant(d, 0.0), 0.05) == doctest::Approx(1.0));
}
