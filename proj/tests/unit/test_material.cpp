#include <doctest.h>

#include <cmath>
#include <random>

#include "pfrac/errors.hpp"
#include "pfrac/material.hpp"

using namespace pfrac;

namespace {

MaterialParams base_material() {
  MaterialParams m;
  m.mu = 1000.0;
  m.lambda = 1500.0;
  m.sigma_ts = 1.0;
  m.sigma_hs = 1.0;
  m.g_c = 2e-4;
  m.eps = 0.05;
  m.delta_eps = 1.3;
  return m;
}

SymTensor2 random_strain(std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return {u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
}

}  // namespace

TEST_CASE("stored energy and stress") {
  MaterialParams m = base_material();
  CHECK(stored_energy(SymTensor2::zero(), m) == 0.0);
  CHECK(stress(SymTensor2::zero(), m) == SymTensor2::zero());

  MaterialParams unit = m;
  unit.mu = 1.0;
  unit.lambda = 1.0;
  CHECK(stored_energy(SymTensor2::diag(1, 0, 0), unit) == doctest::Approx(1.5));

  MaterialParams shear = m;
  shear.mu = 1.0;
  shear.lambda = 0.0;
  const SymTensor2 s = stress(SymTensor2{0, 0, 0, 0.5, 0, 0}, shear);
  CHECK(s == SymTensor2{0, 0, 0, 1.0, 0, 0});

  std::mt19937_64 rng(1);
  for (int k = 0; k < 20; ++k) {
    const SymTensor2 e = random_strain(rng, 1e-3);
    CHECK(stored_energy(e, m) == doctest::Approx(0.5 * double_contract(stress(e, m), e)).epsilon(1e-13));
  }
}

TEST_CASE("stress is the gradient of the stored energy") {
  const MaterialParams m = base_material();
  std::mt19937_64 rng(2);
  for (int k = 0; k < 10; ++k) {
    const SymTensor2 e = random_strain(rng, 1e-3);
    const SymTensor2 s = stress(e, m);
    const double h = 1e-7;
    // Perturbing an off-diagonal slot moves two entries of the full tensor,
    // so its derivative is twice the tensor component.
    const double expected[6] = {s.xx, s.yy, s.zz, 2 * s.xy, 2 * s.yz, 2 * s.xz};
    for (int i = 0; i < 6; ++i) {
      SymTensor2 a = e, b = e;
      double* pa[6] = {&a.xx, &a.yy, &a.zz, &a.xy, &a.yz, &a.xz};
      double* pb[6] = {&b.xx, &b.yy, &b.zz, &b.xy, &b.yz, &b.xz};
      *pa[i] += h;
      *pb[i] -= h;
      const double fd = (stored_energy(a, m) - stored_energy(b, m)) / (2 * h);
      CHECK(fd == doctest::Approx(expected[i]).epsilon(1e-6));
    }
  }
}

TEST_CASE("strength function at characteristic states") {
  const MaterialParams m = base_material();
  CHECK(std::abs(strength_function(SymTensor2::diag(m.sigma_ts, 0, 0), m)) < 1e-14);
  CHECK(std::abs(strength_function(SymTensor2::diag(m.sigma_hs, m.sigma_hs, m.sigma_hs), m)) < 1e-14);

  MaterialParams q = m;
  q.sigma_ts = 2.0;
  q.sigma_hs = 1.5;
  const double denom = 3 * q.sigma_hs - q.sigma_ts;
  CHECK(strength_function(SymTensor2::zero(), q) ==
        doctest::Approx(-std::sqrt(3.0) * q.sigma_hs * q.sigma_ts / denom));
}

TEST_CASE("derived strengths") {
  const DerivedStrengths s = derived_strengths(base_material());
  CHECK(s.shear == doctest::Approx(std::sqrt(3.0) / 2.0));
  CHECK(s.biaxial == doctest::Approx(0.75));
  CHECK(s.compressive == doctest::Approx(3.0));

  MaterialParams soft = base_material();
  soft.sigma_hs = 0.5;  // sigma_hs / sigma_ts < 2/3: compression never reaches the surface
  CHECK(std::isinf(derived_strengths(soft).compressive));
}

TEST_CASE("derived strengths are roots of the strength function for random ratios") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ts(0.1, 10.0), ratio(0.34, 5.0);
  for (int k = 0; k < 20; ++k) {
    MaterialParams m = base_material();
    m.sigma_ts = ts(rng);
    m.sigma_hs = ratio(rng) * m.sigma_ts;
    const DerivedStrengths s = derived_strengths(m);
    const double tol = 1e-10 * m.sigma_ts;
    CHECK(std::abs(strength_function(SymTensor2::diag(s.shear, -s.shear, 0), m)) < tol);
    CHECK(std::abs(strength_function(SymTensor2::diag(s.biaxial, s.biaxial, 0), m)) < tol);
    if (std::isfinite(s.compressive)) {
      CHECK(std::abs(strength_function(SymTensor2::diag(-s.compressive, 0, 0), m)) < tol);
    } else {
      CHECK(m.sigma_hs <= 2.0 / 3.0 * m.sigma_ts);
    }
  }
}

TEST_CASE("derived constants") {
  MaterialParams m = base_material();
  m.mu = 1.0;
  m.lambda = 1.0;
  const DerivedConstants d = derive_constants(m);
  CHECK(d.young_e == doctest::Approx(2.5));
  CHECK(d.kappa == doctest::Approx(5.0 / 3.0));

  MaterialParams e2 = base_material();
  e2.mu = 1.0;
  e2.lambda = 0.0;  // E = 2
  e2.sigma_ts = 1.0;
  e2.g_c = 0.4;
  const DerivedConstants d2 = derive_constants(e2);
  CHECK(d2.young_e == doctest::Approx(2.0));
  CHECK(d2.w_ts == doctest::Approx(0.25));
  CHECK(d2.eps_recommended_max == doctest::Approx(0.75 * e2.g_c));

  CHECK(fallback_delta_eps(m) == doctest::Approx(3 * m.g_c / (16 * derive_constants(m).w_ts * m.eps)));
}

TEST_CASE("undamaged driving force") {
  const MaterialParams m = base_material();
  const DerivedConstants d = derive_constants(m);
  CHECK(che_undamaged(SymTensor2::zero(), m, d) == 0.0);
  const double theta = 3e-4;
  CHECK(che_undamaged(SymTensor2::identity() * (theta / 3.0), m, d) ==
        doctest::Approx(3 * d.kappa * d.alpha1 * theta).epsilon(1e-12));

  // Route through the invariants of the degraded stress.
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> vd(0.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    SymTensor2 e = random_strain(rng, 1e-3);
    e.yz = e.xz = 0.0;
    const double v = vd(rng);
    const SymTensor2 sigma = stress(e, m) * (v * v);
    const double ce = d.alpha2 * std::sqrt(j2(sigma)) + d.alpha1 * trace(sigma);
    CHECK(v * v * che_undamaged(e, m, d) == doctest::Approx(ce).epsilon(1e-12).scale(1e-12));
  }
}

TEST_CASE("eps check") {
  MaterialParams m = base_material();
  const DerivedConstants d = derive_constants(m);
  m.eps = 0.5 * d.eps_recommended_max;
  EpsCheck c = check_eps(m, d);
  CHECK(c.pass);
  CHECK(c.ratio == doctest::Approx(0.5));
  m.eps = 2.0 * d.eps_recommended_max;
  c = check_eps(m, d);
  CHECK_FALSE(c.pass);
  CHECK(c.ratio == doctest::Approx(2.0));

  MaterialParams e2 = base_material();
  e2.mu = 1.0;
  e2.lambda = 0.0;
  e2.g_c = 1.0;
  CHECK(check_eps(e2, derive_constants(e2)).threshold == doctest::Approx(0.75));
}

TEST_CASE("validation") {
  MaterialParams m = base_material();
  CHECK(validate(m).empty());

  m.g_c = -1.0;
  try {
    validate(m);
    FAIL("negative g_c accepted");
  } catch (const ValidationError& e) {
    CHECK(e.field() == "g_c");
  }

  MaterialParams deg = base_material();
  deg.sigma_ts = 3.0;
  deg.sigma_hs = 1.0;
  try {
    validate(deg);
    FAIL("degenerate strength surface accepted");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("Drucker-Prager") != std::string::npos);
  }

  MaterialParams eta = base_material();
  eta.eta_eps = 0.1;
  CHECK_THROWS_AS(validate(eta), ValidationError);
}
