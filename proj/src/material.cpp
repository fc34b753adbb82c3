#include "pfrac/material.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "pfrac/errors.hpp"

namespace pfrac {

namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ValidationError(name, "must be a finite positive number (got " + std::to_string(value) + ")");
  }
}

}  // namespace

std::vector<std::string> validate(const MaterialParams& m) {
  require_positive(m.mu, "mu");
  require_positive(m.lambda, "lambda");
  require_positive(m.sigma_ts, "sigma_ts");
  require_positive(m.sigma_hs, "sigma_hs");
  require_positive(m.g_c, "g_c");
  require_positive(m.eps, "eps");
  require_positive(m.eta_eps, "eta_eps");
  if (m.eta_eps > kEtaEpsMax) {
    throw ValidationError("eta_eps", "must lie in (0, 1e-2]");
  }
  if (!(m.delta_eps >= 0.0) || !std::isfinite(m.delta_eps)) {
    throw ValidationError("delta_eps", "must be a finite non-negative number");
  }

  std::vector<std::string> warnings;
  const double denom = 3.0 * m.sigma_hs - m.sigma_ts;
  if (denom == 0.0) {
    throw ValidationError("sigma_hs",
                          "3 sigma_hs - sigma_ts = 0 makes the Drucker-Prager strength surface degenerate");
  }
  if (std::abs(denom) < 1e-8 * m.sigma_ts) {
    warnings.emplace_back("3 sigma_hs - sigma_ts is nearly zero; the strength surface is close to degenerate");
  }
  if (denom < 0.0) {
    warnings.emplace_back("3 sigma_hs < sigma_ts: soft-solid strength regime");
  }
  return warnings;
}

double young_modulus(double mu, double lambda) { return mu * (3.0 * lambda + 2.0 * mu) / (lambda + mu); }

double bulk_modulus(double mu, double lambda) { return lambda + 2.0 / 3.0 * mu; }

double fallback_delta_eps(const MaterialParams& m) {
  const double e = young_modulus(m.mu, m.lambda);
  const double w_ts = m.sigma_ts * m.sigma_ts / (2.0 * e);
  return 3.0 * m.g_c / (16.0 * w_ts * m.eps);
}

DerivedConstants derive_constants(const MaterialParams& m) {
  DerivedConstants d;
  d.young_e = young_modulus(m.mu, m.lambda);
  d.kappa = bulk_modulus(m.mu, m.lambda);
  d.w_ts = m.sigma_ts * m.sigma_ts / (2.0 * d.young_e);
  d.w_hs = m.sigma_hs * m.sigma_hs / (2.0 * d.kappa);
  d.eps_recommended_max = 3.0 * m.g_c / (16.0 * d.w_ts);

  const double s3 = std::sqrt(3.0);
  const double toughness = m.delta_eps * m.g_c / (8.0 * m.eps);
  d.alpha1 = toughness / m.sigma_hs - 2.0 * d.w_hs / (3.0 * m.sigma_hs);
  d.alpha2 = s3 * (3.0 * m.sigma_hs - m.sigma_ts) / (m.sigma_hs * m.sigma_ts) * toughness +
             2.0 * d.w_hs / (s3 * m.sigma_hs) - 2.0 * s3 * d.w_ts / m.sigma_ts;
  return d;
}

double stored_energy(const SymTensor2& strain, const MaterialParams& m) {
  const double tr = trace(strain);
  return m.mu * double_contract(strain, strain) + 0.5 * m.lambda * tr * tr;
}

SymTensor2 stress(const SymTensor2& strain, const MaterialParams& m) {
  return 2.0 * m.mu * strain + (m.lambda * trace(strain)) * SymTensor2::identity();
}

double strength_function(const SymTensor2& sigma, const MaterialParams& m) {
  const double s3 = std::sqrt(3.0);
  const double denom = 3.0 * m.sigma_hs - m.sigma_ts;
  return std::sqrt(j2(sigma)) + m.sigma_ts * trace(sigma) / (s3 * denom) - s3 * m.sigma_hs * m.sigma_ts / denom;
}

DerivedStrengths derived_strengths(const MaterialParams& m) {
  const double ratio = m.sigma_hs / m.sigma_ts;
  const double d_shear = -1.0 / 3.0 + ratio;
  const double d_biaxial = 1.0 / 3.0 + ratio;
  const double d_compressive = -2.0 / 3.0 + ratio;
  // A non-positive denominator means the ray never meets the surface.
  const auto root = [&](double scale, double d) {
    return d > 0.0 ? m.sigma_hs / (scale * d) : std::numeric_limits<double>::infinity();
  };
  DerivedStrengths s;
  s.shear = root(std::sqrt(3.0), d_shear);
  s.biaxial = root(1.0, d_biaxial);
  s.compressive = root(1.0, d_compressive);
  return s;
}

double che_undamaged(const SymTensor2& strain, const MaterialParams& m, const DerivedConstants& d) {
  const SymTensor2 dev = deviator(strain);
  return m.mu * d.alpha2 * std::sqrt(2.0 * double_contract(dev, dev)) + 3.0 * d.kappa * d.alpha1 * trace(strain);
}

EpsCheck check_eps(const MaterialParams& m, const DerivedConstants& d) {
  EpsCheck c;
  c.threshold = d.eps_recommended_max;
  c.ratio = m.eps / d.eps_recommended_max;
  c.pass = m.eps < d.eps_recommended_max;
  return c;
}

std::string EpsCheck::message() const {
  std::ostringstream os;
  os << (pass ? "pass" : "warn") << ": eps / (3 g_c / (16 w_ts)) = " << ratio << " (threshold " << threshold << ")";
  return os.str();
}

}  // namespace pfrac
