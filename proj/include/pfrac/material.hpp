// Constitutive content: linear elasticity, the Drucker-Prager strength
// surface, the strength driving force and its coefficients.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pfrac/tensor.hpp"

namespace pfrac {

struct MaterialParams {
  double mu = 0.0;          ///< shear modulus
  double lambda = 0.0;      ///< first Lame constant
  double sigma_ts = 0.0;    ///< uniaxial tensile strength
  double sigma_hs = 0.0;    ///< hydrostatic strength
  double g_c = 0.0;         ///< critical energy release rate
  double eps = 0.0;         ///< regularization length
  double eta_eps = 1e-5;    ///< residual stiffness
  double delta_eps = 0.0;   ///< coefficient scaling the regularization term
  friend bool operator==(const MaterialParams&, const MaterialParams&) = default;
};

inline constexpr double kEtaEpsDefault = 1e-5;
inline constexpr double kEtaEpsMax = 1e-2;

/// Checks every MaterialParams invariant. Throws ValidationError naming the
/// offending field; returns non-fatal warnings (near-degenerate strength ratio).
std::vector<std::string> validate(const MaterialParams& m);

struct DerivedConstants {
  double young_e = 0.0;
  double kappa = 0.0;
  double w_ts = 0.0;   ///< stored energy at the uniaxial tensile strength state
  double w_hs = 0.0;   ///< stored energy at the hydrostatic strength state
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double eps_recommended_max = 0.0;  ///< 3 g_c / (16 w_ts)
};

double young_modulus(double mu, double lambda);
double bulk_modulus(double mu, double lambda);

/// delta_eps = 3 g_c / (16 w_ts eps), i.e. the leading-order prescription with
/// the O(1) correction dropped. Used when no delta_eps is supplied.
double fallback_delta_eps(const MaterialParams& m);

DerivedConstants derive_constants(const MaterialParams& m);

/// W(E) = mu tr(E^2) + lambda/2 (tr E)^2
double stored_energy(const SymTensor2& strain, const MaterialParams& m);

/// dW/dE = 2 mu E + lambda (tr E) I
SymTensor2 stress(const SymTensor2& strain, const MaterialParams& m);

/// Drucker-Prager strength function; (3 sigma_hs - sigma_ts) F >= 0 marks a
/// stress state violating the strength of the material.
double strength_function(const SymTensor2& sigma, const MaterialParams& m);

struct DerivedStrengths {
  double shear = 0.0;        ///< sigma = diag(s, -s, 0)
  double biaxial = 0.0;      ///< sigma = diag(s, s, 0)
  double compressive = 0.0;  ///< sigma = diag(-s, 0, 0), reported positive
};

/// Shear, biaxial-tensile and uniaxial-compressive strengths implied by the
/// surface, as positive magnitudes; +infinity when the loading ray never
/// reaches the surface (e.g. compression for sigma_hs / sigma_ts <= 2/3).
DerivedStrengths derived_strengths(const MaterialParams& m);

/// Undamaged driving force: mu alpha2 sqrt(2 tr E_D^2) + 3 kappa alpha1 tr E.
double che_undamaged(const SymTensor2& strain, const MaterialParams& m, const DerivedConstants& d);

struct EpsCheck {
  bool pass = true;
  double ratio = 0.0;      ///< eps / eps_recommended_max
  double threshold = 0.0;  ///< eps_recommended_max
  std::string message() const;
};

EpsCheck check_eps(const MaterialParams& m, const DerivedConstants& d);

}  // namespace pfrac
