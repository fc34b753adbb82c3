// Finite-difference verification of assembled gradients and Hessians.
#pragma once

#include <cstdint>
#include <string>

#include "pfrac/fem.hpp"
#include "pfrac/material.hpp"

namespace pfrac {

struct GradientCheckOptions {
  int samples = 50;
  std::uint64_t seed = 12345;
  double step = 1e-6;  ///< relative finite-difference step
  double gradient_tol = 1e-6;
  double hessian_tol = 1e-5;
};

struct GradientCheckReport {
  int samples = 0;
  double residual_d = 0.0;  ///< max relative error, E_d gradient
  double tangent_d = 0.0;   ///< max relative error, E_d Hessian
  double residual_f = 0.0;
  double tangent_f = 0.0;
  double residual_g = 0.0;
  double tangent_g = 0.0;
  bool pass = false;
  std::string summary() const;
};

/// Central differences of the assembled energies on random (u, v) pairs.
/// Displacements are drawn at the scale of the tensile-strength strain.
GradientCheckReport check_gradients(const Discretization& disc, const MaterialParams& m,
                                    const GradientCheckOptions& opt = {});

}  // namespace pfrac
