#include "pfrac/verification.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace pfrac {

namespace {

double rel_error(const Vector& approx, const Vector& exact) {
  const double scale = std::max(exact.lpNorm<Eigen::Infinity>(), 1e-300);
  return (approx - exact).lpNorm<Eigen::Infinity>() / scale;
}

template <class Energy>
Vector fd_gradient(const Energy& energy, Vector x, double h) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double x0 = x[i];
    x[i] = x0 + h;
    const double ep = energy(x);
    x[i] = x0 - h;
    const double em = energy(x);
    x[i] = x0;
    g[i] = (ep - em) / (2.0 * h);
  }
  return g;
}

template <class Gradient>
double fd_hessian_error(const Gradient& gradient, const SparseMatrix& hess, Vector x, double h) {
  const Eigen::MatrixXd dense = Eigen::MatrixXd(hess);
  Eigen::MatrixXd fd(x.size(), x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double x0 = x[j];
    x[j] = x0 + h;
    const Vector gp = gradient(x);
    x[j] = x0 - h;
    const Vector gm = gradient(x);
    x[j] = x0;
    fd.col(j) = (gp - gm) / (2.0 * h);
  }
  const double scale = std::max(dense.cwiseAbs().maxCoeff(), 1e-300);
  return (fd - dense).cwiseAbs().maxCoeff() / scale;
}

}  // namespace

GradientCheckReport check_gradients(const Discretization& disc, const MaterialParams& m,
                                    const GradientCheckOptions& opt) {
  const DerivedConstants d = derive_constants(m);
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> phase(0.05, 0.95);

  double extent = 0.0;
  for (const auto& p : disc.mesh().nodes()) extent = std::max({extent, std::abs(p.x), std::abs(p.y)});
  const double u_scale = m.sigma_ts / d.young_e * std::max(extent, 1e-300);

  GradientCheckReport rep;
  const Loads no_loads;
  for (int s = 0; s < opt.samples; ++s) {
    Vector u(static_cast<Eigen::Index>(disc.num_u_dofs()));
    for (auto& x : u) x = u_scale * unit(rng);
    Vector v(static_cast<Eigen::Index>(disc.num_nodes()));
    for (auto& x : v) x = phase(rng);

    // Displacement subproblem.
    const double hu = opt.step * u_scale;
    const auto ed = [&](const Vector& uu) { return energy_d(disc, uu, v, no_loads, m); };
    const auto rd = [&](const Vector& uu) { return residual_d(disc, uu, v, no_loads, m); };
    rep.residual_d = std::max(rep.residual_d, rel_error(fd_gradient(ed, u, hu), rd(u)));
    rep.tangent_d = std::max(rep.tangent_d, fd_hessian_error(rd, tangent_d(disc, v, m), u, hu));

    // Phase-field subproblems.
    for (const FractureModel model : {FractureModel::Strength, FractureModel::Griffith}) {
      const FractureFunctional f(disc, u, m, d, model);
      const auto e = [&](const Vector& vv) { return f.energy(vv); };
      const auto g = [&](const Vector& vv) { return f.gradient(vv); };
      const double gerr = rel_error(fd_gradient(e, v, opt.step), f.gradient(v));
      const double herr = fd_hessian_error(g, f.hessian(v), v, opt.step);
      if (model == FractureModel::Strength) {
        rep.residual_f = std::max(rep.residual_f, gerr);
        rep.tangent_f = std::max(rep.tangent_f, herr);
      } else {
        rep.residual_g = std::max(rep.residual_g, gerr);
        rep.tangent_g = std::max(rep.tangent_g, herr);
      }
    }
    ++rep.samples;
  }
  rep.pass = rep.residual_d < opt.gradient_tol && rep.residual_f < opt.gradient_tol &&
             rep.residual_g < opt.gradient_tol && rep.tangent_d < opt.hessian_tol && rep.tangent_f < opt.hessian_tol &&
             rep.tangent_g < opt.hessian_tol;
  return rep;
}

std::string GradientCheckReport::summary() const {
  std::ostringstream os;
  os << "samples " << samples << "\n"
     << "  E_d gradient  max rel err " << residual_d << "\n"
     << "  E_d Hessian   max rel err " << tangent_d << "\n"
     << "  E_f gradient  max rel err " << residual_f << "\n"
     << "  E_f Hessian   max rel err " << tangent_f << "\n"
     << "  E_G gradient  max rel err " << residual_g << "\n"
     << "  E_G Hessian   max rel err " << tangent_g << "\n"
     << (pass ? "PASS" : "FAIL");
  return os.str();
}

}  // namespace pfrac
