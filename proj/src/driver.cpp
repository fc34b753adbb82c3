#include "pfrac/driver.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "pfrac/errors.hpp"

namespace pfrac {

void LoadProgram::validate() const {
  if (scales.empty()) throw ValidationError("loading", "load program has no steps");
  for (std::size_t k = 0; k < scales.size(); ++k) {
    if (!std::isfinite(scales[k])) throw ValidationError("loading", "non-finite load factor");
    if (monotone && k > 0 && scales[k] < scales[k - 1]) {
      throw ValidationError("loading", "load factors must be non-decreasing for a monotone program");
    }
  }
}

LoadProgram LoadProgram::ramp(double start, double end, int num_steps) {
  if (num_steps < 1) throw ValidationError("loading.num_steps", "must be at least 1");
  LoadProgram p;
  if (num_steps == 1) {
    p.scales = {end};
    return p;
  }
  for (int k = 0; k < num_steps; ++k) p.scales.push_back(start + (end - start) * k / (num_steps - 1));
  return p;
}

DirichletData dirichlet_data(const Problem& p, double scale) {
  std::map<int, double> unit;
  for (const auto& c : p.dirichlet) {
    if (c.component != 0 && c.component != 1) throw ValidationError("loading.dirichlet", "component must be x or y");
    for (int node : p.disc->mesh().nodes_on(c.tag)) {
      const int dof = 2 * node + c.component;
      const auto [it, inserted] = unit.emplace(dof, c.value);
      if (!inserted && it->second != c.value) {
        throw ValidationError("loading.dirichlet",
                              "conflicting values prescribed at node " + std::to_string(node) + " via '" + c.tag + "'");
      }
    }
  }
  DirichletData d;
  for (const auto& [dof, value] : unit) {
    d.dofs.push_back(dof);
    d.values.push_back(scale * value);
  }
  return d;
}

StepState initial_state(const Problem& p) {
  StepState s;
  s.step = -1;
  s.u = Vector::Zero(static_cast<Eigen::Index>(p.disc->num_u_dofs()));
  if (p.v0.size() > 0) {
    if (static_cast<std::size_t>(p.v0.size()) != p.disc->num_nodes()) {
      throw ValidationError("initial", "initial phase field size does not match the mesh");
    }
    s.v = p.v0;
  } else {
    s.v = Vector::Ones(static_cast<Eigen::Index>(p.disc->num_nodes()));
  }
  s.v_equilibrium = s.v;
  s.converged = true;
  s.min_v = s.v.size() ? s.v.minCoeff() : 1.0;
  return s;
}

namespace {

bool non_increasing(double after, double before, double rel_tol) {
  const double scale = std::max({std::abs(after), std::abs(before), 1e-300});
  return after <= before + rel_tol * scale;
}

}  // namespace

StepState run_step(const Problem& p, const StepState& prev, int step, double scale, const StaggerOptions& opt,
                   const std::function<bool(const Vector&, const Vector&)>& stop) {
  const Discretization& disc = *p.disc;
  const MaterialParams& m = p.material;
  const DirichletData bc = dirichlet_data(p, scale);
  const Loads loads = p.loads.scaled(scale);
  const Vector f_ext = external_force(disc, loads);
  DisplacementSolver usolver(disc.num_u_dofs(), bc.dofs, opt.linear);

  StepState s;
  s.step = step;
  s.scale = scale;

  const Vector& v_upper = prev.v;
  Vector u = prev.u;
  for (std::size_t i = 0; i < bc.dofs.size(); ++i) u[bc.dofs[i]] = bc.values[i];
  Vector v = prev.v;
  Vector v_before = v;
  double last_ed = 0.0;

  for (int it = 1; it <= opt.max_stagger; ++it) {
    EnergyReport r;
    r.step = step;
    r.iteration = it;
    r.scale = scale;

    auto elastic = [&](const Vector& uu, const Vector& vv) {
      double e = 0.0;
      for (std::size_t el = 0; el < disc.num_elements(); ++el) e += element_elastic_energy(disc, uu, vv, m, el);
      return e - f_ext.dot(uu);
    };
    r.energy_d_prev = elastic(u, v);
    u = usolver.solve(tangent_d(disc, v, m), f_ext, bc.values, opt.u_tol);
    r.energy_d = elastic(u, v);
    r.d_monotone = non_increasing(r.energy_d, r.energy_d_prev, opt.monotone_rel_tol);

    const FractureFunctional functional(disc, u, m, p.derived, p.model);
    BoxNewtonOptions bopt;
    bopt.tol = opt.v_tol > 0.0 ? opt.v_tol : default_v_tolerance(functional);
    bopt.max_iter = opt.v_max_iter;
    s.v_tolerance = bopt.tol;

    v_before = v;
    r.energy_f_prev = functional.energy(v);
    auto [v_new, rep] = solve_v(functional, v, v_upper, bopt);
    v = std::move(v_new);
    r.energy_min = functional.energy(v);
    r.f_monotone = non_increasing(r.energy_min, r.energy_f_prev, opt.monotone_rel_tol);
    r.v_iterations = rep.iterations;
    r.v_converged = rep.converged;
    r.v_residual = rep.residual_norm;
    r.dv_inf = (v - v_before).lpNorm<Eigen::Infinity>();

    if (p.model == FractureModel::Strength) {
      r.fracture = functional.terms(v);
    } else {
      r.fracture = energy_f(disc, v, u, m, p.derived);
    }
    r.energy_g = energy_g(disc, v, u, m).total();

    const double ed_change = std::abs(r.energy_d - last_ed);
    const bool energy_ok = it == 1 || ed_change <= opt.energy_rel_tol * std::max(std::abs(r.energy_d), 1e-300);
    last_ed = r.energy_d;
    s.iterations.push_back(r);

    if (r.dv_inf <= opt.stagger_tol && energy_ok && rep.converged) {
      s.converged = true;
    }
    s.stationarity = check_stationarity(v, functional.gradient(v), v_upper, bopt.tol);
    if (s.converged) break;
    if (stop && stop(u, v)) {
      s.stopped_early = true;
      break;
    }
  }

  s.u = std::move(u);
  s.v = std::move(v);
  s.v_equilibrium = std::move(v_before);
  s.min_v = s.v.size() ? s.v.minCoeff() : 1.0;
  s.damaged_measure = damaged_measure(disc, s.v, opt.damage_threshold);
  for (const auto& tag : reaction_tags(p)) s.reactions[tag] = reaction_force(p, s, tag);
  return s;
}

std::array<double, 2> reaction_force(const Problem& p, const StepState& state, const std::string& tag) {
  const Vector fint = internal_force(*p.disc, state.u, state.v_equilibrium, p.material);
  std::array<double, 2> r{0.0, 0.0};
  for (int node : p.disc->mesh().nodes_on(tag)) {
    r[0] += fint[2 * node];
    r[1] += fint[2 * node + 1];
  }
  return r;
}

std::vector<std::string> reaction_tags(const Problem& p) {
  std::vector<std::string> tags;
  auto add = [&](const std::string& t) {
    if (std::find(tags.begin(), tags.end(), t) == tags.end()) tags.push_back(t);
  };
  for (const auto& c : p.dirichlet) add(c.tag);
  for (const auto& t : p.loads.tractions) add(t.tag);
  return tags;
}

void check_irreversibility(const Vector& v_prev, const Vector& v, int step, std::vector<std::string>& out) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    std::ostringstream os;
    if (!(v[i] >= 0.0 && v[i] <= 1.0)) {
      os << "step " << step << ": v out of [0, 1] at node " << i << " (" << v[i] << ")";
    } else if (v_prev[i] - v[i] < -1e-14) {
      os << "step " << step << ": phase field increased at node " << i;
    } else if (v_prev[i] == 0.0 && v[i] != 0.0) {
      os << "step " << step << ": broken node " << i << " healed";
    } else {
      continue;
    }
    out.push_back(os.str());
  }
}

ProgramResult run_program(const Problem& p, const LoadProgram& program, const StaggerOptions& opt,
                          const std::function<bool(const StepState&)>& on_step,
                          const std::function<bool(const Vector&, const Vector&)>& stop_iteration) {
  program.validate();
  ProgramResult result;
  result.warnings = validate(p.material);
  result.eps_check = check_eps(p.material, p.derived);
  if (!result.eps_check.pass) result.warnings.push_back("eps check " + result.eps_check.message());

  StepState prev = initial_state(p);
  for (std::size_t k = 0; k < program.scales.size(); ++k) {
    StepState s = run_step(p, prev, static_cast<int>(k), program.scales[k], opt, stop_iteration);

    check_irreversibility(prev.v, s.v, s.step, result.violations);
    for (const auto& r : s.iterations) {
      if (!r.d_monotone) {
        result.violations.push_back("step " + std::to_string(r.step) + " iteration " + std::to_string(r.iteration) +
                                    ": deformation energy increased under its own minimization");
      }
      if (!r.f_monotone) {
        result.violations.push_back("step " + std::to_string(r.step) + " iteration " + std::to_string(r.iteration) +
                                    ": fracture functional increased under its own minimization");
      }
    }
    if (s.converged && !s.stationarity.ok) {
      result.violations.push_back("step " + std::to_string(s.step) + ": phase-field stationarity conditions not met");
    }

    const bool keep_going = on_step ? on_step(s) : true;
    const bool converged = s.converged;
    const bool early = s.stopped_early;
    prev = s;
    result.steps.push_back(std::move(s));

    if (early || !keep_going) {
      result.stopped = true;
      break;
    }
    if (!converged) {
      result.warnings.push_back("step " + std::to_string(k) + " did not converge within max_stagger");
      if (opt.on_nonconvergence == NonConvergencePolicy::Abort) {
        result.aborted = true;
        break;
      }
    }
  }
  return result;
}

}  // namespace pfrac
