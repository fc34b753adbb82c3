// Quasistatic load stepping with alternating minimization: per load step,
// u_i = argmin E_d(.; v_{i-1}) and v_i = argmin E_f(.; u_i) over
// 0 <= v <= v_{k-1}, repeated until the phase field stops changing.
#pragma once

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "pfrac/fem.hpp"
#include "pfrac/material.hpp"
#include "pfrac/solver.hpp"

namespace pfrac {

struct LoadProgram {
  std::vector<double> scales;  ///< t_0 ... t_M load factors
  bool monotone = true;
  friend bool operator==(const LoadProgram&, const LoadProgram&) = default;

  /// Throws ValidationError for an empty program, non-finite factors, or a
  /// decreasing sequence when `monotone` is set.
  void validate() const;
  static LoadProgram ramp(double start, double end, int num_steps);
};

/// Displacement component prescribed on the nodes of a tag, per unit load factor.
struct DirichletCondition {
  std::string tag;
  int component = 0;  ///< 0 = x, 1 = y
  double value = 0.0;
  friend bool operator==(const DirichletCondition&, const DirichletCondition&) = default;
};

struct Problem {
  std::shared_ptr<const Discretization> disc;
  MaterialParams material;
  DerivedConstants derived;
  FractureModel model = FractureModel::Strength;
  std::vector<DirichletCondition> dirichlet;
  Loads loads;  ///< per unit load factor
  Vector v0;    ///< initial phase field; all ones when empty
};

/// Constrained dofs with their values at load factor `scale`. Throws when two
/// conditions prescribe different values to one dof.
DirichletData dirichlet_data(const Problem& p, double scale);

enum class NonConvergencePolicy { Abort, Continue };

struct StaggerOptions {
  double stagger_tol = 1e-4;      ///< on ||v_i - v_{i-1}||_inf
  double energy_rel_tol = 1e-5;   ///< relative change of E_d between iterations
  int max_stagger = 300;
  double u_tol = 1e-10;
  LinearSolverKind linear = LinearSolverKind::Cholesky;
  double v_tol = 0.0;             ///< <= 0: default_v_tolerance
  int v_max_iter = 200;
  double damage_threshold = 0.05;  ///< for the damaged-set measure
  double monotone_rel_tol = 1e-10;
  NonConvergencePolicy on_nonconvergence = NonConvergencePolicy::Abort;
  friend bool operator==(const StaggerOptions&, const StaggerOptions&) = default;
};

/// Energies logged after one staggered iteration.
struct EnergyReport {
  int step = 0;
  int iteration = 0;
  double scale = 0.0;
  double energy_d = 0.0;       ///< E_d(u_i; v_{i-1})
  double energy_d_prev = 0.0;  ///< E_d(u_{i-1}; v_{i-1}), u_{i-1} with current Dirichlet data
  FractureTerms fracture;      ///< E_f(v_i; u_i) terms
  double energy_f_prev = 0.0;  ///< minimized functional at (v_{i-1}; u_i)
  double energy_min = 0.0;     ///< minimized functional at (v_i; u_i): E_f or E_G by mode
  double energy_g = 0.0;       ///< E_G(v_i; u_i)
  double dv_inf = 0.0;
  int v_iterations = 0;
  bool v_converged = false;
  double v_residual = 0.0;
  bool d_monotone = true;
  bool f_monotone = true;
};

struct StepState {
  int step = 0;
  double scale = 0.0;
  Vector u;
  Vector v;
  Vector v_equilibrium;  ///< phase field that u is in equilibrium with (v_{i-1})
  std::vector<EnergyReport> iterations;
  bool converged = false;
  bool stopped_early = false;
  std::map<std::string, std::array<double, 2>> reactions;
  double min_v = 1.0;
  double damaged_measure = 0.0;
  StationarityCheck stationarity;
  double v_tolerance = 0.0;
};

/// Initial conditions u = 0, v = v0 (or 1).
StepState initial_state(const Problem& p);

/// Runs the staggered scheme for one load step. `stop` (optional) is checked
/// after every staggered iteration; returning true ends the step early.
StepState run_step(const Problem& p, const StepState& prev, int step, double scale, const StaggerOptions& opt,
                   const std::function<bool(const Vector& u, const Vector& v)>& stop = {});

/// Internal force summed over the nodes of `tag`; at a Dirichlet boundary this
/// is the support reaction, at a Neumann boundary the applied traction resultant.
std::array<double, 2> reaction_force(const Problem& p, const StepState& state, const std::string& tag);

struct ProgramResult {
  std::vector<StepState> steps;
  EpsCheck eps_check;
  std::vector<std::string> warnings;
  std::vector<std::string> violations;  ///< broken invariants; empty on a sound run
  bool aborted = false;
  bool stopped = false;
};

/// Tags whose reactions are recorded: every Dirichlet tag plus every traction tag.
std::vector<std::string> reaction_tags(const Problem& p);

/// Runs every load step. `on_step` sees each finished step and may return
/// false to end the program.
ProgramResult run_program(const Problem& p, const LoadProgram& program, const StaggerOptions& opt,
                          const std::function<bool(const StepState&)>& on_step = {},
                          const std::function<bool(const Vector& u, const Vector& v)>& stop_iteration = {});

/// Irreversibility and bound checks between consecutive steps; appends messages.
void check_irreversibility(const Vector& v_prev, const Vector& v, int step, std::vector<std::string>& out);

}  // namespace pfrac
