// Linear solve for the displacement subproblem and bound-constrained
// projected Newton for the phase-field subproblem.
#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "pfrac/fem.hpp"

namespace pfrac {

struct SolveReport {
  int iterations = 0;
  double residual_norm = 0.0;
  std::size_t active_set_size = 0;
  bool converged = false;
  double wall_time = 0.0;  ///< seconds
  double initial_energy = 0.0;
  double final_energy = 0.0;
};

/// Prescribed displacement components. `dofs` is sorted and unique.
struct DirichletData {
  std::vector<int> dofs;
  std::vector<double> values;
};

enum class LinearSolverKind { Cholesky, ConjugateGradient };

/// Solves K u = f with Dirichlet dofs eliminated. The symbolic analysis of
/// the free-dof block is cached across calls with an unchanged pattern.
class DisplacementSolver {
 public:
  DisplacementSolver(std::size_t num_dofs, std::vector<int> constrained_dofs,
                     LinearSolverKind kind = LinearSolverKind::Cholesky);
  ~DisplacementSolver();
  DisplacementSolver(DisplacementSolver&&) noexcept;
  DisplacementSolver& operator=(DisplacementSolver&&) noexcept;

  /// `prescribed` holds one value per constrained dof, in the order given at
  /// construction. Throws SolverError if the free block is not SPD.
  Vector solve(const SparseMatrix& tangent, const Vector& rhs, const std::vector<double>& prescribed, double tol,
               SolveReport* report = nullptr);

  const std::vector<int>& constrained_dofs() const { return constrained_; }

 private:
  struct Impl;
  std::vector<int> constrained_;
  std::vector<int> free_index_;  // global dof -> free index or -1
  LinearSolverKind kind_;
  std::unique_ptr<Impl> impl_;
};

Vector solve_u(const SparseMatrix& tangent, const Vector& rhs, const DirichletData& bc, double tol,
               LinearSolverKind kind = LinearSolverKind::Cholesky, SolveReport* report = nullptr);

struct BoxNewtonOptions {
  double tol = 0.0;  ///< projected-gradient tolerance (infinity norm)
  int max_iter = 200;
  double armijo = 1e-4;
  double active_tol = 1e-14;
};

/// Default stationarity tolerance: 1e-8 times the natural force density
/// times the mean lumped nodal area, so it bounds an assembled residual.
double default_v_tolerance(const FractureFunctional& f);

/// Infinity norm of v - P(v - grad), with P the projection onto [0, upper].
double projected_gradient_norm(const Vector& v, const Vector& grad, const Vector& upper);

/// Minimizes the fracture functional over 0 <= v <= v_upper starting from
/// v_init. Every iterate is feasible and the energy never increases. On
/// max_iter the best iterate is returned with converged = false.
std::pair<Vector, SolveReport> solve_v(const FractureFunctional& f, const Vector& v_init, const Vector& v_upper,
                                       const BoxNewtonOptions& options);

struct StationarityCheck {
  double max_free_residual = 0.0;       ///< |g| over dofs strictly between bounds
  double max_clamped_violation = 0.0;   ///< wrong-sign part of g at the bounds
  std::size_t free_dofs = 0;
  std::size_t clamped_dofs = 0;
  bool ok = false;
};

/// Discrete complementarity conditions of the phase-field equation: zero
/// residual at free dofs, g <= 0 at v = v_upper and g >= 0 at v = 0.
StationarityCheck check_stationarity(const Vector& v, const Vector& grad, const Vector& v_upper, double tol,
                                     double bound_tol = 1e-14);

}  // namespace pfrac
