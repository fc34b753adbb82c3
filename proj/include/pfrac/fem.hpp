// Bilinear-quadrilateral discretization of the deformation energy, the
// fracture functional and the Griffith functional: energies, exact
// gradients and exact Hessians.
//
// Displacements are interleaved per node: u = [ux0, uy0, ux1, uy1, ...].
// The phase field is nodal and interpolated bilinearly; v^2 and v^3 are
// evaluated from the interpolated value at each Gauss point so that every
// residual is the exact gradient of its discrete energy.
//
// All loops run elements in index order, so every assembled quantity is
// bitwise reproducible for a given input.
#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "pfrac/material.hpp"
#include "pfrac/mesh.hpp"
#include "pfrac/tensor.hpp"

namespace pfrac {

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

struct QuadratureRule {
  std::array<Point2, 4> points;
  std::array<double, 4> weights;
};

/// 2x2 Gauss rule on the reference square [-1, 1]^2.
const QuadratureRule& gauss_2x2();

/// Shape-function data at one Gauss point of one element.
struct GaussPoint {
  std::array<double, 4> n{};                  ///< N_a
  std::array<std::array<double, 2>, 4> dn{};  ///< dN_a/dx, dN_a/dy
  double weight = 0.0;                        ///< quadrature weight times det J
  Point2 x;                                   ///< physical position
};

class Discretization {
 public:
  explicit Discretization(Mesh mesh);

  const Mesh& mesh() const { return mesh_; }
  std::size_t num_nodes() const { return mesh_.num_nodes(); }
  std::size_t num_elements() const { return mesh_.num_elements(); }
  std::size_t num_u_dofs() const { return 2 * mesh_.num_nodes(); }

  const std::array<GaussPoint, 4>& gauss(std::size_t element) const { return gauss_[element]; }
  /// Integral of each nodal shape function over the domain.
  const std::vector<double>& lumped_area() const { return lumped_area_; }

  /// Sparse pattern with one entry per node-node coupling, expanded to
  /// `dofs_per_node` components. `slots(e)` gives value-array positions for
  /// the element matrix in row-major local order.
  struct Pattern {
    SparseMatrix matrix;
    std::vector<std::vector<int>> slots;
  };
  const Pattern& pattern(int dofs_per_node) const;

 private:
  Mesh mesh_;
  std::vector<std::array<GaussPoint, 4>> gauss_;
  std::vector<double> lumped_area_;
  Pattern scalar_pattern_;
  Pattern vector_pattern_;
};

struct Traction {
  std::string tag;
  double tx = 0.0;
  double ty = 0.0;
  friend bool operator==(const Traction&, const Traction&) = default;
};

/// Body force and boundary tractions at one load level.
struct Loads {
  std::function<std::array<double, 2>(const Point2&)> body_force;  ///< may be empty
  std::vector<Traction> tractions;

  Loads scaled(double factor) const;
};

// ---- displacement subproblem --------------------------------------------

SymTensor2 strain_at(const Discretization& disc, const Vector& u, std::size_t element, int gauss_point);

/// Integral of (v^2 + eta) W(E(u)) over one element.
double element_elastic_energy(const Discretization& disc, const Vector& u, const Vector& v, const MaterialParams& m,
                              std::size_t element);

/// Consistent nodal forces of the body force (2x2 Gauss) and tractions
/// (2-point Gauss per facet).
Vector external_force(const Discretization& disc, const Loads& loads);

/// E_d = int (v^2 + eta) W - int b.u - int_N s.u
double energy_d(const Discretization& disc, const Vector& u, const Vector& v, const Loads& loads,
                const MaterialParams& m);

/// Gradient of the elastic part only: int (v^2 + eta) dW/dE : B.
Vector internal_force(const Discretization& disc, const Vector& u, const Vector& v, const MaterialParams& m);

Vector residual_d(const Discretization& disc, const Vector& u, const Vector& v, const Loads& loads,
                  const MaterialParams& m);

/// Exact Hessian of E_d; independent of u.
SparseMatrix tangent_d(const Discretization& disc, const Vector& v, const MaterialParams& m);

// ---- phase-field subproblem ---------------------------------------------

enum class FractureModel {
  Strength,  ///< fracture functional with the strength driving force
  Griffith,  ///< Griffith functional: no driving force, prefactor 3 g_c / 8
};

struct FractureTerms {
  double elastic = 0.0;         ///< int v^2 W
  double strength = 0.0;        ///< int v^3/3 c_e
  double regularization = 0.0;  ///< prefactor * int ((1-v)/eps + eps |grad v|^2)
  double total() const { return elastic + strength + regularization; }
};

/// A fracture functional with the displacement frozen. W and the undamaged
/// driving force are evaluated once per Gauss point.
class FractureFunctional {
 public:
  FractureFunctional(const Discretization& disc, const Vector& u, const MaterialParams& m, const DerivedConstants& d,
                     FractureModel model);

  FractureTerms terms(const Vector& v) const;
  double energy(const Vector& v) const { return terms(v).total(); }
  Vector gradient(const Vector& v) const;
  SparseMatrix hessian(const Vector& v) const;
  /// Same values as hessian(v), written into an existing matrix with the
  /// scalar pattern of the discretization.
  void hessian_into(const Vector& v, SparseMatrix& h) const;

  /// Per-element contribution to terms(v).
  FractureTerms element_terms(const Vector& v, std::size_t element) const;

  const Discretization& discretization() const { return *disc_; }
  double prefactor() const { return prefactor_; }
  double eps() const { return eps_; }
  /// 3 delta g_c / (8 eps) (or 3 g_c / (8 eps)): the natural force density.
  double force_density() const { return prefactor_ / eps_; }

  const std::vector<double>& gauss_w() const { return w_; }
  const std::vector<double>& gauss_che() const { return che_; }

 private:
  const Discretization* disc_;
  double prefactor_;
  double eps_;
  std::vector<double> w_;
  std::vector<double> che_;
};

double regularization_prefactor(const MaterialParams& m, FractureModel model);

FractureTerms energy_f(const Discretization& disc, const Vector& v, const Vector& u, const MaterialParams& m,
                       const DerivedConstants& d);
FractureTerms energy_g(const Discretization& disc, const Vector& v, const Vector& u, const MaterialParams& m);
Vector residual_f(const Discretization& disc, const Vector& v, const Vector& u, const MaterialParams& m,
                  const DerivedConstants& d);
SparseMatrix tangent_f(const Discretization& disc, const Vector& v, const Vector& u, const MaterialParams& m,
                       const DerivedConstants& d);

/// Measure (sum of lumped nodal areas) of the set where v < threshold.
double damaged_measure(const Discretization& disc, const Vector& v, double threshold);

}  // namespace pfrac
