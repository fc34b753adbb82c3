#include "pfrac/fem.hpp"

#include <algorithm>
#include <cmath>

#include "pfrac/errors.hpp"

namespace pfrac {

const QuadratureRule& gauss_2x2() {
  static const QuadratureRule rule = [] {
    const double p = 1.0 / std::sqrt(3.0);
    QuadratureRule r;
    r.points = {Point2{-p, -p}, Point2{p, -p}, Point2{p, p}, Point2{-p, p}};
    r.weights = {1.0, 1.0, 1.0, 1.0};
    return r;
  }();
  return rule;
}

namespace {

constexpr std::array<double, 4> kXiNode{-1.0, 1.0, 1.0, -1.0};
constexpr std::array<double, 4> kEtaNode{-1.0, -1.0, 1.0, 1.0};

GaussPoint make_gauss_point(const std::array<Point2, 4>& c, const Point2& ref, double w) {
  GaussPoint gp;
  std::array<double, 4> dxi{}, deta{};
  for (int a = 0; a < 4; ++a) {
    gp.n[a] = 0.25 * (1.0 + kXiNode[a] * ref.x) * (1.0 + kEtaNode[a] * ref.y);
    dxi[a] = 0.25 * kXiNode[a] * (1.0 + kEtaNode[a] * ref.y);
    deta[a] = 0.25 * kEtaNode[a] * (1.0 + kXiNode[a] * ref.x);
  }
  double j11 = 0, j12 = 0, j21 = 0, j22 = 0;  // J = d(x,y)/d(xi,eta)
  for (int a = 0; a < 4; ++a) {
    j11 += dxi[a] * c[a].x;
    j12 += dxi[a] * c[a].y;
    j21 += deta[a] * c[a].x;
    j22 += deta[a] * c[a].y;
    gp.x.x += gp.n[a] * c[a].x;
    gp.x.y += gp.n[a] * c[a].y;
  }
  const double det = j11 * j22 - j12 * j21;
  if (!(det > 0.0)) throw MeshError("non-positive Jacobian at a Gauss point");
  for (int a = 0; a < 4; ++a) {
    gp.dn[a][0] = (j22 * dxi[a] - j12 * deta[a]) / det;
    gp.dn[a][1] = (-j21 * dxi[a] + j11 * deta[a]) / det;
  }
  gp.weight = w * det;
  return gp;
}

Discretization::Pattern build_pattern(const Mesh& mesh, int dpn) {
  const int ndof = static_cast<int>(mesh.num_nodes()) * dpn;
  const int local = 4 * dpn;
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(mesh.num_elements() * local * local);
  auto dof = [dpn](const Quad& q, int i) { return q[i / dpn] * dpn + i % dpn; };
  for (const auto& q : mesh.elements()) {
    for (int i = 0; i < local; ++i) {
      for (int j = 0; j < local; ++j) trips.emplace_back(dof(q, i), dof(q, j), 0.0);
    }
  }
  Discretization::Pattern p;
  p.matrix.resize(ndof, ndof);
  p.matrix.setFromTriplets(trips.begin(), trips.end());
  p.matrix.makeCompressed();

  const int* outer = p.matrix.outerIndexPtr();
  const int* inner = p.matrix.innerIndexPtr();
  p.slots.resize(mesh.num_elements());
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    auto& s = p.slots[e];
    s.resize(local * local);
    const Quad& q = mesh.elements()[e];
    for (int i = 0; i < local; ++i) {
      for (int j = 0; j < local; ++j) {
        const int row = dof(q, i);
        const int col = dof(q, j);
        const int* begin = inner + outer[col];
        const int* end = inner + outer[col + 1];
        s[i * local + j] = static_cast<int>(std::lower_bound(begin, end, row) - inner);
      }
    }
  }
  return p;
}

// Voigt strain-displacement row data for node a: strain (xx, yy, 2xy).
struct BColumn {
  double dx, dy;
};

// Plane-strain constitutive matrix in Voigt form (xx, yy, engineering xy).
std::array<std::array<double, 3>, 3> elastic_matrix(const MaterialParams& m) {
  const double c11 = m.lambda + 2.0 * m.mu;
  return {{{c11, m.lambda, 0.0}, {m.lambda, c11, 0.0}, {0.0, 0.0, m.mu}}};
}

double interp(const GaussPoint& gp, const Quad& q, const Vector& v) {
  double s = 0.0;
  for (int a = 0; a < 4; ++a) s += gp.n[a] * v[q[a]];
  return s;
}

std::array<double, 2> interp_grad(const GaussPoint& gp, const Quad& q, const Vector& v) {
  std::array<double, 2> g{0.0, 0.0};
  for (int a = 0; a < 4; ++a) {
    g[0] += gp.dn[a][0] * v[q[a]];
    g[1] += gp.dn[a][1] * v[q[a]];
  }
  return g;
}

}  // namespace

Discretization::Discretization(Mesh mesh) : mesh_(std::move(mesh)) {
  const auto& rule = gauss_2x2();
  gauss_.resize(mesh_.num_elements());
  lumped_area_.assign(mesh_.num_nodes(), 0.0);
  for (std::size_t e = 0; e < mesh_.num_elements(); ++e) {
    const Quad& q = mesh_.elements()[e];
    const std::array<Point2, 4> c{mesh_.nodes()[q[0]], mesh_.nodes()[q[1]], mesh_.nodes()[q[2]], mesh_.nodes()[q[3]]};
    for (int g = 0; g < 4; ++g) {
      gauss_[e][g] = make_gauss_point(c, rule.points[g], rule.weights[g]);
      for (int a = 0; a < 4; ++a) lumped_area_[q[a]] += gauss_[e][g].n[a] * gauss_[e][g].weight;
    }
  }
  scalar_pattern_ = build_pattern(mesh_, 1);
  vector_pattern_ = build_pattern(mesh_, 2);
}

const Discretization::Pattern& Discretization::pattern(int dofs_per_node) const {
  return dofs_per_node == 1 ? scalar_pattern_ : vector_pattern_;
}

Loads Loads::scaled(double factor) const {
  Loads out;
  if (body_force) {
    out.body_force = [f = body_force, factor](const Point2& x) {
      auto b = f(x);
      return std::array<double, 2>{factor * b[0], factor * b[1]};
    };
  }
  for (const auto& t : tractions) out.tractions.push_back({t.tag, factor * t.tx, factor * t.ty});
  return out;
}

SymTensor2 strain_at(const Discretization& disc, const Vector& u, std::size_t element, int gauss_point) {
  const Quad& q = disc.mesh().elements()[element];
  const GaussPoint& gp = disc.gauss(element)[gauss_point];
  double dux_dx = 0, dux_dy = 0, duy_dx = 0, duy_dy = 0;
  for (int a = 0; a < 4; ++a) {
    const double ux = u[2 * q[a]];
    const double uy = u[2 * q[a] + 1];
    dux_dx += gp.dn[a][0] * ux;
    dux_dy += gp.dn[a][1] * ux;
    duy_dx += gp.dn[a][0] * uy;
    duy_dy += gp.dn[a][1] * uy;
  }
  SymTensor2 e;
  e.xx = dux_dx;
  e.yy = duy_dy;
  e.xy = 0.5 * (dux_dy + duy_dx);
  return e;
}

double element_elastic_energy(const Discretization& disc, const Vector& u, const Vector& v, const MaterialParams& m,
                              std::size_t element) {
  const Quad& q = disc.mesh().elements()[element];
  double sum = 0.0;
  for (int g = 0; g < 4; ++g) {
    const GaussPoint& gp = disc.gauss(element)[g];
    const double vg = interp(gp, q, v);
    sum += gp.weight * (vg * vg + m.eta_eps) * stored_energy(strain_at(disc, u, element, g), m);
  }
  return sum;
}

Vector external_force(const Discretization& disc, const Loads& loads) {
  Vector f = Vector::Zero(static_cast<Eigen::Index>(disc.num_u_dofs()));
  const Mesh& mesh = disc.mesh();
  if (loads.body_force) {
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
      const Quad& q = mesh.elements()[e];
      for (const auto& gp : disc.gauss(e)) {
        const auto b = loads.body_force(gp.x);
        for (int a = 0; a < 4; ++a) {
          f[2 * q[a]] += gp.weight * gp.n[a] * b[0];
          f[2 * q[a] + 1] += gp.weight * gp.n[a] * b[1];
        }
      }
    }
  }
  const double p = 1.0 / std::sqrt(3.0);
  for (const auto& t : loads.tractions) {
    bool found = false;
    for (const auto& fc : mesh.facets()) {
      if (fc.tag != t.tag) continue;
      found = true;
      const Point2& a = mesh.nodes()[fc.n0];
      const Point2& b = mesh.nodes()[fc.n1];
      const double half_len = 0.5 * std::hypot(b.x - a.x, b.y - a.y);
      for (const double s : {-p, p}) {
        const double n0 = 0.5 * (1.0 - s);
        const double n1 = 0.5 * (1.0 + s);
        f[2 * fc.n0] += half_len * n0 * t.tx;
        f[2 * fc.n0 + 1] += half_len * n0 * t.ty;
        f[2 * fc.n1] += half_len * n1 * t.tx;
        f[2 * fc.n1 + 1] += half_len * n1 * t.ty;
      }
    }
    if (!found) throw MeshError("traction applied to unknown facet tag '" + t.tag + "'");
  }
  return f;
}

double energy_d(const Discretization& disc, const Vector& u, const Vector& v, const Loads& loads,
                const MaterialParams& m) {
  double elastic = 0.0;
  for (std::size_t e = 0; e < disc.num_elements(); ++e) elastic += element_elastic_energy(disc, u, v, m, e);
  return elastic - external_force(disc, loads).dot(u);
}

Vector internal_force(const Discretization& disc, const Vector& u, const Vector& v, const MaterialParams& m) {
  Vector r = Vector::Zero(static_cast<Eigen::Index>(disc.num_u_dofs()));
  for (std::size_t e = 0; e < disc.num_elements(); ++e) {
    const Quad& q = disc.mesh().elements()[e];
    for (int g = 0; g < 4; ++g) {
      const GaussPoint& gp = disc.gauss(e)[g];
      const double vg = interp(gp, q, v);
      const SymTensor2 s = stress(strain_at(disc, u, e, g), m);
      const double k = gp.weight * (vg * vg + m.eta_eps);
      for (int a = 0; a < 4; ++a) {
        r[2 * q[a]] += k * (s.xx * gp.dn[a][0] + s.xy * gp.dn[a][1]);
        r[2 * q[a] + 1] += k * (s.xy * gp.dn[a][0] + s.yy * gp.dn[a][1]);
      }
    }
  }
  return r;
}

Vector residual_d(const Discretization& disc, const Vector& u, const Vector& v, const Loads& loads,
                  const MaterialParams& m) {
  return internal_force(disc, u, v, m) - external_force(disc, loads);
}

SparseMatrix tangent_d(const Discretization& disc, const Vector& v, const MaterialParams& m) {
  const auto& pat = disc.pattern(2);
  SparseMatrix k = pat.matrix;
  double* values = k.valuePtr();
  std::fill(values, values + k.nonZeros(), 0.0);
  const auto c = elastic_matrix(m);
  for (std::size_t e = 0; e < disc.num_elements(); ++e) {
    const Quad& q = disc.mesh().elements()[e];
    const auto& slots = pat.slots[e];
    for (int g = 0; g < 4; ++g) {
      const GaussPoint& gp = disc.gauss(e)[g];
      const double vg = interp(gp, q, v);
      const double scale = gp.weight * (vg * vg + m.eta_eps);
      // B for local dof i: Voigt strain produced by a unit value of that dof.
      std::array<std::array<double, 3>, 8> b{};
      for (int a = 0; a < 4; ++a) {
        b[2 * a] = {gp.dn[a][0], 0.0, gp.dn[a][1]};
        b[2 * a + 1] = {0.0, gp.dn[a][1], gp.dn[a][0]};
      }
      for (int i = 0; i < 8; ++i) {
        std::array<double, 3> cb{};
        for (int r = 0; r < 3; ++r) cb[r] = c[r][0] * b[i][0] + c[r][1] * b[i][1] + c[r][2] * b[i][2];
        for (int j = 0; j < 8; ++j) {
          values[slots[i * 8 + j]] += scale * (cb[0] * b[j][0] + cb[1] * b[j][1] + cb[2] * b[j][2]);
        }
      }
    }
  }
  return k;
}

double regularization_prefactor(const MaterialParams& m, FractureModel model) {
  return model == FractureModel::Strength ? 3.0 * m.delta_eps * m.g_c / 8.0 : 3.0 * m.g_c / 8.0;
}

FractureFunctional::FractureFunctional(const Discretization& disc, const Vector& u, const MaterialParams& m,
                                       const DerivedConstants& d, FractureModel model)
    : disc_(&disc), prefactor_(regularization_prefactor(m, model)), eps_(m.eps) {
  const std::size_t ng = 4 * disc.num_elements();
  w_.resize(ng);
  che_.assign(ng, 0.0);
  for (std::size_t e = 0; e < disc.num_elements(); ++e) {
    for (int g = 0; g < 4; ++g) {
      const SymTensor2 strain = strain_at(disc, u, e, g);
      w_[4 * e + g] = stored_energy(strain, m);
      if (model == FractureModel::Strength) che_[4 * e + g] = che_undamaged(strain, m, d);
    }
  }
}

FractureTerms FractureFunctional::element_terms(const Vector& v, std::size_t e) const {
  FractureTerms t;
  const Quad& q = disc_->mesh().elements()[e];
  for (int g = 0; g < 4; ++g) {
    const GaussPoint& gp = disc_->gauss(e)[g];
    const double vg = interp(gp, q, v);
    const auto gv = interp_grad(gp, q, v);
    t.elastic += gp.weight * vg * vg * w_[4 * e + g];
    t.strength += gp.weight * vg * vg * vg / 3.0 * che_[4 * e + g];
    t.regularization += gp.weight * prefactor_ * ((1.0 - vg) / eps_ + eps_ * (gv[0] * gv[0] + gv[1] * gv[1]));
  }
  return t;
}

FractureTerms FractureFunctional::terms(const Vector& v) const {
  FractureTerms t;
  for (std::size_t e = 0; e < disc_->num_elements(); ++e) {
    const FractureTerms te = element_terms(v, e);
    t.elastic += te.elastic;
    t.strength += te.strength;
    t.regularization += te.regularization;
  }
  return t;
}

Vector FractureFunctional::gradient(const Vector& v) const {
  Vector r = Vector::Zero(static_cast<Eigen::Index>(disc_->num_nodes()));
  const double grad_coeff = 2.0 * prefactor_ * eps_;
  const double constant = prefactor_ / eps_;
  for (std::size_t e = 0; e < disc_->num_elements(); ++e) {
    const Quad& q = disc_->mesh().elements()[e];
    for (int g = 0; g < 4; ++g) {
      const GaussPoint& gp = disc_->gauss(e)[g];
      const double vg = interp(gp, q, v);
      const auto gv = interp_grad(gp, q, v);
      const double local = 2.0 * vg * w_[4 * e + g] + vg * vg * che_[4 * e + g] - constant;
      for (int a = 0; a < 4; ++a) {
        r[q[a]] += gp.weight * (local * gp.n[a] + grad_coeff * (gv[0] * gp.dn[a][0] + gv[1] * gp.dn[a][1]));
      }
    }
  }
  return r;
}

void FractureFunctional::hessian_into(const Vector& v, SparseMatrix& h) const {
  const auto& pat = disc_->pattern(1);
  double* values = h.valuePtr();
  std::fill(values, values + h.nonZeros(), 0.0);
  const double grad_coeff = 2.0 * prefactor_ * eps_;
  for (std::size_t e = 0; e < disc_->num_elements(); ++e) {
    const Quad& q = disc_->mesh().elements()[e];
    const auto& slots = pat.slots[e];
    for (int g = 0; g < 4; ++g) {
      const GaussPoint& gp = disc_->gauss(e)[g];
      const double vg = interp(gp, q, v);
      const double local = 2.0 * w_[4 * e + g] + 2.0 * vg * che_[4 * e + g];
      for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
          values[slots[a * 4 + b]] +=
              gp.weight * (local * gp.n[a] * gp.n[b] +
                           grad_coeff * (gp.dn[a][0] * gp.dn[b][0] + gp.dn[a][1] * gp.dn[b][1]));
        }
      }
    }
  }
}

SparseMatrix FractureFunctional::hessian(const Vector& v) const {
  SparseMatrix h = disc_->pattern(1).matrix;
  hessian_into(v, h);
  return h;
}

FractureTerms energy_f(const Discretization& disc, const Vector& v, const Vector& u, const MaterialParams& m,
                       const DerivedConstants& d) {
  return FractureFunctional(disc, u, m, d, FractureModel::Strength).terms(v);
}

FractureTerms energy_g(const Discretization& disc, const Vector& v, const Vector& u, const MaterialParams& m) {
  return FractureFunctional(disc, u, m, DerivedConstants{}, FractureModel::Griffith).terms(v);
}

Vector residual_f(const Discretization& disc, const Vector& v, const Vector& u, const MaterialParams& m,
                  const DerivedConstants& d) {
  return FractureFunctional(disc, u, m, d, FractureModel::Strength).gradient(v);
}

SparseMatrix tangent_f(const Discretization& disc, const Vector& v, const Vector& u, const MaterialParams& m,
                       const DerivedConstants& d) {
  return FractureFunctional(disc, u, m, d, FractureModel::Strength).hessian(v);
}

double damaged_measure(const Discretization& disc, const Vector& v, double threshold) {
  double s = 0.0;
  const auto& area = disc.lumped_area();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v[i] < threshold) s += area[i];
  }
  return s;
}

}  // namespace pfrac
