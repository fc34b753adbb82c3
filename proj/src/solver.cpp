#include "pfrac/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include "pfrac/errors.hpp"
#include "pfrac/textio.hpp"

namespace pfrac {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double infinity_norm(const SparseMatrix& h) {
  double m = 0.0;
  for (Eigen::Index col = 0; col < h.outerSize(); ++col) {
    double s = 0.0;
    for (SparseMatrix::InnerIterator it(h, col); it; ++it) s += std::abs(it.value());
    m = std::max(m, s);
  }
  return m;
}

}  // namespace

struct DisplacementSolver::Impl {
  Eigen::SimplicialLLT<SparseMatrix> llt;
  Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>> cg;
  bool analyzed = false;
  Eigen::Index pattern_nnz = -1;
};

DisplacementSolver::DisplacementSolver(std::size_t num_dofs, std::vector<int> constrained_dofs, LinearSolverKind kind)
    : constrained_(std::move(constrained_dofs)), free_index_(num_dofs, 0), kind_(kind),
      impl_(std::make_unique<Impl>()) {
  for (int d : constrained_) {
    if (d < 0 || static_cast<std::size_t>(d) >= num_dofs) throw SolverError("constrained dof out of range");
    free_index_[d] = -1;
  }
  int next = 0;
  for (auto& f : free_index_) {
    if (f == 0) f = next++;
  }
}

DisplacementSolver::~DisplacementSolver() = default;
DisplacementSolver::DisplacementSolver(DisplacementSolver&&) noexcept = default;
DisplacementSolver& DisplacementSolver::operator=(DisplacementSolver&&) noexcept = default;

Vector DisplacementSolver::solve(const SparseMatrix& tangent, const Vector& rhs, const std::vector<double>& prescribed,
                                 double tol, SolveReport* report) {
  const auto t0 = Clock::now();
  const Eigen::Index n = tangent.rows();
  if (prescribed.size() != constrained_.size()) throw SolverError("prescribed value count mismatch");

  Vector u = Vector::Zero(n);
  for (std::size_t i = 0; i < constrained_.size(); ++i) u[constrained_[i]] = prescribed[i];

  const Eigen::Index nfree = n - static_cast<Eigen::Index>(constrained_.size());
  Vector b(nfree);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (free_index_[i] >= 0) b[free_index_[i]] = rhs[i];
  }
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(tangent.nonZeros()));
  for (Eigen::Index col = 0; col < tangent.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(tangent, col); it; ++it) {
      const int fr = free_index_[it.row()];
      const int fc = free_index_[col];
      if (fr >= 0 && fc >= 0) {
        trips.emplace_back(fr, fc, it.value());
      } else if (fr >= 0) {
        b[fr] -= it.value() * u[col];
      }
    }
  }
  SparseMatrix kff(nfree, nfree);
  kff.setFromTriplets(trips.begin(), trips.end());
  kff.makeCompressed();

  Vector x;
  int iterations = 1;
  if (nfree > 0) {
    if (kind_ == LinearSolverKind::Cholesky) {
      if (!impl_->analyzed || impl_->pattern_nnz != kff.nonZeros()) {
        impl_->llt.analyzePattern(kff);
        impl_->analyzed = true;
        impl_->pattern_nnz = kff.nonZeros();
      }
      impl_->llt.factorize(kff);
      if (impl_->llt.info() != Eigen::Success) {
        throw SolverError("Cholesky factorization of the displacement tangent failed (matrix not SPD)");
      }
      x = impl_->llt.solve(b);
    } else {
      impl_->cg.setTolerance(tol);
      impl_->cg.setMaxIterations(std::max<Eigen::Index>(1000, 10 * nfree));
      impl_->cg.compute(kff);
      x = impl_->cg.solve(b);
      iterations = static_cast<int>(impl_->cg.iterations());
      if (impl_->cg.info() != Eigen::Success) throw SolverError("conjugate gradients did not converge");
    }
  } else {
    x.resize(0);
  }

  // Normwise backward error: residual relative to |K| |x| + |b|.
  const double res = nfree > 0 ? (kff * x - b).norm() : 0.0;
  const double scale = nfree > 0 ? infinity_norm(kff) * x.norm() + b.norm() : 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (free_index_[i] >= 0) u[i] = x[free_index_[i]];
  }
  const bool ok = res <= tol * scale || res == 0.0;
  if (report) {
    report->iterations = iterations;
    report->residual_norm = res;
    report->converged = ok;
    report->wall_time = seconds_since(t0);
  }
  if (!ok) {
    throw SolverError("displacement solve backward error " + format_double(scale > 0.0 ? res / scale : res) +
                      " above tolerance " + format_double(tol));
  }
  return u;
}

Vector solve_u(const SparseMatrix& tangent, const Vector& rhs, const DirichletData& bc, double tol,
               LinearSolverKind kind, SolveReport* report) {
  DisplacementSolver solver(static_cast<std::size_t>(tangent.rows()), bc.dofs, kind);
  return solver.solve(tangent, rhs, bc.values, tol, report);
}

double default_v_tolerance(const FractureFunctional& f) {
  const auto& area = f.discretization().lumped_area();
  double mean = 0.0;
  for (double a : area) mean += a;
  mean /= static_cast<double>(std::max<std::size_t>(1, area.size()));
  return 1e-8 * f.force_density() * mean;
}

double projected_gradient_norm(const Vector& v, const Vector& grad, const Vector& upper) {
  double m = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double p = std::clamp(v[i] - grad[i], 0.0, upper[i]);
    m = std::max(m, std::abs(v[i] - p));
  }
  return m;
}

namespace {

Vector project(const Vector& v, const Vector& upper) {
  Vector p(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) p[i] = std::clamp(v[i], 0.0, upper[i]);
  return p;
}

// Replaces active rows/columns by identity and shifts the free diagonal.
void reduce_hessian(SparseMatrix& h, const std::vector<char>& active, double shift) {
  for (Eigen::Index col = 0; col < h.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(h, col); it; ++it) {
      const bool diag = it.row() == col;
      if (active[it.row()] || active[col]) {
        it.valueRef() = diag ? 1.0 : 0.0;
      } else if (diag) {
        it.valueRef() += shift;
      }
    }
  }
}

}  // namespace

std::pair<Vector, SolveReport> solve_v(const FractureFunctional& f, const Vector& v_init, const Vector& v_upper,
                                       const BoxNewtonOptions& opt) {
  const auto t0 = Clock::now();
  const Eigen::Index n = v_init.size();
  SolveReport rep;

  Vector v = project(v_init, v_upper);
  double energy = f.energy(v);
  rep.initial_energy = energy;

  SparseMatrix hess = f.discretization().pattern(1).matrix;
  Eigen::SimplicialLLT<SparseMatrix> llt;
  llt.analyzePattern(hess);

  std::vector<char> active(static_cast<std::size_t>(n), 0);
  Vector grad = f.gradient(v);
  double measure = projected_gradient_norm(v, grad, v_upper);

  int it = 0;
  for (; it < opt.max_iter && measure > opt.tol; ++it) {
    std::size_t nactive = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const bool pinned = v_upper[i] <= opt.active_tol;
      const bool at_lower = v[i] <= opt.active_tol && grad[i] > 0.0;
      const bool at_upper = v[i] >= v_upper[i] - opt.active_tol && grad[i] < 0.0;
      active[i] = pinned || at_lower || at_upper;
      nactive += active[i];
    }

    Vector rhs = -grad;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (active[i]) rhs[i] = 0.0;
    }

    // Newton direction on the free set, convexified by tau I when the
    // reduced Hessian is indefinite.
    Vector dir;
    f.hessian_into(v, hess);
    SparseMatrix work = hess;
    reduce_hessian(work, active, 0.0);
    llt.factorize(work);
    if (llt.info() != Eigen::Success) {
      double tau = 1e-8 * std::max(infinity_norm(hess), 1e-300);
      for (int k = 0; k < 200; ++k, tau *= 2.0) {
        work = hess;
        reduce_hessian(work, active, tau);
        llt.factorize(work);
        if (llt.info() == Eigen::Success) break;
      }
    }
    if (llt.info() == Eigen::Success) dir = llt.solve(rhs);

    auto line_search = [&](const Vector& d, Vector& v_new, double& e_new) {
      double alpha = 1.0;
      for (int k = 0; k < 60; ++k, alpha *= 0.5) {
        v_new = project(v + alpha * d, v_upper);
        const double slope = grad.dot(v_new - v);
        if (!(slope < 0.0)) continue;
        e_new = f.energy(v_new);
        if (e_new <= energy + opt.armijo * slope) return true;
      }
      return false;
    };

    Vector v_new;
    double e_new = energy;
    bool accepted = dir.size() == n && grad.dot(dir) < 0.0 && line_search(dir, v_new, e_new);
    if (!accepted) {
      // Diagonally scaled projected-gradient step.
      Vector d(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double hii = std::abs(hess.coeff(i, i));
        d[i] = -grad[i] / (hii > 0.0 ? hii : 1.0);
      }
      accepted = line_search(d, v_new, e_new);
    }
    if (!accepted) break;  // no representable decrease left

    v = std::move(v_new);
    energy = e_new;
    grad = f.gradient(v);
    measure = projected_gradient_norm(v, grad, v_upper);
    rep.active_set_size = nactive;
  }

  rep.iterations = it;
  rep.residual_norm = measure;
  rep.converged = measure <= opt.tol;
  rep.final_energy = energy;
  rep.wall_time = seconds_since(t0);
  return {v, rep};
}

StationarityCheck check_stationarity(const Vector& v, const Vector& grad, const Vector& v_upper, double tol,
                                     double bound_tol) {
  StationarityCheck c;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const bool at_lower = v[i] <= bound_tol;
    const bool at_upper = v[i] >= v_upper[i] - bound_tol;
    if (at_lower && at_upper) continue;  // pinned by irreversibility
    if (at_upper) {
      ++c.clamped_dofs;
      c.max_clamped_violation = std::max(c.max_clamped_violation, grad[i]);
    } else if (at_lower) {
      ++c.clamped_dofs;
      c.max_clamped_violation = std::max(c.max_clamped_violation, -grad[i]);
    } else {
      ++c.free_dofs;
      c.max_free_residual = std::max(c.max_free_residual, std::abs(grad[i]));
    }
  }
  c.ok = c.max_free_residual <= tol && c.max_clamped_violation <= tol;
  return c;
}

}  // namespace pfrac
