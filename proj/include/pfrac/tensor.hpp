// Symmetric second-order tensors in a 3D representation.
//
// Plane-strain quantities are embedded with zz = yz = xz = 0 for strains so
// that traces, deviators and invariants keep their full 3D meaning.
//
// Off-diagonal convention: the stored off-diagonal values are the tensor
// components themselves (not engineering shears). Every contraction doubles
// them, so double_contract(a, b) == sum_ij a_ij b_ij over the full 3x3 array.
#pragma once

#include <array>

namespace pfrac {

struct SymTensor2 {
  double xx = 0.0;
  double yy = 0.0;
  double zz = 0.0;
  double xy = 0.0;
  double yz = 0.0;
  double xz = 0.0;

  static constexpr SymTensor2 zero() { return {}; }
  static constexpr SymTensor2 identity() { return {1.0, 1.0, 1.0, 0.0, 0.0, 0.0}; }
  static constexpr SymTensor2 diag(double a, double b, double c) { return {a, b, c, 0.0, 0.0, 0.0}; }

  /// Full 3x3 array view, row-major.
  std::array<std::array<double, 3>, 3> to_matrix() const {
    return {{{xx, xy, xz}, {xy, yy, yz}, {xz, yz, zz}}};
  }

  SymTensor2& operator+=(const SymTensor2& o) {
    xx += o.xx; yy += o.yy; zz += o.zz;
    xy += o.xy; yz += o.yz; xz += o.xz;
    return *this;
  }
  SymTensor2& operator-=(const SymTensor2& o) {
    xx -= o.xx; yy -= o.yy; zz -= o.zz;
    xy -= o.xy; yz -= o.yz; xz -= o.xz;
    return *this;
  }
  SymTensor2& operator*=(double s) {
    xx *= s; yy *= s; zz *= s;
    xy *= s; yz *= s; xz *= s;
    return *this;
  }

  friend SymTensor2 operator+(SymTensor2 a, const SymTensor2& b) { return a += b; }
  friend SymTensor2 operator-(SymTensor2 a, const SymTensor2& b) { return a -= b; }
  friend SymTensor2 operator*(SymTensor2 a, double s) { return a *= s; }
  friend SymTensor2 operator*(double s, SymTensor2 a) { return a *= s; }
  friend bool operator==(const SymTensor2&, const SymTensor2&) = default;
};

inline double trace(const SymTensor2& t) { return t.xx + t.yy + t.zz; }

inline SymTensor2 deviator(const SymTensor2& t) {
  const double p = trace(t) / 3.0;
  return {t.xx - p, t.yy - p, t.zz - p, t.xy, t.yz, t.xz};
}

inline double double_contract(const SymTensor2& a, const SymTensor2& b) {
  return a.xx * b.xx + a.yy * b.yy + a.zz * b.zz + 2.0 * (a.xy * b.xy + a.yz * b.yz + a.xz * b.xz);
}

/// Second invariant of the deviator, J2 = tr(t_D^2) / 2. Never negative.
inline double j2(const SymTensor2& t) {
  const SymTensor2 d = deviator(t);
  return 0.5 * double_contract(d, d);
}

}  // namespace pfrac
