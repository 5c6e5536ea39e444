#pragma once

#include <functional>

#include "crcalc/types.hpp"

namespace crcalc {

/// The cogradient pair (df/dz, df/dzbar) of a scalar function, both 1 x n.
struct WirtingerPair {
  CRowVector dz;
  CRowVector dzbar;
};

/// Jacobian pair of f: C^n -> C^m; df = jac dz + conj_jac dzbar.
struct JacobianPair {
  CMatrix jac;       // m x n, df/dz
  CMatrix conj_jac;  // m x n, df/dzbar
};

/// The four n x n second-order blocks of a real scalar field:
///   zz       = d/dz    (df/dz)^H
///   zbar_z   = d/dzbar (df/dz)^H
///   z_zbar   = d/dz    (df/dzbar)^H
///   zbar_zbar= d/dzbar (df/dzbar)^H
struct HessianQuad {
  CMatrix zz;
  CMatrix zbar_z;
  CMatrix z_zbar;
  CMatrix zbar_zbar;
  /// ||raw - symmetrized||_inf measured before the block identities were
  /// enforced; 0 when the quad was built directly.
  double presym_residual = 0.0;

  Index dim() const { return zz.rows(); }
};

/// Real-valued scalar field on C^n. The optional closures supply analytic
/// derivatives; when empty, finite differences are used.
struct ScalarField {
  Index dim = 0;
  std::function<double(const CVector&)> eval;
  std::function<WirtingerPair(const CVector&)> cogradients;
  std::function<HessianQuad(const CVector&)> hessian;

  double operator()(const CVector& z) const { return eval(z); }
  bool has_cogradients() const { return static_cast<bool>(cogradients); }
  bool has_hessian() const { return static_cast<bool>(hessian); }
};

/// Complex vector field C^n -> C^m. Complex-valued scalar objectives are
/// represented with m = 1.
struct VectorField {
  Index dim = 0;
  Index out_dim = 0;
  std::function<CVector(const CVector&)> eval;
  std::function<JacobianPair(const CVector&)> jacobians;

  CVector operator()(const CVector& z) const { return eval(z); }
  bool has_jacobians() const { return static_cast<bool>(jacobians); }
};

}  // namespace crcalc
