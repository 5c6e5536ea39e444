#pragma once

// Second-order CR calculus for real scalar fields: the four Hessian blocks,
// the c-complex, c-real and real (r-r) Hessians, and second-order expansions
// in each representation.

#include <cmath>
#include <limits>
#include <string>

#include "crcalc/core.hpp"
#include "crcalc/errors.hpp"
#include "crcalc/fields.hpp"
#include "crcalc/types.hpp"
#include "crcalc/wirtinger.hpp"

namespace crcalc {

inline constexpr double kSymTolFd = 1e-4;
inline constexpr double kSymTolAnalytic = 1e-8;
inline constexpr double kRelationTol = 1e-10;

/// eps^(1/4): step base for differencing first cogradients.
inline double second_order_step_base() { return std::pow(std::numeric_limits<double>::epsilon(), 0.25); }

/// [[zz, zbar_z], [z_zbar, zbar_zbar]]
inline CMatrix to_block_matrix(const HessianQuad& q) {
  const Index n = q.dim();
  CMatrix h(2 * n, 2 * n);
  h << q.zz, q.zbar_z, q.z_zbar, q.zbar_zbar;
  return h;
}

inline HessianQuad from_block_matrix(const CMatrix& h) {
  detail::require_square_even(h, "from_block_matrix");
  const Index n = h.rows() / 2;
  return {h.topLeftCorner(n, n), h.topRightCorner(n, n), h.bottomLeftCorner(n, n),
          h.bottomRightCorner(n, n), 0.0};
}

/// Nearest quad satisfying the Hermitian and conjugation block identities:
/// (P(H) + P(H)^H) / 2. P commutes with the adjoint, so the result is both
/// Hermitian and admissible.
inline HessianQuad symmetrize(const HessianQuad& raw) {
  const CMatrix h = to_block_matrix(raw);
  const CMatrix p = project_admissible(h);
  const CMatrix s = 0.5 * (p + p.adjoint());
  HessianQuad q = from_block_matrix(s);
  q.presym_residual = max_abs(CMatrix(h - s));
  return q;
}

/// Residuals of the six block identities (Hermitian, conjugation, symmetry).
struct QuadIdentityResiduals {
  double hermitian_zz = 0, hermitian_off = 0;
  double conj_diag = 0, conj_off = 0;
  double sym_diag = 0, sym_off = 0;
  double max() const {
    return std::max({hermitian_zz, hermitian_off, conj_diag, conj_off, sym_diag, sym_off});
  }
};

inline QuadIdentityResiduals quad_identity_residuals(const HessianQuad& q) {
  QuadIdentityResiduals r;
  r.hermitian_zz = max_abs(CMatrix(q.zz - q.zz.adjoint()));
  r.hermitian_off = max_abs(CMatrix(q.zbar_z - q.z_zbar.adjoint()));
  r.conj_diag = max_abs(CMatrix(q.zbar_zbar - q.zz.conjugate()));
  r.conj_off = max_abs(CMatrix(q.zbar_z - q.z_zbar.conjugate()));
  r.sym_diag = max_abs(CMatrix(q.zz - q.zbar_zbar.transpose()));
  r.sym_off = max_abs(CMatrix(q.z_zbar - q.z_zbar.transpose()));
  return r;
}

/// Raw blocks by central differences of the first cogradients (analytic if
/// the field has them), before symmetrization.
inline HessianQuad hessian_quad_fd_raw(const ScalarField& f, const CVector& z,
                                       double step_base = second_order_step_base()) {
  const Index n = z.size();
  auto stacked = [&](const CVector& p) {
    const WirtingerPair g = cogradients(f, p);
    CVector u(2 * n);
    u << g.dz.adjoint(), g.dzbar.adjoint();
    return u;
  };
  const JacobianPair jp = wirtinger_jacobians_fd(stacked, z, 2 * n, step_base);
  return {jp.jac.topRows(n), jp.conj_jac.topRows(n), jp.jac.bottomRows(n), jp.conj_jac.bottomRows(n),
          0.0};
}

/// The four Hessian blocks at z, symmetrized. Throws SymmetryViolation when
/// the raw blocks are further than tau_sym * max(1, ||H||) from satisfying
/// the block identities (usually a sign of wrong analytic derivatives).
inline HessianQuad hessian_quad(const ScalarField& f, const CVector& z) {
  const bool analytic = f.has_hessian();
  HessianQuad raw = analytic ? f.hessian(z) : hessian_quad_fd_raw(f, z);
  const Index n = z.size();
  for (const CMatrix* b : {&raw.zz, &raw.zbar_z, &raw.z_zbar, &raw.zbar_zbar}) {
    if (b->rows() != n || b->cols() != n) throw DimensionError("hessian_quad: block shape mismatch");
    detail::require_finite(*b, "hessian_quad");
  }
  HessianQuad q = symmetrize(raw);
  const double tol = analytic ? kSymTolAnalytic : kSymTolFd;
  const double scale = std::max(1.0, max_abs(to_block_matrix(raw)));
  if (q.presym_residual > tol * scale) {
    throw SymmetryViolation("hessian_quad: block identities violated before symmetrization (residual " +
                            std::to_string(q.presym_residual) + ")");
  }
  return q;
}

// ---------------------------------------------------------------------------
// Assembled forms.

struct AssembledHessians {
  CMatrix complex_form;  // c-complex Hessian, block matrix of the quad
  CMatrix real_form;     // c-real Hessian = S * complex_form
  RMatrix rr;            // real Hessian in r = col(x, y)
};

/// J^H H J, evaluated blockwise.
inline CMatrix congruence_by_j(const CMatrix& h) {
  const Index n = h.rows() / 2;
  const CMatrix a = h.topLeftCorner(n, n), b = h.topRightCorner(n, n);
  const CMatrix c = h.bottomLeftCorner(n, n), d = h.bottomRightCorner(n, n);
  CMatrix out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = a + b + c + d;
  out.topRightCorner(n, n) = kJ * (a - b + c - d);
  out.bottomLeftCorner(n, n) = kJ * (c + d - a - b);
  out.bottomRightCorner(n, n) = a - b - c + d;
  return out;
}

/// Throws RelationViolation if J^H H J has an imaginary part above
/// tau_rel * max(1, ||H||), i.e. the quad does not come from a real field.
inline AssembledHessians assemble(const HessianQuad& q) {
  AssembledHessians out;
  out.complex_form = to_block_matrix(q);
  out.real_form = swap(out.complex_form);
  const CMatrix rr = congruence_by_j(out.complex_form);
  const double imag = max_abs(RMatrix(rr.imag()));
  const double scale = std::max(1.0, max_abs(out.complex_form));
  if (imag > kRelationTol * scale) {
    throw RelationViolation("assemble: J^H H J is not real (imaginary part " + std::to_string(imag) + ")");
  }
  out.rr = rr.real();
  return out;
}

// ---------------------------------------------------------------------------
// Second-order expansions.

enum class Representation { real, c_complex, c_real, z };

inline const char* to_string(Representation r) {
  switch (r) {
    case Representation::real: return "r";
    case Representation::c_complex: return "c-complex";
    case Representation::c_real: return "c-real";
    case Representation::z: return "z";
  }
  return "?";
}

/// Second-order term of the expansion in the requested representation:
///   r:         1/2 dr^T H_rr dr
///   c-complex: 1/2 dc^H H^C dc
///   c-real:    1/2 dc^T H^R dc
///   z:         Re{dz^H H_zz dz + dz^H H_zbar_z conj(dz)}
inline double second_order_term(const HessianQuad& q, const CVector& dz, Representation rep) {
  const ComplexPoint dp(dz);
  switch (rep) {
    case Representation::real: {
      const RVector dr = to_real(dp).r();
      return 0.5 * dr.dot(assemble(q).rr * dr);
    }
    case Representation::c_complex: {
      const CVector dc = to_conjugate(dp).c();
      return 0.5 * dc.dot(to_block_matrix(q) * dc).real();
    }
    case Representation::c_real: {
      const CVector dc = to_conjugate(dp).c();
      const CMatrix hr = swap(to_block_matrix(q));
      return 0.5 * (dc.transpose() * hr * dc)(0).real();
    }
    case Representation::z: {
      return (dz.dot(q.zz * dz) + dz.dot(q.zbar_z * dz.conjugate())).real();
    }
  }
  return 0.0;
}

/// Second-order model value from precomputed derivatives.
inline double second_order_model(double value, const WirtingerPair& g, const HessianQuad& q,
                                 const CVector& dz, Representation rep) {
  const LinearTerms lin = linear_terms(g, dz);
  double linear = lin.complex;
  if (rep == Representation::real) linear = lin.real;
  if (rep == Representation::c_complex || rep == Representation::c_real) linear = lin.conjugate;
  return value + linear + second_order_term(q, dz, rep);
}

inline double second_order_predict(const ScalarField& f, const CVector& z, const CVector& dz,
                                   Representation rep) {
  if (dz.size() != z.size()) throw DimensionError("second_order_predict: step dimension mismatch");
  return second_order_model(f(z), cogradients(f, z), hessian_quad(f, z), dz, rep);
}

}  // namespace crcalc
