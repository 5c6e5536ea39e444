#pragma once

// Weighted complex nonlinear least squares
//   l(z) = 1/2 (y - g(z))^H W (y - g(z))
// with the compound Jacobian G = [dg/dz, dg/dzbar], the loss cogradient,
// the Gauss-Newton Hessian P(G^H W G) and the Newton Hessian obtained by
// subtracting the per-residual curvature corrections.

#include <string>
#include <vector>

#include "crcalc/core.hpp"
#include "crcalc/errors.hpp"
#include "crcalc/fields.hpp"
#include "crcalc/hessian.hpp"
#include "crcalc/parallel.hpp"
#include "crcalc/types.hpp"
#include "crcalc/wirtinger.hpp"

namespace crcalc {

class LsqProblem {
 public:
  /// W must be Hermitian (to 1e-10 relative) and positive definite.
  LsqProblem(VectorField g, CVector y, CMatrix w) : g_(std::move(g)), y_(std::move(y)), w_(std::move(w)) {
    if (!g_.eval) throw InvalidArgument("LsqProblem: residual map has no evaluator");
    if (y_.size() != g_.out_dim) throw DimensionError("LsqProblem: data length differs from g output");
    if (w_.rows() != g_.out_dim || w_.cols() != g_.out_dim) throw DimensionError("LsqProblem: W shape");
    if (!all_finite(y_) || !all_finite(w_)) throw InvalidArgument("LsqProblem: non-finite data or weight");
    const double scale = std::max(1.0, max_abs(w_));
    if (max_abs(CMatrix(w_ - w_.adjoint())) > 1e-10 * scale) {
      throw InvalidArgument("LsqProblem: W is not Hermitian");
    }
    w_ = 0.5 * (w_ + w_.adjoint()).eval();
    Eigen::LLT<CMatrix> llt(w_);
    if (llt.info() != Eigen::Success) throw InvalidArgument("LsqProblem: W is not positive definite");
  }

  /// Unit weight.
  LsqProblem(VectorField g, CVector y)
      : LsqProblem(std::move(g), y, CMatrix::Identity(y.size(), y.size())) {}

  const VectorField& g() const { return g_; }
  const CVector& y() const { return y_; }
  const CMatrix& w() const { return w_; }
  Index dim() const { return g_.dim; }
  Index out_dim() const { return g_.out_dim; }

 private:
  VectorField g_;
  CVector y_;
  CMatrix w_;
};

/// e = y - g(z)
inline CVector residual(const LsqProblem& p, const CVector& z) {
  if (z.size() != p.dim()) throw DimensionError("residual: point dimension mismatch");
  CVector g = p.g()(z);
  if (g.size() != p.out_dim()) throw DimensionError("residual: g returned wrong length");
  detail::require_finite(g, "residual");
  return p.y() - g;
}

inline double loss(const LsqProblem& p, const CVector& z) {
  const CVector e = residual(p, z);
  return 0.5 * e.dot(p.w() * e).real();
}

/// G = [dg/dz, dg/dzbar], m x 2n.
inline CMatrix compound_jacobian(const LsqProblem& p, const CVector& z) {
  const JacobianPair jp = jacobians(p.g(), z);
  CMatrix g(p.out_dim(), 2 * p.dim());
  g << jp.jac, jp.conj_jac;
  return g;
}

struct LossCogradient {
  CRowVector row;  // dl/dc, 1 x 2n
  CVector col;     // (dl/dc)^H, admissible
  WirtingerPair pair() const {
    const Index n = row.size() / 2;
    return {row.head(n), row.tail(n)};
  }
};

/// (dl/dc)^H = (B + S conj(B)) / 2 with B = -G^H W e.
inline LossCogradient loss_cogradient(const LsqProblem& p, const CVector& z) {
  const CVector e = residual(p, z);
  const CMatrix g = compound_jacobian(p, z);
  const CVector b = -(g.adjoint() * (p.w() * e));
  LossCogradient out;
  out.col = 0.5 * (b + swap(CVector(b.conjugate())));
  out.row = out.col.adjoint();
  return out;
}

/// P(G^H W G): Hermitian, admissible, positive semidefinite.
inline CMatrix gauss_newton_hessian(const LsqProblem& p, const CVector& z) {
  const CMatrix g = compound_jacobian(p, z);
  const CMatrix raw = g.adjoint() * p.w() * g;
  return project_admissible(raw);
}

/// Gauss-Newton blocks U_zz and U_zbar_z written directly in terms of the
/// Jacobian pair:
///   U_zz     = ((Jg^H W Jg)  + conj(Jgc^H W Jgc)) / 2
///   U_zbar_z = ((Jg^H W Jgc) + conj(Jgc^H W Jg)) / 2
struct GaussNewtonBlocks {
  CMatrix zz;
  CMatrix zbar_z;
};

inline GaussNewtonBlocks gauss_newton_blocks(const LsqProblem& p, const CVector& z) {
  const JacobianPair jp = jacobians(p.g(), z);
  const CMatrix& w = p.w();
  return {0.5 * (jp.jac.adjoint() * w * jp.jac + (jp.conj_jac.adjoint() * w * jp.conj_jac).conjugate()),
          0.5 * (jp.jac.adjoint() * w * jp.conj_jac + (jp.conj_jac.adjoint() * w * jp.jac).conjugate())};
}

/// Second derivatives of one residual component g_i.
struct ResidualCurvature {
  CMatrix zz;      // [k, j] = d^2 g_i / dz_k dz_j
  CMatrix z_zbar;  // [k, j] = d^2 g_i / dz_k dzbar_j
  CMatrix zbar_zbar;

  /// A(g_i) = d/dc (dg_i/dc)^H = conj([[z_zbar, zz], [zbar_zbar, z_zbar^T]])
  CMatrix raw_matrix() const {
    const Index n = zz.rows();
    CMatrix a(2 * n, 2 * n);
    a << z_zbar, zz, zbar_zbar, z_zbar.transpose();
    return a.conjugate();
  }
};

/// Second derivatives of every residual component, by central differences
/// of the Jacobian pair (analytic Jacobians when the field has them, nested
/// differences otherwise).
inline std::vector<ResidualCurvature> residual_curvatures(const LsqProblem& p, const CVector& z) {
  const Index n = p.dim(), m = p.out_dim();
  auto stacked = [&](const CVector& q) {
    const JacobianPair jp = jacobians(p.g(), q);
    CVector u(2 * m * n);
    u.head(m * n) = jp.jac.reshaped();
    u.tail(m * n) = jp.conj_jac.reshaped();
    return u;
  };
  const JacobianPair d = wirtinger_jacobians_fd(stacked, z, 2 * m * n, second_order_step_base());
  // Row index of entry (i, k) of a column-major m x n block: i + k m.
  std::vector<ResidualCurvature> out(static_cast<std::size_t>(m));
  for (Index i = 0; i < m; ++i) {
    ResidualCurvature rc{CMatrix(n, n), CMatrix(n, n), CMatrix(n, n)};
    for (Index k = 0; k < n; ++k) {
      const Index jk = i + k * m;          // J[i, k]
      const Index jck = m * n + i + k * m;  // Jc[i, k]
      for (Index j = 0; j < n; ++j) {
        rc.zz(k, j) = d.jac(jk, j);
        rc.zbar_zbar(k, j) = d.conj_jac(jck, j);
        // d/dzbar_j J[i,k] and d/dz_k Jc[i,j] estimate the same mixed partial.
        rc.z_zbar(k, j) = 0.5 * (d.conj_jac(jk, j) + d.jac(m * n + i + j * m, k));
      }
    }
    // Symmetry of the pure second derivatives.
    rc.zz = 0.5 * (rc.zz + rc.zz.transpose()).eval();
    rc.zbar_zbar = 0.5 * (rc.zbar_zbar + rc.zbar_zbar.transpose()).eval();
    out[static_cast<std::size_t>(i)] = std::move(rc);
  }
  return out;
}

/// H^(i) = P(A(g_i) [W e]_i), one per residual component. Each is Hermitian
/// and admissible.
inline std::vector<CMatrix> curvature_corrections(const LsqProblem& p, const CVector& z) {
  const CVector we = p.w() * residual(p, z);
  const auto curv = residual_curvatures(p, z);
  std::vector<CMatrix> out(curv.size());
  parallel_for(curv.size(), [&](std::size_t i) {
    out[i] = project_admissible(CMatrix(curv[i].raw_matrix() * we(static_cast<Index>(i))));
  });
  return out;
}

/// Newton (c-complex) Hessian of the loss: P(G^H W G) - sum_i H^(i), summed in
/// component order.
inline CMatrix newton_hessian(const LsqProblem& p, const CVector& z) {
  CMatrix h = gauss_newton_hessian(p, z);
  for (const CMatrix& c : curvature_corrections(p, z)) h -= c;
  return h;
}

/// The loss as a scalar field with analytic cogradients.
inline ScalarField loss_field(const LsqProblem& p) {
  ScalarField f;
  f.dim = p.dim();
  f.eval = [p](const CVector& z) { return loss(p, z); };
  f.cogradients = [p](const CVector& z) { return loss_cogradient(p, z).pair(); };
  return f;
}

}  // namespace crcalc
