#pragma once

// Generalized gradient descent on conjugate coordinates,
//   c <- c + alpha dc,   dc = -Q(c) (dl/dc)^H,
// with Q chosen from the identity / Newton / quasi-Newton / Gauss-Newton /
// quasi-Gauss-Newton family. Newton-type steps are solved in z-space by
// eliminating the dzbar block and inverting the Schur complement.

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "crcalc/core.hpp"
#include "crcalc/errors.hpp"
#include "crcalc/fields.hpp"
#include "crcalc/hessian.hpp"
#include "crcalc/lsq.hpp"
#include "crcalc/types.hpp"
#include "crcalc/wirtinger.hpp"

namespace crcalc {

enum class QKind { identity, newton, quasi_newton, gauss_newton, quasi_gauss_newton };

inline const char* to_string(QKind k) {
  switch (k) {
    case QKind::identity: return "identity";
    case QKind::newton: return "newton";
    case QKind::quasi_newton: return "quasi_newton";
    case QKind::gauss_newton: return "gauss_newton";
    case QKind::quasi_gauss_newton: return "quasi_gauss_newton";
  }
  return "?";
}

/// Accepts "quasi_newton" and "quasi-newton".
inline std::optional<QKind> parse_qkind(std::string s) {
  for (auto& ch : s) if (ch == '-') ch = '_';
  for (QKind k : {QKind::identity, QKind::newton, QKind::quasi_newton, QKind::gauss_newton,
                  QKind::quasi_gauss_newton}) {
    if (s == to_string(k)) return k;
  }
  return std::nullopt;
}

struct QStrategy {
  QKind kind = QKind::newton;
  double damping = 0.0;  // Tikhonov shift added to the Q-defining matrix
};

struct Backtracking {
  bool enabled = false;
  double beta = 0.5;
  double c1 = 1e-4;
};

struct OptimizerConfig {
  double step_size = 1.0;
  int max_iters = 100;
  double grad_tol = 1e-8;
  Backtracking backtracking;
  bool record_trace = true;

  /// alpha = 1 for Newton and Gauss-Newton variants, 0.1 for identity Q.
  static OptimizerConfig defaults_for(QKind kind) {
    OptimizerConfig c;
    c.step_size = kind == QKind::identity ? 0.1 : 1.0;
    return c;
  }

  void validate() const {
    if (!(step_size > 0)) throw InvalidArgument("step size must be positive");
    if (!(grad_tol > 0)) throw InvalidArgument("grad_tol must be positive");
    if (max_iters < 0) throw InvalidArgument("max_iters must be nonnegative");
    if (backtracking.enabled && !(backtracking.beta > 0 && backtracking.beta < 1)) {
      throw InvalidArgument("Armijo beta must lie in (0, 1)");
    }
    if (backtracking.enabled && !(backtracking.c1 > 0 && backtracking.c1 < 1)) {
      throw InvalidArgument("Armijo c1 must lie in (0, 1)");
    }
  }
};

// ---------------------------------------------------------------------------
// Objective: a general real field or a least-squares problem.

class Objective {
 public:
  explicit Objective(ScalarField f) : impl_(std::move(f)) {}
  explicit Objective(LsqProblem p) : impl_(std::move(p)) {}

  bool is_least_squares() const { return std::holds_alternative<LsqProblem>(impl_); }

  Index dim() const {
    return std::visit([](const auto& o) -> Index {
      if constexpr (std::is_same_v<std::decay_t<decltype(o)>, ScalarField>) return o.dim;
      else return o.dim();
    }, impl_);
  }

  double value(const CVector& z) const {
    if (const auto* f = std::get_if<ScalarField>(&impl_)) return (*f)(z);
    return loss(std::get<LsqProblem>(impl_), z);
  }

  WirtingerPair cogradient(const CVector& z) const {
    if (const auto* f = std::get_if<ScalarField>(&impl_)) return cogradients(*f, z);
    return loss_cogradient(std::get<LsqProblem>(impl_), z).pair();
  }

  /// c-complex Hessian of the objective.
  CMatrix newton_hessian(const CVector& z) const {
    if (const auto* f = std::get_if<ScalarField>(&impl_)) return to_block_matrix(hessian_quad(*f, z));
    return crcalc::newton_hessian(std::get<LsqProblem>(impl_), z);
  }

  CMatrix gauss_newton_hessian(const CVector& z) const {
    const auto* p = std::get_if<LsqProblem>(&impl_);
    if (!p) throw InvalidArgument("Gauss-Newton strategies need a least-squares problem");
    return crcalc::gauss_newton_hessian(*p, z);
  }

 private:
  std::variant<ScalarField, LsqProblem> impl_;
};

// ---------------------------------------------------------------------------
// Linear algebra helpers.

namespace detail {

/// LU solve that treats pivots below rel_tol * scale as singular; FullPivLU's
/// own threshold is relative to the largest pivot, which is meaningless for
/// 1 x 1 blocks.
inline std::optional<CMatrix> checked_solve(const CMatrix& m, const CMatrix& rhs, double scale,
                                            double rel_tol = 1e-12) {
  Eigen::FullPivLU<CMatrix> lu(m);
  const double min_pivot = m.size() == 0 ? 1.0 : lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (!(min_pivot > rel_tol * std::max(scale, std::numeric_limits<double>::min()))) return std::nullopt;
  return CMatrix(lu.solve(rhs));
}

}  // namespace detail

/// H_zz - H_zbar_z H_zbar_zbar^{-1} H_z_zbar
inline CMatrix schur_complement(const HessianQuad& q) {
  const double scale = max_abs(to_block_matrix(q));
  const auto x = detail::checked_solve(q.zbar_zbar, q.z_zbar, scale);
  if (!x) throw SingularMatrix("schur_complement: H_zbar_zbar is singular");
  return q.zz - q.zbar_z * (*x);
}

/// Newton step in z-space: solves
///   [[H_zz, H_zbar_z], [H_z_zbar, H_zbar_zbar]] col(dz, dzbar) = -col(g_z^H, g_zbar^H)
/// by eliminating dzbar, i.e.
///   dz = (H_zz - H_zbar_z H_zbar_zbar^{-1} H_z_zbar)^{-1}
///        (H_zbar_z H_zbar_zbar^{-1} g_zbar^H - g_z^H).
/// `damping` is added to both diagonal blocks.
inline CVector newton_update_z(const HessianQuad& q, const WirtingerPair& grad, double damping = 0.0) {
  const Index n = q.dim();
  if (grad.dz.size() != n) throw DimensionError("newton_update_z: gradient dimension mismatch");
  const CMatrix eye = CMatrix::Identity(n, n);
  const double scale = std::max(max_abs(to_block_matrix(q)), damping);
  const CMatrix hbb = q.zbar_zbar + damping * eye;
  CMatrix rhs(n, n + 1);
  rhs << q.z_zbar, grad.dzbar.adjoint();
  const auto x = detail::checked_solve(hbb, rhs, scale);
  if (!x) throw SingularMatrix("newton_update_z: H_zbar_zbar is singular");
  const CMatrix schur = q.zz + damping * eye - q.zbar_z * x->leftCols(n);
  const CVector b = q.zbar_z * x->col(n) - grad.dz.adjoint();
  const auto dz = detail::checked_solve(schur, b, scale);
  if (!dz) throw SingularMatrix("newton_update_z: Schur complement of H_zz is singular");
  return *dz;
}

/// Block-diagonal truncation: keeps H_zz and H_zbar_zbar.
inline CMatrix block_diagonal_part(const CMatrix& h) {
  const Index n = h.rows() / 2;
  CMatrix out = CMatrix::Zero(2 * n, 2 * n);
  out.topLeftCorner(n, n) = h.topLeftCorner(n, n);
  out.bottomRightCorner(n, n) = h.bottomRightCorner(n, n);
  return out;
}

/// The matrix whose inverse is Q (damping included); identity for QKind::identity.
inline CMatrix q_defining_matrix(const Objective& obj, const CVector& z, const QStrategy& s) {
  const Index n = obj.dim();
  CMatrix h;
  switch (s.kind) {
    case QKind::identity: h = CMatrix::Identity(2 * n, 2 * n); break;
    case QKind::newton: h = obj.newton_hessian(z); break;
    case QKind::quasi_newton: h = block_diagonal_part(obj.newton_hessian(z)); break;
    case QKind::gauss_newton: h = obj.gauss_newton_hessian(z); break;
    case QKind::quasi_gauss_newton: h = block_diagonal_part(obj.gauss_newton_hessian(z)); break;
  }
  if (s.kind != QKind::identity && s.damping > 0) h += s.damping * CMatrix::Identity(2 * n, 2 * n);
  return h;
}

struct DescentStep {
  ConjugateCoordinates delta;
  CVector gradient;              // (dl/dc)^H
  double predicted_change = 0;   // (dl/dc) dc per unit stepsize; <= 0 when Q > 0
  bool q_positive_definite = false;
  double q_condition = std::numeric_limits<double>::infinity();
};

/// One generalized-descent direction dc = -Q (dl/dc)^H at c.
inline DescentStep descent_step(const Objective& obj, const ConjugateCoordinates& c, const QStrategy& s) {
  if (s.damping < 0) throw InvalidArgument("damping must be nonnegative");
  const CVector z = c.z();
  const Index n = z.size();
  const WirtingerPair g = obj.cogradient(z);
  CVector grad(2 * n);
  grad << g.dz.adjoint(), g.dzbar.adjoint();

  const CMatrix h = q_defining_matrix(obj, z, s);
  const double scale = std::max(1.0, max_abs(h));
  if (matrix_admissibility_residual(h) > 1e-8 * scale) {
    throw InadmissibleQ(std::string("Q-defining matrix for ") + to_string(s.kind) + " is not admissible");
  }
  const CMatrix herm = 0.5 * (h + h.adjoint());
  Eigen::LLT<CMatrix> llt(herm);
  bool pd = llt.info() == Eigen::Success;
  double cond = std::numeric_limits<double>::infinity();
  if (pd) {
    const RVector d = llt.matrixLLT().diagonal().real();
    pd = d.minCoeff() > 0;
    if (pd) cond = std::pow(d.maxCoeff() / d.minCoeff(), 2);
  }

  CVector dz;
  if (s.kind == QKind::identity) {
    dz = -g.dz.adjoint();
  } else {
    try {
      dz = newton_update_z(from_block_matrix(h), g);
    } catch (const SingularMatrix& e) {
      throw SingularQ(std::string(to_string(s.kind)) + ": " + e.what());
    }
  }
  DescentStep out{ConjugateCoordinates::from_z(dz), grad, 0.0, pd, cond};
  out.predicted_change = grad.dot(out.delta.c()).real();
  return out;
}

// ---------------------------------------------------------------------------
// Iteration driver.

struct IterationRecord {
  int iter = 0;
  CVector z;
  double loss = 0;
  double grad_norm = 0;   // ||dl/dz||_inf at z
  double step_norm = 0;   // ||alpha_k dz|| of the step taken from z (0 on the last row)
  double step_length = 0; // alpha_k after backtracking
  double q_condition = std::numeric_limits<double>::quiet_NaN();
  bool q_positive_definite = false;
  bool gradient_fallback = false;  // non-descent direction replaced by -(dl/dz)^H
};

using IterationTrace = std::vector<IterationRecord>;

enum class Status { converged, max_iters, stalled };

struct MinimizeResult {
  CVector z;
  Status status = Status::max_iters;
  int iterations = 0;
  double loss = 0;
  double grad_norm = 0;
  IterationTrace trace;
};

inline constexpr double kDivergenceLoss = 1e12;

inline MinimizeResult minimize(const Objective& obj, const CVector& z0, const QStrategy& strategy,
                               const OptimizerConfig& cfg) {
  cfg.validate();
  if (z0.size() != obj.dim()) throw DimensionError("minimize: start point dimension mismatch");
  MinimizeResult res;
  CVector z = z0;
  for (int k = 0;; ++k) {
    const double val = obj.value(z);
    if (!std::isfinite(val) || val > kDivergenceLoss) {
      throw Diverged("iteration " + std::to_string(k) + ": loss " + std::to_string(val));
    }
    const WirtingerPair g = obj.cogradient(z);
    IterationRecord rec;
    rec.iter = k;
    rec.z = z;
    rec.loss = val;
    rec.grad_norm = max_abs(g.dz);
    res.loss = val;
    res.grad_norm = rec.grad_norm;
    res.iterations = k;
    res.z = z;
    if (rec.grad_norm <= cfg.grad_tol || k >= cfg.max_iters) {
      res.status = rec.grad_norm <= cfg.grad_tol ? Status::converged : Status::max_iters;
      if (cfg.record_trace) res.trace.push_back(std::move(rec));
      return res;
    }

    DescentStep step = [&] {
      try {
        return descent_step(obj, ConjugateCoordinates::from_z(z), strategy);
      } catch (const SingularQ& e) {
        throw SingularQ("iteration " + std::to_string(k) + ": " + e.what());
      }
    }();
    rec.q_condition = step.q_condition;
    rec.q_positive_definite = step.q_positive_definite;
    CVector dz = step.delta.z();
    double slope = step.predicted_change;
    double t = cfg.step_size;
    if (cfg.backtracking.enabled) {
      if (!(slope < 0)) {
        dz = -g.dz.adjoint();
        slope = differential(g, dz);
        rec.gradient_fallback = true;
      }
      while (true) {
        const double trial = obj.value(z + t * dz);
        if (std::isfinite(trial) && trial <= val + cfg.backtracking.c1 * t * slope) break;
        t *= cfg.backtracking.beta;
        if (t < 1e-20 * cfg.step_size) {
          res.status = Status::stalled;
          if (cfg.record_trace) res.trace.push_back(std::move(rec));
          return res;
        }
      }
    }
    rec.step_length = t;
    rec.step_norm = (t * dz).norm();
    z += t * dz;
    if (cfg.record_trace) res.trace.push_back(std::move(rec));
  }
}

// ---------------------------------------------------------------------------
// Optimality check.

enum class MinimumKind { local_min, saddle_or_max, indefinite, singular };

inline const char* to_string(MinimumKind k) {
  switch (k) {
    case MinimumKind::local_min: return "local_min";
    case MinimumKind::saddle_or_max: return "saddle_or_max";
    case MinimumKind::indefinite: return "indefinite";
    case MinimumKind::singular: return "singular";
  }
  return "?";
}

struct MinimumCheck {
  MinimumKind kind = MinimumKind::singular;
  RVector eigenvalues;  // of the c-complex Hessian, ascending
};

/// Classifies a stationary point from the eigenvalues of the c-complex
/// Hessian. Eigenvalues within 1e-10 * sum|lambda| of zero count as zero.
inline MinimumCheck classify_minimum(const HessianQuad& q) {
  const CMatrix h = to_block_matrix(q);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (h + h.adjoint()), Eigen::EigenvaluesOnly);
  MinimumCheck out;
  out.eigenvalues = es.eigenvalues();
  const double tol = 1e-10 * out.eigenvalues.cwiseAbs().sum();
  const bool any_zero = (out.eigenvalues.cwiseAbs().array() <= tol).any();
  if (any_zero) out.kind = MinimumKind::singular;
  else if (out.eigenvalues.minCoeff() > 0) out.kind = MinimumKind::local_min;
  else if (out.eigenvalues.maxCoeff() < 0) out.kind = MinimumKind::saddle_or_max;
  else out.kind = MinimumKind::indefinite;
  return out;
}

inline MinimumKind check_minimum(const HessianQuad& q) { return classify_minimum(q).kind; }

// ---------------------------------------------------------------------------
// Equality constraints.

/// L(z) = l(z) + Re{lambda^H g(z)}. Analytic cogradients are provided when
/// both l and g carry analytic derivatives:
///   dL/dz = dl/dz + (lambda^H Jg + lambda^T conj(Jgc)) / 2
inline ScalarField lagrangian(const ScalarField& l, const VectorField& g, const CVector& lambda) {
  if (g.dim != l.dim) throw DimensionError("lagrangian: constraint and loss dimensions differ");
  if (lambda.size() != g.out_dim) throw DimensionError("lagrangian: multiplier length differs from g");
  ScalarField out;
  out.dim = l.dim;
  out.eval = [l, g, lambda](const CVector& z) { return l(z) + lambda.dot(g(z)).real(); };
  if (l.has_cogradients() && g.has_jacobians()) {
    out.cogradients = [l, g, lambda](const CVector& z) {
      const WirtingerPair lp = l.cogradients(z);
      const JacobianPair jp = g.jacobians(z);
      const CRowVector dz =
          lp.dz + 0.5 * (lambda.adjoint() * jp.jac + lambda.transpose() * jp.conj_jac.conjugate());
      return WirtingerPair{dz, dz.conjugate()};
    };
  }
  return out;
}

}  // namespace crcalc
