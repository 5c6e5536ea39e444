#pragma once

// Conjugate-coordinate algebra: the spaces C^n (z), R^2n (r = col(x, y)) and
// the conjugate-coordinate subspace of C^2n (c = col(z, conj z)), the
// structure matrices J, S, C, and admissibility of vectors and matrices.
//
// S and J are applied blockwise; the dense_* builders exist for tests and
// diagnostics only.

#include <cmath>
#include <random>
#include <string>

#include "crcalc/errors.hpp"
#include "crcalc/types.hpp"

namespace crcalc {

/// Default absolute tolerance (infinity norm) for admissibility tests.
inline constexpr double kAdmissibleTol = 1e-9;

/// A point z in C^n with finite entries.
class ComplexPoint {
 public:
  explicit ComplexPoint(CVector z) : z_(std::move(z)) {
    if (!all_finite(z_)) throw InvalidArgument("ComplexPoint: non-finite entry");
  }

  const CVector& z() const { return z_; }
  Index dim() const { return z_.size(); }

 private:
  CVector z_;
};

/// r = col(Re z, Im z) in R^2n.
class RealCoordinates {
 public:
  explicit RealCoordinates(RVector r) : r_(std::move(r)) {
    if (r_.size() % 2 != 0) throw DimensionError("RealCoordinates: odd length");
    if (!all_finite(r_)) throw InvalidArgument("RealCoordinates: non-finite entry");
  }

  const RVector& r() const { return r_; }
  Index dim() const { return r_.size() / 2; }

 private:
  RVector r_;
};

namespace detail {

inline void require_even(Index len, const char* what) {
  if (len % 2 != 0) throw DimensionError(std::string(what) + ": odd dimension " + std::to_string(len));
}

inline void require_square_even(const CMatrix& m, const char* what) {
  if (m.rows() != m.cols()) throw DimensionError(std::string(what) + ": matrix not square");
  require_even(m.rows(), what);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Swap operator S.

/// S v: exchanges the top and bottom halves of v.
template <typename Derived>
auto swap(const Eigen::MatrixBase<Derived>& v) -> typename Derived::PlainObject {
  detail::require_even(v.rows(), "swap");
  const Index n = v.rows() / 2;
  typename Derived::PlainObject out(v.rows(), v.cols());
  out.topRows(n) = v.bottomRows(n);
  out.bottomRows(n) = v.topRows(n);
  return out;
}

/// M S: exchanges the left and right column halves of M.
template <typename Derived>
auto swap_columns(const Eigen::MatrixBase<Derived>& m) -> typename Derived::PlainObject {
  detail::require_even(m.cols(), "swap_columns");
  const Index n = m.cols() / 2;
  typename Derived::PlainObject out(m.rows(), m.cols());
  out.leftCols(n) = m.rightCols(n);
  out.rightCols(n) = m.leftCols(n);
  return out;
}

/// S M S: exchanges all four n x n blocks of M diagonally.
template <typename Derived>
auto sandwich(const Eigen::MatrixBase<Derived>& m) -> typename Derived::PlainObject {
  return swap_columns(swap(m));
}

// ---------------------------------------------------------------------------
// Dense structure matrices (tests and diagnostics).

/// J = [[I, jI], [I, -jI]].
inline CMatrix dense_j(Index n) {
  CMatrix j = CMatrix::Zero(2 * n, 2 * n);
  j.topLeftCorner(n, n).setIdentity();
  j.bottomLeftCorner(n, n).setIdentity();
  j.topRightCorner(n, n) = kJ * CMatrix::Identity(n, n);
  j.bottomRightCorner(n, n) = -kJ * CMatrix::Identity(n, n);
  return j;
}

/// S = [[0, I], [I, 0]].
inline RMatrix dense_s(Index n) {
  RMatrix s = RMatrix::Zero(2 * n, 2 * n);
  s.topRightCorner(n, n).setIdentity();
  s.bottomLeftCorner(n, n).setIdentity();
  return s;
}

/// C = diag(I, -I).
inline RMatrix dense_c(Index n) {
  RMatrix c = RMatrix::Identity(2 * n, 2 * n);
  c.bottomRightCorner(n, n) *= -1.0;
  return c;
}

/// J^{-1}, computed as J^H / 2.
inline CMatrix dense_j_inverse(Index n) { return 0.5 * dense_j(n).adjoint(); }

/// c = J r.
inline CVector apply_j(const RVector& r) {
  detail::require_even(r.size(), "apply_j");
  const Index n = r.size() / 2;
  CVector c(2 * n);
  for (Index i = 0; i < n; ++i) {
    c(i) = Complex(r(i), r(n + i));
    c(n + i) = Complex(r(i), -r(n + i));
  }
  return c;
}

/// J^{-1} c = J^H c / 2. Complex-valued unless c is admissible.
inline CVector apply_j_inverse(const CVector& c) {
  detail::require_even(c.size(), "apply_j_inverse");
  const Index n = c.size() / 2;
  CVector r(2 * n);
  r.head(n) = 0.5 * (c.head(n) + c.tail(n));
  r.tail(n) = 0.5 * (-kJ * c.head(n) + kJ * c.tail(n));
  return r;
}

// ---------------------------------------------------------------------------
// Admissibility.

/// Residual ||conj(b) - S b||_inf.
inline double vector_admissibility_residual(const CVector& b) {
  detail::require_even(b.size(), "is_admissible_vector");
  return max_abs(CVector(b.conjugate() - swap(b)));
}

inline bool is_admissible_vector(const CVector& b, double tol = kAdmissibleTol) {
  return vector_admissibility_residual(b) <= tol;
}

/// Residual ||M - S conj(M) S||_inf.
inline double matrix_admissibility_residual(const CMatrix& m) {
  detail::require_square_even(m, "is_admissible_matrix");
  return max_abs(CMatrix(m - sandwich(CMatrix(m.conjugate()))));
}

inline bool is_admissible_matrix(const CMatrix& m, double tol = kAdmissibleTol) {
  return matrix_admissibility_residual(m) <= tol;
}

/// P(M) = (M + S conj(M) S) / 2. Idempotent; its fixed points are exactly the
/// admissible matrices. Not claimed to be an orthogonal projection.
inline CMatrix project_admissible(const CMatrix& m) {
  detail::require_square_even(m, "project_admissible");
  return 0.5 * (m + sandwich(CMatrix(m.conjugate())));
}

/// c = col(z, conj z); only constructible in admissible form.
class ConjugateCoordinates {
 public:
  /// Validates conj(c) = S c within tol.
  static ConjugateCoordinates from_raw(const CVector& c, double tol = kAdmissibleTol) {
    const double res = vector_admissibility_residual(c);
    if (!(res <= tol)) {
      throw InadmissibleVector("conjugate coordinates fail conj(c) = S c (residual " +
                               std::to_string(res) + ")");
    }
    return ConjugateCoordinates(c);
  }

  static ConjugateCoordinates from_z(const CVector& z) {
    CVector c(2 * z.size());
    c << z, z.conjugate();
    return ConjugateCoordinates(std::move(c));
  }

  const CVector& c() const { return c_; }
  Index dim() const { return c_.size() / 2; }
  CVector z() const { return c_.head(dim()); }

 private:
  explicit ConjugateCoordinates(CVector c) : c_(std::move(c)) {}
  CVector c_;
};

inline RealCoordinates to_real(const ComplexPoint& p) {
  const Index n = p.dim();
  RVector r(2 * n);
  r.head(n) = p.z().real();
  r.tail(n) = p.z().imag();
  return RealCoordinates(std::move(r));
}

inline ComplexPoint to_complex(const RealCoordinates& rc) {
  const Index n = rc.dim();
  CVector z(n);
  for (Index i = 0; i < n; ++i) z(i) = Complex(rc.r()(i), rc.r()(n + i));
  return ComplexPoint(std::move(z));
}

inline ConjugateCoordinates to_conjugate(const ComplexPoint& p) {
  return ConjugateCoordinates::from_raw(apply_j(to_real(p).r()), 0.0);
}

/// Rejects inadmissible inputs; use project_admissible explicitly to repair.
inline ComplexPoint from_conjugate(const CVector& c, double tol = kAdmissibleTol) {
  const auto cc = ConjugateCoordinates::from_raw(c, tol);
  const CVector r = apply_j_inverse(cc.c());
  return to_complex(RealCoordinates(r.real()));
}

// ---------------------------------------------------------------------------
// Metric tensor.

/// Constant Hermitian positive-definite metric on C^n.
class MetricTensor {
 public:
  explicit MetricTensor(CMatrix omega, double herm_tol = 1e-10) : omega_(std::move(omega)) {
    if (omega_.rows() != omega_.cols()) throw DimensionError("MetricTensor: not square");
    const double scale = std::max(1.0, max_abs(omega_));
    if (max_abs(CMatrix(omega_ - omega_.adjoint())) > herm_tol * scale) {
      throw InvalidArgument("MetricTensor: not Hermitian");
    }
    omega_ = 0.5 * (omega_ + omega_.adjoint()).eval();
    llt_.compute(omega_);
    if (llt_.info() != Eigen::Success) throw SingularMatrix("MetricTensor: not positive definite");
    const auto diag = llt_.matrixLLT().diagonal().cwiseAbs();
    if (diag.minCoeff() <= 1e-12 * diag.maxCoeff()) {
      throw SingularMatrix("MetricTensor: numerically singular");
    }
  }

  static MetricTensor identity(Index n) { return MetricTensor(CMatrix::Identity(n, n)); }

  const CMatrix& matrix() const { return omega_; }
  Index dim() const { return omega_.rows(); }

  /// Omega^{-1} v
  CVector solve(const CVector& v) const { return llt_.solve(v); }

  /// <v1, v2> = v1^H Omega v2
  Complex inner(const CVector& v1, const CVector& v2) const { return v1.dot(omega_ * v2); }

 private:
  CMatrix omega_;
  Eigen::LLT<CMatrix> llt_;
};

// ---------------------------------------------------------------------------
// Transformation laws under a linear holomorphic change of coordinates.

struct TransformReport {
  /// ||A (z + v) - A z - A v||_inf: vectors push forward through J_xi = A.
  double vector_residual = 0.0;
  /// ||d f/d xi - d f/d z A^{-1}||_inf for a nonholomorphic probe field.
  double cogradient_residual = 0.0;
  /// ||Omega_xi - A^{-H} Omega A^{-1}||_inf, Omega_xi from the pullback
  /// definition (checked through its action on the probe vectors).
  double metric_residual = 0.0;
  /// |<w1, w2>_xi - <v1, v2>_z|
  double inner_product_residual = 0.0;
  CMatrix metric_xi;
};

namespace detail {

/// Probe field h(z) = sum |z_i|^2 + Re(sum b_i z_i^2) + Re(a^H z); real valued
/// and nonholomorphic. Returns its z-cogradient analytically.
struct TransformProbe {
  CVector a, b;
  CRowVector cograd(const CVector& z) const {
    CRowVector d(z.size());
    for (Index i = 0; i < z.size(); ++i) {
      d(i) = std::conj(z(i)) + b(i) * z(i) + 0.5 * std::conj(a(i));
    }
    return d;
  }
  double value(const CVector& z) const {
    double v = z.squaredNorm();
    for (Index i = 0; i < z.size(); ++i) v += std::real(b(i) * z(i) * z(i));
    return v + std::real(a.dot(z));
  }
};

}  // namespace detail

/// Checks the vector, cogradient and metric transformation laws for xi = A z.
/// The cogradient law is checked numerically: the xi-cogradient of the probe
/// field h(A^{-1} xi) is obtained by central differences in the real
/// coordinates of xi.
inline TransformReport verify_transform_laws(const CMatrix& a, const ComplexPoint& p,
                                             const MetricTensor& omega, unsigned seed = 7) {
  const Index n = p.dim();
  if (a.rows() != n || a.cols() != n || omega.dim() != n) {
    throw DimensionError("verify_transform_laws: dimension mismatch");
  }
  Eigen::FullPivLU<CMatrix> lu(a);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) throw SingularMatrix("verify_transform_laws: A is not invertible");
  const CMatrix a_inv = lu.inverse();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  auto rand_vec = [&] {
    CVector v(n);
    for (Index i = 0; i < n; ++i) v(i) = Complex(nd(rng), nd(rng));
    return v;
  };
  const CVector v1 = rand_vec();
  const CVector v2 = rand_vec();
  detail::TransformProbe probe{rand_vec(), rand_vec()};

  TransformReport rep;
  const CVector& z = p.z();
  const CVector xi = a * z;

  const CVector w1 = a * v1;
  const CVector w2 = a * v2;
  rep.vector_residual = max_abs(CVector(a * (z + v1) - xi - w1));

  // Cogradient law.
  const CRowVector expected = probe.cograd(z) * a_inv;
  CRowVector numeric(n);
  const double eps = std::cbrt(std::numeric_limits<double>::epsilon());
  for (Index i = 0; i < n; ++i) {
    const double hx = eps * std::max(1.0, std::abs(xi(i).real()));
    const double hy = eps * std::max(1.0, std::abs(xi(i).imag()));
    CVector xp = xi, xm = xi;
    xp(i) += hx;
    xm(i) -= hx;
    const double dfx = (probe.value(a_inv * xp) - probe.value(a_inv * xm)) / (2 * hx);
    xp = xi;
    xm = xi;
    xp(i) += Complex(0, hy);
    xm(i) -= Complex(0, hy);
    const double dfy = (probe.value(a_inv * xp) - probe.value(a_inv * xm)) / (2 * hy);
    numeric(i) = 0.5 * Complex(dfx, -dfy);
  }
  rep.cogradient_residual = max_abs(CRowVector(numeric - expected));

  // Metric law.
  rep.metric_xi = a_inv.adjoint() * omega.matrix() * a_inv;
  const CMatrix pulled_back = a.adjoint() * rep.metric_xi * a;
  rep.metric_residual = max_abs(CMatrix(pulled_back - omega.matrix()));
  const Complex ip_xi = w1.dot(rep.metric_xi * w2);
  rep.inner_product_residual = std::abs(ip_xi - omega.inner(v1, v2));
  return rep;
}

}  // namespace crcalc
