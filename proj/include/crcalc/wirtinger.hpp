#pragma once

// First-order CR calculus: R-derivative df/dz and conjugate R-derivative
// df/dzbar of scalar and vector fields, holomorphy detection, the gradient
// under a constant metric, and first-order expansions.
//
// Numerical derivatives use central differences in the real coordinates and
// combine them as
//   df/dz    = (df/dx - j df/dy) / 2
//   df/dzbar = (df/dx + j df/dy) / 2

#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "crcalc/core.hpp"
#include "crcalc/errors.hpp"
#include "crcalc/fields.hpp"
#include "crcalc/parallel.hpp"
#include "crcalc/types.hpp"

namespace crcalc {

/// eps^(1/3): optimal relative step for central first differences.
inline double first_order_step_base() { return std::cbrt(std::numeric_limits<double>::epsilon()); }

/// Step for a coordinate of magnitude |x|: max(1, |x|) * base.
inline double fd_step(double coordinate, double base) { return std::max(1.0, std::abs(coordinate)) * base; }

/// Conjugation-identity tolerances for real fields.
inline constexpr double kConjTolAnalytic = 1e-8;
inline constexpr double kConjTolFd = 1e-5;

namespace detail {

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& v, const char* what) {
  if (!all_finite(v)) throw NonFiniteEvaluation(std::string(what) + ": non-finite evaluation");
}

inline void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw NonFiniteEvaluation(std::string(what) + ": non-finite evaluation");
}

}  // namespace detail

/// Jacobian pair of an arbitrary map C^n -> C^m by central differences.
/// Probes for different coordinates run concurrently.
template <typename Map>
JacobianPair wirtinger_jacobians_fd(const Map& f, const CVector& z, Index out_dim,
                                    double step_base = first_order_step_base()) {
  if (!(step_base > 0)) throw InvalidArgument("finite-difference step must be positive");
  const Index n = z.size();
  JacobianPair out{CMatrix(out_dim, n), CMatrix(out_dim, n)};
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t kk) {
    const Index k = static_cast<Index>(kk);
    const double hx = fd_step(z(k).real(), step_base);
    const double hy = fd_step(z(k).imag(), step_base);
    CVector zp = z, zm = z;
    zp(k) += hx;
    zm(k) -= hx;
    const CVector fxp = f(zp), fxm = f(zm);
    zp(k) = z(k) + Complex(0, hy);
    zm(k) = z(k) - Complex(0, hy);
    const CVector fyp = f(zp), fym = f(zm);
    detail::require_finite(fxp, "wirtinger_jacobians_fd");
    detail::require_finite(fxm, "wirtinger_jacobians_fd");
    detail::require_finite(fyp, "wirtinger_jacobians_fd");
    detail::require_finite(fym, "wirtinger_jacobians_fd");
    if (fxp.size() != out_dim || fyp.size() != out_dim) {
      throw DimensionError("wirtinger_jacobians_fd: field output has wrong length");
    }
    const CVector dfx = (fxp - fxm) / (2 * hx);
    const CVector dfy = (fyp - fym) / (2 * hy);
    out.jac.col(k) = 0.5 * (dfx - kJ * dfy);
    out.conj_jac.col(k) = 0.5 * (dfx + kJ * dfy);
  });
  return out;
}

inline WirtingerPair cogradients_fd(const ScalarField& f, const CVector& z,
                                    double step_base = first_order_step_base()) {
  auto as_vec = [&](const CVector& p) {
    CVector v(1);
    v(0) = f(p);
    return v;
  };
  const JacobianPair jp = wirtinger_jacobians_fd(as_vec, z, 1, step_base);
  return {jp.jac.row(0), jp.conj_jac.row(0)};
}

inline JacobianPair jacobians_fd(const VectorField& f, const CVector& z,
                                 double step_base = first_order_step_base()) {
  return wirtinger_jacobians_fd(f.eval, z, f.out_dim, step_base);
}

/// ||conj(dz) - dzbar||_inf scaled by max(1, ||dz||_inf).
inline double conjugation_residual(const WirtingerPair& p) {
  const double scale = std::max(1.0, max_abs(p.dz));
  return max_abs(CRowVector(p.dz.conjugate() - p.dzbar)) / scale;
}

/// Analytic cogradients when the field supplies them, otherwise central
/// differences. Real fields must satisfy dzbar = conj(dz).
inline WirtingerPair cogradients(const ScalarField& f, const CVector& z) {
  const bool analytic = f.has_cogradients();
  WirtingerPair p = analytic ? f.cogradients(z) : cogradients_fd(f, z);
  if (p.dz.size() != z.size() || p.dzbar.size() != z.size()) {
    throw DimensionError("cogradients: length does not match the point");
  }
  detail::require_finite(p.dz, "cogradients");
  detail::require_finite(p.dzbar, "cogradients");
  const double tol = analytic ? kConjTolAnalytic : kConjTolFd;
  const double res = conjugation_residual(p);
  if (res > tol) {
    throw ConjugationMismatch("real-valued field violates dzbar = conj(dz): residual " +
                              std::to_string(res));
  }
  return p;
}

inline JacobianPair jacobians(const VectorField& f, const CVector& z) {
  JacobianPair jp = f.has_jacobians() ? f.jacobians(z) : jacobians_fd(f, z);
  if (jp.jac.rows() != f.out_dim || jp.jac.cols() != z.size() || jp.conj_jac.rows() != f.out_dim ||
      jp.conj_jac.cols() != z.size()) {
    throw DimensionError("jacobians: shape does not match the field");
  }
  detail::require_finite(jp.jac, "jacobians");
  detail::require_finite(jp.conj_jac, "jacobians");
  return jp;
}

/// Jacobian pair of h o g from the pair of h (taken at g(z)) and of g.
///   J   = Jh Jg  + Jhc conj(Jgc)
///   Jc  = Jh Jgc + Jhc conj(Jg)
inline JacobianPair compose(const JacobianPair& outer, const JacobianPair& inner) {
  return {outer.jac * inner.jac + outer.conj_jac * inner.conj_jac.conjugate(),
          outer.jac * inner.conj_jac + outer.conj_jac * inner.jac.conjugate()};
}

/// Jacobian pair of conj(f) from that of f.
inline JacobianPair conjugate_field(const JacobianPair& jp) {
  return {jp.conj_jac.conjugate(), jp.jac.conjugate()};
}

// ---------------------------------------------------------------------------
// Holomorphy.

struct HolomorphyReport {
  bool holomorphic = false;
  double max_residual = 0.0;  // max ||df/dzbar||_inf over samples
  std::size_t samples = 0;
};

inline constexpr double kHolomorphyTolFd = 1e-5;
inline constexpr double kHolomorphyTolAnalytic = 1e-9;

/// The query point plus `count` points from a circular complex Gaussian
/// cloud around it, clipped to the ball of the given radius.
inline std::vector<CVector> holomorphy_samples(const CVector& center, std::size_t count = 16,
                                               double radius = 1.0, std::uint64_t seed = 0x5eed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
  std::vector<CVector> pts{center};
  pts.reserve(count + 1);
  for (std::size_t s = 0; s < count; ++s) {
    CVector w(center.size());
    for (Index i = 0; i < w.size(); ++i) w(i) = Complex(nd(rng), nd(rng));
    const double nrm = w.norm();
    if (nrm > 1.0) w /= nrm;
    pts.push_back(center + radius * w);
  }
  return pts;
}

inline HolomorphyReport is_holomorphic(const VectorField& f, std::span<const CVector> points,
                                       std::optional<double> tol = std::nullopt) {
  if (points.empty()) throw InvalidArgument("is_holomorphic: empty sample set");
  const double t = tol.value_or(f.has_jacobians() ? kHolomorphyTolAnalytic : kHolomorphyTolFd);
  HolomorphyReport rep;
  for (const auto& p : points) {
    const JacobianPair jp = jacobians(f, p);
    rep.max_residual = std::max(rep.max_residual, max_abs(jp.conj_jac));
  }
  rep.samples = points.size();
  rep.holomorphic = rep.max_residual <= t;
  return rep;
}

inline HolomorphyReport is_holomorphic(const VectorField& f, const CVector& center,
                                       std::optional<double> tol = std::nullopt) {
  const auto pts = holomorphy_samples(center);
  return is_holomorphic(f, std::span<const CVector>(pts), tol);
}

// ---------------------------------------------------------------------------
// Gradient, stationarity, first-order expansion.

/// Omega^{-1} (df/dz)^H: the steepest-ascent direction under the metric.
inline CVector gradient(const ScalarField& f, const CVector& z, const MetricTensor& omega) {
  if (omega.dim() != z.size()) throw DimensionError("gradient: metric dimension mismatch");
  const WirtingerPair p = cogradients(f, z);
  return omega.solve(p.dz.adjoint());
}

inline CVector gradient(const ScalarField& f, const CVector& z) {
  return cogradients(f, z).dz.adjoint();
}

/// ||df/dz||_inf; equals ||df/dzbar||_inf for real fields.
inline double stationarity_residual(const ScalarField& f, const CVector& z) {
  return max_abs(cogradients(f, z).dz);
}

/// df along v for a real field: 2 Re{df/dz v}.
inline double differential(const WirtingerPair& p, const CVector& v) {
  return 2.0 * (p.dz * v)(0).real();
}

/// f(z) + 2 Re{df/dz dz}.
inline double first_order_predict(const ScalarField& f, const CVector& z, const CVector& dz) {
  if (dz.size() != z.size()) throw DimensionError("first_order_predict: step dimension mismatch");
  return f(z) + differential(cogradients(f, z), dz);
}

/// Real partials (df/dx, df/dy) of a real field from its cogradient:
/// d/dx = d/dz + d/dzbar, d/dy = j (d/dz - d/dzbar).
inline RVector real_partials(const WirtingerPair& p) {
  const Index n = p.dz.size();
  RVector g(2 * n);
  g.head(n) = (p.dz + p.dzbar).real().transpose();
  g.tail(n) = (kJ * (p.dz - p.dzbar)).real().transpose();
  return g;
}

/// The three linear terms (df/dr) dr, (df/dc) dc and 2 Re{df/dz dz}.
struct LinearTerms {
  double real = 0.0;
  double conjugate = 0.0;
  double complex = 0.0;
};

inline LinearTerms linear_terms(const WirtingerPair& p, const CVector& dz) {
  const Index n = dz.size();
  const ComplexPoint dp(dz);
  const RVector dr = to_real(dp).r();
  const CVector dc = to_conjugate(dp).c();
  CRowVector dfdc(2 * n);
  dfdc << p.dz, p.dzbar;
  LinearTerms t;
  t.real = real_partials(p).dot(dr);
  t.conjugate = (dfdc * dc)(0).real();
  t.complex = differential(p, dz);
  return t;
}

}  // namespace crcalc
