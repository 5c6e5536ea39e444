#pragma once

// Built-in benchmark problems with closed-form answers, and polynomial maps
// in (z, conj z) with exact derivatives for custom problems and tests.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "crcalc/errors.hpp"
#include "crcalc/fields.hpp"
#include "crcalc/lsq.hpp"
#include "crcalc/types.hpp"

namespace crcalc {

/// Relative identifiability threshold on ||alpha|^2 - |beta|^2|.
inline constexpr double kIdentTol = 1e-10;

// ---------------------------------------------------------------------------
// Scalar estimation problem: y_k = alpha z + beta conj(z) + n_k,
// l(z) = 1/2 <|y - alpha z - beta conj(z)|^2>.

class Example1Problem {
 public:
  Example1Problem(Complex alpha, Complex beta, CVector samples)
      : alpha_(alpha), beta_(beta), samples_(std::move(samples)) {
    if (samples_.size() == 0) throw InvalidArgument("Example1Problem: no samples");
    if (!all_finite(samples_) || !std::isfinite(std::abs(alpha_)) || !std::isfinite(std::abs(beta_))) {
      throw InvalidArgument("Example1Problem: non-finite parameters");
    }
    mean_y_ = samples_.mean();
    mean_ybar_ = std::conj(mean_y_);
    mean_abs2_ = samples_.squaredNorm() / static_cast<double>(samples_.size());
    variance_ = (samples_.array() - mean_y_).matrix().squaredNorm() / static_cast<double>(samples_.size());
  }

  /// y_k = alpha z_true + beta conj(z_true) + n_k, n_k ~ CN(0, sigma2).
  static Example1Problem synthetic(Complex alpha, Complex beta, Complex z_true, double sigma2,
                                   Index n_samples, std::uint64_t seed) {
    if (n_samples <= 0) throw InvalidArgument("Example1Problem: n_samples must be positive");
    if (sigma2 < 0) throw InvalidArgument("Example1Problem: negative noise variance");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, std::sqrt(0.5 * sigma2));
    CVector y(n_samples);
    const Complex s = alpha * z_true + beta * std::conj(z_true);
    for (Index k = 0; k < n_samples; ++k) {
      const double re = nd(rng);
      const double im = nd(rng);
      y(k) = s + Complex(re, im);
    }
    return Example1Problem(alpha, beta, std::move(y));
  }

  Complex alpha() const { return alpha_; }
  Complex beta() const { return beta_; }
  const CVector& samples() const { return samples_; }
  Complex mean_y() const { return mean_y_; }
  Complex mean_ybar() const { return mean_ybar_; }
  double mean_abs2() const { return mean_abs2_; }
  /// <|y - <y>|^2>, two-pass.
  double variance() const { return variance_; }

  /// |alpha|^2 + |beta|^2
  double energy() const { return std::norm(alpha_) + std::norm(beta_); }

 private:
  Complex alpha_, beta_;
  CVector samples_;
  Complex mean_y_, mean_ybar_;
  double mean_abs2_ = 0;
  double variance_ = 0;
};

/// Constant c-complex Hessian 1/2 [[s, 2 conj(a) b], [2 a conj(b), s]] with s = |a|^2 + |b|^2.
inline HessianQuad example1_hessian(const Example1Problem& p) {
  const Complex a = p.alpha(), b = p.beta();
  const double s = p.energy();
  CMatrix zz(1, 1), zbz(1, 1), zzb(1, 1), zbzb(1, 1);
  zz(0, 0) = 0.5 * s;
  zbz(0, 0) = std::conj(a) * b;
  zzb(0, 0) = a * std::conj(b);
  zbzb(0, 0) = 0.5 * s;
  return {zz, zbz, zzb, zbzb, 0.0};
}

/// Loss, analytic cogradients
///   dl/dz = a conj(b) z + s/2 conj(z) - (a <conj y> + conj(b) <y>) / 2
/// and the constant Hessian.
inline ScalarField example1_loss_field(const Example1Problem& p) {
  ScalarField f;
  f.dim = 1;
  f.eval = [p](const CVector& z) {
    // <|y - w|^2> = <|y - <y>|^2> + |<y> - w|^2, free of cancellation near the optimum.
    const Complex w = p.alpha() * z(0) + p.beta() * std::conj(z(0));
    return 0.5 * (p.variance() + std::norm(p.mean_y() - w));
  };
  f.cogradients = [p](const CVector& z) {
    const Complex a = p.alpha(), b = p.beta();
    CRowVector dz(1), dzbar(1);
    dz(0) = a * std::conj(b) * z(0) + 0.5 * p.energy() * std::conj(z(0)) -
            0.5 * (a * p.mean_ybar() + std::conj(b) * p.mean_y());
    dzbar(0) = std::conj(a) * b * std::conj(z(0)) + 0.5 * p.energy() * z(0) -
               0.5 * (std::conj(a) * p.mean_y() + b * p.mean_ybar());
    return WirtingerPair{dz, dzbar};
  };
  f.hessian = [p](const CVector&) { return example1_hessian(p); };
  return f;
}

/// Direct sample-sum loss 1/2 <|y_k - alpha z - beta conj z|^2>.
inline double example1_loss_direct(const Example1Problem& p, Complex z) {
  const Complex s = p.alpha() * z + p.beta() * std::conj(z);
  return 0.5 * (p.samples().array() - s).abs2().mean();
}

inline bool example1_identifiable(const Example1Problem& p) {
  return std::abs(std::norm(p.alpha()) - std::norm(p.beta())) > kIdentTol * p.energy();
}

/// z_opt = (conj(alpha) <y> - beta <conj y>) / (|alpha|^2 - |beta|^2)
inline Complex example1_closed_form(const Example1Problem& p) {
  if (!example1_identifiable(p)) {
    throw Unidentifiable("|alpha|^2 = |beta|^2: z is not identifiable from alpha z + beta conj(z)");
  }
  const double d = std::norm(p.alpha()) - std::norm(p.beta());
  return (std::conj(p.alpha()) * p.mean_y() - p.beta() * p.mean_ybar()) / d;
}

/// g(z) = alpha z + beta conj(z), one residual per sample, W = I / N.
inline VectorField example1_model_map(const Example1Problem& p, Index copies) {
  const Complex a = p.alpha(), b = p.beta();
  VectorField g;
  g.dim = 1;
  g.out_dim = copies;
  g.eval = [a, b, copies](const CVector& z) {
    return CVector(CVector::Constant(copies, a * z(0) + b * std::conj(z(0))));
  };
  g.jacobians = [a, b, copies](const CVector&) {
    return JacobianPair{CMatrix::Constant(copies, 1, a), CMatrix::Constant(copies, 1, b)};
  };
  return g;
}

/// The same problem as weighted least squares in c: y = (alpha beta) col(z, conj z).
inline LsqProblem example2_as_lsq(const Example1Problem& p) {
  const Index m = p.samples().size();
  return LsqProblem(example1_model_map(p, m), p.samples(),
                    CMatrix::Identity(m, m) / static_cast<double>(m));
}

// ---------------------------------------------------------------------------
// Polynomial maps in (z, conj z).

/// coef * prod_j z_j^zpow[j] conj(z_j)^zbarpow[j]
struct Monomial {
  Complex coef;
  std::vector<int> zpow;
  std::vector<int> zbarpow;
};

namespace detail {

inline Complex ipow(Complex x, int p) {
  Complex r(1.0, 0.0);
  for (int i = 0; i < p; ++i) r *= x;
  return r;
}

/// Value of the monomial with zpow/zbarpow lowered by the given derivative
/// orders, including the falling-factorial coefficients.
inline Complex monomial_derivative(const Monomial& m, const CVector& z, const std::vector<int>& dz,
                                   const std::vector<int>& dzbar) {
  Complex v = m.coef;
  for (std::size_t j = 0; j < m.zpow.size(); ++j) {
    const int p = m.zpow[j], q = m.zbarpow[j];
    if (dz[j] > p || dzbar[j] > q) return Complex(0.0);
    for (int t = 0; t < dz[j]; ++t) v *= static_cast<double>(p - t);
    for (int t = 0; t < dzbar[j]; ++t) v *= static_cast<double>(q - t);
    v *= ipow(z(static_cast<Index>(j)), p - dz[j]) * ipow(std::conj(z(static_cast<Index>(j))), q - dzbar[j]);
  }
  return v;
}

}  // namespace detail

/// Vector polynomial map C^n -> C^m; component i is the sum of its monomials.
class PolynomialMap {
 public:
  PolynomialMap(Index dim, std::vector<std::vector<Monomial>> components)
      : dim_(dim), comps_(std::move(components)) {
    for (const auto& c : comps_) {
      for (const auto& m : c) {
        if (static_cast<Index>(m.zpow.size()) != dim_ || static_cast<Index>(m.zbarpow.size()) != dim_) {
          throw DimensionError("PolynomialMap: exponent vector length differs from dimension");
        }
        for (std::size_t j = 0; j < m.zpow.size(); ++j) {
          if (m.zpow[j] < 0 || m.zbarpow[j] < 0) throw InvalidArgument("PolynomialMap: negative exponent");
        }
      }
    }
  }

  Index dim() const { return dim_; }
  Index out_dim() const { return static_cast<Index>(comps_.size()); }
  const std::vector<std::vector<Monomial>>& components() const { return comps_; }

  /// Holomorphic iff no monomial with a nonzero coefficient contains conj(z).
  bool holomorphic() const {
    for (const auto& c : comps_) {
      for (const auto& m : c) {
        if (m.coef == Complex(0.0)) continue;
        for (int q : m.zbarpow) if (q > 0) return false;
      }
    }
    return true;
  }

  CVector eval(const CVector& z) const {
    const std::vector<int> none(static_cast<std::size_t>(dim_), 0);
    CVector out = CVector::Zero(out_dim());
    for (Index i = 0; i < out_dim(); ++i) {
      for (const auto& m : comps_[static_cast<std::size_t>(i)]) out(i) += detail::monomial_derivative(m, z, none, none);
    }
    return out;
  }

  JacobianPair jacobians(const CVector& z) const {
    JacobianPair jp{CMatrix::Zero(out_dim(), dim_), CMatrix::Zero(out_dim(), dim_)};
    for (Index i = 0; i < out_dim(); ++i) {
      for (Index k = 0; k < dim_; ++k) {
        std::vector<int> e(static_cast<std::size_t>(dim_), 0), none(static_cast<std::size_t>(dim_), 0);
        e[static_cast<std::size_t>(k)] = 1;
        for (const auto& m : comps_[static_cast<std::size_t>(i)]) {
          jp.jac(i, k) += detail::monomial_derivative(m, z, e, none);
          jp.conj_jac(i, k) += detail::monomial_derivative(m, z, none, e);
        }
      }
    }
    return jp;
  }

  /// Exact second derivatives of component i:
  ///   zz[k,j] = d2/dz_k dz_j, z_zbar[k,j] = d2/dz_k dzbar_j, zbar_zbar[k,j] = d2/dzbar_k dzbar_j.
  ResidualCurvature second_derivatives(Index i, const CVector& z) const {
    ResidualCurvature rc{CMatrix::Zero(dim_, dim_), CMatrix::Zero(dim_, dim_), CMatrix::Zero(dim_, dim_)};
    const auto n = static_cast<std::size_t>(dim_);
    for (const auto& m : comps_[static_cast<std::size_t>(i)]) {
      for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t j = 0; j < n; ++j) {
          std::vector<int> a(n, 0), b(n, 0), none(n, 0);
          a[k] += 1;
          a[j] += 1;
          rc.zz(static_cast<Index>(k), static_cast<Index>(j)) += detail::monomial_derivative(m, z, a, none);
          rc.zbar_zbar(static_cast<Index>(k), static_cast<Index>(j)) += detail::monomial_derivative(m, z, none, a);
          std::fill(a.begin(), a.end(), 0);
          a[k] = 1;
          b[j] = 1;
          rc.z_zbar(static_cast<Index>(k), static_cast<Index>(j)) += detail::monomial_derivative(m, z, a, b);
        }
      }
    }
    return rc;
  }

  VectorField as_field() const {
    VectorField f;
    f.dim = dim_;
    f.out_dim = out_dim();
    f.eval = [self = *this](const CVector& z) { return self.eval(z); };
    f.jacobians = [self = *this](const CVector& z) { return self.jacobians(z); };
    return f;
  }

  /// Same map without analytic Jacobians (forces the numerical path).
  VectorField as_field_fd() const {
    VectorField f = as_field();
    f.jacobians = nullptr;
    return f;
  }

 private:
  Index dim_;
  std::vector<std::vector<Monomial>> comps_;
};

/// Real field f = Re(h) for a scalar polynomial h (component 0 of the map),
/// with exact cogradients and Hessian blocks:
///   df/dz = (h_z + conj(h_zbar)) / 2
///   H_zz[k,j]     = (conj(h_{z_k zbar_j}) + h_{z_j zbar_k}) / 2
///   H_zbar_z[k,j] = (conj(h_{z_k z_j}) + h_{zbar_k zbar_j}) / 2
inline ScalarField real_part_field(const PolynomialMap& h) {
  if (h.out_dim() != 1) throw DimensionError("real_part_field: polynomial must be scalar");
  ScalarField f;
  f.dim = h.dim();
  f.eval = [h](const CVector& z) { return h.eval(z)(0).real(); };
  f.cogradients = [h](const CVector& z) {
    const JacobianPair jp = h.jacobians(z);
    const CRowVector dz = 0.5 * (jp.jac.row(0) + jp.conj_jac.row(0).conjugate());
    return WirtingerPair{dz, dz.conjugate()};
  };
  f.hessian = [h](const CVector& z) {
    const ResidualCurvature rc = h.second_derivatives(0, z);
    HessianQuad q;
    q.zz = 0.5 * (rc.z_zbar.conjugate() + rc.z_zbar.transpose());
    q.zbar_z = 0.5 * (rc.zz.conjugate() + rc.zbar_zbar);
    q.zbar_zbar = q.zz.conjugate();
    q.z_zbar = q.zbar_z.conjugate();
    return q;
  };
  return f;
}

/// Random polynomial map with `terms` monomials per component, total degree
/// at most max_degree, unit-variance complex coefficients.
inline PolynomialMap random_polynomial_map(Index dim, Index out_dim, int terms, int max_degree,
                                           std::mt19937_64& rng, bool holomorphic = false) {
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
  std::uniform_int_distribution<int> coord(0, static_cast<int>(dim) - 1);
  std::uniform_int_distribution<int> degree(0, max_degree);
  std::uniform_int_distribution<int> coin(0, 1);
  std::vector<std::vector<Monomial>> comps;
  for (Index i = 0; i < out_dim; ++i) {
    std::vector<Monomial> c;
    for (int t = 0; t < terms; ++t) {
      Monomial m{Complex(nd(rng), nd(rng)), std::vector<int>(static_cast<std::size_t>(dim), 0),
                 std::vector<int>(static_cast<std::size_t>(dim), 0)};
      const int deg = degree(rng);
      for (int d = 0; d < deg; ++d) {
        const auto j = static_cast<std::size_t>(coord(rng));
        if (holomorphic || coin(rng) == 0) m.zpow[j] += 1;
        else m.zbarpow[j] += 1;
      }
      c.push_back(std::move(m));
    }
    comps.push_back(std::move(c));
  }
  return PolynomialMap(dim, std::move(comps));
}

}  // namespace crcalc
