#pragma once

#include <complex>

#include <Eigen/Dense>

namespace crcalc {

using Complex = std::complex<double>;

using CVector = Eigen::VectorXcd;
using CRowVector = Eigen::RowVectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;
using Index = Eigen::Index;

inline constexpr Complex kJ{0.0, 1.0};

/// Infinity norm of the entries (max absolute value); 0 for empty inputs.
template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().maxCoeff();
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) {
      const auto v = m(i, j);
      if constexpr (std::is_same_v<std::decay_t<decltype(v)>, Complex>) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
      } else {
        if (!std::isfinite(v)) return false;
      }
    }
  }
  return true;
}

}  // namespace crcalc
