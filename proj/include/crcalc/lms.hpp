#pragma once

// Complex LMS adaptive filter for the model e_k = eta_k - a^H xi_k:
//   a_{k+1} = a_k + alpha_k xi_k conj(e_k)
//           = (I - alpha_k xi_k xi_k^H) a_k + alpha_k xi_k conj(eta_k)
// together with a stationary circular Gaussian signal source and the Wiener
// solution R^{-1} p.

#include <cmath>
#include <cstdint>
#include <deque>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "crcalc/errors.hpp"
#include "crcalc/types.hpp"

namespace crcalc {

struct StepSchedule {
  enum class Kind { constant, inverse_k };
  Kind kind = Kind::constant;
  double alpha = 0.05;

  /// alpha for the update from step k (k counts from 0).
  double at(std::int64_t k) const {
    return kind == Kind::constant ? alpha : alpha / static_cast<double>(k + 1);
  }
};

struct LmsState {
  CVector a_hat;
  std::int64_t k = 0;
  StepSchedule schedule;
};

/// e = eta - a^H xi
inline Complex lms_error(const CVector& a_hat, const CVector& xi, Complex eta) { return eta - a_hat.dot(xi); }

/// Instantaneous gradient of |e|^2 with respect to a: -xi conj(e).
inline CVector instantaneous_gradient(const CVector& a_hat, const CVector& xi, Complex eta) {
  if (a_hat.size() != xi.size()) throw DimensionError("instantaneous_gradient: dimension mismatch");
  return -xi * std::conj(lms_error(a_hat, xi, eta));
}

inline LmsState lms_step(const LmsState& s, const CVector& xi, Complex eta) {
  if (s.a_hat.size() != xi.size()) throw DimensionError("lms_step: dimension mismatch");
  const double alpha = s.schedule.at(s.k);
  if (alpha < 0) throw InvalidArgument("lms_step: negative stepsize");
  LmsState next = s;
  next.a_hat = s.a_hat + alpha * xi * std::conj(lms_error(s.a_hat, xi, eta));
  next.k = s.k + 1;
  return next;
}

/// The boxed closed form (I - alpha xi xi^H) a + alpha xi conj(eta); used to
/// cross-check lms_step.
inline CVector lms_update_closed_form(const CVector& a_hat, const CVector& xi, Complex eta, double alpha) {
  const Index n = a_hat.size();
  return (CMatrix::Identity(n, n) - alpha * xi * xi.adjoint()) * a_hat + alpha * xi * std::conj(eta);
}

// ---------------------------------------------------------------------------
// Signal model.

/// Stationary model: xi ~ CN(0, R), eta = a_true^H xi + noise with
/// noise ~ CN(0, noise_var). Cross moment p = E{xi conj(eta)} = R a_true.
struct SignalModel {
  Index n = 0;
  CMatrix r;
  CVector p;
  double noise_var = 0.0;
  std::uint64_t seed = 0;
  CVector a_true;

  static SignalModel from_true_parameter(const CMatrix& r, const CVector& a_true, double noise_var,
                                         std::uint64_t seed) {
    if (r.rows() != r.cols() || r.rows() != a_true.size()) throw DimensionError("SignalModel: shapes");
    if (noise_var < 0) throw InvalidArgument("SignalModel: negative noise variance");
    const double scale = std::max(1.0, max_abs(r));
    if (max_abs(CMatrix(r - r.adjoint())) > 1e-10 * scale) throw InvalidArgument("SignalModel: R not Hermitian");
    SignalModel m;
    m.n = r.rows();
    m.r = 0.5 * (r + r.adjoint());
    m.a_true = a_true;
    m.p = m.r * a_true;
    m.noise_var = noise_var;
    m.seed = seed;
    return m;
  }
};

/// a* = R^{-1} p
inline CVector wiener_solution(const SignalModel& m) {
  Eigen::LLT<CMatrix> llt(m.r);
  if (llt.info() != Eigen::Success) throw SingularMatrix("wiener_solution: R is not positive definite");
  const RVector d = llt.matrixLLT().diagonal().real();
  if (d.minCoeff() <= 1e-12 * d.maxCoeff()) throw SingularMatrix("wiener_solution: R is singular");
  return llt.solve(m.p);
}

/// Deterministic (per seed) source of (xi_k, eta_k) pairs. Circular complex
/// Gaussian: real and imaginary parts independent with variance 1/2 each, and
/// xi = L w for R = L L^H.
class SignalSource {
 public:
  explicit SignalSource(const SignalModel& m) : model_(m), rng_(m.seed), normal_(0.0, std::sqrt(0.5)) {
    Eigen::LLT<CMatrix> llt(m.r);
    if (llt.info() != Eigen::Success) throw SingularMatrix("SignalSource: R is not positive definite");
    chol_ = llt.matrixL();
  }

  Complex circular() { return {normal_(rng_), normal_(rng_)}; }

  struct Sample {
    CVector xi;
    Complex eta;
  };

  Sample next() {
    CVector w(model_.n);
    for (Index i = 0; i < model_.n; ++i) w(i) = circular();
    Sample s;
    s.xi = chol_ * w;
    s.eta = model_.a_true.dot(s.xi);
    if (model_.noise_var > 0) s.eta += std::sqrt(model_.noise_var) * circular();
    return s;
  }

 private:
  SignalModel model_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_;
  CMatrix chol_;
};

// ---------------------------------------------------------------------------
// Simulation harness.

struct LmsTraceRow {
  std::int64_t step = 0;
  double smoothed_sq_error = 0;  // mean |e|^2 over the trailing window
  double misalignment = 0;       // ||a_hat - a*||
};

struct LmsSimulation {
  std::vector<LmsTraceRow> trace;  // row 0 is the initial state
  CVector a_hat;
  CVector wiener;
  double final_misalignment = 0;
};

inline constexpr double kLmsDivergenceNorm = 1e9;
inline constexpr std::size_t kLmsSmoothingWindow = 100;

/// Runs `steps` LMS updates from a_hat = 0 on samples from the model. Mean
/// convergence needs 0 < alpha < 2 / lambda_max(R); that bound is not
/// enforced, divergence is detected instead.
inline LmsSimulation simulate(const SignalModel& m, std::int64_t steps, const StepSchedule& schedule) {
  if (steps < 0) throw InvalidArgument("simulate: negative step count");
  LmsSimulation out;
  out.wiener = wiener_solution(m);
  SignalSource src(m);
  LmsState s{CVector::Zero(m.n), 0, schedule};
  std::deque<double> window;
  out.trace.push_back({0, 0.0, (s.a_hat - out.wiener).norm()});
  for (std::int64_t k = 0; k < steps; ++k) {
    const auto smp = src.next();
    const double e2 = std::norm(lms_error(s.a_hat, smp.xi, smp.eta));
    s = lms_step(s, smp.xi, smp.eta);
    if (!all_finite(s.a_hat) || s.a_hat.norm() > kLmsDivergenceNorm) {
      throw Diverged("LMS diverged at step " + std::to_string(k + 1));
    }
    window.push_back(e2);
    if (window.size() > kLmsSmoothingWindow) window.pop_front();
    // Summed afresh: a running sum keeps rounding residue once the error decays.
    const double window_sum = std::accumulate(window.begin(), window.end(), 0.0);
    out.trace.push_back({k + 1, window_sum / static_cast<double>(window.size()), (s.a_hat - out.wiener).norm()});
  }
  out.a_hat = s.a_hat;
  out.final_misalignment = (s.a_hat - out.wiener).norm();
  return out;
}

inline LmsSimulation simulate(const SignalModel& m, std::int64_t steps, double alpha) {
  return simulate(m, steps, StepSchedule{StepSchedule::Kind::constant, alpha});
}

}  // namespace crcalc
