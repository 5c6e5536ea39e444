// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "cli_app.hpp"
#include "crcalc/crcalc.hpp"
#include "oracles.hpp"

using namespace crcalc;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  double max_seconds = 0;  // 0: no runtime bound
};

/// Tracks the worst residual against a tolerance and the first failure.
class Tally {
 public:
  void check(const std::string& what, double residual, double tol) {
    if (!(residual <= tol)) {
      if (ok_) first_ = what + " residual " + cli::format_double(residual) + " > " + cli::format_double(tol);
      ok_ = false;
    }
    worst_ = std::max(worst_, tol > 0 ? residual / tol : residual);
  }
  void require(const std::string& what, bool cond) {
    if (!cond && ok_) first_ = what;
    ok_ = ok_ && cond;
  }
  Outcome outcome(const std::string& summary, double max_seconds = 0) const {
    Outcome o;
    o.pass = ok_;
    o.detail = ok_ ? summary + ", worst residual/tol " + cli::format_double(worst_) : first_;
    o.max_seconds = max_seconds;
    return o;
  }

 private:
  bool ok_ = true;
  double worst_ = 0;
  std::string first_;
};

CVector scalar(Complex z) {
  CVector v(1);
  v(0) = z;
  return v;
}

VectorField scalar_map(std::function<Complex(Complex)> g) {
  VectorField f;
  f.dim = 1;
  f.out_dim = 1;
  f.eval = [g](const CVector& z) { return scalar(g(z(0))); };
  return f;
}

double rel_err(const CMatrix& a, const CMatrix& b) {
  return oracle::max_abs(CMatrix(a - b)) / std::max(1.0, oracle::max_abs(b));
}

// ---------------------------------------------------------------------------

Outcome holomorphy_classification() {
  Tally t;
  const CVector c = scalar({0.6, -0.4});
  std::mt19937_64 rng(1);
  const CVector a = oracle::random_cvector(1, rng);
  struct Case {
    const char* name;
    std::function<Complex(Complex)> fn;
    bool holomorphic;
  };
  const Case cases[] = {
      {"z^2", [](Complex z) { return z * z; }, true},
      {"exp z", [](Complex z) { return std::exp(z); }, true},
      {"a^H z", [a](Complex z) { return std::conj(a(0)) * z; }, true},
      {"conj z", [](Complex z) { return std::conj(z); }, false},
      {"Re z", [](Complex z) { return Complex(z.real(), 0); }, false},
      {"Im z", [](Complex z) { return Complex(z.imag(), 0); }, false},
      {"|z|^2", [](Complex z) { return Complex(std::norm(z), 0); }, false},
      {"|z|", [](Complex z) { return Complex(std::abs(z), 0); }, false},
  };
  for (const auto& cs : cases) {
    const HolomorphyReport r = is_holomorphic(scalar_map(cs.fn), c);
    t.require(std::string(cs.name) + " misclassified (FD)", r.holomorphic == cs.holomorphic);
  }
  // Analytic path with the tight tolerance.
  const PolynomialMap sq(1, {{Monomial{1.0, {2}, {0}}}});
  const PolynomialMap ab(1, {{Monomial{1.0, {1}, {1}}}});
  t.require("z^2 misclassified (analytic)", is_holomorphic(sq.as_field(), c).holomorphic);
  t.require("|z|^2 misclassified (analytic)", !is_holomorphic(ab.as_field(), c).holomorphic);
  return t.outcome("8 FD + 2 analytic classifications", 1.0);
}

Outcome derivative_identities() {
  Tally t;
  std::mt19937_64 rng(2024);
  const double tol = 1e-5;
  for (int k = 0; k < 200; ++k) {
    const Index n = 1 + k % 4;
    const PolynomialMap g = random_polynomial_map(n, 2, 3, 3, rng);
    const PolynomialMap h = random_polynomial_map(2, 1, 3, 2, rng);
    const CVector z = oracle::random_cvector(n, rng, 0.6);
    const JacobianPair exact = g.jacobians(z);
    const double scale = std::max({1.0, oracle::max_abs(exact.jac), oracle::max_abs(exact.conj_jac)});

    // conj(g): d conj(g)/d zbar = conj(dg/dz) and d conj(g)/dz = conj(dg/dzbar).
    VectorField gbar;
    gbar.dim = n;
    gbar.out_dim = 2;
    gbar.eval = [g](const CVector& p) { return CVector(g.eval(p).conjugate()); };
    const JacobianPair fdbar = jacobians_fd(gbar, z);
    t.check("conj identity a", oracle::max_abs(CMatrix(fdbar.conj_jac - exact.jac.conjugate())) / scale, tol);
    t.check("conj identity b", oracle::max_abs(CMatrix(fdbar.jac - exact.conj_jac.conjugate())) / scale, tol);

    // Real field: dzbar = conj(dz) under FD.
    ScalarField f = real_part_field(random_polynomial_map(n, 1, 3, 3, rng));
    f.cogradients = nullptr;
    t.check("real-field conjugation", conjugation_residual(cogradients_fd(f, z)), tol);

    // Differential rule.
    const CVector dz = oracle::random_cvector(n, rng, 1e-6);
    const CVector dg = g.eval(z + dz) - g.eval(z);
    const CVector lin = exact.jac * dz + exact.conj_jac * dz.conjugate();
    t.check("differential rule", (dg - lin).cwiseAbs().maxCoeff() / (dz.norm() * scale), tol);

    // Chain rule for h o g.
    const JacobianPair pred = compose(h.jacobians(g.eval(z)), exact);
    VectorField hg;
    hg.dim = n;
    hg.out_dim = 1;
    hg.eval = [g, h](const CVector& p) { return h.eval(g.eval(p)); };
    const JacobianPair fd = jacobians_fd(hg, z);
    const double cs = std::max({1.0, oracle::max_abs(pred.jac), oracle::max_abs(pred.conj_jac)});
    t.check("chain rule (z)", oracle::max_abs(CMatrix(fd.jac - pred.jac)) / cs, tol);
    t.check("chain rule (zbar)", oracle::max_abs(CMatrix(fd.conj_jac - pred.conj_jac)) / cs, tol);
  }
  return t.outcome("200 random fields, n <= 4", 10.0);
}

Outcome structure_algebra() {
  Tally t;
  for (Index n = 1; n <= 8; ++n) {
    const CMatrix j = dense_j(n);
    const CMatrix s = dense_s(n).cast<Complex>();
    const CMatrix c = dense_c(n).cast<Complex>();
    const CMatrix id = CMatrix::Identity(2 * n, 2 * n);
    t.check("J^-1 = J^H / 2", oracle::max_abs(CMatrix(dense_j_inverse(n) * j - id)), 1e-12);
    t.check("J J^-1", oracle::max_abs(CMatrix(j * dense_j_inverse(n) - id)), 1e-12);
    t.check("S^2 = I", oracle::max_abs(CMatrix(s * s - id)), 1e-12);
    t.check("det S", std::abs(dense_s(n).determinant() - (n % 2 ? -1.0 : 1.0)), 1e-12);
    t.check("C = J^H S J / 2", oracle::max_abs(CMatrix(0.5 * j.adjoint() * s * j - c)), 1e-12);
    t.check("I = J^T S J / 2", oracle::max_abs(CMatrix(0.5 * j.transpose() * s * j - id)), 1e-12);
    t.check("dense J matches reference", oracle::max_abs(CMatrix(j - oracle::j_matrix(n))), 1e-12);
  }
  return t.outcome("n = 1..8");
}

Outcome projector() {
  Tally t;
  std::mt19937_64 rng(500);
  for (int k = 0; k < 500; ++k) {
    const Index n = 1 + k % 4;
    const CMatrix m = oracle::random_cmatrix(2 * n, 2 * n, rng);
    const CMatrix p = project_admissible(m);
    const double sc = std::max(1.0, oracle::max_abs(p));
    t.check("idempotent", oracle::max_abs(CMatrix(project_admissible(p) - p)) / sc, 1e-10);
    t.check("output admissible", matrix_admissibility_residual(p) / sc, 1e-10);
    // Fixed points are exactly the admissible matrices: P(M) = M iff M admissible.
    const bool fixed = oracle::max_abs(CMatrix(project_admissible(m) - m)) <= 1e-10;
    t.require("fixed-point characterization", fixed == is_admissible_matrix(m, 1e-10));
    const CMatrix s = oracle::s_matrix(n);
    t.check("P(M) = S conj(P(M)) S", oracle::max_abs(CMatrix(p - s * p.conjugate() * s)) / sc, 1e-10);
    Eigen::FullPivLU<CMatrix> lu(p);
    if (lu.isInvertible()) {
      const CMatrix inv = lu.inverse();
      t.check("inverse admissible", matrix_admissibility_residual(inv) / std::max(1.0, oracle::max_abs(inv)), 1e-10);
    }
  }
  return t.outcome("500 random matrices");
}

Outcome hessian_relations() {
  Tally t;
  std::mt19937_64 rng(55);
  for (int k = 0; k < 200; ++k) {
    const Index n = 1 + k % 4;
    const ScalarField f = real_part_field(random_polynomial_map(n, 1, 4, 3, rng));
    const HessianQuad q = hessian_quad(f, oracle::random_cvector(n, rng, 0.7));
    const AssembledHessians a = assemble(q);
    const CMatrix j = oracle::j_matrix(n);
    const double sc = std::max(1.0, oracle::max_abs(a.complex_form));
    t.check("H_rr = J^H H J", oracle::max_abs(CMatrix(j.adjoint() * a.complex_form * j - a.rr.cast<Complex>())) / sc, 1e-8);
    t.check("H^C = J H_rr J^H / 4",
            oracle::max_abs(CMatrix(oracle::complex_hessian_from_real(a.rr) - a.complex_form)) / sc, 1e-8);
    t.check("H^R = S H^C", oracle::max_abs(CMatrix(a.real_form - oracle::s_matrix(n) * a.complex_form)) / sc, 1e-8);
    RVector ec = Eigen::SelfAdjointEigenSolver<CMatrix>(a.complex_form).eigenvalues();
    RVector er = Eigen::SelfAdjointEigenSolver<RMatrix>(a.rr).eigenvalues();
    t.check("eig(H_rr) = 2 eig(H^C)", (er - 2 * ec).cwiseAbs().maxCoeff() / sc, 1e-8);
    const RVector sc1 = Eigen::JacobiSVD<CMatrix>(a.complex_form).singularValues();
    const RVector sr1 = Eigen::JacobiSVD<CMatrix>(a.real_form).singularValues();
    t.check("shared singular values", (sc1 - sr1).cwiseAbs().maxCoeff() / sc, 1e-8);
  }
  return t.outcome("200 random quads, n <= 4");
}

Outcome second_order_terms() {
  Tally t;
  std::mt19937_64 rng(66);
  for (int k = 0; k < 500; ++k) {
    const Index n = 1 + k % 4;
    const HessianQuad q =
        from_block_matrix(oracle::complex_hessian_from_real(oracle::random_symmetric(2 * n, rng)));
    const CVector dz = oracle::random_cvector(n, rng);
    const double ref = second_order_term(q, dz, Representation::z);
    for (auto rep : {Representation::real, Representation::c_complex, Representation::c_real}) {
      t.check(to_string(rep), std::abs(second_order_term(q, dz, rep) - ref) / std::max(1.0, std::abs(ref)), 1e-10);
    }
  }
  return t.outcome("500 random quads and steps");
}

Outcome application_one() {
  Tally t;
  std::mt19937_64 rng(7);
  for (int k = 0; k < 20; ++k) {
    const CVector ab = oracle::random_cvector(2, rng);
    const Complex a = ab(0), b = ab(1);
    const Example1Problem p = Example1Problem::synthetic(a, b, oracle::random_cvector(1, rng)(0), 0.2, 64, k);
    const double s = std::norm(a) + std::norm(b);
    CMatrix expect(2, 2);
    expect << s, 2.0 * std::conj(a) * b, 2.0 * a * std::conj(b), s;
    expect *= 0.5;
    ScalarField fd = example1_loss_field(p);
    fd.hessian = nullptr;
    const CVector z = oracle::random_cvector(1, rng);
    t.check("analytic Hessian", rel_err(to_block_matrix(example1_hessian(p)), expect), 1e-14);
    t.check("FD Hessian", rel_err(to_block_matrix(hessian_quad(fd, z)), expect), 1e-6);
    t.check("direct-loss real Hessian",
            rel_err(oracle::complex_hessian_fd([&](const CVector& w) { return example1_loss_direct(p, w(0)); }, z),
                    expect),
            1e-5);
    if (example1_identifiable(p)) {
      t.check("stationarity", stationarity_residual(example1_loss_field(p), scalar(example1_closed_form(p))), 1e-10);
    }
    // Equal magnitudes: singular Hessian.
    const Complex b2 = std::abs(a) * std::exp(Complex(0, std::arg(b)));
    const Example1Problem u(a, b2, p.samples());
    const RVector ev = Eigen::SelfAdjointEigenSolver<CMatrix>(to_block_matrix(example1_hessian(u))).eigenvalues();
    t.check("|alpha| = |beta| singular", ev.minCoeff() / ev.sum(), 1e-10);
    t.require("|alpha| = |beta| unidentifiable", !example1_identifiable(u));
  }
  return t.outcome("20 random (alpha, beta)", 1.0);
}

Outcome application_two() {
  Tally t;
  std::mt19937_64 rng(8);
  const Complex a(1, 1), b(0.3, 0);
  const Example1Problem p = Example1Problem::synthetic(a, b, {0.5, -0.25}, 0.1, 64, 1);
  const LsqProblem lsq = example2_as_lsq(p);
  const Objective obj(lsq);
  const Complex opt = example1_closed_form(p);
  for (int k = 0; k < 10; ++k) {
    const CVector z0 = oracle::random_cvector(1, rng, 3.0);
    t.check("Newton = Gauss-Newton", oracle::max_abs(CMatrix(newton_hessian(lsq, z0) - gauss_newton_hessian(lsq, z0))),
            1e-12);
    const MinimizeResult r = minimize(obj, z0, {QKind::newton, 0}, OptimizerConfig::defaults_for(QKind::newton));
    t.require("Newton converged", r.status == Status::converged);
    t.require("exactly one iteration", r.iterations == 1);
    t.check("reaches z_opt", std::abs(r.z(0) - opt), 1e-10);
  }
  const CMatrix h = gauss_newton_hessian(lsq, scalar(0));
  t.check("off-diagonal = conj(alpha) beta", std::abs(h(0, 1) - std::conj(a) * b), 1e-14);
  t.require("off-diagonal nonzero", std::abs(h(0, 1)) > 0.1);
  return t.outcome("10 random starts");
}

Outcome least_squares() {
  Tally t;
  std::mt19937_64 rng(9);
  for (int k = 0; k < 100; ++k) {
    const Index n = 1 + k % 3, m = 1 + (k / 3) % 3;
    const PolynomialMap g = random_polynomial_map(n, m, 3, 2, rng);
    const CMatrix aw = oracle::random_cmatrix(m, m, rng);
    const LsqProblem p(g.as_field(), oracle::random_cvector(m, rng), aw.adjoint() * aw + CMatrix::Identity(m, m));
    const CVector z = oracle::random_cvector(n, rng);
    const CMatrix h = newton_hessian(p, z);
    const CMatrix o = oracle::complex_hessian_fd([&](const CVector& w) { return loss(p, w); }, z);
    t.check("Newton vs FD Hessian", oracle::max_abs(CMatrix(h - o)) / std::max(1.0, oracle::max_abs(h)), 1e-4);
  }
  for (int k = 0; k < 50; ++k) {
    const Index n = 1 + k % 3, m = 1 + (k / 3) % 3;
    const PolynomialMap g = random_polynomial_map(n, m, 3, 3, rng, true);
    const CMatrix aw = oracle::random_cmatrix(m, m, rng);
    const CMatrix w = aw.adjoint() * aw + CMatrix::Identity(m, m);
    const LsqProblem p(g.as_field(), oracle::random_cvector(m, rng), w);
    const CVector z = oracle::random_cvector(n, rng);
    const CMatrix h = gauss_newton_hessian(p, z);
    const CMatrix jg = g.jacobians(z).jac;
    const double sc = std::max(1.0, oracle::max_abs(h));
    t.check("holomorphic: off-diagonal", oracle::max_abs(CMatrix(h.topRightCorner(n, n))) / sc, 1e-10);
    t.check("holomorphic: U_zz", oracle::max_abs(CMatrix(h.topLeftCorner(n, n) - 0.5 * jg.adjoint() * w * jg)) / sc,
            1e-10);
  }
  return t.outcome("100 nonholomorphic + 50 holomorphic problems");
}

Outcome optimizer_family() {
  Tally t;
  std::mt19937_64 rng(10);
  for (int k = 0; k < 5; ++k) {
    const CVector ab = oracle::random_cvector(2, rng);
    const Complex a = ab(0);
    const double ratio = std::uniform_real_distribution<double>(0.1, 0.6)(rng);
    const Complex b = ratio * std::abs(a) * std::exp(Complex(0, std::arg(ab(1))));
    const Example1Problem p = Example1Problem::synthetic(a, b, oracle::random_cvector(1, rng)(0), 0.1, 64, k);
    if (!example1_identifiable(p)) continue;
    const Complex opt = example1_closed_form(p);
    const CVector z0 = oracle::random_cvector(1, rng, 2.0);
    for (QKind kind : {QKind::identity, QKind::newton, QKind::quasi_newton, QKind::gauss_newton,
                       QKind::quasi_gauss_newton}) {
      const bool gauss = kind == QKind::gauss_newton || kind == QKind::quasi_gauss_newton;
      const Objective obj = gauss ? Objective(example2_as_lsq(p)) : Objective(example1_loss_field(p));
      for (bool armijo : {false, true}) {
        OptimizerConfig cfg = OptimizerConfig::defaults_for(kind);
        cfg.max_iters = 20000;
        cfg.grad_tol = 1e-8;
        cfg.backtracking.enabled = armijo;
        // Identity descent needs alpha below 2 / lambda_max(H^C).
        if (kind == QKind::identity) cfg.step_size = 1.0 / p.energy();
        const MinimizeResult r = minimize(obj, z0, {kind, 0}, cfg);
        t.require(std::string(to_string(kind)) + " did not converge", r.status == Status::converged);
        t.check(std::string(to_string(kind)) + " grad", r.grad_norm, 1e-8);
        // |z - z_opt| <= grad / lambda_min
        const RVector ev =
            Eigen::SelfAdjointEigenSolver<CMatrix>(to_block_matrix(example1_hessian(p))).eigenvalues();
        t.check(std::string(to_string(kind)) + " z_opt", std::abs(r.z(0) - opt), 2e-8 / ev.minCoeff() + 1e-12);
        if (armijo) {
          for (std::size_t i = 1; i < r.trace.size(); ++i) {
            t.require("loss increased under backtracking", r.trace[i].loss <= r.trace[i - 1].loss);
          }
        }
      }
    }
  }
  return t.outcome("5 instances x 5 strategies x {plain, Armijo}", 5.0);
}

Outcome lms_criterion() {
  Tally t;
  std::mt19937_64 rng(11);
  const SignalModel m =
      SignalModel::from_true_parameter(CMatrix::Identity(4, 4), oracle::random_cvector(4, rng), 0.0, 2024);
  const LmsSimulation sim = simulate(m, 5000, 0.05);
  t.check("misalignment", sim.final_misalignment, 1e-3);

  // Scalar problem: sample-mean cogradients against the model moments.
  const SignalModel s = SignalModel::from_true_parameter(CMatrix::Constant(1, 1, 1.5), scalar({0.8, -0.6}), 0.25, 7);
  const Complex a_hat(0.1, 0.3);
  SignalSource src(s);
  Complex mean_xi_ebar = 0, mean_xibar_e = 0, mean_xi_etabar = 0;
  double mean_xi2 = 0;
  const int count = 100000;
  for (int k = 0; k < count; ++k) {
    const auto smp = src.next();
    const Complex xi = smp.xi(0);
    const Complex e = lms_error(scalar(a_hat), smp.xi, smp.eta);
    mean_xi_ebar += xi * std::conj(e);
    mean_xibar_e += std::conj(xi) * e;
    mean_xi_etabar += xi * std::conj(smp.eta);
    mean_xi2 += std::norm(xi);
  }
  mean_xi_ebar /= count;
  mean_xibar_e /= count;
  mean_xi_etabar /= count;
  mean_xi2 /= count;
  const Complex r = s.r(0, 0), p = s.p(0);
  // dl/d(conj a) = -E{xi conj(e)} = -(p - r a); dl/da = -E{conj(xi) e} is its conjugate.
  const Complex expect = -(p - r * a_hat);
  t.check("dl/dconj(a) sample mean", std::abs(-mean_xi_ebar - expect) / std::abs(expect), 0.02);
  t.check("dl/da sample mean", std::abs(-mean_xibar_e - std::conj(expect)) / std::abs(expect), 0.02);
  const Complex a_star = mean_xi_etabar / mean_xi2;
  const Complex w = wiener_solution(s)(0);
  t.check("stationary point vs Wiener", std::abs(a_star - w) / std::abs(w), 0.02);
  return t.outcome("n = 4 run + scalar moments at 1e5 samples");
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Outcome determinism() {
  Tally t;
  const auto dir = std::filesystem::temp_directory_path();
  auto run_twice = [&](const std::string& tag, cli::RunConfig cfg, auto cmd) {
    std::ostringstream o, e;
    const auto a = dir / ("crcalc_accept_" + tag + "_a.csv");
    const auto b = dir / ("crcalc_accept_" + tag + "_b.csv");
    setenv("CRCALC_THREADS", "1", 1);
    cfg.trace_path = a.string();
    cmd(cfg, o, e);
    setenv("CRCALC_THREADS", "4", 1);
    cfg.trace_path = b.string();
    cmd(cfg, o, e);
    unsetenv("CRCALC_THREADS");
    const std::string sa = slurp(a), sb = slurp(b);
    t.require(tag + " trace empty", !sa.empty());
    t.require(tag + " traces differ", sa == sb);
  };
  cli::RunConfig opt;
  opt.quiet = true;
  opt.seed = 17;
  opt.algorithm = QKind::identity;
  run_twice("optimize", opt, cli::cmd_optimize);
  cli::RunConfig poly;
  poly.quiet = true;
  poly.problem = "custom-polynomial";
  poly.algorithm = QKind::newton;
  poly.armijo = true;
  poly.z0 = CVector::Constant(2, Complex(0.5, 0.5));
  poly.polynomial = cli::PolynomialSpec{
      2,
      {{Monomial{1.0, {1, 1}, {0, 0}}, Monomial{Complex(0, 0.3), {0, 0}, {2, 0}}},
       {Monomial{Complex(1, -1), {0, 1}, {1, 0}}},
       {Monomial{1.0, {1, 0}, {0, 0}}, Monomial{0.5, {0, 1}, {0, 0}}}},
      (CVector(3) << Complex(1, 0.5), Complex(0.6, 1), Complex(0.2, 0)).finished()};
  run_twice("newton_fd_curvature", poly, cli::cmd_optimize);
  cli::RunConfig lms;
  lms.quiet = true;
  lms.seed = 3;
  lms.lms_noise = 0.1;
  run_twice("lms", lms, cli::cmd_lms);
  return t.outcome("optimize, FD-curvature Newton and LMS traces, 1 vs 4 threads");
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*fn)();
  };
  const Criterion criteria[] = {
      {"holomorphy classification", holomorphy_classification},
      {"derivative identities", derivative_identities},
      {"structure algebra", structure_algebra},
      {"admissibility projector", projector},
      {"Hessian relations", hessian_relations},
      {"second-order term equality", second_order_terms},
      {"scalar estimation problem", application_one},
      {"least-squares form of the estimation problem", application_two},
      {"least-squares consistency", least_squares},
      {"optimizer family", optimizer_family},
      {"complex LMS", lms_criterion},
      {"determinism", determinism},
  };
  int failures = 0;
  int idx = 0;
  for (const auto& c : criteria) {
    ++idx;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (o.pass && o.max_seconds > 0 && secs > o.max_seconds) {
      o.pass = false;
      o.detail += " (runtime over " + cli::format_double(o.max_seconds) + " s)";
    }
    if (!o.pass) ++failures;
    std::printf("%s  %2d %-46s %s  [%.3f s]\n", o.pass ? "PASS" : "FAIL", idx, c.name, o.detail.c_str(), secs);
  }
  std::printf("%d/%d criteria passed\n", idx - failures, idx);
  return failures == 0 ? 0 : 1;
}
