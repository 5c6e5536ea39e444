#pragma once

// Command implementations for the crcalc tool: configuration loading, the
// optimize / check / lms commands, and CSV trace output.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <set>
#include <locale>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "crcalc/crcalc.hpp"

namespace crcalc::cli {

using json = nlohmann::json;

class ConfigError : public Error {
 public:
  using Error::Error;
};

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitNotConverged = 2,
  kExitFailure = 3,
};

// ---------------------------------------------------------------------------
// Number formatting and parsing (locale independent).

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline std::optional<double> parse_double(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

/// Parses "a", "bj", "a+bj", "a-bj" (also with i instead of j).
inline std::optional<Complex> parse_complex(std::string text) {
  std::string s;
  for (char ch : text) if (ch != ' ') s.push_back(ch);
  if (s.empty()) return std::nullopt;
  const char last = s.back();
  if (last != 'j' && last != 'i') {
    const auto re = parse_double(s);
    if (!re) return std::nullopt;
    return Complex(*re, 0.0);
  }
  s.pop_back();
  // Split at the last sign that is not an exponent sign or the leading sign.
  std::size_t split = std::string::npos;
  for (std::size_t i = s.size(); i-- > 1;) {
    if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  const std::string re_part = split == std::string::npos ? "" : s.substr(0, split);
  std::string im_part = split == std::string::npos ? s : s.substr(split);
  if (im_part.empty() || im_part == "+") im_part = "1";
  else if (im_part == "-") im_part = "-1";
  double re = 0;
  if (!re_part.empty()) {
    const auto r = parse_double(re_part);
    if (!r) return std::nullopt;
    re = *r;
  }
  const auto im = parse_double(im_part);
  if (!im) return std::nullopt;
  return Complex(re, *im);
}

inline std::string format_complex(Complex c) {
  std::string im = format_double(c.imag());
  if (im.front() != '-' && im != "nan") im = "+" + im;
  return format_double(c.real()) + im + "j";
}

// ---------------------------------------------------------------------------
// Configuration.

struct PolynomialSpec {
  Index dim = 1;
  std::vector<std::vector<Monomial>> components;
  CVector data;
};

struct RunConfig {
  std::string problem = "example1";
  QKind algorithm = QKind::newton;
  double damping = 0.0;
  std::optional<double> step;
  int max_iters = 5000;
  double grad_tol = 1e-8;
  bool armijo = false;
  double armijo_beta = 0.5;
  double armijo_c1 = 1e-4;

  Complex alpha{1.0, 1.0};
  Complex beta{0.3, 0.0};
  Complex z_true{0.5, -0.25};
  std::optional<CVector> z0;
  double noise = 0.1;
  Index n_samples = 64;
  std::uint64_t seed = 1;

  Index lms_n = 4;
  std::int64_t lms_steps = 5000;
  double lms_step = 0.05;
  double lms_noise = 0.0;

  std::optional<PolynomialSpec> polynomial;

  std::string trace_path;
  bool quiet = false;
  bool corrupt_gradient = false;

  void validate() const {
    static const std::set<std::string> problems{"example1", "example2", "lms", "custom-polynomial"};
    if (!problems.count(problem)) throw ConfigError("problem: unknown value '" + problem + "'");
    if (step && !(*step > 0)) throw ConfigError("optimizer.step: must be > 0");
    if (max_iters < 0 || max_iters > 1000000) throw ConfigError("optimizer.max_iters: must be in [0, 1e6]");
    if (!(grad_tol > 0)) throw ConfigError("optimizer.grad_tol: must be > 0");
    if (!(damping >= 0)) throw ConfigError("optimizer.damping: must be >= 0");
    if (!(armijo_beta > 0 && armijo_beta < 1)) throw ConfigError("optimizer.armijo_beta: must be in (0, 1)");
    if (!(armijo_c1 > 0 && armijo_c1 < 1)) throw ConfigError("optimizer.armijo_c1: must be in (0, 1)");
    if (!(noise >= 0)) throw ConfigError("params.noise: must be >= 0");
    if (n_samples <= 0) throw ConfigError("params.n_samples: must be > 0");
    if (lms_n <= 0 || lms_n > 1024) throw ConfigError("params.n: must be in [1, 1024]");
    if (lms_steps < 0) throw ConfigError("params.steps: must be >= 0");
    if (!(lms_step >= 0)) throw ConfigError("params.lms_step: must be >= 0");
    if (!(lms_noise >= 0)) throw ConfigError("params.lms_noise: must be >= 0");
    if (problem == "custom-polynomial" && !polynomial) {
      throw ConfigError("params.polynomial: required for problem custom-polynomial");
    }
  }
};

namespace detail {

inline void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [k, v] : obj.items()) {
    if (!allowed.count(k)) throw ConfigError((where.empty() ? "" : where + ".") + k + ": unknown key");
  }
}

inline double get_number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ConfigError(where + ": expected a number");
  return v.get<double>();
}

inline std::int64_t get_integer(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw ConfigError(where + ": expected an integer");
  return v.get<std::int64_t>();
}

inline std::string get_string(const json& v, const std::string& where) {
  if (!v.is_string()) throw ConfigError(where + ": expected a string");
  return v.get<std::string>();
}

inline Complex get_complex(const json& v, const std::string& where) {
  if (v.is_number()) return Complex(v.get<double>(), 0.0);
  if (!v.is_string()) throw ConfigError(where + ": expected a complex string like \"1+2j\"");
  const auto c = parse_complex(v.get<std::string>());
  if (!c) throw ConfigError(where + ": cannot parse complex value '" + v.get<std::string>() + "'");
  return *c;
}

inline CVector get_complex_vector(const json& v, const std::string& where) {
  if (!v.is_array()) {
    CVector out(1);
    out(0) = get_complex(v, where);
    return out;
  }
  CVector out(static_cast<Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Index>(i)) = get_complex(v[i], where + "[" + std::to_string(i) + "]");
  return out;
}

inline std::vector<int> get_exponents(const json& v, Index dim, const std::string& where) {
  if (!v.is_array() || static_cast<Index>(v.size()) != dim) {
    throw ConfigError(where + ": expected an array of " + std::to_string(dim) + " exponents");
  }
  std::vector<int> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto e = get_integer(v[i], where + "[" + std::to_string(i) + "]");
    if (e < 0 || e > 16) throw ConfigError(where + "[" + std::to_string(i) + "]: exponent must be in [0, 16]");
    out.push_back(static_cast<int>(e));
  }
  return out;
}

inline PolynomialSpec get_polynomial(const json& v, const std::string& where) {
  reject_unknown(v, {"dim", "components", "data"}, where);
  PolynomialSpec spec;
  if (!v.contains("dim") || !v.contains("components") || !v.contains("data")) {
    throw ConfigError(where + ": needs dim, components and data");
  }
  spec.dim = get_integer(v["dim"], where + ".dim");
  if (spec.dim <= 0 || spec.dim > 64) throw ConfigError(where + ".dim: must be in [1, 64]");
  const json& comps = v["components"];
  if (!comps.is_array() || comps.empty()) throw ConfigError(where + ".components: expected a non-empty array");
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const std::string cw = where + ".components[" + std::to_string(i) + "]";
    if (!comps[i].is_array()) throw ConfigError(cw + ": expected an array of monomials");
    std::vector<Monomial> comp;
    for (std::size_t t = 0; t < comps[i].size(); ++t) {
      const std::string tw = cw + "[" + std::to_string(t) + "]";
      const json& m = comps[i][t];
      reject_unknown(m, {"coef", "z", "zbar"}, tw);
      if (!m.contains("coef")) throw ConfigError(tw + ": missing coef");
      Monomial mono{get_complex(m["coef"], tw + ".coef"),
                    m.contains("z") ? get_exponents(m["z"], spec.dim, tw + ".z")
                                    : std::vector<int>(static_cast<std::size_t>(spec.dim), 0),
                    m.contains("zbar") ? get_exponents(m["zbar"], spec.dim, tw + ".zbar")
                                       : std::vector<int>(static_cast<std::size_t>(spec.dim), 0)};
      comp.push_back(std::move(mono));
    }
    spec.components.push_back(std::move(comp));
  }
  spec.data = get_complex_vector(v["data"], where + ".data");
  if (spec.data.size() != static_cast<Index>(spec.components.size())) {
    throw ConfigError(where + ".data: length must equal the number of components");
  }
  return spec;
}

}  // namespace detail

/// Applies a JSON configuration document on top of `cfg`. Unknown keys are
/// rejected with their dotted path.
inline void apply_json(RunConfig& cfg, const json& doc) {
  using namespace detail;
  reject_unknown(doc, {"problem", "algorithm", "optimizer", "params", "output"}, "");
  if (doc.contains("problem")) cfg.problem = get_string(doc["problem"], "problem");
  if (doc.contains("algorithm")) {
    const auto s = get_string(doc["algorithm"], "algorithm");
    const auto k = parse_qkind(s);
    if (!k) throw ConfigError("algorithm: unknown value '" + s + "'");
    cfg.algorithm = *k;
  }
  if (doc.contains("optimizer")) {
    const json& o = doc["optimizer"];
    reject_unknown(o, {"step", "max_iters", "grad_tol", "backtracking", "armijo_beta", "armijo_c1", "damping"},
                   "optimizer");
    if (o.contains("step")) cfg.step = get_number(o["step"], "optimizer.step");
    if (o.contains("max_iters")) cfg.max_iters = static_cast<int>(get_integer(o["max_iters"], "optimizer.max_iters"));
    if (o.contains("grad_tol")) cfg.grad_tol = get_number(o["grad_tol"], "optimizer.grad_tol");
    if (o.contains("backtracking")) {
      const auto b = get_string(o["backtracking"], "optimizer.backtracking");
      if (b != "off" && b != "armijo") throw ConfigError("optimizer.backtracking: expected off or armijo");
      cfg.armijo = b == "armijo";
    }
    if (o.contains("armijo_beta")) cfg.armijo_beta = get_number(o["armijo_beta"], "optimizer.armijo_beta");
    if (o.contains("armijo_c1")) cfg.armijo_c1 = get_number(o["armijo_c1"], "optimizer.armijo_c1");
    if (o.contains("damping")) cfg.damping = get_number(o["damping"], "optimizer.damping");
  }
  if (doc.contains("params")) {
    const json& p = doc["params"];
    reject_unknown(p, {"alpha", "beta", "z_true", "z0", "noise", "n_samples", "seed", "n", "steps", "lms_step",
                       "lms_noise", "polynomial"},
                   "params");
    if (p.contains("alpha")) cfg.alpha = get_complex(p["alpha"], "params.alpha");
    if (p.contains("beta")) cfg.beta = get_complex(p["beta"], "params.beta");
    if (p.contains("z_true")) cfg.z_true = get_complex(p["z_true"], "params.z_true");
    if (p.contains("z0")) cfg.z0 = get_complex_vector(p["z0"], "params.z0");
    if (p.contains("noise")) cfg.noise = get_number(p["noise"], "params.noise");
    if (p.contains("n_samples")) cfg.n_samples = get_integer(p["n_samples"], "params.n_samples");
    if (p.contains("seed")) {
      const auto s = get_integer(p["seed"], "params.seed");
      if (s < 0) throw ConfigError("params.seed: must be >= 0");
      cfg.seed = static_cast<std::uint64_t>(s);
    }
    if (p.contains("n")) cfg.lms_n = get_integer(p["n"], "params.n");
    if (p.contains("steps")) cfg.lms_steps = get_integer(p["steps"], "params.steps");
    if (p.contains("lms_step")) cfg.lms_step = get_number(p["lms_step"], "params.lms_step");
    if (p.contains("lms_noise")) cfg.lms_noise = get_number(p["lms_noise"], "params.lms_noise");
    if (p.contains("polynomial")) cfg.polynomial = get_polynomial(p["polynomial"], "params.polynomial");
  }
  if (doc.contains("output")) {
    const json& o = doc["output"];
    reject_unknown(o, {"trace"}, "output");
    if (o.contains("trace")) cfg.trace_path = get_string(o["trace"], "output.trace");
  }
}

inline void load_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  apply_json(cfg, doc);
}

// ---------------------------------------------------------------------------
// CSV traces.

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file '" + path + "'");
  out << text;
}

/// String stream pinned to the classic locale, whatever the global one is.
inline std::ostringstream classic_stream() {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  return os;
}

inline std::string optimize_trace_csv(const IterationTrace& trace, Index n) {
  std::ostringstream os = classic_stream();
  os << "iter,loss,grad_norm,step_norm,step_length,q_condition,q_positive_definite,gradient_fallback";
  for (Index i = 0; i < n; ++i) os << ",z" << i << ".re,z" << i << ".im";
  os << '\n';
  for (const auto& r : trace) {
    os << r.iter << ',' << format_double(r.loss) << ',' << format_double(r.grad_norm) << ','
       << format_double(r.step_norm) << ',' << format_double(r.step_length) << ',' << format_double(r.q_condition)
       << ',' << (r.q_positive_definite ? 1 : 0) << ',' << (r.gradient_fallback ? 1 : 0);
    for (Index i = 0; i < n; ++i) os << ',' << format_double(r.z(i).real()) << ',' << format_double(r.z(i).imag());
    os << '\n';
  }
  return os.str();
}

inline std::string lms_trace_csv(const std::vector<LmsTraceRow>& rows) {
  std::ostringstream os = classic_stream();
  os << "step,err2_smoothed,misalignment\n";
  for (const auto& r : rows) {
    os << r.step << ',' << format_double(r.smoothed_sq_error) << ',' << format_double(r.misalignment) << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Problem construction.

inline Example1Problem make_example1(const RunConfig& cfg) {
  return Example1Problem::synthetic(cfg.alpha, cfg.beta, cfg.z_true, cfg.noise, cfg.n_samples, cfg.seed);
}

inline PolynomialMap make_polynomial(const PolynomialSpec& spec) {
  return PolynomialMap(spec.dim, spec.components);
}

inline LsqProblem make_custom_lsq(const RunConfig& cfg) {
  const PolynomialMap map = make_polynomial(*cfg.polynomial);
  return LsqProblem(map.as_field(), cfg.polynomial->data);
}

// ---------------------------------------------------------------------------
// optimize

inline int cmd_optimize(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    cfg.validate();
    if (cfg.problem == "lms") throw ConfigError("problem: use the lms command for lms");
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  OptimizerConfig oc = OptimizerConfig::defaults_for(cfg.algorithm);
  if (cfg.step) oc.step_size = *cfg.step;
  oc.max_iters = cfg.max_iters;
  oc.grad_tol = cfg.grad_tol;
  oc.backtracking = Backtracking{cfg.armijo, cfg.armijo_beta, cfg.armijo_c1};
  const QStrategy strategy{cfg.algorithm, cfg.damping};
  const bool gauss = cfg.algorithm == QKind::gauss_newton || cfg.algorithm == QKind::quasi_gauss_newton;

  try {
    std::optional<Objective> obj;
    std::optional<Complex> closed_form;
    Index dim = 1;
    if (cfg.problem == "example1" || cfg.problem == "example2") {
      const Example1Problem p = make_example1(cfg);
      closed_form = example1_closed_form(p);  // throws Unidentifiable
      if (cfg.problem == "example2" || gauss) obj.emplace(example2_as_lsq(p));
      else obj.emplace(example1_loss_field(p));
    } else {
      obj.emplace(make_custom_lsq(cfg));
      dim = cfg.polynomial->dim;
    }
    CVector z0 = cfg.z0.value_or(CVector::Zero(dim));
    if (z0.size() != dim) throw ConfigError("params.z0: expected " + std::to_string(dim) + " entries");

    const MinimizeResult res = minimize(*obj, z0, strategy, oc);
    const std::string trace = optimize_trace_csv(res.trace, dim);
    if (!cfg.trace_path.empty()) write_text(cfg.trace_path, trace);

    const HessianQuad q = from_block_matrix(obj->newton_hessian(res.z));
    const MinimumKind kind = check_minimum(q);
    if (!cfg.quiet) {
      out << "algorithm: " << to_string(cfg.algorithm) << '\n';
      out << "status: "
          << (res.status == Status::converged ? "converged" : res.status == Status::stalled ? "stalled" : "max_iters")
          << '\n';
      out << "iterations: " << res.iterations << '\n';
      for (Index i = 0; i < dim; ++i) out << "z[" << i << "]: " << format_complex(res.z(i)) << '\n';
      out << "loss: " << format_double(res.loss) << '\n';
      out << "grad_norm: " << format_double(res.grad_norm) << '\n';
      out << "hessian: " << to_string(kind) << '\n';
      if (closed_form) out << "closed_form: " << format_complex(*closed_form) << '\n';
    }
    return res.status == Status::converged ? kExitOk : kExitNotConverged;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Unidentifiable& e) {
    err << "Unidentifiable: " << e.what() << '\n';
    return kExitFailure;
  } catch (const Diverged& e) {
    err << "Diverged: " << e.what() << '\n';
    return kExitFailure;
  } catch (const SingularQ& e) {
    err << "SingularQ: " << e.what() << '\n';
    return kExitFailure;
  } catch (const SingularMatrix& e) {
    err << "SingularMatrix: " << e.what() << '\n';
    return kExitFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

// ---------------------------------------------------------------------------
// check

struct CheckLine {
  std::string name;
  bool pass = false;
  double residual = 0;
  double tol = 0;
  std::string note;
};

inline std::string format_check(const CheckLine& c) {
  std::string s = (c.pass ? "PASS  " : "FAIL  ") + c.name + "  residual=" + format_double(c.residual) +
                  "  tol=" + format_double(c.tol);
  if (!c.note.empty()) s += "  (" + c.note + ")";
  return s;
}

namespace detail {

/// Runs `body` and records a failing line if it throws.
inline CheckLine guarded(const std::string& name, double tol, const std::function<double()>& body) {
  CheckLine c{name, false, 0.0, tol, ""};
  try {
    c.residual = body();
    c.pass = c.residual <= tol;
  } catch (const ConjugationMismatch& e) {
    c.residual = std::numeric_limits<double>::infinity();
    c.note = std::string("ConjugationMismatch: ") + e.what();
  } catch (const Error& e) {
    c.residual = std::numeric_limits<double>::infinity();
    c.note = e.what();
  }
  return c;
}

inline double relative(double abs_err, double scale) { return abs_err / std::max(1.0, scale); }

/// Checks shared by every real scalar objective with analytic cogradients.
inline void scalar_field_checks(std::vector<CheckLine>& lines, const ScalarField& f,
                                const std::vector<CVector>& points, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  lines.push_back(guarded("cogradient analytic vs finite difference", 1e-6, [&] {
    double worst = 0;
    for (const auto& z : points) {
      const WirtingerPair a = cogradients(f, z);
      const WirtingerPair d = cogradients_fd(f, z);
      worst = std::max(worst, relative(max_abs(CRowVector(a.dz - d.dz)), max_abs(a.dz)));
    }
    return worst;
  }));
  lines.push_back(guarded("real field: dl/dzbar = conj(dl/dz)", kConjTolAnalytic, [&] {
    double worst = 0;
    for (const auto& z : points) worst = std::max(worst, conjugation_residual(cogradients(f, z)));
    return worst;
  }));
  lines.push_back(guarded("hessian block identities", 1e-8, [&] {
    double worst = 0;
    for (const auto& z : points) worst = std::max(worst, quad_identity_residuals(hessian_quad(f, z)).max());
    return worst;
  }));
  lines.push_back(guarded("hessian analytic vs finite difference", 1e-4, [&] {
    double worst = 0;
    for (const auto& z : points) {
      const CMatrix a = to_block_matrix(hessian_quad(f, z));
      ScalarField fd = f;
      fd.hessian = nullptr;
      const CMatrix d = to_block_matrix(hessian_quad(fd, z));
      worst = std::max(worst, relative(max_abs(CMatrix(a - d)), max_abs(a)));
    }
    return worst;
  }));
  lines.push_back(guarded("c-complex hessian admissible: H = S conj(H) S", 1e-12, [&] {
    double worst = 0;
    for (const auto& z : points) worst = std::max(worst, matrix_admissibility_residual(to_block_matrix(hessian_quad(f, z))));
    return worst;
  }));
  lines.push_back(guarded("real hessian H_rr = J^H H^C J", 1e-10, [&] {
    double worst = 0;
    for (const auto& z : points) {
      const HessianQuad q = hessian_quad(f, z);
      const AssembledHessians a = assemble(q);
      const Index n = q.dim();
      const CMatrix dense = dense_j(n).adjoint() * a.complex_form * dense_j(n);
      worst = std::max(worst, relative(max_abs(CMatrix(dense - a.rr.cast<Complex>())), max_abs(a.rr)));
    }
    return worst;
  }));
  lines.push_back(guarded("eigenvalues of H_rr are twice those of H^C", 1e-8, [&] {
    double worst = 0;
    for (const auto& z : points) {
      const AssembledHessians a = assemble(hessian_quad(f, z));
      const RVector ec = Eigen::SelfAdjointEigenSolver<CMatrix>(a.complex_form, Eigen::EigenvaluesOnly).eigenvalues();
      const RVector er = Eigen::SelfAdjointEigenSolver<RMatrix>(a.rr, Eigen::EigenvaluesOnly).eigenvalues();
      worst = std::max(worst, relative(max_abs(RVector(er - 2 * ec)), max_abs(er)));
    }
    return worst;
  }));
  lines.push_back(guarded("second-order term equal in r, c-complex, c-real, z", 1e-10, [&] {
    double worst = 0;
    for (const auto& z : points) {
      const HessianQuad q = hessian_quad(f, z);
      CVector dz(z.size());
      for (Index i = 0; i < dz.size(); ++i) dz(i) = Complex(nd(rng), nd(rng));
      const double ref = second_order_term(q, dz, Representation::z);
      for (auto rep : {Representation::real, Representation::c_complex, Representation::c_real}) {
        worst = std::max(worst, relative(std::abs(second_order_term(q, dz, rep) - ref), std::abs(ref)));
      }
    }
    return worst;
  }));
}

}  // namespace detail

inline std::vector<CheckLine> run_checks(const RunConfig& cfg) {
  std::vector<CheckLine> lines;
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> nd;
  if (cfg.problem == "example1" || cfg.problem == "example2") {
    const Example1Problem p = make_example1(cfg);
    ScalarField f = example1_loss_field(p);
    if (cfg.corrupt_gradient) {
      auto good = f.cogradients;
      f.cogradients = [good](const CVector& z) {
        WirtingerPair w = good(z);
        w.dzbar(0) += Complex(0.1, -0.05);
        return w;
      };
    }
    std::vector<CVector> pts;
    for (int i = 0; i < 5; ++i) {
      CVector z(1);
      z(0) = Complex(nd(rng), nd(rng));
      pts.push_back(z);
    }
    detail::scalar_field_checks(lines, f, pts, rng);

    const LsqProblem lsq = example2_as_lsq(p);
    lines.push_back(detail::guarded("least squares: Newton hessian = Gauss-Newton hessian", 1e-12, [&] {
      double worst = 0;
      for (const auto& z : pts) {
        worst = std::max(worst, max_abs(CMatrix(newton_hessian(lsq, z) - gauss_newton_hessian(lsq, z))));
      }
      return worst;
    }));
    lines.push_back(detail::guarded("least squares: P(G^H W G) matches the closed-form hessian", 1e-12, [&] {
      return max_abs(CMatrix(gauss_newton_hessian(lsq, pts[0]) - to_block_matrix(example1_hessian(p))));
    }));
    lines.push_back(detail::guarded("loss cogradient (dl/dc)^H admissible", 1e-12, [&] {
      double worst = 0;
      for (const auto& z : pts) worst = std::max(worst, vector_admissibility_residual(loss_cogradient(lsq, z).col));
      return worst;
    }));
    if (example1_identifiable(p)) {
      lines.push_back(detail::guarded("stationarity at closed-form estimate", 1e-10, [&] {
        CVector z(1);
        z(0) = example1_closed_form(p);
        return stationarity_residual(f, z);
      }));
    } else {
      lines.push_back({"closed-form estimate", true, 0.0, 0.0, "skipped: |alpha| = |beta|, not identifiable"});
    }
    // Holomorphy of the model map is reported, not judged.
    const HolomorphyReport h = is_holomorphic(example1_model_map(p, 1), pts[0]);
    lines.push_back({std::string("holomorphy of g = alpha z + beta conj(z): ") +
                         (h.holomorphic ? "holomorphic" : "nonholomorphic"),
                     true, h.max_residual, kHolomorphyTolAnalytic, "informational"});
  } else if (cfg.problem == "custom-polynomial") {
    const PolynomialMap map = make_polynomial(*cfg.polynomial);
    const LsqProblem lsq(map.as_field(), cfg.polynomial->data);
    const ScalarField f = loss_field(lsq);
    std::vector<CVector> pts;
    for (int i = 0; i < 3; ++i) {
      CVector z(map.dim());
      for (Index k = 0; k < z.size(); ++k) z(k) = Complex(nd(rng), nd(rng));
      pts.push_back(z);
    }
    lines.push_back(detail::guarded("jacobian pair analytic vs finite difference", 1e-6, [&] {
      double worst = 0;
      for (const auto& z : pts) {
        const JacobianPair a = map.jacobians(z);
        const JacobianPair d = jacobians_fd(map.as_field_fd(), z);
        worst = std::max(worst, detail::relative(std::max(max_abs(CMatrix(a.jac - d.jac)),
                                                          max_abs(CMatrix(a.conj_jac - d.conj_jac))),
                                                 std::max(max_abs(a.jac), max_abs(a.conj_jac))));
      }
      return worst;
    }));
    lines.push_back(detail::guarded("loss cogradient (dl/dc)^H admissible", 1e-10, [&] {
      double worst = 0;
      for (const auto& z : pts) worst = std::max(worst, vector_admissibility_residual(loss_cogradient(lsq, z).col));
      return worst;
    }));
    lines.push_back(detail::guarded("Newton hessian vs finite-difference hessian of the loss", 1e-4, [&] {
      double worst = 0;
      for (const auto& z : pts) {
        const CMatrix a = newton_hessian(lsq, z);
        const CMatrix d = to_block_matrix(hessian_quad(f, z));
        worst = std::max(worst, detail::relative(max_abs(CMatrix(a - d)), max_abs(a)));
      }
      return worst;
    }));
    lines.push_back(detail::guarded("Gauss-Newton hessian positive semidefinite", 1e-10, [&] {
      double worst = 0;
      for (const auto& z : pts) {
        const CMatrix h = gauss_newton_hessian(lsq, z);
        const RVector ev = Eigen::SelfAdjointEigenSolver<CMatrix>(h, Eigen::EigenvaluesOnly).eigenvalues();
        worst = std::max(worst, std::max(0.0, -ev.minCoeff()));
      }
      return worst;
    }));
    const HolomorphyReport h = is_holomorphic(map.as_field(), pts[0]);
    lines.push_back({std::string("holomorphy of g: ") + (h.holomorphic ? "holomorphic" : "nonholomorphic"), true,
                     h.max_residual, kHolomorphyTolAnalytic, "informational"});
  } else {
    throw ConfigError("problem: check supports example1, example2 and custom-polynomial");
  }
  return lines;
}

inline int cmd_check(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    cfg.validate();
    const auto lines = run_checks(cfg);
    bool ok = true;
    std::ostringstream report = classic_stream();
    for (const auto& l : lines) {
      ok = ok && l.pass;
      report << format_check(l) << '\n';
    }
    if (!cfg.trace_path.empty()) write_text(cfg.trace_path, report.str());
    if (!cfg.quiet) out << report.str();
    out << (ok ? "all checks passed" : "some checks FAILED") << '\n';
    return ok ? kExitOk : kExitNotConverged;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

// ---------------------------------------------------------------------------
// lms

inline int cmd_lms(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  try {
    // a_true with unit-variance circular entries drawn from the same seed.
    std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
    CVector a_true(cfg.lms_n);
    for (Index i = 0; i < cfg.lms_n; ++i) a_true(i) = Complex(nd(rng), nd(rng));
    const SignalModel m =
        SignalModel::from_true_parameter(CMatrix::Identity(cfg.lms_n, cfg.lms_n), a_true, cfg.lms_noise, cfg.seed);
    const LmsSimulation sim = simulate(m, cfg.lms_steps, cfg.lms_step);
    if (!cfg.trace_path.empty()) write_text(cfg.trace_path, lms_trace_csv(sim.trace));
    if (!cfg.quiet) {
      for (Index i = 0; i < cfg.lms_n; ++i) {
        out << "wiener[" << i << "]: " << format_complex(sim.wiener(i)) << "  estimate[" << i
            << "]: " << format_complex(sim.a_hat(i)) << '\n';
      }
      out << "misalignment: " << format_double(sim.final_misalignment) << '\n';
    }
    return kExitOk;
  } catch (const Diverged& e) {
    err << "Diverged: " << e.what() << '\n';
    return kExitFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace crcalc::cli
