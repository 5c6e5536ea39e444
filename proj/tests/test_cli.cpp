#include <clocale>
#include <filesystem>
#include <fstream>
#include <locale>
#include <sstream>

#include <gtest/gtest.h>

#include "cli_app.hpp"

using namespace crcalc;
using namespace crcalc::cli;

namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("crcalc_test_" + name);
}

int run(int (*cmd)(const RunConfig&, std::ostream&, std::ostream&), const RunConfig& cfg, std::string* out = nullptr,
        std::string* err = nullptr) {
  std::ostringstream o, e;
  const int rc = cmd(cfg, o, e);
  if (out) *out = o.str();
  if (err) *err = e.str();
  return rc;
}

}  // namespace

TEST(Parse, Complex) {
  EXPECT_EQ(parse_complex("1+2j"), Complex(1, 2));
  EXPECT_EQ(parse_complex("1-2j"), Complex(1, -2));
  EXPECT_EQ(parse_complex("-0.5"), Complex(-0.5, 0));
  EXPECT_EQ(parse_complex("3j"), Complex(0, 3));
  EXPECT_EQ(parse_complex("-j"), Complex(0, -1));
  EXPECT_EQ(parse_complex("1e-3+2.5e2j"), Complex(1e-3, 250));
  EXPECT_EQ(parse_complex(" 1 + 1i "), Complex(1, 1));
  EXPECT_FALSE(parse_complex("abc"));
  EXPECT_FALSE(parse_complex(""));
  EXPECT_FALSE(parse_complex("1+2k"));
}

TEST(Format, SeventeenDigitsRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.123456789}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_complex(Complex(1, -0.5)), "1-0.5j");
}

TEST(Format, LocaleIndependent) {
  const char* prev = std::setlocale(LC_NUMERIC, nullptr);
  const std::string saved = prev ? prev : "C";
  if (std::setlocale(LC_NUMERIC, "de_DE.UTF-8") == nullptr) GTEST_SKIP() << "locale not installed";
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(parse_complex("0.5+1.5j"), Complex(0.5, 1.5));
  std::setlocale(LC_NUMERIC, saved.c_str());
}

struct CommaDecimal : std::numpunct<char> {
  char do_decimal_point() const override { return ','; }
  char do_thousands_sep() const override { return '.'; }
  std::string do_grouping() const override { return "\3"; }
};

TEST(Format, IgnoresGlobalCppLocale) {
  const std::locale saved = std::locale::global(std::locale(std::locale::classic(), new CommaDecimal));
  EXPECT_EQ(format_double(1234.5), "1234.5");
  EXPECT_EQ(format_complex(Complex(0.25, -1500)), "0.25-1500j");
  EXPECT_EQ(parse_complex("1234.5-0.5j"), Complex(1234.5, -0.5));
  std::vector<LmsTraceRow> rows(1);
  rows[0].step = 1200;
  rows[0].misalignment = 0.5;
  EXPECT_EQ(lms_trace_csv(rows), "step,err2_smoothed,misalignment\n1200,0,0.5\n");
  std::locale::global(saved);
}

TEST(Config, AppliesKnownKeys) {
  RunConfig cfg;
  apply_json(cfg, json::parse(R"({
    "problem": "example2", "algorithm": "quasi-newton",
    "optimizer": {"step": 0.5, "max_iters": 7, "backtracking": "armijo", "damping": 0.1},
    "params": {"alpha": "2-1j", "beta": 0.5, "seed": 9, "z0": "1+1j"},
    "output": {"trace": "t.csv"}})"));
  EXPECT_EQ(cfg.problem, "example2");
  EXPECT_EQ(cfg.algorithm, QKind::quasi_newton);
  EXPECT_EQ(cfg.step, 0.5);
  EXPECT_EQ(cfg.max_iters, 7);
  EXPECT_TRUE(cfg.armijo);
  EXPECT_EQ(cfg.alpha, Complex(2, -1));
  EXPECT_EQ(cfg.beta, Complex(0.5, 0));
  EXPECT_EQ(cfg.seed, 9u);
  EXPECT_EQ((*cfg.z0)(0), Complex(1, 1));
  EXPECT_EQ(cfg.trace_path, "t.csv");
}

TEST(Config, RejectsUnknownAndBadValues) {
  RunConfig cfg;
  try {
    apply_json(cfg, json::parse(R"({"params": {"alpah": 1}})"));
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("params.alpah"), std::string::npos);
  }
  EXPECT_THROW(apply_json(cfg, json::parse(R"({"colour": 1})")), ConfigError);
  EXPECT_THROW(apply_json(cfg, json::parse(R"({"algorithm": "bfgs"})")), ConfigError);
  EXPECT_THROW(apply_json(cfg, json::parse(R"({"params": {"alpha": "x"}})")), ConfigError);
  EXPECT_THROW(apply_json(cfg, json::parse(R"({"optimizer": {"max_iters": 1.5}})")), ConfigError);
  RunConfig bad;
  bad.problem = "nope";
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Config, ParseErrorHasLineInfo) {
  const auto path = temp_path("bad.json");
  std::ofstream(path) << "{\n  \"problem\": \"example1\",\n  oops\n}\n";
  RunConfig cfg;
  try {
    load_config_file(cfg, path.string());
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  EXPECT_THROW(load_config_file(cfg, "/nonexistent/cfg.json"), ConfigError);
}

TEST(Config, Polynomial) {
  RunConfig cfg;
  apply_json(cfg, json::parse(R"({"problem": "custom-polynomial", "params": {"polynomial": {
    "dim": 1, "components": [[{"coef": "1", "z": [2]}], [{"coef": "0.5j", "z": [1], "zbar": [1]}]],
    "data": ["1+1j", "0.2"]}}})"));
  ASSERT_TRUE(cfg.polynomial);
  EXPECT_EQ(cfg.polynomial->components.size(), 2u);
  EXPECT_THROW(apply_json(cfg, json::parse(R"({"params": {"polynomial": {"dim": 1,
    "components": [[{"coef": 1, "z": [1, 2]}]], "data": [1]}}})")),
               ConfigError);
  EXPECT_THROW(apply_json(cfg, json::parse(R"({"params": {"polynomial": {"dim": 1,
    "components": [[{"coef": 1}]], "data": [1, 2]}}})")),
               ConfigError);
}

TEST(Optimize, NewtonOneIteration) {
  RunConfig cfg;
  std::string out;
  EXPECT_EQ(run(cmd_optimize, cfg, &out), kExitOk);
  EXPECT_NE(out.find("iterations: 1\n"), std::string::npos);
  EXPECT_NE(out.find("hessian: local_min"), std::string::npos);
}

TEST(Optimize, IdentitySmallStepSameOptimum) {
  RunConfig cfg;
  cfg.algorithm = QKind::identity;
  cfg.step = 0.05;
  const auto path = temp_path("identity.csv");
  cfg.trace_path = path.string();
  EXPECT_EQ(run(cmd_optimize, cfg), kExitOk);
  const std::string csv = read_file(path);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "iter,loss,grad_norm,step_norm,step_length,q_condition,q_positive_definite,gradient_fallback,z0.re,z0.im");
  const Example1Problem p = make_example1(cfg);
  const Complex opt = example1_closed_form(p);
  // Last row holds the final iterate.
  const std::string last = csv.substr(csv.rfind('\n', csv.size() - 2) + 1);
  std::vector<std::string> cols;
  std::stringstream ss(last);
  for (std::string c; std::getline(ss, c, ',');) cols.push_back(c);
  ASSERT_EQ(cols.size(), 10u);
  EXPECT_LT(std::abs(Complex(std::stod(cols[8]), std::stod(cols[9])) - opt), 1e-7);
}

TEST(Optimize, ExitCodes) {
  RunConfig un;
  un.alpha = 1.0;
  un.beta = 1.0;
  std::string err;
  EXPECT_EQ(run(cmd_optimize, un, nullptr, &err), kExitFailure);
  EXPECT_NE(err.find("Unidentifiable"), std::string::npos);

  RunConfig slow;
  slow.algorithm = QKind::identity;
  slow.step = 1e-3;
  slow.max_iters = 5;
  EXPECT_EQ(run(cmd_optimize, slow), kExitNotConverged);

  RunConfig div;
  div.algorithm = QKind::identity;
  div.step = 100;
  EXPECT_EQ(run(cmd_optimize, div, nullptr, &err), kExitFailure);
  EXPECT_NE(err.find("Diverged"), std::string::npos);

  RunConfig bad;
  bad.grad_tol = -1;
  EXPECT_EQ(run(cmd_optimize, bad), kExitConfig);
  RunConfig lms;
  lms.problem = "lms";
  EXPECT_EQ(run(cmd_optimize, lms), kExitConfig);
}

TEST(Optimize, AllAlgorithmsConverge) {
  for (QKind k : {QKind::identity, QKind::newton, QKind::quasi_newton, QKind::gauss_newton,
                  QKind::quasi_gauss_newton}) {
    for (const char* problem : {"example1", "example2"}) {
      RunConfig cfg;
      cfg.problem = problem;
      cfg.algorithm = k;
      EXPECT_EQ(run(cmd_optimize, cfg), kExitOk) << to_string(k) << " " << problem;
    }
  }
}

TEST(Optimize, CustomPolynomial) {
  RunConfig cfg;
  apply_json(cfg, json::parse(R"({"problem": "custom-polynomial", "algorithm": "gauss-newton",
    "optimizer": {"backtracking": "armijo"},
    "params": {"z0": ["0.5+0.5j"], "polynomial": {
    "dim": 1, "components": [[{"coef": "1", "z": [1]}, {"coef": "0.2", "zbar": [1]}],
                             [{"coef": "1", "z": [2]}]],
    "data": ["1+0.5j", "0.6+1j"]}}})"));
  std::string out;
  const int rc = run(cmd_optimize, cfg, &out);
  EXPECT_TRUE(rc == kExitOk || rc == kExitNotConverged) << out;
}

TEST(Optimize, DeterministicTrace) {
  RunConfig cfg;
  cfg.algorithm = QKind::quasi_newton;
  cfg.seed = 5;
  const auto a = temp_path("det_a.csv"), b = temp_path("det_b.csv");
  cfg.trace_path = a.string();
  run(cmd_optimize, cfg);
  cfg.trace_path = b.string();
  run(cmd_optimize, cfg);
  EXPECT_EQ(read_file(a), read_file(b));
  EXPECT_FALSE(read_file(a).empty());
}

TEST(Check, PassesAndCorruptionFails) {
  RunConfig cfg;
  std::string out;
  EXPECT_EQ(run(cmd_check, cfg, &out), kExitOk);
  EXPECT_EQ(out.find("FAIL"), std::string::npos);
  EXPECT_NE(out.find("nonholomorphic"), std::string::npos);

  cfg.corrupt_gradient = true;
  EXPECT_NE(run(cmd_check, cfg, &out), kExitOk);
  EXPECT_NE(out.find("ConjugationMismatch"), std::string::npos);
}

TEST(Check, HolomorphyReportFollowsBeta) {
  RunConfig cfg;
  cfg.beta = 0.0;
  std::string out;
  EXPECT_EQ(run(cmd_check, cfg, &out), kExitOk);
  EXPECT_NE(out.find("conj(z): holomorphic"), std::string::npos);
}

TEST(Check, UnidentifiableSkipsClosedForm) {
  RunConfig cfg;
  cfg.alpha = 1.0;
  cfg.beta = 1.0;
  std::string out;
  EXPECT_EQ(run(cmd_check, cfg, &out), kExitOk);
  EXPECT_NE(out.find("skipped"), std::string::npos);
}

TEST(Check, CustomPolynomial) {
  RunConfig cfg;
  apply_json(cfg, json::parse(R"({"problem": "custom-polynomial", "params": {"polynomial": {
    "dim": 2, "components": [[{"coef": "1", "z": [1, 1]}, {"coef": "0.3j", "z": [0, 0], "zbar": [2, 0]}],
                             [{"coef": "1-1j", "z": [0, 1], "zbar": [1, 0]}]],
    "data": ["1+0.5j", "0.6+1j"]}}})"));
  std::string out;
  EXPECT_EQ(run(cmd_check, cfg, &out), kExitOk) << out;
  RunConfig lms;
  lms.problem = "lms";
  EXPECT_EQ(run(cmd_check, lms), kExitConfig);
}

TEST(Lms, RunsAndWritesTrace) {
  RunConfig cfg;
  const auto path = temp_path("lms.csv");
  cfg.trace_path = path.string();
  std::string out;
  EXPECT_EQ(run(cmd_lms, cfg, &out), kExitOk);
  EXPECT_NE(out.find("wiener[0]"), std::string::npos);
  const std::string csv = read_file(path);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "step,err2_smoothed,misalignment");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5002);
}

TEST(Lms, ZeroStepsAndDivergence) {
  RunConfig cfg;
  cfg.lms_steps = 0;
  const auto path = temp_path("lms0.csv");
  cfg.trace_path = path.string();
  EXPECT_EQ(run(cmd_lms, cfg), kExitOk);
  const std::string csv = read_file(path);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
  RunConfig div;
  div.lms_step = 3.0;  // 1.5 x 2 / lambda_max(I)
  std::string err;
  EXPECT_EQ(run(cmd_lms, div, nullptr, &err), kExitFailure);
  EXPECT_NE(err.find("Diverged"), std::string::npos);
  RunConfig bad;
  bad.lms_n = 0;
  EXPECT_EQ(run(cmd_lms, bad), kExitConfig);
}
