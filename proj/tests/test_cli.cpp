#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

const fs::path root = fs::temp_directory_path() / "subexp_cli_test";

struct Run {
  int code = -1;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

Run run(const std::string& args) {
  const auto err = root / "stderr.txt";
  const std::string cmd = std::string(SUBEXP_CLI) + " " + args + " > " + (root / "stdout.txt").string() + " 2> " +
                          err.string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(err)};
}

json load(const fs::path& p) { return json::parse(slurp(p)); }

void save(const fs::path& p, const json& j) { std::ofstream(p) << j.dump(); }

std::string system_file() { return (root / "ref" / "system.json").string(); }

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    fs::remove_all(root);
    fs::create_directories(root);
    build_status = run("build --a 1.0 --rho2 2.0 --out " + (root / "ref").string()).code;
  }
  static void TearDownTestSuite() { fs::remove_all(root); }
  static inline int build_status = -1;

  static fs::path fresh(const std::string& name) {
    const auto d = root / name;
    fs::create_directories(d);
    return d;
  }
};

}  // namespace

TEST_F(Cli, BuildReference) {
  ASSERT_EQ(build_status, 0);
  for (const char* f : {"system.json", "certificates.json", "psi.csv", "phi.csv", "build_report.json"})
    EXPECT_TRUE(fs::exists(root / "ref" / f)) << f;
  const auto rep = load(root / "ref" / "build_report.json");
  EXPECT_TRUE(rep["result"]["all_passed"].get<bool>());
  EXPECT_EQ(rep["system_digest"], load(system_file())["digest"]);
}

TEST_F(Cli, BuildRejectsWideBump) {
  const auto r = run("build --a 1.2 --out " + fresh("wide").string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("a < pi/3"), std::string::npos) << r.err;
}

TEST_F(Cli, BuildRejectsLowOrder) {
  const auto r = run("build --rho2 0.9 --out " + fresh("low").string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("rho2 > 1"), std::string::npos) << r.err;
}

TEST_F(Cli, VerifyReference) {
  const auto out = fresh("verify");
  EXPECT_EQ(run("verify --system " + system_file() + " --out " + out.string()).code, 0);
  const auto rep = load(out / "verify_report.json");
  EXPECT_TRUE(rep["result"]["all_passed"].get<bool>());
  EXPECT_TRUE(rep["result"]["stored_digest_matches"].get<bool>());
}

TEST_F(Cli, VerifyUnknownSuite) {
  EXPECT_EQ(run("verify --suite bogus --system " + system_file() + " --out " + fresh("bogus").string()).code, 2);
}

TEST_F(Cli, VerifyDetectsZeroedSpectrum) {
  auto j = load(system_file());
  const double origin = j["spectral_grid"]["origin"], step = j["spectral_grid"]["spacing"];
  const std::size_t n = j["spectral_grid"]["count"];
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = origin + step * static_cast<double>(i);
    if (xi >= 2.0 * M_PI && xi <= 8.0 * M_PI / 3.0) j["psi_hat"]["re"][i] = 0.0, j["psi_hat"]["im"][i] = 0.0;
  }
  const auto out = fresh("zeroed");
  save(out / "system.json", j);
  EXPECT_EQ(run("verify --suite shift-orthonormality --out " + out.string()).code, 1);
  const auto rep = load(out / "verify_report.json");
  EXPECT_FALSE(rep["result"]["checks"]["SHIFT-ORTHONORMALITY-PSI"]["passed"].get<bool>());
}

TEST_F(Cli, VerifyMalformedOrMissingFile) {
  const auto out = fresh("malformed");
  std::ofstream(out / "system.json") << "{\"format\": \"dhws-v1\", \"params\": ";
  EXPECT_EQ(run("verify --out " + out.string()).code, 3);
  EXPECT_EQ(run("verify --system " + (out / "absent.json").string() + " --out " + out.string()).code, 3);
}

TEST_F(Cli, DecayPsiFreeExponent) {
  const auto out = fresh("decay");
  ASSERT_EQ(run("decay --target psi --exponent free --system " + system_file() + " --out " + out.string()).code, 0);
  const auto rep = load(out / "decay_report.json");
  const double e = rep["result"]["fit"]["exponent"];
  EXPECT_GE(e, 0.40);
  EXPECT_LE(e, 0.60);
  EXPECT_TRUE(fs::exists(out / "decay.csv"));
}

TEST_F(Cli, ProjectGaussianMonotone) {
  const auto out = fresh("project");
  ASSERT_EQ(run("project --f gaussian --levels 0..6 --system " + system_file() + " --out " + out.string()).code, 0);
  const auto rep = load(out / "project_report.json");
  EXPECT_TRUE(rep["result"]["sup_error_monotone"].get<bool>());
  EXPECT_EQ(rep["result"]["rows"].size(), 7u);
  const auto csv = slurp(out / "project.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "m,sup_error,seminorm,boundary_mass,quadrature_error");
}

TEST_F(Cli, ExpandParsevalAtDefaultWindow) {
  const auto out = fresh("expand");
  ASSERT_EQ(run("expand --f gevrey-band:pi,2pi --window 6,32 --parseval --system " + system_file() + " --out " +
                out.string())
                .code,
            0);
  const auto r = load(out / "expand_report.json")["result"];
  EXPECT_LT(r["parseval"]["gap"].get<double>(), 1e-5);
  EXPECT_TRUE(r["bessel_holds"].get<bool>());
  EXPECT_GT(r["sequence"]["max_feasible_k"].get<double>(), 0.1);
}

TEST_F(Cli, ParsevalCommand) {
  const auto out = fresh("parseval");
  EXPECT_EQ(run("parseval --f gevrey-band:pi,2pi --window 2,8 --half-width 128 --spacing 1/64 --tolerance 1e-2 "
                "--system " + system_file() + " --out " + out.string())
                .code,
            0);
  EXPECT_TRUE(load(out / "parseval_report.json")["result"]["bessel_holds"].get<bool>());
}

TEST_F(Cli, ReportCollectsAndRejectsMalformed) {
  const auto out = fresh("report");
  const auto good = (root / "ref" / "build_report.json").string();
  EXPECT_EQ(run("report --system " + system_file() + " --include " + good + " --out " + out.string()).code, 0);
  EXPECT_TRUE(load(out / "report_report.json")["result"]["reports"][0]["same_system"].get<bool>());
  std::ofstream(out / "bad.json") << "[1, 2";
  EXPECT_EQ(run("report --system " + system_file() + " --include " + (out / "bad.json").string() + " --out " +
                out.string())
                .code,
            3);
}

TEST_F(Cli, ReportsAreDeterministic) {
  const auto a = fresh("det_a"), b = fresh("det_b");
  for (const auto& d : {a, b})
    ASSERT_EQ(run("decay --target kernel --system " + system_file() + " --out " + d.string()).code, 0);
  auto ja = load(a / "decay_report.json"), jb = load(b / "decay_report.json");
  ja.erase("metadata");
  jb.erase("metadata");
  EXPECT_EQ(ja.dump(), jb.dump());
  EXPECT_EQ(slurp(a / "decay.csv"), slurp(b / "decay.csv"));
}

TEST_F(Cli, ConfigFileAndOverrides) {
  const auto out = fresh("config");
  save(out / "cfg.json", json{{"schema_version", "1"}, {"target", "psi"}, {"range", "5,30"}, {"points", 481}});
  const std::string base = "decay --config " + (out / "cfg.json").string() + " --system " + system_file() + " --out " +
                           out.string();
  ASSERT_EQ(run(base).code, 0);
  auto p = load(out / "decay_report.json")["parameters"];
  EXPECT_EQ(p["target"], "psi");
  EXPECT_EQ(p["range"][1].get<double>(), 30.0);
  ASSERT_EQ(run(base + " --range 5,40").code, 0);
  p = load(out / "decay_report.json")["parameters"];
  EXPECT_EQ(p["range"][1].get<double>(), 40.0);

  save(out / "unknown.json", json{{"schema_version", "1"}, {"colour", "blue"}});
  EXPECT_EQ(run("decay --config " + (out / "unknown.json").string() + " --out " + out.string()).code, 2);
  save(out / "version.json", json{{"schema_version", "2"}});
  EXPECT_EQ(run("decay --config " + (out / "version.json").string() + " --out " + out.string()).code, 2);
  std::ofstream(out / "broken.json") << "{ nope";
  EXPECT_EQ(run("decay --config " + (out / "broken.json").string() + " --out " + out.string()).code, 2);
}
