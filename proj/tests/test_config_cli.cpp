#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ehdg/config.hpp"
#include "ehdg/errors.hpp"
#include "ehdg/experiments.hpp"

using namespace ehdg;
namespace fs = std::filesystem;

namespace {

const std::string kPlanewave = R"({
  "experiment": "planewave",
  "dim": 2,
  "mesh": {"kind": "box", "n": [2, 4]},
  "material": {"kind": "iso", "rho": 1.0, "lambda": 2.0, "mu": 1.0},
  "frequencies": [0.5],
  "orders": [1, 2],
  "stabilizations": [{"family": "godunov"}, {"family": "identity_imag", "tau": 1.0}],
  "waves": [{"kind": "P", "direction": [0.6, 0.8]}],
  "grid": {"n": 15}
})";

std::string config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

// kPlanewave with one top-level key replaced.
std::string with(const std::string& key, const std::string& value) {
  std::string s = kPlanewave;
  const auto k = s.find("\"" + key + "\"");
  if (k == std::string::npos) return s.substr(0, s.size() - 1) + ",\"" + key + "\": " + value + "}";
  const auto start = s.find(':', k) + 1;
  int depth = 0;
  std::size_t end = start;
  for (; end < s.size(); ++end) {
    const char c = s[end];
    if (c == '[' || c == '{') ++depth;
    if (c == ']' || c == '}') {
      if (depth == 0) break;
      --depth;
    }
    if (c == ',' && depth == 0) break;
  }
  return s.substr(0, start) + " " + value + s.substr(end);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(EHDG_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ehdg_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST(Config, ParsesPlanewaveWithDefaults) {
  const ExperimentConfig c = parse_config(kPlanewave, "/base");
  EXPECT_EQ(c.kind, ExperimentKind::Planewave);
  EXPECT_EQ(c.dim, 2);
  EXPECT_EQ(c.mesh.n, (std::vector<int>{2, 4}));
  EXPECT_EQ(c.mesh.lo, (std::vector<double>{0, 0}));
  EXPECT_EQ(c.orders, (std::vector<int>{1, 2}));
  ASSERT_EQ(c.stabilizations.size(), 2u);
  EXPECT_EQ(c.stabilizations[1].family, StabFamily::IdentityImag);
  EXPECT_EQ(c.stabilizations[1].tau, cplx(1.0, 0.0));
  EXPECT_EQ(c.grid.n, (std::vector<int>{15, 15}));
  EXPECT_DOUBLE_EQ(c.grid.boundary_margin, 0.05);
  EXPECT_EQ(c.output_dir, "/base/output");
  EXPECT_EQ(c.sweep.families.size(), 6u);
  EXPECT_EQ(c.material.kind, MaterialKind::Iso);
  EXPECT_TRUE(c.material.has_lame);
}

TEST(Config, RejectsMalformedInput) {
  EXPECT_NE(config_error("{not json").find("invalid JSON"), std::string::npos);
  EXPECT_NE(config_error("[1, 2]").find("object"), std::string::npos);
  EXPECT_NE(config_error("{}").find("'experiment'"), std::string::npos);
  EXPECT_NE(config_error(with("experiment", "\"bogus\"")).find("bogus"), std::string::npos);
  EXPECT_NE(config_error(with("dim", "4")).find("'dim'"), std::string::npos);
  EXPECT_NE(config_error(with("orders", "[]")).find("'orders'"), std::string::npos);
  EXPECT_NE(config_error(with("orders", "[0]")).find("'orders'"), std::string::npos);
  EXPECT_NE(config_error(with("frequencies", "[-1]")).find("'frequencies'"), std::string::npos);
  EXPECT_NE(config_error(with("frequencies", "\"x\"")).find("'frequencies'"), std::string::npos);
  EXPECT_NE(config_error(with("waves", "[]")).find("'waves'"), std::string::npos);
  EXPECT_NE(config_error(with("waves", R"([{"kind": "P", "direction": [1, 0, 0]}])")).find("direction"),
            std::string::npos);
  EXPECT_NE(config_error(with("grid", R"({"n": [3, 4, 5]})")).find("'grid.n'"), std::string::npos);
  EXPECT_NE(config_error(with("sweep", R"({"points": 0})")).find("empty"), std::string::npos);
  EXPECT_FALSE(config_error(with("stabilizations", R"([{"family": "kc", "sign": "plus"}])")).empty());
  EXPECT_FALSE(config_error(with("stabilizations", R"([{"family": "identity_real", "tau": 0}])")).empty());
  EXPECT_FALSE(config_error(with("stabilizations", R"([{"family": "magic"}])")).empty());
  EXPECT_FALSE(config_error(with("experiment", "\"self_convergence\"")).empty());
  EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(Config, MaterialAndStabilizationSnippets) {
  const MaterialSpec m = parse_material(R"({"kind": "tti", "vp0": 2, "vs0": 1, "epsilon": 0.25,
                                            "delta": 0.15, "theta_deg": 45})");
  EXPECT_EQ(m.kind, MaterialKind::Tti);
  EXPECT_DOUBLE_EQ(m.vp, 2.0);
  EXPECT_DOUBLE_EQ(m.theta_deg, 45.0);
  const StabilizationSpec s = parse_stabilization(R"({"family": "kc", "tau": "auto"})");
  EXPECT_EQ(s.family, StabFamily::KC);
  EXPECT_TRUE(s.tau_auto);
  EXPECT_THROW(parse_stabilization(R"({"family": "identity_real", "tau": "auto"})"), ConfigError);
}

TEST(Config, Fnv1aKnownValues) {
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a("foobar"), 0x85944171f73967e8ULL);
}

TEST(TauGrid, LogSpacedAndCentered) {
  TauSweepConfig s;
  s.points = 25;
  s.decades = 6.0;
  const auto g = tau_grid(s, 1.0);
  ASSERT_EQ(g.size(), 25u);
  EXPECT_DOUBLE_EQ(g[12], 1.0);
  EXPECT_NEAR(g.front(), 1e-3, 1e-15);
  EXPECT_NEAR(g.back(), 1e3, 1e-9);
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_NEAR(g[i] / g[i - 1], std::pow(10.0, 0.25), 1e-12);
}

TEST(Cli, SolveIsDeterministic) {
  const fs::path dir = scratch("determinism");
  std::ofstream(dir / "cfg.json") << kPlanewave;
  ASSERT_EQ(run_cli("solve " + (dir / "cfg.json").string() + " -o " + (dir / "a").string()), 0);
  ASSERT_EQ(run_cli("solve " + (dir / "cfg.json").string() + " -o " + (dir / "b").string() + " -t 3"), 0);
  const std::string a = slurp(dir / "a" / "results.csv");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(dir / "b" / "results.csv"));
  // 2 meshes x 2 orders x 2 stabilizations, plus the header.
  EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 9);
  EXPECT_TRUE(fs::exists(dir / "a" / "manifest.json"));
  fs::remove_all(dir);
}

TEST(Cli, ExitCodes) {
  const fs::path dir = scratch("exit_codes");
  std::ofstream(dir / "bad.json") << with("dim", "4");
  std::ofstream(dir / "sweep.json") << with("experiment", "\"tau_sweep\"");
  EXPECT_EQ(run_cli("solve " + (dir / "bad.json").string()), 2);
  // A sweep config handed to the solve subcommand.
  EXPECT_EQ(run_cli("solve " + (dir / "sweep.json").string() + " -o " + (dir / "x").string()), 2);
  EXPECT_NE(run_cli("solve " + (dir / "missing.json").string()), 0);
  EXPECT_NE(run_cli("frobnicate"), 0);
  std::ofstream(dir / "broken.mesh") << "2 3 1 0\n0 0\n1 0\n0 1\n1 2 9\n";
  EXPECT_EQ(run_cli("mesh import " + (dir / "broken.mesh").string()), 2);
  EXPECT_EQ(run_cli("mesh gen box -n 2 -o " + (dir / "box.mesh").string()), 0);
  EXPECT_EQ(run_cli("mesh import " + (dir / "box.mesh").string()), 0);
  fs::remove_all(dir);
}
