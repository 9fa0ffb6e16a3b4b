#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sosbm/experiment.hpp"

using namespace sosbm;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("sosbm_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args) {
  const int status = std::system((std::string(SOSBM_CLI_PATH) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Config, KeyValue) {
  const auto c = parse_config(
      "# comment\nrho = 0.5\nbeta=-0.2\nsigma_plus = 2\nn_ladder = 10, 100,1e3\nu = sqrt, log, power:0.3\n"
      "paths = 7\nseed = 18446744073709551615\ng = indicator_pos\n");
  EXPECT_EQ(c.params.rho, 0.5);
  EXPECT_EQ(c.params.beta, -0.2);
  EXPECT_EQ(c.params.sigma_plus, 2.0);
  EXPECT_EQ(c.n_ladder, (std::vector<long>{10, 100, 1000}));
  ASSERT_EQ(c.u.size(), 3u);
  EXPECT_EQ(c.u[2].name(), "power:0.3");
  EXPECT_EQ(c.paths, 7);
  EXPECT_EQ(c.seed, 18446744073709551615ull);
  EXPECT_EQ(c.g, "indicator_pos");
}

TEST(Config, JsonEquivalent) {
  const auto a = parse_config("rho = 0.5\nn_ladder = 10, 100\nu = log\nseed = 3\n");
  const auto b = parse_config(R"({"rho": 0.5, "n_ladder": [10, 100], "u": "log", "seed": 3})");
  EXPECT_EQ(a.params.rho, b.params.rho);
  EXPECT_EQ(a.n_ladder, b.n_ladder);
  EXPECT_EQ(a.u[0].name(), b.u[0].name());
  EXPECT_EQ(a.seed, b.seed);
}

TEST(Config, FieldLevelErrors) {
  auto field_of = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return e.field();
    }
    return std::string("<none>");
  };
  EXPECT_EQ(field_of("rho = abc\n"), "rho");
  EXPECT_EQ(field_of("n_ladder = 100, 10\n"), "n_ladder");
  EXPECT_EQ(field_of("n_ladder = 10, 15\n"), "n_ladder");  // 10 does not divide 15
  EXPECT_EQ(field_of("paths = 0\n"), "paths");
  EXPECT_EQ(field_of("u = cube\n"), "u");
  EXPECT_EQ(field_of("colour = red\n"), "colour");
  EXPECT_EQ(field_of("g = nope\n"), "g");
  EXPECT_EQ(field_of("beta = 1\n"), "beta");
  EXPECT_EQ(field_of("seed = -1\n"), "seed");
  EXPECT_NE(field_of("rho = -1\n"), "<none>");
  EXPECT_THROW(parse_config("{\"rho\": }"), ConfigError);
  EXPECT_THROW(parse_config("rho 1\n"), ConfigError);
}

TEST(PathIo, RoundTrip) {
  RngStream rng(9, 4);
  const auto path = simulate_path(SosBmParams{1, 0.3, 0.5, 2}, 0.25, 50, 1.0, rng);
  std::stringstream ss;
  write_path_csv(ss, path);
  const auto back = read_path_csv(ss, "mem");
  EXPECT_EQ(back.values, path.values);
  EXPECT_EQ(back.n, 50);
  EXPECT_EQ(back.params.sigma_minus, 0.5);
  EXPECT_EQ(back.params.beta, 0.3);
  EXPECT_EQ(back.seed, 9u);
  EXPECT_EQ(back.stream, 4u);
}

TEST(PathIo, SchemaErrorsNameTheLine) {
  std::istringstream bad("# n=2\ni,t,x\n0,0,0\n1,0.5,abc\n2,1,0\n");
  try {
    read_path_csv(bad, "bad.csv");
    FAIL() << "expected a schema error";
  } catch (const PathSchemaError& e) {
    EXPECT_EQ(e.line(), 4);
    EXPECT_NE(std::string(e.what()).find("bad.csv"), std::string::npos);
  }
  std::istringstream header("a,b,c\n0,0,0\n");
  EXPECT_THROW(read_path_csv(header, "h"), PathSchemaError);
  std::istringstream gap("i,t,x\n0,0,0\n2,0.5,1\n");
  EXPECT_THROW(read_path_csv(gap, "g"), PathSchemaError);
}

TEST(PathIo, InfersGridFromTimes) {
  std::istringstream in("i,t,x\n0,0,0\n1,0.25,0.1\n2,0.5,-0.3\n");
  const auto p = read_path_csv(in, "external");
  EXPECT_EQ(p.n, 4);
  EXPECT_EQ(p.values.size(), 3u);
}

TEST(Cli, SimulateIsDeterministic) {
  const auto dir = scratch("sim");
  std::ofstream(dir / "c.cfg") << "rho = 1\nbeta = 0.2\nn = 10\npaths = 2\nseed = 77\n";
  const std::string cfg = "--config " + (dir / "c.cfg").string();
  ASSERT_EQ(run_cli("simulate " + cfg + " --no-timestamp --out " + (dir / "a").string()), 0);
  ASSERT_EQ(run_cli("simulate " + cfg + " --no-timestamp --jobs 1 --out " + (dir / "b").string()), 0);
  for (const char* f : {"manifest.csv", "path_00000.csv", "path_00001.csv"})
    EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
  std::istringstream in(slurp(dir / "a" / "path_00000.csv"));
  std::string line;
  int rows = 0;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#' && line != "i,t,x") ++rows;
  EXPECT_EQ(rows, 11);
  ASSERT_EQ(run_cli("simulate " + cfg + " --out " + (dir / "c").string()), 0);
  EXPECT_NE(slurp(dir / "c" / "manifest.csv").find("# generated="), std::string::npos);
}

TEST(Cli, StickyPathsVisitZero) {
  ExperimentConfig c = parse_config("rho = 1\nn = 10\npaths = 100\nseed = 5\n");
  c.out = scratch("zeros").string();
  std::ostringstream log;
  ASSERT_EQ(run_simulate(c, {false, &log}), 0);
  long zeros = 0;
  for (int i = 0; i < 100; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "path_%05d.csv", i);
    std::ifstream in(fs::path(c.out) / name);
    const auto p = read_path_csv(in, name);
    for (std::size_t k = 1; k < p.values.size(); ++k) zeros += p.values[k] == 0.0;
  }
  EXPECT_GT(zeros, 0);
}

TEST(Cli, ExitCodes) {
  const auto dir = scratch("codes");
  std::ofstream(dir / "bad.cfg") << "rho = banana\n";
  EXPECT_EQ(run_cli("simulate --config " + (dir / "bad.cfg").string()), 2);
  EXPECT_EQ(run_cli("frobnicate"), 2);
  EXPECT_EQ(run_cli("estimate " + (dir / "missing.csv").string() + " --joint"), 2);
  std::ofstream(dir / "nonnum.csv") << "i,t,x\n0,0,0\n1,1,oops\n";
  EXPECT_EQ(run_cli("estimate " + (dir / "nonnum.csv").string() + " --joint"), 2);
  std::ofstream(dir / "ok.cfg") << "rho = 0.5\nscaling_c = 1\n";
  EXPECT_EQ(run_cli("verify --scope scaling --no-timestamp --config " + (dir / "ok.cfg").string() + " --out " +
                    (dir / "v").string()),
            0);
  EXPECT_TRUE(fs::exists(dir / "v" / "verify_scaling.csv"));
}

TEST(Cli, EstimateStandardBrownianCsv) {
  // An external file: plain Gaussian random walk written by hand.
  const auto dir = scratch("est");
  std::mt19937_64 rng(1);
  std::normal_distribution<double> z(0.0, 1.0);
  const int n = 20000;
  {
    std::ofstream os(dir / "bm.csv");
    os << "i,t,x\n";
    double x = 0.0;
    for (int i = 0; i <= n; ++i) {
      os << i << ',' << format_double(static_cast<double>(i) / n) << ',' << format_double(x) << '\n';
      x += z(rng) / std::sqrt(static_cast<double>(n));
    }
  }
  std::ostringstream out;
  ASSERT_EQ(run_estimate((dir / "bm.csv").string(), EstimateOptions{std::nullopt, std::nullopt, true}, out), 0);
  std::istringstream in(out.str());
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  std::vector<std::string> cells;
  std::stringstream rs(row);
  for (std::string cell; std::getline(rs, cell, ',');) cells.push_back(cell);
  // rho_hat, beta_hat, sigma_minus_hat, sigma_plus_hat at columns 5..8
  EXPECT_LT(std::stod(cells[5]), 0.05);
  EXPECT_NEAR(std::stod(cells[7]), 1.0, 0.05);
  EXPECT_NEAR(std::stod(cells[8]), 1.0, 0.05);
  EXPECT_THROW(run_estimate((dir / "bm.csv").string(), EstimateOptions{}, out), ConfigError);
}

TEST(Cli, ConstantZeroPath) {
  const auto dir = scratch("zero");
  std::ofstream(dir / "z.csv") << "# rho=1\ni,t,x\n0,0,0\n1,0.5,0\n2,1,0\n";
  std::ostringstream out;
  ASSERT_EQ(run_estimate((dir / "z.csv").string(), EstimateOptions{1.0, 1.0, false}, out), 0);
  EXPECT_NE(out.str().find(",,"), std::string::npos);
  EXPECT_NE(out.str().find("vanish"), std::string::npos);
}

TEST(Convergence, SmallRunAndNegativeControl) {
  ExperimentConfig c = parse_config("rho = 1\nbeta = 0.5\nn_ladder = 100, 1000\npaths = 40\nseed = 3\n");
  const auto r = compute_convergence(c);
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_EQ(r.reference, "local_time");
  EXPECT_GT(r.paths_hitting_zero, 30);
  EXPECT_FALSE(r.estimators.empty());

  c.g = "gauss_full";
  const auto neg = compute_convergence(c);
  EXPECT_TRUE(neg.negative_control);
  // with g(0) != 0 the sampled zeros contribute about u_n rho L, which grows
  // without bound
  EXPECT_GT(std::fabs(neg.rows.back().z_score), 2.0);

  c.g = "hat";
  c.params = SosBmParams{0.0, 0.3, 1.0, 1.0};
  c.reference = "local_time";
  EXPECT_THROW(compute_convergence(c), ConfigError);
  c.reference = "auto";
  EXPECT_EQ(compute_convergence(c).reference, "ghat");
}

TEST(Convergence, ConditioningStarved) {
  ExperimentConfig c = parse_config("rho = 1\nx = 30\nn_ladder = 10, 100\npaths = 20\nseed = 3\n");
  const auto r = compute_convergence(c);
  EXPECT_FALSE(r.passed());
  EXPECT_NE(r.failures.front().find("conditioning-starved"), std::string::npos);
}
