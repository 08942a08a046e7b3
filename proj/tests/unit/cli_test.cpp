#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "orcurv/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = orc::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / ("orcurv_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name())) {
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name, const std::string& content) const {
    const auto p = path_ / name;
    std::ofstream(p) << content;
    return p.string();
  }
  std::string path(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

}  // namespace

TEST(Cli, Regimes) {
  const auto r = cli({"regimes", "--alpha", "0.16", "--beta", "0.16", "--scheme", "distance"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("weighted_equal_radii_ok=true\n"), std::string::npos);
  EXPECT_NE(r.out.find("density_class=sparse\n"), std::string::npos);
}

TEST(Cli, EmdTwoByTwo) {
  TempDir d;
  const auto c = d.file("c.csv", "0,1\n1,3\n");
  const auto a = d.file("a.csv", "0.5,0.5\n");
  const auto b = d.file("b.csv", "0.5\n0.5\n");
  const auto r = cli({"emd", "--cost", c, "--mu", a, "--nu", b});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "1.0\n");
  const auto p = cli({"emd", "--cost", c, "--mu", a, "--nu", b, "--plan"});
  EXPECT_EQ(p.out, "1.0\n0,0.5\n0.5,0\n");
}

TEST(Cli, EmdErrors) {
  TempDir d;
  const auto c = d.file("c.csv", "0,1\n1,3\n");
  const auto a = d.file("a.csv", "0.5,0.5\n");
  const auto bad = d.file("bad.csv", "0.5,zz\n");
  const auto heavy = d.file("heavy.csv", "0.5,0.7\n");
  EXPECT_EQ(cli({"emd", "--cost", c, "--mu", a, "--nu", bad}).code, 1);
  EXPECT_EQ(cli({"emd", "--cost", c, "--mu", a, "--nu", d.path("none.csv")}).code, 1);
  EXPECT_EQ(cli({"emd", "--cost", c, "--mu", a, "--nu", heavy}).code, 2);
}

TEST(Cli, SweepMissingConfig) {
  const auto r = cli({"sweep", "--config", "missing.toml"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("missing.toml"), std::string::npos);
}

TEST(Cli, SweepBadKeyIsUsageError) {
  TempDir d;
  const auto cfg = d.file("s.toml", "n_list = [256]\nbta = 0.1\n");
  const auto r = cli({"sweep", "--config", cfg});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("line 2"), std::string::npos);
}

TEST(Cli, SweepRuns) {
  TempDir d;
  const auto cfg = d.file("s.toml", "surfaces = [\"torus\"]\nn_list = [256]\nrepetitions = 3\ntiming = false\n");
  const auto r = cli({"sweep", "--config", cfg, "--threads", "1", "--out", d.path("run")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("surface,n,alpha", 0), 0u);
  EXPECT_TRUE(fs::exists(d.path("run_reps.csv")));
  EXPECT_TRUE(fs::exists(d.path("run_report.json")));
}

TEST(Cli, GenerateThenCurvature) {
  TempDir d;
  const auto g = d.path("g.txt");
  ASSERT_EQ(cli({"generate", "--surface", "sphere", "--n", "2000", "--seed", "3", "-o", g}).code, 0);
  const auto meso = cli({"curvature", "--graph", g, "--delta", "0.3"});
  EXPECT_EQ(meso.code, 0) << meso.err;
  EXPECT_NE(meso.out.find("kappa="), std::string::npos);
  // Forman on an edge read back from the file.
  std::ifstream in(g);
  std::string header, u, v;
  std::getline(in, header);
  in >> u >> v;
  const auto f = cli({"curvature", "--graph", g, "--method", "forman1", "--x", u, "--y", v});
  EXPECT_EQ(f.code, 0) << f.err;
}

TEST(Cli, CurvatureOnPlainEdgeList) {
  TempDir d;
  const auto g = d.file("k3.txt", "0 1\n1 2\n0 2\n");
  EXPECT_EQ(cli({"curvature", "--graph", g, "--method", "classic", "--x", "0", "--y", "1"}).out, "0.5\n");
  EXPECT_EQ(cli({"curvature", "--graph", g, "--method", "forman2", "--x", "0", "--y", "1"}).out, "3.0\n");
  // No probe pair in a plain file.
  EXPECT_EQ(cli({"curvature", "--graph", g, "--method", "classic"}).code, 1);
  // Not an edge: runtime failure.
  const auto gp = d.file("p.txt", "0 1\n1 2\n");
  EXPECT_EQ(cli({"curvature", "--graph", gp, "--method", "classic", "--x", "0", "--y", "2"}).code, 2);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(cli({}).code, 1);
  EXPECT_EQ(cli({"frobnicate"}).code, 1);
  EXPECT_EQ(cli({"regimes", "--alpha", "0.1"}).code, 1);
  EXPECT_EQ(cli({"generate", "--surface", "mobius"}).code, 1);
  EXPECT_EQ(cli({"--help"}).code, 0);
}
