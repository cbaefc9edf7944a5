#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>

#include "twogrid/experiment.hpp"
#include "twogrid/io.hpp"
#include "twogrid/tomography.hpp"

namespace fs = std::filesystem;

namespace {

struct Output {
  int code = -1;
  std::string text;
};

// Runs the CLI with stderr merged into stdout.
Output run_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + "'" TWOGRID_CLI_PATH "' " + args + " 2>&1";
  Output out;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return out;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.text.append(buf.data(), n);
  const int status = pclose(pipe);
  out.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return out;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("twogrid_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write_config(const std::string& body) const {
    const fs::path p = dir_ / "run.ini";
    std::ofstream(p) << body;
    return p.string();
  }

  std::string small_config() const {
    return write_config("[experiment]\nphantoms = annulus\ngrid = 16\nundersampling = 0.2\n"
                        "modes = single_rg, two_level_rg\noutput_dir = " +
                        (dir_ / "out").string() + "\n[solver]\nmax_iter = 5\n");
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, HelpAndUsage) {
  const Output help = run_cli("--help");
  EXPECT_EQ(help.code, 0);
  EXPECT_NE(help.text.find("compare"), std::string::npos);
  EXPECT_EQ(run_cli("").code, 1);
  EXPECT_EQ(run_cli("frobnicate").code, 1);
}

TEST_F(Cli, RunWritesTraces) {
  const Output o = run_cli("run " + small_config());
  ASSERT_EQ(o.code, 0) << o.text;
  EXPECT_NE(o.text.find("annulus_two_level_rg"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir_ / "out" / "annulus_single_rg.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "out" / "summary.csv"));
  const auto t = twogrid::read_trace_file((dir_ / "out" / "annulus_two_level_rg.csv").string());
  EXPECT_EQ(t.records.size(), 6u);
}

TEST_F(Cli, QuietAndOverrides) {
  const Output o = run_cli("run " + small_config() + " -q --set solver.max_iter=2 --set experiment.modes=single_pg");
  ASSERT_EQ(o.code, 0) << o.text;
  EXPECT_EQ(o.text.find("annulus_single_pg:"), std::string::npos);
  EXPECT_EQ(twogrid::read_trace_file((dir_ / "out" / "annulus_single_pg.csv").string()).records.size(), 3u);
  EXPECT_FALSE(fs::exists(dir_ / "out" / "annulus_single_rg.csv"));
}

TEST_F(Cli, OutputDirFromEnvironment) {
  const std::string cfg = small_config();
  const Output o = run_cli("run -q " + cfg + " --set solver.max_iter=1", "TWOGRID_OUTPUT_DIR='" + (dir_ / "env").string() + "'");
  ASSERT_EQ(o.code, 0) << o.text;
  EXPECT_TRUE(fs::exists(dir_ / "env" / "summary.csv"));
  EXPECT_FALSE(fs::exists(dir_ / "out"));
}

TEST_F(Cli, ConfigErrorsExitWithOne) {
  EXPECT_EQ(run_cli("run " + write_config("[experiment]\ngrid = 16\n")).code, 1);
  const Output bad = run_cli("run " + write_config("[experiment]\nphantoms = disks\n[solver]\neta = 3\n"));
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.text.find("solver.eta"), std::string::npos);
  EXPECT_EQ(run_cli("run " + (dir_ / "missing.ini").string()).code, 1);
  EXPECT_EQ(run_cli("run " + small_config() + " --set nope.key=1").code, 1);
}

TEST_F(Cli, CompareTable) {
  ASSERT_EQ(run_cli("run -q " + small_config()).code, 0);
  const std::string a = (dir_ / "out" / "annulus_single_rg.csv").string();
  const std::string b = (dir_ / "out" / "annulus_two_level_rg.csv").string();
  const Output o = run_cli("compare " + a + " " + b);
  ASSERT_EQ(o.code, 0) << o.text;
  EXPECT_EQ(o.text.rfind("trace,mode,final_f,iter@0.5", 0), 0u);
  EXPECT_NE(o.text.find(",two_level_rg,"), std::string::npos);
  EXPECT_EQ(run_cli("compare " + a).code, 1);

  std::ofstream(dir_ / "other.csv") << "# problem=else;mode=x\niter,level,f,gnorm,fine_grad_evals,seconds\n0,init,1,1,1,0\n";
  const Output mismatch = run_cli("compare " + a + " " + (dir_ / "other.csv").string());
  EXPECT_EQ(mismatch.code, 1);
  EXPECT_NE(mismatch.text.find("mismatched"), std::string::npos);
}

TEST_F(Cli, PhantomAndMatrix) {
  const std::string pgm = (dir_ / "p.pgm").string();
  ASSERT_EQ(run_cli("phantom bars 16 " + pgm).code, 0);
  twogrid::GridShape shape;
  EXPECT_EQ(twogrid::read_pgm(pgm, &shape).size(), 256);
  EXPECT_EQ(run_cli("phantom nothing 16 " + pgm).code, 1);
  EXPECT_EQ(run_cli("phantom bars 4 " + pgm).code, 1);

  const std::string mtx = (dir_ / "a.mtx").string();
  ASSERT_EQ(run_cli("matrix " + small_config() + " " + mtx).code, 0);
  const auto A = twogrid::read_matrix_market(mtx);
  EXPECT_EQ(A.cols(), 256);
  EXPECT_EQ(A.rows(), twogrid::build_matrix(twogrid::ScanGeometry::for_grid({16, 16}, 3)).rows());
}

TEST_F(Cli, DumpDefaults) {
  const Output o = run_cli("config");
  ASSERT_EQ(o.code, 0);
  EXPECT_NE(o.text.find("phantoms = disks,annulus,bars,checker,blob,mixed"), std::string::npos);
  EXPECT_NE(run_cli("config --set solver.eta=0.3").text.find("eta = 0.3"), std::string::npos);
  EXPECT_EQ(run_cli("config --set solver.eta=7").code, 1);
}
