#include <sstream>

#include <gtest/gtest.h>

#include "twogrid/config.hpp"

using namespace twogrid;

namespace {

ExperimentConfig parse(const std::string& text, const std::vector<std::string>& overrides = {}) {
  std::istringstream in(text);
  return parse_config(in, overrides);
}

bool same(const ExperimentConfig& a, const ExperimentConfig& b) { return dump_config(a) == dump_config(b); }

}  // namespace

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(format_double(1e-4), "1e-04");
  EXPECT_EQ(format_double(1e-10), "1e-10");
  EXPECT_EQ(format_double(0.49), "0.49");
  EXPECT_EQ(format_double(1.0 / 0.6), "1.6666666666666667");
  EXPECT_EQ(format_double(64.0), "64");
  EXPECT_EQ(std::stod(format_double(0.1 + 0.2)), 0.1 + 0.2);
}

TEST(Config, MinimalFileUsesDefaults) {
  const ExperimentConfig c = parse("[experiment]\nphantoms = disks, blob\n");
  ASSERT_EQ(c.phantoms.size(), 2u);
  EXPECT_EQ(c.phantoms[1], "blob");
  EXPECT_EQ(c.grid, 64);
  EXPECT_EQ(c.undersampling, 0.02);
  EXPECT_EQ(c.solver.eta, 0.49);
  EXPECT_EQ(c.solver.eps_dist, 1e-3);
  EXPECT_EQ(c.solver.armijo.sigma, 1e-4);
  EXPECT_EQ(c.solver.armijo.beta, 0.6);
  EXPECT_EQ(c.solver.wolfe.delta, 0.1);
  EXPECT_EQ(c.solver.wolfe.sigma, 0.9);
  EXPECT_EQ(c.lambda, 0.5);
  EXPECT_EQ(c.rho, 0.5);
  EXPECT_FALSE(c.solver.record_wall_clock);
}

TEST(Config, PhantomsAreRequired) {
  EXPECT_THROW(parse("[experiment]\ngrid = 32\n"), ConfigError);
  EXPECT_THROW(parse("[experiment]\nphantoms = \n"), ConfigError);
  EXPECT_THROW(parse("[experiment]\nphantoms = shepp\n"), ConfigError);
}

TEST(Config, AllSectionsParse) {
  const ExperimentConfig c = parse(
      "[experiment]\nphantoms = annulus\ngrid = 32\nundersampling = 0.2\nmodes = single_rg,two_level_euclidean\n"
      "output_dir = out\nseed = 3\njobs = 4\nwall_clock = true\n"
      "[objective]\nlambda = 0.25\nrho = 0.1\n"
      "[solver]\neta = 0.3\neps_dist = 0.01\nmax_iter = 9\ncoarse_iters = 2\ngtol = 1e-6\ninit_value = 0.4\n"
      "coarse_enabled = false\nfeasible_fraction = 0.5\n"
      "[armijo]\nsigma = 0.001\nbeta = 0.5\nalpha0 = 1\nmin_step = 1e-9\n"
      "[wolfe]\ndelta = 0.2\nsigma = 0.8\neps_ls = 1e-5\ngamma = 0.6\nrho_expand = 4\nc_init = 0.5\nmax_evals = 20\n"
      "[manifold]\neps_clip = 1e-10\n");
  EXPECT_EQ(c.grid, 32);
  ASSERT_EQ(c.modes.size(), 2u);
  EXPECT_EQ(c.modes[1], SolverMode::TwoLevelEuclidean);
  EXPECT_EQ(c.output_dir, "out");
  EXPECT_EQ(c.seed, 3u);
  EXPECT_EQ(c.jobs, 4);
  EXPECT_TRUE(c.solver.record_wall_clock);
  EXPECT_EQ(c.lambda, 0.25);
  EXPECT_EQ(c.solver.max_iter, 9);
  EXPECT_FALSE(c.solver.coarse_enabled);
  EXPECT_EQ(c.solver.armijo.alpha0, 1.0);
  EXPECT_EQ(c.solver.wolfe.max_evals, 20);
  EXPECT_EQ(c.solver.wolfe.rho_expand, 4.0);
}

TEST(Config, ErrorsNameTheField) {
  auto message = [](const std::string& text) {
    try {
      parse(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  EXPECT_NE(message("[experiment]\nphantoms = disks\ngrid = 63\n").find("experiment.grid"), std::string::npos);
  EXPECT_NE(message("[experiment]\nphantoms = disks\n[solver]\neta = 2\n").find("solver.eta"), std::string::npos);
  EXPECT_NE(message("[experiment]\nphantoms = disks\n[solver]\netaa = 2\n").find("solver.etaa"), std::string::npos);
  EXPECT_NE(message("[experiment]\nphantoms = disks\n[objective]\nrho = x\n").find("objective.rho"), std::string::npos);
  EXPECT_NE(message("[experiment]\nphantoms = disks\nmodes = fancy\n").find("experiment.modes"), std::string::npos);
  EXPECT_NE(message("[experiment]\nphantoms = disks\n[manifold]\neps_clip = 1e-8\n").find("manifold.eps_clip"),
            std::string::npos);
  EXPECT_NE(message("[experiment]\nphantoms = disks\n[solver]\ncoarse_enabled = maybe\n").find("coarse_enabled"),
            std::string::npos);
  EXPECT_NE(message("[experiment]\nphantoms = disks\njobs = 0\n").find("experiment.jobs"), std::string::npos);
}

TEST(Config, MalformedIniIsAConfigError) {
  EXPECT_THROW(parse("[experiment\nphantoms = disks\n"), ConfigError);
  EXPECT_THROW(parse("phantoms = disks\n"), ConfigError);
}

TEST(Config, OverridesApplyAfterFile) {
  const ExperimentConfig c =
      parse("[experiment]\nphantoms = disks\ngrid = 32\n", {"experiment.grid=16", "solver.max_iter = 3"});
  EXPECT_EQ(c.grid, 16);
  EXPECT_EQ(c.solver.max_iter, 3);
  EXPECT_THROW(parse("[experiment]\nphantoms = disks\n", {"solver.max_iter"}), ConfigError);
  EXPECT_THROW(parse("[experiment]\nphantoms = disks\n", {"bogus.key=1"}), ConfigError);
  // Phantoms may come from an override alone.
  EXPECT_EQ(parse("", {"experiment.phantoms=bars"}).phantoms.front(), "bars");
}

TEST(Config, DumpRoundTrips) {
  const ExperimentConfig d = ExperimentConfig::defaults();
  EXPECT_EQ(d.phantoms.size(), 6u);
  EXPECT_TRUE(same(parse(dump_config(d)), d));
  ExperimentConfig c = d;
  c.solver.gtol = 1.0 / 3.0;
  c.undersampling = 0.15;
  c.modes = {SolverMode::SinglePG};
  c.solver.record_wall_clock = true;
  EXPECT_TRUE(same(parse(dump_config(c)), c));
  EXPECT_EQ(parse(dump_config(c)).solver.gtol, 1.0 / 3.0);
}

TEST(Config, DumpListsArmijoSigma) {
  const std::string text = dump_config(ExperimentConfig::defaults());
  EXPECT_NE(text.find("[armijo]\nsigma = 1e-04\n"), std::string::npos);
  EXPECT_NE(text.find("eps_clip = 1e-10"), std::string::npos);
  EXPECT_NE(text.find("modes = single_rg,two_level_rg,single_pg"), std::string::npos);
}

TEST(Config, LoadMissingFile) { EXPECT_THROW(load_config("/nonexistent/twogrid.ini"), ConfigError); }
