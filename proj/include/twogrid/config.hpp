#pragma once

// Experiment configuration: an INI-style file with the sections
// [experiment], [objective], [solver], [armijo], [wolfe] and [manifold].
// Values may be overridden with "section.key=value" strings.

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "twogrid/optimizer.hpp"

namespace twogrid {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::vector<std::string> phantoms;
  int grid = 64;
  double undersampling = 0.02;
  std::vector<SolverMode> modes = {SolverMode::SingleRG, SolverMode::TwoLevelRG, SolverMode::SinglePG};
  std::string output_dir = "twogrid-out";
  std::uint64_t seed = 7;
  int jobs = 1;
  double lambda = 0.5;
  double rho = 0.5;
  SolverConfig solver;

  /// Defaults with all phantoms selected.
  static ExperimentConfig defaults();

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Parses a configuration; `experiment.phantoms` is required. Overrides are
/// applied after the file contents. Throws ConfigError.
ExperimentConfig parse_config(std::istream& in, const std::vector<std::string>& overrides = {},
                              const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

/// Applies one "section.key=value" assignment.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Canonical text form; numbers use the shortest round-trip representation.
/// parse_config(dump_config(c)) reproduces c.
std::string dump_config(const ExperimentConfig& cfg);

/// Shortest decimal string that reads back as exactly `v`.
std::string format_double(double v);

}  // namespace twogrid
