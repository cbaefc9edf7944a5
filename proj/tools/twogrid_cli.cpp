// Command-line driver for benchmark sweeps.
//
//   twogrid run <config> [--set section.key=value]...
//   twogrid compare <trace> <trace>...
//   twogrid phantom <name> <size> <out.pgm>
//   twogrid matrix <config> <out.mtx>
//   twogrid config                      (print the default configuration)
//
// Exit codes: 0 success, 1 configuration/usage error, 2 internal error.
// TWOGRID_OUTPUT_DIR, when set, replaces experiment.output_dir.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "twogrid/config.hpp"
#include "twogrid/experiment.hpp"
#include "twogrid/io.hpp"
#include "twogrid/tomography.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kInternalError = 2;

twogrid::ExperimentConfig load(const std::string& path, const std::vector<std::string>& overrides) {
  std::vector<std::string> all;
  if (const char* dir = std::getenv("TWOGRID_OUTPUT_DIR"); dir && *dir) {
    all.push_back(std::string("experiment.output_dir=") + dir);
  }
  all.insert(all.end(), overrides.begin(), overrides.end());
  return twogrid::load_config(path, all);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-level geometric optimization on the box: tomography benchmarks"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "Run every (phantom, mode) cell of a configuration");
  run->add_option("config", config_path, "Configuration file")->required();
  run->add_option("--set", overrides, "Override a setting: section.key=value");
  run->add_flag("-q,--quiet", quiet, "Do not print per-cell results");

  std::vector<std::string> traces;
  auto* compare = app.add_subcommand("compare", "Tabulate iterations/evaluations to relative-objective thresholds");
  compare->add_option("traces", traces, "Trace CSV files of one problem")->required()->expected(2, -1);

  std::string phantom_name, out_path;
  int size = 0;
  std::uint64_t seed = 7;
  auto* phantom = app.add_subcommand("phantom", "Write a phantom as binary PGM");
  phantom->add_option("name", phantom_name, "Phantom name")->required();
  phantom->add_option("size", size, "Side length in pixels")->required();
  phantom->add_option("out", out_path, "Output .pgm")->required();
  phantom->add_option("--seed", seed, "Phantom seed");

  std::string matrix_out;
  auto* matrix = app.add_subcommand("matrix", "Write the projection matrix of a configuration (Matrix Market)");
  matrix->add_option("config", config_path, "Configuration file")->required();
  matrix->add_option("out", matrix_out, "Output .mtx")->required();
  matrix->add_option("--set", overrides, "Override a setting: section.key=value");

  auto* dump = app.add_subcommand("config", "Print the default configuration");
  dump->add_option("--set", overrides, "Override a setting: section.key=value");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    if (*run) {
      const auto cfg = load(config_path, overrides);
      const auto cells = twogrid::run_experiment(cfg, quiet ? nullptr : &std::cout);
      std::cout << "wrote " << cells.size() << " traces to " << cfg.output_dir << "\n";
    } else if (*compare) {
      std::vector<twogrid::Trace> loaded;
      for (const auto& t : traces) loaded.push_back(twogrid::read_trace_file(t));
      twogrid::write_compare_table(std::cout, twogrid::compare_traces(loaded, traces));
    } else if (*phantom) {
      const auto kind = twogrid::parse_phantom(phantom_name);
      const auto ph = twogrid::make_phantom(kind, size, seed);
      twogrid::write_pgm(out_path, ph.image, ph.shape);
    } else if (*matrix) {
      const auto cfg = load(config_path, overrides);
      const int angles = twogrid::angles_for_undersampling(cfg.undersampling, cfg.grid);
      const auto g = twogrid::ScanGeometry::for_grid({cfg.grid, cfg.grid}, angles);
      twogrid::write_matrix_market(matrix_out, twogrid::build_matrix(g));
    } else if (*dump) {
      auto cfg = twogrid::ExperimentConfig::defaults();
      for (const auto& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos) throw twogrid::ConfigError("override '" + o + "': expected section.key=value");
        twogrid::apply_setting(cfg, o.substr(0, eq), o.substr(eq + 1));
      }
      cfg.validate();
      std::cout << twogrid::dump_config(cfg);
    }
  } catch (const twogrid::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
  return kOk;
}
