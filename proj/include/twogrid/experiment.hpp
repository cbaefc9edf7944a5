#pragma once

// Benchmark sweeps over (phantom, mode) cells, trace files and comparisons.
//
// Trace CSV layout:
//   # problem=<id>;mode=<mode>
//   iter,level,f,gnorm,fine_grad_evals,seconds
//   0,init,...
// Readers locate columns by header name and ignore unknown columns.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "twogrid/config.hpp"
#include "twogrid/optimizer.hpp"
#include "twogrid/tomography.hpp"

namespace twogrid {

struct Trace {
  std::string problem;
  std::string mode;
  std::vector<IterateRecord> records;
};

/// Identity of a problem instance, e.g. "disks-64-a3-l0.5-r0.5-s7".
std::string problem_id(const std::string& phantom, int grid, int angles, double lambda, double rho,
                       std::uint64_t seed);

void write_trace(std::ostream& out, const Trace& trace);
Trace read_trace(std::istream& in, const std::string& source = "<trace>");
Trace read_trace_file(const std::string& path);

/// The problem described by one phantom of the configuration.
Problem build_problem(const ExperimentConfig& cfg, const std::string& phantom);

struct CellSummary {
  std::string phantom;
  SolverMode mode;
  RunStatus status;
  int iterations = 0;
  double final_f = 0.0;
  long fine_grad_evals = 0;
  int coarse_attempts = 0;
  int coarse_accepted = 0;
  std::string trace_file;
};

/// Runs every (phantom, mode) cell, writing <phantom>_<mode>.csv,
/// <phantom>_<mode>.vec, summary.csv and plot.py into cfg.output_dir.
/// Cells run on cfg.jobs worker threads; results are ordered as configured.
std::vector<CellSummary> run_experiment(const ExperimentConfig& cfg, std::ostream* log = nullptr);

inline constexpr double kCompareThresholds[] = {0.5, 0.1, 0.01};

struct ThresholdHit {
  double threshold = 0.0;
  std::optional<int> iterations;  ///< absent when never reached
  std::optional<long> fine_grad_evals;
};

struct CompareRow {
  std::string label;
  std::string mode;
  double final_f = 0.0;
  std::vector<ThresholdHit> hits;
};

/// Relative objective (f - f_best) / (f_0 - f_best), f_best the minimum over
/// all traces. Throws std::invalid_argument for fewer than two traces or
/// mismatched problem identities.
std::vector<CompareRow> compare_traces(const std::vector<Trace>& traces, const std::vector<std::string>& labels);

void write_compare_table(std::ostream& out, const std::vector<CompareRow>& rows);

/// First iteration whose relative objective is <= threshold.
std::optional<std::size_t> first_below(const std::vector<IterateRecord>& records, double f0, double f_best,
                                       double threshold);

/// matplotlib script plotting relative objective vs iteration for every
/// trace in its directory, with coarse iterations marked by black dots.
std::string plot_script();

/// Writes `contents` to `path` through a temporary file and a rename.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace twogrid
