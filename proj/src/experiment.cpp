#include "twogrid/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "twogrid/io.hpp"

namespace twogrid {

namespace fs = std::filesystem;

namespace {

const char* const kColumns[] = {"iter", "level", "f", "gnorm", "fine_grad_evals", "seconds"};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(s);
  while (std::getline(ss, item, sep)) out.push_back(item);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

Level parse_level(const std::string& s, const std::string& where) {
  for (auto l : {Level::Init, Level::Fine, Level::Coarse}) {
    if (to_string(l) == s) return l;
  }
  throw std::runtime_error(where + ": unknown level '" + s + "'");
}

double parse_number(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(where + ": bad number '" + s + "'");
  }
}

std::string cell_stem(const std::string& phantom, SolverMode mode) {
  return phantom + "_" + std::string(to_string(mode));
}

}  // namespace

std::string problem_id(const std::string& phantom, int grid, int angles, double lambda, double rho,
                       std::uint64_t seed) {
  return phantom + "-" + std::to_string(grid) + "-a" + std::to_string(angles) + "-l" + format_double(lambda) + "-r" +
         format_double(rho) + "-s" + std::to_string(seed);
}

void write_trace(std::ostream& out, const Trace& t) {
  out << "# problem=" << t.problem << ";mode=" << t.mode << "\n";
  for (std::size_t i = 0; i < std::size(kColumns); ++i) out << (i ? "," : "") << kColumns[i];
  out << "\n";
  for (const auto& r : t.records) {
    out << r.iter << "," << to_string(r.level) << "," << format_double(r.f) << "," << format_double(r.gnorm) << ","
        << r.fine_grad_evals << "," << format_double(r.seconds) << "\n";
  }
}

Trace read_trace(std::istream& in, const std::string& source) {
  Trace t;
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      for (const auto& field : split(line.substr(1), ';')) {
        const auto eq = field.find('=');
        if (eq == std::string::npos) continue;
        std::string key = field.substr(0, eq);
        key.erase(0, key.find_first_not_of(' '));
        if (key == "problem") t.problem = field.substr(eq + 1);
        if (key == "mode") t.mode = field.substr(eq + 1);
      }
      continue;
    }
    header = split(line, ',');
    break;
  }
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  for (const char* name : kColumns) {
    if (!col.count(name)) throw std::runtime_error(source + ": missing column '" + std::string(name) + "'");
  }
  int lineno = 2;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split(line, ',');
    const std::string where = source + ":" + std::to_string(lineno);
    if (cells.size() < header.size()) throw std::runtime_error(where + ": too few columns");
    IterateRecord r;
    r.iter = static_cast<int>(parse_number(cells[col["iter"]], where));
    r.level = parse_level(cells[col["level"]], where);
    r.f = parse_number(cells[col["f"]], where);
    r.gnorm = parse_number(cells[col["gnorm"]], where);
    r.fine_grad_evals = static_cast<long>(parse_number(cells[col["fine_grad_evals"]], where));
    r.seconds = parse_number(cells[col["seconds"]], where);
    t.records.push_back(r);
  }
  if (t.records.empty()) throw std::runtime_error(source + ": no iterations");
  return t;
}

Trace read_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_trace(in, path);
}

Problem build_problem(const ExperimentConfig& cfg, const std::string& phantom) {
  const Phantom ph = make_phantom(parse_phantom(phantom), cfg.grid, cfg.seed);
  const int angles = angles_for_undersampling(cfg.undersampling, cfg.grid);
  return synthesize(ScanGeometry::for_grid(ph.shape, angles), ph, cfg.lambda, cfg.rho);
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << contents;
    if (!out) throw std::runtime_error("write failed for " + tmp);
  }
  fs::rename(tmp, path);
}

std::vector<CellSummary> run_experiment(const ExperimentConfig& cfg, std::ostream* log) {
  cfg.validate();
  fs::create_directories(cfg.output_dir);
  const int angles = angles_for_undersampling(cfg.undersampling, cfg.grid);

  std::vector<Problem> problems;
  for (const auto& p : cfg.phantoms) problems.push_back(build_problem(cfg, p));

  struct Cell {
    std::size_t phantom;
    SolverMode mode;
  };
  std::vector<Cell> cells;
  for (std::size_t p = 0; p < cfg.phantoms.size(); ++p) {
    for (auto m : cfg.modes) cells.push_back({p, m});
  }
  std::vector<CellSummary> summaries(cells.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  std::exception_ptr failure;

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      try {
        const Cell& c = cells[i];
        const std::string& name = cfg.phantoms[c.phantom];
        SolverConfig sc = cfg.solver;
        sc.mode = c.mode;
        const RunResult r = solve(problems[c.phantom], sc);

        Trace t{problem_id(name, cfg.grid, angles, cfg.lambda, cfg.rho, cfg.seed), std::string(to_string(c.mode)),
                r.trace};
        std::ostringstream csv;
        write_trace(csv, t);
        const std::string stem = cell_stem(name, c.mode);
        const fs::path dir(cfg.output_dir);
        write_file_atomic((dir / (stem + ".csv")).string(), csv.str());
        write_vector((dir / (stem + ".vec")).string(), r.solution.values());

        CellSummary& s = summaries[i];
        s.phantom = name;
        s.mode = c.mode;
        s.status = r.status;
        s.iterations = r.trace.back().iter;
        s.final_f = r.trace.back().f;
        s.fine_grad_evals = r.trace.back().fine_grad_evals;
        s.coarse_attempts = r.coarse_attempts;
        s.coarse_accepted = r.coarse_accepted;
        s.trace_file = stem + ".csv";
        if (log) {
          std::lock_guard lock(log_mutex);
          *log << stem << ": f=" << format_double(s.final_f) << " evals=" << s.fine_grad_evals
               << " status=" << to_string(s.status) << "\n";
        }
      } catch (...) {
        std::lock_guard lock(log_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int nthreads = std::max(1, std::min<int>(cfg.jobs, static_cast<int>(cells.size())));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::ostringstream sum;
  sum << "phantom,mode,status,iterations,final_f,fine_grad_evals,coarse_attempts,coarse_accepted,trace\n";
  for (const auto& s : summaries) {
    sum << s.phantom << "," << to_string(s.mode) << "," << to_string(s.status) << "," << s.iterations << ","
        << format_double(s.final_f) << "," << s.fine_grad_evals << "," << s.coarse_attempts << ","
        << s.coarse_accepted << "," << s.trace_file << "\n";
  }
  const fs::path dir(cfg.output_dir);
  write_file_atomic((dir / "summary.csv").string(), sum.str());
  write_file_atomic((dir / "plot.py").string(), plot_script());
  write_file_atomic((dir / "config.ini").string(), dump_config(cfg));
  return summaries;
}

std::optional<std::size_t> first_below(const std::vector<IterateRecord>& records, double f0, double f_best,
                                       double threshold) {
  const double span = f0 - f_best;
  for (std::size_t k = 0; k < records.size(); ++k) {
    const double rel = span > 0.0 ? (records[k].f - f_best) / span : 0.0;
    if (rel <= threshold) return k;
  }
  return std::nullopt;
}

std::vector<CompareRow> compare_traces(const std::vector<Trace>& traces, const std::vector<std::string>& labels) {
  if (traces.size() < 2) throw std::invalid_argument("compare: need at least two traces");
  if (labels.size() != traces.size()) throw std::invalid_argument("compare: one label per trace required");
  for (const auto& t : traces) {
    if (t.records.empty()) throw std::invalid_argument("compare: empty trace");
    if (t.problem != traces.front().problem) {
      throw std::invalid_argument("compare: mismatched problem identities '" + traces.front().problem + "' and '" +
                                  t.problem + "'");
    }
  }
  double f_best = std::numeric_limits<double>::infinity();
  for (const auto& t : traces) {
    for (const auto& r : t.records) f_best = std::min(f_best, r.f);
  }
  std::vector<CompareRow> rows;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const auto& t = traces[i];
    CompareRow row{labels[i], t.mode, t.records.back().f, {}};
    for (double thr : kCompareThresholds) {
      ThresholdHit hit{thr, std::nullopt, std::nullopt};
      if (const auto k = first_below(t.records, t.records.front().f, f_best, thr)) {
        hit.iterations = t.records[*k].iter;
        hit.fine_grad_evals = t.records[*k].fine_grad_evals;
      }
      row.hits.push_back(hit);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_compare_table(std::ostream& out, const std::vector<CompareRow>& rows) {
  out << "trace,mode,final_f";
  for (double thr : kCompareThresholds) {
    out << ",iter@" << format_double(thr) << ",evals@" << format_double(thr);
  }
  out << "\n";
  for (const auto& r : rows) {
    out << r.label << "," << r.mode << "," << format_double(r.final_f);
    for (const auto& h : r.hits) {
      out << "," << (h.iterations ? std::to_string(*h.iterations) : "-") << ","
          << (h.fine_grad_evals ? std::to_string(*h.fine_grad_evals) : "-");
    }
    out << "\n";
  }
}

std::string plot_script() {
  return R"PY(#!/usr/bin/env python3
"""Relative objective vs iteration for every trace in this directory.

Black dots mark iterations whose direction was computed on the coarse grid.
Writes one PNG per problem next to this script.
"""
import csv
import glob
import os
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))


def read(path):
    with open(path) as fh:
        meta = dict(kv.split("=", 1) for kv in fh.readline()[1:].strip().split(";"))
        rows = list(csv.DictReader(fh))
    return meta["problem"], meta["mode"], rows


groups = defaultdict(list)
for path in sorted(glob.glob(os.path.join(here, "*.csv"))):
    if os.path.basename(path) == "summary.csv":
        continue
    problem, mode, rows = read(path)
    groups[problem].append((mode, rows))

for problem, runs in sorted(groups.items()):
    f_best = min(float(r["f"]) for _, rows in runs for r in rows)
    fig, ax = plt.subplots(figsize=(5, 4))
    for mode, rows in runs:
        f0 = float(rows[0]["f"])
        span = (f0 - f_best) or 1.0
        it = [int(r["iter"]) for r in rows]
        rel = [max((float(r["f"]) - f_best) / span, 1e-16) for r in rows]
        ax.semilogy(it, rel, label=mode)
        coarse = [(i, v) for i, v, r in zip(it, rel, rows) if r["level"] == "coarse"]
        if coarse:
            ax.plot(*zip(*coarse), "k.", markersize=5)
    ax.set_xlabel("iteration")
    ax.set_ylabel("relative objective")
    ax.set_title(problem)
    ax.legend()
    fig.tight_layout()
    fig.savefig(os.path.join(here, problem + ".png"), dpi=120)
    plt.close(fig)
)PY";
}

}  // namespace twogrid
