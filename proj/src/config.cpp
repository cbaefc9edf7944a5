#include "twogrid/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "twogrid/tomography.hpp"

namespace twogrid {

namespace {

namespace pt = boost::property_tree;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T>
std::string join(const std::vector<T>& items, const std::function<std::string(const T&)>& fmt) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ",";
    out += fmt(items[i]);
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ConfigError(key + ": expected a number, got '" + v + "'");
  return out;
}

long long to_int(const std::string& key, const std::string& v) {
  long long out = 0;
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ConfigError(key + ": expected an integer, got '" + v + "'");
  return out;
}

int to_int32(const std::string& key, const std::string& v) {
  const long long x = to_int(key, v);
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
    throw ConfigError(key + ": value out of range");
  }
  return static_cast<int>(x);
}

bool to_bool(const std::string& key, std::string v) {
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

using Setter = std::function<void(ExperimentConfig&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"experiment.phantoms",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.phantoms = split_list(v);
         if (c.phantoms.empty()) throw ConfigError(k + ": no phantom name given");
       }},
      {"experiment.grid", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.grid = to_int32(k, v); }},
      {"experiment.undersampling",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.undersampling = to_double(k, v); }},
      {"experiment.modes",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.modes.clear();
         for (const auto& m : split_list(v)) {
           try {
             c.modes.push_back(parse_mode(m));
           } catch (const std::invalid_argument& e) {
             throw ConfigError(k + ": " + e.what());
           }
         }
       }},
      {"experiment.output_dir", [](ExperimentConfig& c, const std::string&, const std::string& v) { c.output_dir = v; }},
      {"experiment.seed",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         const long long s = to_int(k, v);
         if (s < 0) throw ConfigError(k + ": must be >= 0");
         c.seed = static_cast<std::uint64_t>(s);
       }},
      {"experiment.jobs", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.jobs = to_int32(k, v); }},
      {"experiment.wall_clock",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.solver.record_wall_clock = to_bool(k, v); }},
      {"objective.lambda", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.lambda = to_double(k, v); }},
      {"objective.rho", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.rho = to_double(k, v); }},
      {"solver.eta", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.solver.eta = to_double(k, v); }},
      {"solver.eps_dist",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.solver.eps_dist = to_double(k, v); }},
      {"solver.max_iter",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.solver.max_iter = to_int32(k, v); }},
      {"solver.coarse_iters",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.solver.coarse_iters = to_int32(k, v); }},
      {"solver.gtol", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.solver.gtol = to_double(k, v); }},
      {"solver.init_value",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.solver.init_value = to_double(k, v); }},
      {"solver.coarse_enabled",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.solver.coarse_enabled = to_bool(k, v); }},
      {"solver.feasible_fraction",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.solver.feasible_fraction = to_double(k, v); }},
      {"armijo.sigma",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.solver.armijo.sigma = to_double(k, v); }},
      {"armijo.beta",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.solver.armijo.beta = to_double(k, v); }},
      {"armijo.alpha0",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.solver.armijo.alpha0 = to_double(k, v); }},
      {"armijo.min_step",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.solver.armijo.min_step = to_double(k, v); }},
      {"wolfe.delta",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.solver.wolfe.delta = to_double(k, v); }},
      {"wolfe.sigma",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.solver.wolfe.sigma = to_double(k, v); }},
      {"wolfe.eps_ls",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.solver.wolfe.eps_ls = to_double(k, v); }},
      {"wolfe.gamma",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.solver.wolfe.gamma = to_double(k, v); }},
      {"wolfe.rho_expand",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.solver.wolfe.rho_expand = to_double(k, v); }},
      {"wolfe.c_init",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.solver.wolfe.c_init = to_double(k, v); }},
      {"wolfe.max_evals",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.solver.wolfe.max_evals = to_int32(k, v); }},
      {"manifold.eps_clip",
       [](ExperimentConfig&, const std::string& k, const std::string& v) {
         // The clipping bound is a library constant; only its value is accepted.
         if (to_double(k, v) != kEpsClip) throw ConfigError(k + ": only " + format_double(kEpsClip) + " is supported");
       }},
  };
  return table;
}

std::vector<std::string> phantom_defaults() { return phantom_names(); }

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

ExperimentConfig ExperimentConfig::defaults() {
  ExperimentConfig c;
  c.phantoms = phantom_defaults();
  return c;
}

void ExperimentConfig::validate() const {
  if (phantoms.empty()) throw ConfigError("experiment.phantoms: no phantom name given");
  for (const auto& p : phantoms) {
    try {
      parse_phantom(p);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("experiment.phantoms: ") + e.what());
    }
  }
  if (grid < 8 || grid % 2 != 0) throw ConfigError("experiment.grid: must be an even number >= 8");
  if (!(undersampling > 0.0 && undersampling <= 1.0)) throw ConfigError("experiment.undersampling: must lie in (0, 1]");
  if (modes.empty()) throw ConfigError("experiment.modes: no solver mode given");
  if (output_dir.empty()) throw ConfigError("experiment.output_dir: must not be empty");
  if (jobs < 1) throw ConfigError("experiment.jobs: must be >= 1");
  if (!(lambda >= 0.0)) throw ConfigError("objective.lambda: must be >= 0");
  if (!(rho > 0.0)) throw ConfigError("objective.rho: must be > 0");
  try {
    solver.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  const auto& table = setters();
  const auto it = table.find(key);
  if (it == table.end()) throw ConfigError(key + ": unknown setting");
  it->second(cfg, key, trim(value));
}

ExperimentConfig parse_config(std::istream& in, const std::vector<std::string>& overrides, const std::string& source) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(source + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  ExperimentConfig cfg;
  cfg.phantoms.clear();
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) throw ConfigError(source + ": setting '" + section + "' outside a section");
    for (const auto& [key, node] : body) apply_setting(cfg, section + "." + key, node.data());
  }
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + o + "': expected section.key=value");
    apply_setting(cfg, trim(o.substr(0, eq)), o.substr(eq + 1));
  }
  if (cfg.phantoms.empty()) throw ConfigError("experiment.phantoms: missing (list at least one phantom name)");
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  return parse_config(in, overrides, path);
}

std::string dump_config(const ExperimentConfig& c) {
  const auto& s = c.solver;
  std::ostringstream out;
  const auto kv = [&out](const char* key, const std::string& v) { out << key << " = " << v << "\n"; };
  const auto num = [&kv](const char* key, double v) { kv(key, format_double(v)); };
  const auto flag = [&kv](const char* key, bool v) { kv(key, v ? "true" : "false"); };
  out << "[experiment]\n";
  kv("phantoms", join<std::string>(c.phantoms, [](const std::string& p) { return p; }));
  kv("grid", std::to_string(c.grid));
  num("undersampling", c.undersampling);
  kv("modes", join<SolverMode>(c.modes, [](const SolverMode& m) { return std::string(to_string(m)); }));
  kv("output_dir", c.output_dir);
  kv("seed", std::to_string(c.seed));
  kv("jobs", std::to_string(c.jobs));
  flag("wall_clock", s.record_wall_clock);
  out << "\n[objective]\n";
  num("lambda", c.lambda);
  num("rho", c.rho);
  out << "\n[solver]\n";
  num("eta", s.eta);
  num("eps_dist", s.eps_dist);
  kv("max_iter", std::to_string(s.max_iter));
  kv("coarse_iters", std::to_string(s.coarse_iters));
  num("gtol", s.gtol);
  num("init_value", s.init_value);
  flag("coarse_enabled", s.coarse_enabled);
  num("feasible_fraction", s.feasible_fraction);
  out << "\n[armijo]\n";
  num("sigma", s.armijo.sigma);
  num("beta", s.armijo.beta);
  num("alpha0", s.armijo.alpha0);
  num("min_step", s.armijo.min_step);
  out << "\n[wolfe]\n";
  num("delta", s.wolfe.delta);
  num("sigma", s.wolfe.sigma);
  num("eps_ls", s.wolfe.eps_ls);
  num("gamma", s.wolfe.gamma);
  num("rho_expand", s.wolfe.rho_expand);
  num("c_init", s.wolfe.c_init);
  kv("max_evals", std::to_string(s.wolfe.max_evals));
  out << "\n[manifold]\n";
  num("eps_clip", kEpsClip);
  return out.str();
}

}  // namespace twogrid
