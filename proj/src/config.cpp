#include "gpflow/config.hpp"

#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace gpflow {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

double to_double(const std::string& v, int line, const std::string& key) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size() || !std::isfinite(x)) throw ConfigError(line, key + ": not a finite number: '" + v + "'");
  return x;
}

int to_int(const std::string& v, int line, const std::string& key) {
  std::size_t used = 0;
  long x = 0;
  try {
    x = std::stol(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size() || x < -1000000000L || x > 1000000000L) {
    throw ConfigError(line, key + ": not an integer: '" + v + "'");
  }
  return static_cast<int>(x);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : v) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if ((c == ',' || c == ';') && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty()) out.push_back(trim(cur));
  return out;
}

struct Entry {
  std::string value;
  int line;
};

}  // namespace

RunConfig parse_config(const std::string& text) {
  static const std::map<std::string, std::set<std::string>> known = {
      {"grid", {"scheme", "degree", "dim", "d", "cells", "nc", "n_c", "half_width", "l", "mesh"}},
      {"problem", {"potential", "beta"}},
      {"flow",
       {"kind", "alpha", "step", "tau", "ls_lo", "ls_hi", "ls_tol", "ls_max_evals", "dt", "bfsp_shift", "initial",
        "residual_norm"}},
      {"stop", {"residual_tol", "stall_window", "max_iter"}},
      {"study", {"levels", "schemes", "compare"}},
      {"output", {"prefix"}},
  };

  std::map<std::string, std::map<std::string, Entry>> sections;
  std::map<std::string, int> section_line;
  std::istringstream in(text);
  std::string raw, current;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    const auto hash = s.find('#');
    if (hash != std::string::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty() || s.front() == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(line, "malformed section header '" + s + "'");
      current = lower(trim(s.substr(1, s.size() - 2)));
      if (!known.count(current)) throw ConfigError(line, "unknown section [" + current + "]");
      if (section_line.count(current)) throw ConfigError(line, "duplicate section [" + current + "]");
      section_line[current] = line;
      sections[current];
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "expected key = value, got '" + s + "'");
    if (current.empty()) throw ConfigError(line, "key outside of any section");
    const std::string key = lower(trim(s.substr(0, eq)));
    const std::string value = trim(s.substr(eq + 1));
    if (!known.at(current).count(key)) throw ConfigError(line, "unknown key '" + key + "' in [" + current + "]");
    if (value.empty()) throw ConfigError(line, "empty value for '" + key + "'");
    if (sections[current].count(key)) throw ConfigError(line, "duplicate key '" + key + "'");
    sections[current][key] = {value, line};
  }
  for (const char* req : {"grid", "problem"}) {
    if (!sections.count(req)) throw ConfigError(line + 1, std::string("missing section [") + req + "]");
  }

  RunConfig cfg;
  auto get = [&](const std::string& sec, std::initializer_list<const char*> keys) -> const Entry* {
    if (!sections.count(sec)) return nullptr;
    const Entry* found = nullptr;
    for (const char* k : keys) {
      auto it = sections[sec].find(k);
      if (it == sections[sec].end()) continue;
      if (found) throw ConfigError(it->second.line, std::string("key '") + k + "' duplicates an alias");
      found = &it->second;
    }
    return found;
  };

  // [grid]
  const Entry* degree = get("grid", {"degree"});
  if (const Entry* e = get("grid", {"scheme"})) {
    try {
      // Bare "SEM" takes its polynomial degree from the degree key.
      if (lower(e->value) == "sem") {
        if (!degree) throw ConfigError(e->line, "scheme = SEM needs a degree key (or write SEM(k))");
        cfg.grid.scheme = Scheme::sem(1);
      } else {
        cfg.grid.scheme = Scheme::parse(e->value);
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const InvalidArgument& ex) {
      throw ConfigError(e->line, ex.what());
    }
  }
  if (const Entry* e = degree) {
    const int k = to_int(e->value, e->line, "degree");
    if (cfg.grid.scheme.kind != SchemeKind::SEM) throw ConfigError(e->line, "degree is only meaningful for SEM");
    if (k < 1) throw ConfigError(e->line, "degree must be >= 1");
    cfg.grid.scheme.degree = k;
  }
  if (const Entry* e = get("grid", {"dim", "d"})) {
    cfg.grid.dim = to_int(e->value, e->line, "dim");
    if (cfg.grid.dim < 1 || cfg.grid.dim > 3) throw ConfigError(e->line, "dim must be 1, 2 or 3");
  }
  if (const Entry* e = get("grid", {"cells", "nc", "n_c"})) {
    cfg.grid.cells = to_int(e->value, e->line, "cells");
    if (cfg.grid.cells < 2) throw ConfigError(e->line, "cells must be >= 2");
  }
  if (const Entry* e = get("grid", {"half_width", "l"})) {
    cfg.grid.half_width = to_double(e->value, e->line, "half_width");
    if (!(cfg.grid.half_width > 0.0)) throw ConfigError(e->line, "half_width must be positive");
  }
  if (const Entry* e = get("grid", {"mesh"})) cfg.mesh_path = e->value;
  try {
    cfg.grid.validate();
  } catch (const InvalidArgument& ex) {
    throw ConfigError(section_line["grid"], ex.what());
  }

  // [problem]
  if (const Entry* e = get("problem", {"potential"})) {
    try {
      cfg.potential = PotentialSpec::parse(e->value);
    } catch (const InvalidArgument& ex) {
      throw ConfigError(e->line, ex.what());
    }
  } else {
    throw ConfigError(section_line["problem"], "[problem] needs a potential");
  }
  if (const Entry* e = get("problem", {"beta"})) {
    cfg.beta = to_double(e->value, e->line, "beta");
    if (cfg.beta < 0.0) throw ConfigError(e->line, "beta must be nonnegative");
  }

  // [flow]
  if (const Entry* e = get("flow", {"kind"})) {
    try {
      cfg.flow.kind = parse_flow_kind(e->value);
    } catch (const InvalidArgument& ex) {
      throw ConfigError(e->line, ex.what());
    }
  }
  if (const Entry* e = get("flow", {"alpha"})) {
    cfg.flow.alpha = to_double(e->value, e->line, "alpha");
    if (cfg.flow.alpha < 0.0) throw ConfigError(e->line, "alpha must be nonnegative");
  }
  std::string step = "fixed";
  int step_line = 0;
  if (const Entry* e = get("flow", {"step"})) {
    step = lower(e->value);
    step_line = e->line;
    if (step != "fixed" && step != "line_search") throw ConfigError(e->line, "step must be 'fixed' or 'line_search'");
  }
  FixedStep fixed;
  LineSearch ls;
  if (const Entry* e = get("flow", {"tau"})) {
    fixed.tau = to_double(e->value, e->line, "tau");
    if (!(fixed.tau > 0.0)) throw ConfigError(e->line, "tau must be positive");
  }
  if (const Entry* e = get("flow", {"ls_lo"})) ls.lo = to_double(e->value, e->line, "ls_lo");
  if (const Entry* e = get("flow", {"ls_hi"})) ls.hi = to_double(e->value, e->line, "ls_hi");
  if (const Entry* e = get("flow", {"ls_tol"})) ls.tol = to_double(e->value, e->line, "ls_tol");
  if (const Entry* e = get("flow", {"ls_max_evals"})) ls.max_evals = to_int(e->value, e->line, "ls_max_evals");
  if (step == "line_search") {
    if (!(ls.lo > 0.0 && ls.lo < ls.hi)) throw ConfigError(step_line, "line search needs 0 < ls_lo < ls_hi");
    if (!(ls.tol > 0.0)) throw ConfigError(step_line, "ls_tol must be positive");
    if (ls.max_evals < 1) throw ConfigError(step_line, "ls_max_evals must be >= 1");
    cfg.flow.step = ls;
  } else {
    cfg.flow.step = fixed;
  }
  if (const Entry* e = get("flow", {"dt"})) {
    cfg.flow.dt = to_double(e->value, e->line, "dt");
    if (!(cfg.flow.dt > 0.0)) throw ConfigError(e->line, "dt must be positive");
  }
  if (const Entry* e = get("flow", {"bfsp_shift"})) {
    if (lower(e->value) != "auto") {
      const double s = to_double(e->value, e->line, "bfsp_shift");
      if (s < 0.0) throw ConfigError(e->line, "bfsp_shift must be nonnegative or 'auto'");
      cfg.flow.bfsp_shift = s;
    }
  }
  if (const Entry* e = get("flow", {"initial"})) {
    const std::string v = lower(e->value);
    if (v == "constant") {
      cfg.initial = InitialGuess::Constant;
    } else if (v == "beta0" || v == "beta0_ground_state") {
      cfg.initial = InitialGuess::Beta0GroundState;
    } else if (v == "random") {
      cfg.initial = InitialGuess::Random;
    } else {
      throw ConfigError(e->line, "initial must be constant, beta0_ground_state or random");
    }
  }
  if (const Entry* e = get("flow", {"residual_norm"})) {
    const std::string v = lower(e->value);
    if (v == "euclidean") {
      cfg.flow.residual_norm = ResidualNorm::Euclidean;
    } else if (v == "weighted") {
      cfg.flow.residual_norm = ResidualNorm::Weighted;
    } else {
      throw ConfigError(e->line, "residual_norm must be euclidean or weighted");
    }
  }

  // [stop]
  if (const Entry* e = get("stop", {"residual_tol"})) {
    cfg.stop.residual_tol = to_double(e->value, e->line, "residual_tol");
    if (cfg.stop.residual_tol < 0.0) throw ConfigError(e->line, "residual_tol must be nonnegative");
  }
  if (const Entry* e = get("stop", {"stall_window"})) {
    cfg.stop.stall_window = to_int(e->value, e->line, "stall_window");
    if (cfg.stop.stall_window < 2) throw ConfigError(e->line, "stall_window must be >= 2");
  }
  if (const Entry* e = get("stop", {"max_iter"})) {
    cfg.stop.max_iter = to_int(e->value, e->line, "max_iter");
    if (cfg.stop.max_iter < 1) throw ConfigError(e->line, "max_iter must be >= 1");
  }

  // [study]
  if (const Entry* e = get("study", {"levels"})) {
    for (const auto& item : split_list(e->value)) {
      const int c = to_int(item, e->line, "levels");
      if (c < 2) throw ConfigError(e->line, "levels must be cell counts >= 2");
      cfg.levels.push_back(c);
    }
  }
  if (const Entry* e = get("study", {"schemes"})) {
    for (const auto& item : split_list(e->value)) {
      try {
        cfg.schemes.push_back(Scheme::parse(item));
      } catch (const InvalidArgument& ex) {
        throw ConfigError(e->line, ex.what());
      }
    }
  }
  if (const Entry* e = get("study", {"compare"})) {
    for (const auto& item : split_list(e->value)) {
      try {
        cfg.compare.push_back(parse_flow_kind(item));
      } catch (const InvalidArgument& ex) {
        throw ConfigError(e->line, ex.what());
      }
    }
  }
  if (cfg.schemes.empty()) cfg.schemes.push_back(cfg.grid.scheme);

  // [output]
  if (const Entry* e = get("output", {"prefix"})) cfg.prefix = e->value;
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  RunConfig cfg = parse_config(ss.str());
  if (!cfg.mesh_path.empty() && std::filesystem::path(cfg.mesh_path).is_relative()) {
    cfg.mesh_path = (std::filesystem::path(path).parent_path() / cfg.mesh_path).string();
  }
  return cfg;
}

}  // namespace gpflow
