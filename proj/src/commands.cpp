#include "gpflow/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "gpflow/analysis.hpp"
#include "gpflow/errors.hpp"
#include "gpflow/flows.hpp"
#include "gpflow/verification.hpp"

namespace gpflow {

namespace {

// Files written by the current command; removed when it fails.
class OutputSet {
 public:
  explicit OutputSet(std::string prefix) : prefix_(std::move(prefix)) {}
  ~OutputSet() {
    if (!committed_) {
      for (const auto& p : written_) std::filesystem::remove(p);
    }
  }
  std::ofstream open(const std::string& suffix) {
    const std::string path = prefix_ + suffix;
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    written_.push_back(path);
    return out;
  }
  void commit() { committed_ = true; }
  const std::vector<std::string>& written() const { return written_; }

 private:
  std::string prefix_;
  std::vector<std::string> written_;
  bool committed_ = false;
};

void write_trace(std::ostream& out, const RunReport& rep) {
  out << "iter,energy,residual,lambda,step\n";
  for (const auto& r : rep.records) {
    out << r.index << ',' << csv_number(r.energy) << ',' << csv_number(r.residual) << ',' << csv_number(r.lambda) << ','
        << csv_number(r.step) << '\n';
  }
}

void write_summary(std::ostream& out, const RunReport& rep, bool deterministic) {
  const auto& b = rep.best();
  out << "lambda,energy,iterations,wall_seconds\n";
  out << csv_number(b.lambda) << ',' << csv_number(b.energy) << ',' << rep.best_iteration << ','
      << csv_number(deterministic ? 0.0 : rep.wall_seconds) << '\n';
}

Problem make_problem(const RunConfig& cfg, const Discretization& disc) {
  return Problem{cfg.potential.evaluate(disc, cfg.beta), cfg.beta, cfg.flow.alpha};
}

int cmd_solve(const RunConfig& cfg, const CommandOptions& opt, OutputSet& files, std::ostream& log) {
  const DiscretizationPtr disc = build_discretization(cfg);
  const Problem problem = make_problem(cfg, *disc);
  const State u0 = initial_state(cfg, disc, problem.potential, opt.seed);
  log << "solve: " << disc->describe() << ", " << to_string(cfg.flow.kind) << ", " << disc->size() << " unknowns\n";
  const RunReport rep = run(cfg.flow, problem, u0, cfg.stop);
  {
    auto out = files.open("_trace.csv");
    write_trace(out, rep);
  }
  {
    auto out = files.open("_summary.csv");
    write_summary(out, rep, opt.deterministic);
  }
  const auto& b = rep.best();
  log << "  " << to_string(rep.reason) << " after " << rep.iterations() << " iterations (best " << rep.best_iteration
      << "): lambda " << csv_number(b.lambda) << ", energy " << csv_number(b.energy) << ", residual "
      << csv_number(b.residual) << '\n';
  if (!rep.message.empty()) log << "  " << rep.message << '\n';
  return rep.succeeded() ? kExitOk : kExitNotConverged;
}

int cmd_convergence(const RunConfig& cfg, const CommandOptions&, OutputSet& files, std::ostream& log) {
  if (!cfg.mesh_path.empty()) throw InvalidArgument("convergence studies need a tensor grid");
  if (cfg.potential.kind != PotentialSpec::Kind::ExactCase) throw InvalidArgument("convergence studies use potential = exact_case");
  std::vector<int> levels = cfg.levels;
  if (levels.empty()) levels = {cfg.grid.cells, 2 * cfg.grid.cells};
  StudyOptions so;
  so.alpha = cfg.flow.alpha;
  so.tau = std::holds_alternative<FixedStep>(cfg.flow.step) ? std::get<FixedStep>(cfg.flow.step).tau : 1.0;
  so.stop = cfg.stop;
  std::vector<ConvergenceRow> rows;
  for (const Scheme& s : cfg.schemes) {
    for (int c : levels) {
      const GridSpec spec{cfg.grid.half_width, cfg.grid.dim, c, s};
      rows.push_back(solve_exact_case(spec, cfg.beta, so));
      const auto& r = rows.back();
      log << "convergence: " << s.name() << " cells " << c << " (n = " << r.unknowns_per_dim << "): eig error "
          << csv_number(r.eig_error) << ", " << r.iterations << " iterations, " << to_string(r.reason) << '\n';
    }
  }
  fill_orders(rows);
  auto out = files.open("_table.csv");
  out << "scheme,cells,n,h,eig_error,eig_order,energy_error,energy_order,state_error,state_order,lambda,energy,"
         "iterations,termination\n";
  bool ok = true;
  for (const auto& r : rows) {
    out << r.scheme.name() << ',' << r.cells << ',' << r.unknowns_per_dim << ',' << csv_number(r.h) << ','
        << csv_number(r.eig_error) << ',' << csv_number(r.eig_order) << ',' << csv_number(r.energy_error) << ','
        << csv_number(r.energy_order) << ',' << csv_number(r.state_error) << ',' << csv_number(r.state_order) << ','
        << csv_number(r.lambda) << ',' << csv_number(r.energy) << ',' << r.iterations << ',' << to_string(r.reason)
        << '\n';
    ok = ok && r.converged;
  }
  return ok ? kExitOk : kExitNotConverged;
}

int cmd_eigengap(const RunConfig& cfg, const CommandOptions&, OutputSet& files, std::ostream& log) {
  if (!cfg.mesh_path.empty()) throw InvalidArgument("eigengap studies need a tensor grid");
  std::vector<int> levels = cfg.levels;
  if (levels.empty()) levels = {cfg.grid.cells, 2 * cfg.grid.cells, 4 * cfg.grid.cells};
  std::vector<GridSpec> specs;
  for (int c : levels) specs.push_back({cfg.grid.half_width, cfg.grid.dim, c, cfg.grid.scheme});
  std::string potential = cfg.potential.name();
  if (cfg.potential.kind == PotentialSpec::Kind::Constant) potential = "constant(" + csv_number(cfg.potential.value) + ")";
  if (cfg.potential.kind == PotentialSpec::Kind::File) throw InvalidArgument("eigengap studies cannot reuse one potential file across grids");
  int code = kExitOk;
  std::vector<EigengapRow> rows;
  try {
    rows = eigengap_study(specs, potential, cfg.beta, cfg.flow, cfg.stop);
  } catch (const ConvergenceError& e) {
    log << "eigengap: " << e.what() << '\n';
    return kExitNotConverged;
  }
  auto out = files.open("_table.csv");
  out << "h,lambda0,lambda1,gap,iterations\n";
  for (const auto& r : rows) {
    out << csv_number(r.h) << ',' << csv_number(r.lambda0) << ',' << csv_number(r.lambda1) << ',' << csv_number(r.gap)
        << ',' << r.flow_iterations << '\n';
    log << "eigengap: h " << csv_number(r.h) << " gap " << csv_number(r.gap) << '\n';
  }
  const EigengapSummary s = summarize(rows);
  log << "eigengap: min " << csv_number(s.min_gap) << ", spread " << csv_number(s.spread)
      << (s.bounded_below ? ", bounded below" : ", NOT bounded below") << '\n';
  if (!s.all_positive) code = kExitNotConverged;
  return code;
}

int cmd_compare(const RunConfig& cfg, const CommandOptions& opt, OutputSet& files, std::ostream& log) {
  const DiscretizationPtr disc = build_discretization(cfg);
  const Problem problem = make_problem(cfg, *disc);
  const State u0 = initial_state(cfg, disc, problem.potential, opt.seed);
  std::vector<FlowKind> kinds = cfg.compare;
  if (kinds.empty()) kinds = {FlowKind::MODIFIED_H1, FlowKind::BFSP};
  std::ostringstream table;
  table << "kind,iterations,first_below_tol,best_residual,lambda,energy,termination,wall_seconds\n";
  for (FlowKind k : kinds) {
    FlowConfig flow = cfg.flow;
    flow.kind = k;
    const RunReport rep = run(flow, problem, u0, cfg.stop);
    {
      auto out = files.open("_" + to_string(k) + "_trace.csv");
      write_trace(out, rep);
    }
    const auto& b = rep.best();
    table << to_string(k) << ',' << rep.best_iteration << ',' << rep.first_below(cfg.stop.residual_tol) << ','
          << csv_number(b.residual) << ',' << csv_number(b.lambda) << ',' << csv_number(b.energy) << ','
          << to_string(rep.reason) << ',' << csv_number(opt.deterministic ? 0.0 : rep.wall_seconds) << '\n';
    log << "compare: " << to_string(k) << " " << to_string(rep.reason) << ", best residual " << csv_number(b.residual)
        << " at iteration " << rep.best_iteration << '\n';
  }
  auto out = files.open("_table.csv");
  out << table.str();
  return kExitOk;
}

int cmd_verify(const RunConfig& cfg, const CommandOptions& opt, OutputSet& files, std::ostream& log) {
  SuiteOptions so;
  so.seed = opt.seed;
  if (cfg.mesh_path.empty()) so.grid = cfg.grid;
  const auto results = run_property_suite(so);
  auto out = files.open("_table.csv");
  out << "property,trials,failures,ok,detail\n";
  int passed = 0;
  for (const auto& r : results) {
    out << '"' << r.name << "\"," << r.trials << ',' << r.failures << ',' << (r.ok ? 1 : 0) << ",\"" << r.detail << "\"\n";
    log << (r.ok ? "PASS " : "FAIL ") << r.name << ": " << (r.trials - r.failures) << "/" << r.trials << " (" << r.detail
        << ")\n";
    passed += r.ok ? 1 : 0;
  }
  log << "verify: " << passed << "/" << results.size() << " properties passed\n";
  return passed == static_cast<int>(results.size()) ? kExitOk : kExitNotConverged;
}

}  // namespace

std::string csv_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

DiscretizationPtr build_discretization(const RunConfig& config) {
  if (!config.mesh_path.empty()) return make_mesh(read_mesh_file(config.mesh_path));
  return make_tensor(config.grid);
}

State initial_state(const RunConfig& config, const DiscretizationPtr& disc, const std::vector<double>& potential,
                    std::uint64_t seed) {
  const std::size_t n = disc->size();
  switch (config.initial) {
    case InitialGuess::Constant:
      break;
    case InitialGuess::Random: {
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> uni(0.0, 1.0);
      std::vector<double> u(n);
      for (auto& x : u) x = uni(rng);
      return retract(disc, std::move(u));
    }
    case InitialGuess::Beta0GroundState: {
      // The linear ground state, reached by the modified H1 flow from the constant. The lowest band of a
      // lattice potential is nearly degenerate, which stalls block inverse iteration but not the flow.
      FlowConfig linear_flow;
      linear_flow.kind = FlowKind::MODIFIED_H1;
      if (config.flow.alpha > 0.0) linear_flow.alpha = config.flow.alpha;
      const Problem linear{potential, 0.0, linear_flow.alpha};
      const RunReport rep = run(linear_flow, linear, retract(disc, std::vector<double>(n, 1.0)), StopRule{1e-11, 10, 5000});
      if (!rep.succeeded()) throw ConvergenceError("beta = 0 ground state did not converge");
      return *rep.final_state;
    }
  }
  return retract(disc, std::vector<double>(n, 1.0));
}

int run_command(const std::string& name, const RunConfig& config, const CommandOptions& options, std::ostream& log) {
#ifdef _OPENMP
  if (options.threads > 0) omp_set_num_threads(options.threads);
#endif
  OutputSet files(options.out_prefix ? *options.out_prefix : config.prefix);
  int code = kExitOk;
  if (name == "solve") {
    code = cmd_solve(config, options, files, log);
  } else if (name == "convergence") {
    code = cmd_convergence(config, options, files, log);
  } else if (name == "eigengap") {
    code = cmd_eigengap(config, options, files, log);
  } else if (name == "compare") {
    code = cmd_compare(config, options, files, log);
  } else if (name == "verify") {
    code = cmd_verify(config, options, files, log);
  } else {
    throw InvalidArgument("unknown subcommand '" + name + "'");
  }
  files.commit();
  return code;
}

}  // namespace gpflow
