// gpflow <subcommand> --config <path> [--seed N] [--threads N] [--out PREFIX]

#include <CLI11.hpp>
#include <iostream>

#include "gpflow/commands.hpp"
#include "gpflow/config.hpp"
#include "gpflow/kernels.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Ground states of the discrete Gross-Pitaevskii problem by Riemannian Sobolev gradient flows"};
  app.require_subcommand(1);

  std::string config_path;
  gpflow::CommandOptions options;
  std::string out_prefix;
  std::string backend = "auto";

  const char* names[][2] = {
      {"solve", "Run one flow and write <prefix>_trace.csv and <prefix>_summary.csv"},
      {"convergence", "Exact-case accuracy table over [study] levels and schemes"},
      {"eigengap", "Spectrum gap of the linearized operator over refinement levels"},
      {"compare", "Run several flow kinds from the same start, one trace each"},
      {"verify", "Randomized property suite"},
  };
  for (const auto& [name, help] : names) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "INI configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", options.seed, "Random seed (default 0)");
    sub->add_option("--threads", options.threads, "Worker threads (default: runtime choice)")->check(CLI::NonNegativeNumber);
    sub->add_option("--out", out_prefix, "Output path prefix (overrides [output] prefix)");
    sub->add_flag("--deterministic", options.deterministic, "Write 0 for wall_seconds");
    sub->add_option("--kernels", backend, "Kernel backend: auto, scalar or avx2")
        ->check(CLI::IsMember({"auto", "scalar", "avx2"}));
  }

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();
  if (!out_prefix.empty()) options.out_prefix = out_prefix;

  if (!gpflow::kernels::select(backend)) {
    std::cerr << "error: kernel backend '" << backend << "' is not available on this machine\n";
    return gpflow::kExitConfig;
  }

  gpflow::RunConfig config;
  try {
    config = gpflow::load_config(config_path);
  } catch (const gpflow::Error& e) {
    std::cerr << "config error: " << config_path << ": " << e.what() << '\n';
    return gpflow::kExitConfig;
  }
  try {
    return gpflow::run_command(command, config, options, std::cout);
  } catch (const gpflow::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return gpflow::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return gpflow::kExitNotConverged;
  }
}
