#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "superkrylov/config.hpp"
#include "superkrylov/error.hpp"
#include "superkrylov/experiment.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";
  int threads = 1;
};

void add_common(CLI::App* cmd, Options& opts) {
  cmd->add_option("--config", opts.config_path, "Experiment config file (key = value lines)");
  cmd->add_option("--seed", opts.seed, "Override master_seed");
  cmd->add_option("--out", opts.out_dir, "Output directory")->capture_default_str();
  cmd->add_option("--threads", opts.threads, "Worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Super-Krylov ground-state energy simulator"};
  app.require_subcommand(1);
  Options opts;
  for (const char* name : {"convergence", "deriv-scaling", "minimax-demo", "gram"}) {
    auto* cmd = app.add_subcommand(name);
    add_common(cmd, opts);
  }
  app.get_subcommand("convergence")->description("Ground-energy error versus Krylov dimension m");
  app.get_subcommand("deriv-scaling")->description("Derivative error versus number of datapoints D");
  app.get_subcommand("minimax-demo")->description("Dense samples of the minimax fits for one pair");
  app.get_subcommand("gram")->description("Dump exact and estimated (J, R) pairs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  using superkrylov::Error;
  using superkrylov::ErrorCode;
  try {
    auto config = opts.config_path.empty() ? superkrylov::experiment::ExperimentConfig{}
                                           : superkrylov::experiment::load_config(opts.config_path);
    if (opts.seed) config.master_seed = *opts.seed;
    const auto files =
        superkrylov::experiment::run_subcommand(name, config, opts.out_dir, opts.threads);
    for (const auto& f : files) std::cout << f << '\n';
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::ConfigParse ? kExitConfig : kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}
