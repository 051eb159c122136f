// Batch experiment runner for the stochastic p-Laplace harness.
//
//   renorm-plap <command> --config <path> [--seed <u64>] [--out <dir>]
//
// Commands: simulate, verify-renorm, verify-product, verify-energy,
// markov, regularizer. The command must match the config's `command` key
// when that key is present.

#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "rplap/experiment.hpp"
#include "rplap/stepper.hpp"

int main(int argc, char** argv) {
  CLI::App app{"stochastic p-Laplace experiment runner"};
  app.require_subcommand(1);

  const std::vector<std::string> commands = {"simulate",      "verify-renorm",
                                             "verify-product", "verify-energy",
                                             "markov",         "regularizer"};
  struct Args {
    std::string config;
    std::string out;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool out_set = false;
  } args;

  for (const auto& name : commands) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", args.config, "config file (key = value lines)")
        ->required();
    auto* seed_opt = sub->add_option("--seed", args.seed, "master seed override");
    auto* out_opt = sub->add_option("--out", args.out, "output directory override");
    sub->callback([&args, seed_opt, out_opt] {
      args.seed_set = seed_opt->count() > 0;
      args.out_set = out_opt->count() > 0;
    });
  }

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    rplap::ExperimentConfig config = rplap::parse_config_file(args.config);
    if (config.command != command)
      throw rplap::ConfigError("config declares command '" + config.command +
                               "' but '" + command + "' was requested");
    if (args.seed_set) config.seed = args.seed;
    if (args.out_set) config.out = args.out;
    return rplap::run(config);
  } catch (const rplap::ConfigError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return 2;
  } catch (const rplap::NonConvergenceError& err) {
    std::cerr << "solver error: " << err.what() << "\n";
    return 3;
  } catch (const rplap::IoError& err) {
    std::cerr << "io error: " << err.what() << "\n";
    return 4;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 5;
  }
}
