#include <CLI11.hpp>
#include <iostream>

#include "aggalign/commands.hpp"
#include "aggalign/io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"aggalign: nonlocal aggregation dynamics with alignment"};
  app.set_version_flag("--version", std::string(aggalign::version()));
  app.require_subcommand(1);

  aggalign::RunCommandOptions run_opts;
  std::string run_out, conv_out;
  std::uint64_t seed_value = 0;

  CLI::App* run = app.add_subcommand("run", "integrate a transport experiment from a config");
  run->add_option("--config", run_opts.config_path, "config file path")
      ->required()
      ->check(CLI::ExistingFile);
  CLI::Option* run_out_opt = run->add_option("--out", run_out, "output directory override");
  run->add_flag("--fast", run_opts.fast, "coarse variant: h and dt doubled");
  CLI::Option* run_seed = run->add_option("--seed", seed_value, "seed override");

  aggalign::ValidateCommandOptions val_opts;
  CLI::App* validate =
      app.add_subcommand("validate", "randomized property checks of the velocity solver");
  validate->add_option("--seed", val_opts.seed, "seed for the randomized configurations");
  validate->add_option("--cases", val_opts.cases, "number of random configurations")
      ->check(CLI::PositiveNumber);
  validate->add_flag("--break-eta", val_opts.break_eta,
                     "multiply eta by 10 to demonstrate the dominance check tripping");

  aggalign::ConvergenceCommandOptions conv_opts;
  CLI::App* convergence =
      app.add_subcommand("convergence", "epsilon sweep of the kinetic system vs first order");
  convergence->add_option("--config", conv_opts.config_path, "sweep config file path")
      ->required()
      ->check(CLI::ExistingFile);
  CLI::Option* conv_out_opt =
      convergence->add_option("--out", conv_out, "output directory override");
  CLI::Option* conv_seed = convergence->add_option("--seed", seed_value, "seed override");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (run->parsed()) {
    if (*run_out_opt) run_opts.output_directory = run_out;
    if (*run_seed) run_opts.seed = seed_value;
    return aggalign::cmd_run(run_opts, std::cout);
  }
  if (validate->parsed()) {
    return aggalign::cmd_validate(val_opts, std::cout);
  }
  if (convergence->parsed()) {
    if (*conv_out_opt) conv_opts.output_directory = conv_out;
    if (*conv_seed) conv_opts.seed = seed_value;
    return aggalign::cmd_convergence(conv_opts, std::cout);
  }
  return 2;
}
