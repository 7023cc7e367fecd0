#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cvqkd/runners.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "cvqkd: asymptotic secure-key rates, hardware noise budgets and "
      "Monte-Carlo channel simulation for Gaussian-modulated coherent-state "
      "CV-QKD"};
  app.require_subcommand(1);

  cvqkd::KeyrateArgs keyrate_args;
  std::string keyrate_format = "text";
  CLI::App* keyrate = app.add_subcommand(
      "keyrate", "Evaluate the secure-key rate at one operating point");
  keyrate->add_option("--config", keyrate_args.config_path,
                      "Run configuration file")
      ->required();
  keyrate->add_option("--format", keyrate_format,
                      "Output format: text, json or csv");

  cvqkd::SweepArgs sweep_args;
  std::string sweep_format = "csv";
  CLI::App* sweep = app.add_subcommand(
      "sweep", "Evaluate the key rate over a range of one parameter");
  sweep->add_option("--config", sweep_args.config_path,
                    "Run configuration file")
      ->required();
  sweep->add_option("--param", sweep_args.param,
                    "Swept parameter: t, distance_km, v_mod, xi or beta")
      ->required();
  sweep->add_option("--from", sweep_args.from, "First value")->required();
  sweep->add_option("--to", sweep_args.to, "Last value")->required();
  sweep->add_option("--steps", sweep_args.steps, "Number of points")
      ->required();
  sweep->add_flag("--log", sweep_args.log_spacing,
                  "Space points logarithmically");
  sweep->add_option("--format", sweep_format, "Output format: csv or json");

  cvqkd::SimulateArgs sim_args;
  std::string sim_format = "json";
  std::uint64_t sim_seed = 0;
  std::uint64_t sim_symbols = 0;
  CLI::App* simulate = app.add_subcommand(
      "simulate",
      "Run the Monte-Carlo channel model and estimate (t, xi) from it");
  simulate->add_option("--config", sim_args.config_path,
                       "Run configuration file")
      ->required();
  CLI::Option* seed_opt = simulate->add_option(
      "--seed", sim_seed, "Override the [simulation] seed");
  CLI::Option* symbols_opt = simulate->add_option(
      "--symbols", sim_symbols, "Override the [simulation] symbol count");
  simulate->add_option("--dump", sim_args.dump_path,
                       "Write the symbol records to this file (.bin/.dat "
                       "binary, otherwise CSV)");
  simulate->add_option("--format", sim_format,
                       "Output format: json or text");

  cvqkd::BudgetArgs budget_args;
  std::string budget_format = "text";
  CLI::App* budget = app.add_subcommand(
      "budget", "Evaluate the excess-noise budget of a hardware description");
  budget->add_option("--hardware", budget_args.hardware_path,
                     "Hardware description file")
      ->required();
  budget->add_option("--t", budget_args.t,
                     "Total transmittance the budget is evaluated at");
  budget->add_option("--v-mod", budget_args.v_mod, "Modulation variance");
  budget->add_option("--mu", budget_args.mu,
                     "Measured quadratures: 1 (homodyne) or 2 (heterodyne)");
  budget->add_option("--format", budget_format,
                     "Output format: text, json or csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cvqkd::exit_code::config;
  }

  try {
    if (*keyrate) {
      keyrate_args.format = cvqkd::format_from_string(keyrate_format);
      return cvqkd::run_keyrate(keyrate_args, std::cout, std::cerr);
    }
    if (*sweep) {
      sweep_args.format = cvqkd::format_from_string(sweep_format);
      return cvqkd::run_sweep(sweep_args, std::cout, std::cerr);
    }
    if (*simulate) {
      if (seed_opt->count() > 0) sim_args.seed = sim_seed;
      if (symbols_opt->count() > 0)
        sim_args.n_symbols = static_cast<std::size_t>(sim_symbols);
      sim_args.format = cvqkd::format_from_string(sim_format);
      return cvqkd::run_simulate(sim_args, std::cout, std::cerr);
    }
    if (*budget) {
      budget_args.format = cvqkd::format_from_string(budget_format);
      return cvqkd::run_budget(budget_args, std::cout, std::cerr);
    }
  } catch (const cvqkd::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return cvqkd::exit_code::config;
  }
  return cvqkd::exit_code::config;  // unreachable with require_subcommand(1)
}
