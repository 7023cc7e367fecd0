#pragma once

// Subcommand implementations behind the cvqkd CLI. Each runner takes parsed
// arguments plus output/error streams (so tests can capture them) and returns
// the process exit code.

#include <optional>
#include <ostream>
#include <string>

#include "cvqkd/config.hpp"

namespace cvqkd {

enum class OutputFormat { text, json, csv };

OutputFormat format_from_string(const std::string& s);

struct KeyrateArgs {
  std::string config_path;
  OutputFormat format = OutputFormat::text;
};

struct SweepArgs {
  std::string config_path;
  std::string param;  // t | distance_km | v_mod | xi | beta
  double from = 0.0;
  double to = 0.0;
  int steps = 0;
  bool log_spacing = false;
  OutputFormat format = OutputFormat::csv;
};

struct SimulateArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;       // overrides [simulation] seed
  std::optional<std::size_t> n_symbols;    // overrides [simulation] n_symbols
  std::string dump_path;                   // optional records dump
  OutputFormat format = OutputFormat::json;
};

struct BudgetArgs {
  std::string hardware_path;
  double t = 1.0;
  double v_mod = 1.0;
  double mu = 1.0;
  OutputFormat format = OutputFormat::text;
};

int run_keyrate(const KeyrateArgs& args, std::ostream& out, std::ostream& err);
int run_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err);
int run_simulate(const SimulateArgs& args, std::ostream& out,
                 std::ostream& err);
int run_budget(const BudgetArgs& args, std::ostream& out, std::ostream& err);

}  // namespace cvqkd
