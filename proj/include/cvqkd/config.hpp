#pragma once

// Run-configuration and hardware-description files. Both are plain-text
// key = value files; run configs group keys under [section] headers
// ([protocol], [channel], [hardware], [simulation]), hardware files are flat.
// '#' starts a comment. Unknown keys or sections are errors. Relative paths
// are resolved against the directory named by the CVQKD_CONFIG_DIR
// environment variable (when set), then the referencing file's directory,
// then the working directory.

#include <map>
#include <optional>
#include <string>

#include "cvqkd/noise.hpp"
#include "cvqkd/security.hpp"
#include "cvqkd/simulate.hpp"

namespace cvqkd {

// Configuration problems (bad syntax, unknown keys, inconsistent values) —
// mapped to their own process exit code by the CLI.
struct config_error : error {
  using error::error;
};

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int abort = 2;        // secret fraction <= 0
inline constexpr int config = 3;       // configuration problem
inline constexpr int calibration = 4;  // calibration/estimation inconsistency
}  // namespace exit_code

inline constexpr const char* config_dir_env = "CVQKD_CONFIG_DIR";

// Everything a run needs, resolved and validated.
struct RunConfig {
  ModulationSpec modulation;
  DetectionMode detection = DetectionMode::homodyne;
  ProtocolParams protocol;
  TrustAssumption trust = TrustAssumption::strict;
  HolevoRoute route = HolevoRoute::purification;

  // Channel with t_total and xi resolved; split present when the config
  // provides the receiver decomposition (hardware-backed configs).
  ChannelParams channel;
  double fiber_db_per_km = 0.2;
  std::optional<double> distance_km;
  double t_ch = 1.0;  // fiber transmittance before the receiver
  double eta_coup = 1.0;
  double eta_det = 1.0;

  std::optional<HardwareParams> hardware;
  NoiseBudget budget;  // assembled when hardware is present

  // [simulation] section with defaults; channel/modulation/detection are
  // filled in from the sections above.
  SimConfig sim;
};

// Resolve a possibly relative path: absolute paths pass through; otherwise
// try CVQKD_CONFIG_DIR, the referencing file's directory, then the path
// itself. Throws config_error if nothing exists.
std::string resolve_config_path(const std::string& path,
                                const std::string& referenced_from = "");

// Parse a flat hardware description file (keys match HardwareParams fields,
// SI units; cmrr_db in dB).
HardwareParams parse_hardware_file(const std::string& path);

// Same key set from an already-parsed section.
HardwareParams hardware_from_keys(
    const std::map<std::string, std::string>& keys, const std::string& where);

// Load and fully resolve a run configuration. Assembles the noise budget and
// channel decomposition when a hardware description is given; otherwise the
// [channel] section must provide xi directly.
RunConfig load_run_config(const std::string& path);

// Recompute the budget-derived channel for new fiber transmittance /
// modulation (used by sweeps over t, distance or v_mod on hardware-backed
// configs).
void rebuild_channel(RunConfig& config);

}  // namespace cvqkd
