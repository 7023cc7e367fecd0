#include "cvqkd/config.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace cvqkd {

namespace {

namespace fs = std::filesystem;

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

using Section = std::map<std::string, std::string>;
using Sections = std::map<std::string, Section>;

// key = value lines grouped by [section]; '#' starts a comment. Keys given
// before any section header land in the "" section (hardware files).
Sections parse_key_value_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open '" + path + "'");
  Sections sections;
  std::string section;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where =
        path + ":" + std::to_string(line_no);
    if (line.front() == '[') {
      if (line.back() != ']')
        throw config_error(where + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw config_error(where + ": empty section name");
      sections[section];  // register even when empty
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error(where + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw config_error(where + ": empty key or value");
    auto [it, inserted] = sections[section].emplace(key, value);
    (void)it;
    if (!inserted) throw config_error(where + ": duplicate key '" + key + "'");
  }
  return sections;
}

double to_double(const std::string& value, const std::string& where) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size())
      throw config_error(where + ": trailing characters in '" + value + "'");
    return v;
  } catch (const std::invalid_argument&) {
    throw config_error(where + ": not a number: '" + value + "'");
  } catch (const std::out_of_range&) {
    throw config_error(where + ": out of range: '" + value + "'");
  }
}

std::uint64_t to_u64(const std::string& value, const std::string& where) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(value, &pos);
    if (pos != value.size())
      throw config_error(where + ": trailing characters in '" + value + "'");
    return v;
  } catch (const std::invalid_argument&) {
    throw config_error(where + ": not an integer: '" + value + "'");
  } catch (const std::out_of_range&) {
    throw config_error(where + ": out of range: '" + value + "'");
  }
}

bool to_bool(const std::string& value, const std::string& where) {
  if (value == "on" || value == "true" || value == "1") return true;
  if (value == "off" || value == "false" || value == "0") return false;
  throw config_error(where + ": expected on/off, got '" + value + "'");
}

// Typed accessor over one section that tracks which keys were consumed so
// unknown keys can be rejected afterwards.
struct SectionReader {
  const Section& keys;
  std::string where;
  std::map<std::string, bool> used;

  SectionReader(const Section& k, std::string w) : keys(k), where(std::move(w)) {
    for (const auto& [key, value] : keys) {
      (void)value;
      used[key] = false;
    }
  }

  const std::string* find(const std::string& key) {
    auto it = keys.find(key);
    if (it == keys.end()) return nullptr;
    used[key] = true;
    return &it->second;
  }

  bool has(const std::string& key) const { return keys.count(key) != 0; }

  double number(const std::string& key, double fallback) {
    const std::string* v = find(key);
    return v ? to_double(*v, where + "." + key) : fallback;
  }

  double required_number(const std::string& key) {
    const std::string* v = find(key);
    if (!v) throw config_error(where + ": missing required key '" + key + "'");
    return to_double(*v, where + "." + key);
  }

  std::uint64_t integer(const std::string& key, std::uint64_t fallback) {
    const std::string* v = find(key);
    return v ? to_u64(*v, where + "." + key) : fallback;
  }

  bool flag(const std::string& key, bool fallback) {
    const std::string* v = find(key);
    return v ? to_bool(*v, where + "." + key) : fallback;
  }

  std::string text(const std::string& key, const std::string& fallback) {
    const std::string* v = find(key);
    return v ? *v : fallback;
  }

  void reject_unknown() const {
    for (const auto& [key, was_used] : used)
      if (!was_used)
        throw config_error(where + ": unknown key '" + key + "'");
  }
};

HardwareParams hardware_from_reader(SectionReader& r) {
  HardwareParams hw;
  hw.rin_sig = r.number("rin_sig", hw.rin_sig);
  hw.rin_lo = r.number("rin_lo", hw.rin_lo);
  hw.bandwidth_b = r.number("bandwidth_b", hw.bandwidth_b);
  hw.pulse_tau = r.number("pulse_tau", hw.pulse_tau);
  hw.opt_freq_f = r.number("opt_freq_f", hw.opt_freq_f);
  hw.p_lo = r.number("p_lo", hw.p_lo);
  if (const std::string* v = r.find("cmrr_db"))
    hw.cmrr = std::pow(10.0, to_double(*v, r.where + ".cmrr_db") / 20.0);
  hw.nep = r.number("nep", hw.nep);
  hw.responsivity_rho = r.number("responsivity_rho", hw.responsivity_rho);
  hw.ti_gain_g = r.number("ti_gain_g", hw.ti_gain_g);
  hw.adc_range_ru = r.number("adc_range_ru", hw.adc_range_ru);
  hw.adc_bits_n = static_cast<int>(r.integer("adc_bits_n", 0));
  hw.v_adc_intr = r.number("v_adc_intr", hw.v_adc_intr);
  hw.n_raman_dbm_per_nm =
      r.number("n_raman_dbm_per_nm", hw.n_raman_dbm_per_nm);
  hw.delta_lambda = r.number("delta_lambda", hw.delta_lambda);
  hw.wavelength = r.number("wavelength", hw.wavelength);
  hw.amp_gain_g = r.number("amp_gain_g", hw.amp_gain_g);
  hw.du_dac = r.number("du_dac", hw.du_dac);
  hw.u_pi = r.number("u_pi", hw.u_pi);
  hw.u_dac = r.number("u_dac", hw.u_dac);
  hw.pt_omega = r.number("pt_omega", hw.pt_omega);
  hw.pt_dt = r.number("pt_dt", hw.pt_dt);
  hw.pt_photons = r.number("pt_photons", hw.pt_photons);
  hw.pt_samples_n = static_cast<long>(r.integer("pt_samples_n", 0));
  return hw;
}

DetectionMode detection_from_string(const std::string& s,
                                    const std::string& where) {
  if (s == "homodyne") return DetectionMode::homodyne;
  if (s == "heterodyne") return DetectionMode::heterodyne;
  throw config_error(where + ": expected homodyne or heterodyne, got '" + s +
                     "'");
}

}  // namespace

std::string resolve_config_path(const std::string& path,
                                const std::string& referenced_from) {
  if (path.empty()) throw config_error("empty path");
  std::vector<std::string> tried;
  const fs::path p(path);
  if (p.is_absolute()) {
    if (fs::exists(p)) return path;
    throw config_error("no such file: '" + path + "'");
  }
  if (const char* dir = std::getenv(config_dir_env)) {
    const fs::path cand = fs::path(dir) / p;
    if (fs::exists(cand)) return cand.string();
    tried.push_back(cand.string());
  }
  if (!referenced_from.empty()) {
    const fs::path cand = fs::path(referenced_from).parent_path() / p;
    if (fs::exists(cand)) return cand.string();
    tried.push_back(cand.string());
  }
  if (fs::exists(p)) return path;
  tried.push_back(path);
  std::string msg = "no such file: '" + path + "' (tried";
  for (const auto& t : tried) msg += " '" + t + "'";
  msg += ")";
  throw config_error(msg);
}

HardwareParams parse_hardware_file(const std::string& path) {
  const Sections sections = parse_key_value_file(path);
  for (const auto& [name, keys] : sections) {
    (void)keys;
    if (!name.empty())
      throw config_error(path + ": hardware files have no [" + name +
                         "] sections");
  }
  const auto it = sections.find("");
  if (it == sections.end() || it->second.empty())
    throw config_error(path + ": no hardware keys found");
  SectionReader reader(it->second, path);
  HardwareParams hw = hardware_from_reader(reader);
  reader.reject_unknown();
  return hw;
}

HardwareParams hardware_from_keys(
    const std::map<std::string, std::string>& keys, const std::string& where) {
  SectionReader reader(keys, where);
  HardwareParams hw = hardware_from_reader(reader);
  reader.reject_unknown();
  return hw;
}

void rebuild_channel(RunConfig& config) {
  if (config.distance_km) {
    if (!(config.fiber_db_per_km >= 0.0))
      throw config_error("fiber_db_per_km must be >= 0");
    config.t_ch =
        std::pow(10.0, -config.fiber_db_per_km * *config.distance_km / 10.0);
  }
  config.channel.t_total = config.t_ch * config.eta_coup * config.eta_det;
  if (config.hardware) {
    config.budget =
        assemble_budget(*config.hardware, config.channel.t_total,
                        config.modulation.v_mod, config.detection);
    const auto [xi_ch, xi_rec] = split_budget(config.budget);
    config.channel.xi = config.budget.total;
    ChannelDecomposition split;
    split.t_ch = config.t_ch;
    split.eta_coup = config.eta_coup;
    split.eta_det = config.eta_det;
    split.xi_ch = xi_ch;
    split.xi_rec = xi_rec;
    config.channel.split = split;
  }
  config.channel.validate();
  config.sim.modulation = config.modulation;
  config.sim.channel = config.channel;
  config.sim.detection = config.detection;
}

RunConfig load_run_config(const std::string& path) {
  const std::string full = resolve_config_path(path);
  const Sections sections = parse_key_value_file(full);
  for (const auto& [name, keys] : sections) {
    (void)keys;
    if (name != "protocol" && name != "channel" && name != "hardware" &&
        name != "simulation")
      throw config_error(full + ": unknown section [" + name + "]");
  }
  if (!sections.count("protocol"))
    throw config_error(full + ": missing [protocol] section");
  if (!sections.count("channel"))
    throw config_error(full + ": missing [channel] section");

  RunConfig config;
  static const Section empty;

  {
    SectionReader r(sections.at("protocol"), full + ": [protocol]");
    config.modulation.v_mod = r.required_number("v_mod");
    const std::string* det = r.find("detection");
    if (!det)
      throw config_error(r.where + ": missing required key 'detection'");
    config.detection = detection_from_string(*det, r.where + ".detection");
    config.protocol.beta = r.number("beta", 0.95);
    config.protocol.fer = r.number("fer", 0.0);
    config.protocol.nu_disclosed = r.number("nu_disclosed", 0.0);
    config.protocol.symbol_rate = r.number("symbol_rate", 1e8);
    const std::string trust = r.text("trust", "strict");
    if (trust == "strict")
      config.trust = TrustAssumption::strict;
    else if (trust == "loose")
      config.trust = TrustAssumption::loose;
    else
      throw config_error(r.where + ".trust: expected strict or loose");
    const std::string route = r.text("route", "purification");
    if (route == "purification")
      config.route = HolevoRoute::purification;
    else if (route == "cloner")
      config.route = HolevoRoute::cloner;
    else
      throw config_error(r.where + ".route: expected purification or cloner");
    r.reject_unknown();
    try {
      config.modulation.validate();
      config.protocol.validate();
    } catch (const error& e) {
      throw config_error(r.where + ": " + e.what());
    }
  }

  bool explicit_xi = false;
  {
    SectionReader r(sections.at("channel"), full + ": [channel]");
    const bool has_distance = r.has("distance_km");
    const bool has_t = r.has("t_ch");
    if (has_distance == has_t)
      throw config_error(r.where +
                         ": give exactly one of distance_km and t_ch");
    if (has_distance) config.distance_km = r.required_number("distance_km");
    if (has_t) config.t_ch = r.required_number("t_ch");
    config.fiber_db_per_km = r.number("fiber_db_per_km", 0.2);
    config.eta_coup = r.number("eta_coup", 1.0);
    config.eta_det = r.number("eta_det", 1.0);
    if (r.has("xi")) {
      explicit_xi = true;
      config.channel.xi = r.required_number("xi");
    }
    r.reject_unknown();
  }

  if (sections.count("hardware")) {
    SectionReader r(sections.at("hardware"), full + ": [hardware]");
    if (r.has("file")) {
      const std::string file = r.text("file", "");
      r.reject_unknown();  // file is exclusive with inline keys
      config.hardware = parse_hardware_file(resolve_config_path(file, full));
    } else {
      config.hardware = hardware_from_reader(r);
      r.reject_unknown();
    }
  }

  if (explicit_xi && config.hardware)
    throw config_error(full +
                       ": channel.xi and a [hardware] description are "
                       "mutually exclusive — the budget defines xi");
  if (!explicit_xi && !config.hardware)
    throw config_error(full +
                       ": provide channel.xi or a [hardware] description");

  {
    SectionReader r(sections.count("simulation")
                        ? sections.at("simulation")
                        : empty,
                    full + ": [simulation]");
    config.sim.n_symbols =
        static_cast<std::size_t>(r.integer("n_symbols", 100000));
    config.sim.seed = r.integer("seed", 1);
    config.sim.phi = r.number("phi", 1.0);
    config.sim.xi_det_frames = r.number("xi_det", 0.0);
    config.sim.reveal_fraction = r.number("reveal_fraction", 0.10);
    config.sim.n_calibration =
        static_cast<std::size_t>(r.integer("n_calibration", 100000));
    config.sim.adc.enabled = r.flag("adc", false);
    config.sim.adc.range_ru = r.number("adc_range_ru", 0.0);
    config.sim.adc.adc_bits_n = static_cast<int>(r.integer("adc_bits_n", 0));
    r.reject_unknown();
  }

  try {
    rebuild_channel(config);
  } catch (const config_error&) {
    throw;
  } catch (const error& e) {
    throw config_error(full + ": " + e.what());
  }
  return config;
}

}  // namespace cvqkd
