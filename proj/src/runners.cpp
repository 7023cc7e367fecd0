#include "cvqkd/runners.hpp"

#include <cmath>
#include <vector>

#include <json.hpp>

#include "cvqkd/estimation.hpp"
#include "cvqkd/io.hpp"

namespace cvqkd {

namespace {

using nlohmann::json;

const char* trust_name(TrustAssumption trust) {
  return trust == TrustAssumption::strict ? "strict" : "loose";
}

const char* route_name(HolevoRoute route) {
  return route == HolevoRoute::purification ? "purification" : "cloner";
}

const char* detection_name(DetectionMode detection) {
  return detection == DetectionMode::homodyne ? "homodyne" : "heterodyne";
}

json budget_json(const NoiseBudget& budget) {
  json comps = json::object();
  for (const auto& [name, value] : budget.components) comps[name] = value;
  const auto [xi_ch, xi_rec] = split_budget(budget);
  return json{{"components", comps},
              {"total", budget.total},
              {"xi_ch", xi_ch},
              {"xi_rec", xi_rec}};
}

json report_json(const RunConfig& config, const KeyRateReport& report) {
  json j;
  j["schema"] = keyrate_csv_schema;
  j["inputs"] = {{"v_mod", report.v_mod},
                 {"detection", detection_name(config.detection)},
                 {"t_total", report.t_total},
                 {"xi", report.xi_total},
                 {"beta", config.protocol.beta},
                 {"fer", config.protocol.fer},
                 {"nu_disclosed", config.protocol.nu_disclosed},
                 {"symbol_rate", config.protocol.symbol_rate},
                 {"trust", trust_name(report.trust)},
                 {"route", route_name(report.route)}};
  if (config.distance_km) j["inputs"]["distance_km"] = *config.distance_km;
  if (config.hardware) j["budget"] = budget_json(config.budget);
  j["result"] = {{"snr", report.snr},
                 {"i_ab_bits", report.i_ab},
                 {"chi_eb_bits", report.chi_eb},
                 {"secret_fraction_bits", report.secret_fraction},
                 {"key_rate_bps", report.key_rate},
                 {"abort", report.abort}};
  return j;
}

void print_keyrate_text(std::ostream& out, const RunConfig& config,
                        const KeyRateReport& report) {
  out << "link:     t_total = " << format_double(report.t_total)
      << ", xi = " << format_double(report.xi_total) << " SNU\n";
  out << "protocol: v_mod = " << format_double(report.v_mod) << ", "
      << detection_name(config.detection)
      << ", beta = " << format_double(config.protocol.beta)
      << ", fer = " << format_double(config.protocol.fer)
      << ", nu = " << format_double(config.protocol.nu_disclosed) << "\n";
  out << "bound:    " << trust_name(report.trust) << " trust, "
      << route_name(report.route) << " route\n";
  if (config.hardware) {
    out << "noise budget (SNU at channel output):\n";
    for (const auto& [name, value] : config.budget.components)
      out << "  " << name << " = " << format_double(value) << "\n";
    const auto [xi_ch, xi_rec] = split_budget(config.budget);
    out << "  total = " << format_double(config.budget.total)
        << " (channel " << format_double(xi_ch) << " + receiver "
        << format_double(xi_rec) << ")\n";
  }
  out << "snr             = " << format_double(report.snr) << "\n";
  out << "i_ab            = " << format_double(report.i_ab) << " bits/symbol\n";
  out << "chi_eb          = " << format_double(report.chi_eb)
      << " bits/symbol\n";
  out << "secret fraction = " << format_double(report.secret_fraction)
      << " bits/symbol\n";
  out << "key rate        = " << format_double(report.key_rate) << " bits/s\n";
  out << "status          = " << (report.abort ? "ABORT (no positive key)"
                                               : "key available")
      << "\n";
}

struct SweepPoint {
  double value = 0.0;
  KeyRateReport report;
};

void print_sweep_csv(std::ostream& out, const std::string& param,
                     const std::vector<SweepPoint>& points) {
  out << "# schema: " << sweep_csv_schema << "\n";
  out << "param,value,t_total,xi,snr,i_ab,chi_eb,secret_fraction,key_rate_bps,"
         "abort\n";
  for (const auto& pt : points) {
    out << csv_field(param) << ',' << format_double(pt.value) << ','
        << format_double(pt.report.t_total) << ','
        << format_double(pt.report.xi_total) << ','
        << format_double(pt.report.snr) << ','
        << format_double(pt.report.i_ab) << ','
        << format_double(pt.report.chi_eb) << ','
        << format_double(pt.report.secret_fraction) << ','
        << format_double(pt.report.key_rate) << ','
        << (pt.report.abort ? "true" : "false") << '\n';
  }
}

json estimation_json(const RunConfig& config, const SimOutput& sim,
                     const EstimationResult& est) {
  json j;
  j["schema"] = "cvqkd.estimation/1";
  j["inputs"] = {{"n_symbols", sim.records.size()},
                 {"seed", config.sim.seed},
                 {"detection", detection_name(config.detection)},
                 {"v_mod", config.modulation.v_mod},
                 {"truth", {{"t_total", config.channel.t_total},
                            {"xi", config.channel.xi}}},
                 {"phi", config.sim.phi},
                 {"xi_det", config.sim.xi_det_frames},
                 {"reveal_fraction", config.sim.reveal_fraction},
                 {"n_calibration", config.sim.n_calibration},
                 {"adc", config.sim.adc.enabled}};
  j["rng"] = sim.rng_algorithm;
  j["calibration"] = {{"phi", est.calibration.phi},
                      {"n_det", est.calibration.n_det},
                      {"se_phi", est.calibration.se_phi},
                      {"se_n_det", est.calibration.se_n_det},
                      {"n_vacuum", est.calibration.n_vacuum},
                      {"n_dark", est.calibration.n_dark}};
  j["variances"] = {{"v_b", est.variances.v_b},
                    {"v_cond", est.variances.v_cond},
                    {"se_v_b", est.variances.se_v_b},
                    {"se_v_cond", est.variances.se_v_cond},
                    {"v_b_q", est.variances.v_b_q},
                    {"v_b_p", est.variances.v_b_p},
                    {"v_cond_q", est.variances.v_cond_q},
                    {"v_cond_p", est.variances.v_cond_p},
                    {"slope_q", est.variances.slope_q},
                    {"slope_p", est.variances.slope_p},
                    {"n_total", est.variances.n_total},
                    {"n_revealed", est.variances.n_revealed},
                    {"mu", est.variances.mu}};
  j["direct"] = {{"t", est.direct.t},
                 {"xi", est.direct.xi},
                 {"se_t", est.direct.se_t},
                 {"se_xi", est.direct.se_xi}};
  j["covariance"] = {{"a_eb", est.covariance.a_eb},
                     {"b_eb", est.covariance.b_eb},
                     {"c_eb", est.covariance.c_eb},
                     {"t", est.covariance.t},
                     {"xi", est.covariance.xi},
                     {"se_t", est.covariance.se_t},
                     {"se_xi", est.covariance.se_xi},
                     {"c_pm_q", est.covariance.c_pm_q},
                     {"c_pm_p", est.covariance.c_pm_p},
                     {"n_revealed", est.covariance.n_revealed}};
  j["snr"] = est.snr;
  j["routes_agree"] = est.routes_agree;
  j["calibration_suspect"] = est.calibration_suspect;
  j["warnings"] = est.warnings;
  return j;
}

void print_estimation_text(std::ostream& out, const RunConfig& config,
                           const SimOutput& sim, const EstimationResult& est) {
  out << "simulated " << sim.records.size() << " symbols ("
      << detection_name(config.detection) << ", seed "
      << config.sim.seed << ", rng " << sim.rng_algorithm << ")\n";
  out << "truth:       t = " << format_double(config.channel.t_total)
      << ", xi = " << format_double(config.channel.xi) << "\n";
  out << "calibration: phi = " << format_double(est.calibration.phi)
      << " +- " << format_double(est.calibration.se_phi)
      << ", n_det = " << format_double(est.calibration.n_det) << " +- "
      << format_double(est.calibration.se_n_det) << "\n";
  out << "variances:   v_b = " << format_double(est.variances.v_b)
      << ", v_cond = " << format_double(est.variances.v_cond)
      << " (snr = " << format_double(est.snr) << ")\n";
  out << "direct:      t = " << format_double(est.direct.t) << " +- "
      << format_double(est.direct.se_t)
      << ", xi = " << format_double(est.direct.xi) << " +- "
      << format_double(est.direct.se_xi) << "\n";
  out << "covariance:  t = " << format_double(est.covariance.t) << " +- "
      << format_double(est.covariance.se_t)
      << ", xi = " << format_double(est.covariance.xi) << " +- "
      << format_double(est.covariance.se_xi) << "\n";
  out << "routes " << (est.routes_agree ? "agree" : "DISAGREE")
      << " within three combined standard errors\n";
  for (const auto& w : est.warnings) out << "warning: " << w << "\n";
}

// Shared exception-to-exit-code policy for all runners.
template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const config_error& e) {
    err << "config error: " << e.what() << "\n";
    return exit_code::config;
  } catch (const calibration_error& e) {
    err << "calibration error: " << e.what() << "\n";
    return exit_code::calibration;
  } catch (const error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::config;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

OutputFormat format_from_string(const std::string& s) {
  if (s == "text") return OutputFormat::text;
  if (s == "json") return OutputFormat::json;
  if (s == "csv") return OutputFormat::csv;
  throw config_error("unknown output format '" + s +
                     "' (expected text, json or csv)");
}

int run_keyrate(const KeyrateArgs& args, std::ostream& out,
                std::ostream& err) {
  return guarded(err, [&]() {
    const RunConfig config = load_run_config(args.config_path);
    const KeyRateReport report =
        evaluate_keyrate(config.modulation, config.channel, config.detection,
                         config.protocol, config.trust, config.route);
    switch (args.format) {
      case OutputFormat::text:
        print_keyrate_text(out, config, report);
        break;
      case OutputFormat::json:
        out << report_json(config, report).dump(2) << "\n";
        break;
      case OutputFormat::csv:
        out << "# schema: " << keyrate_csv_schema << "\n";
        out << "t_total,xi,v_mod,mu,snr,i_ab,chi_eb,secret_fraction,"
               "key_rate_bps,abort\n";
        out << format_double(report.t_total) << ','
            << format_double(report.xi_total) << ','
            << format_double(report.v_mod) << ','
            << format_double(report.mu) << ',' << format_double(report.snr)
            << ',' << format_double(report.i_ab) << ','
            << format_double(report.chi_eb) << ','
            << format_double(report.secret_fraction) << ','
            << format_double(report.key_rate) << ','
            << (report.abort ? "true" : "false") << '\n';
        break;
    }
    return report.abort ? exit_code::abort : exit_code::ok;
  });
}

int run_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() {
    const RunConfig base = load_run_config(args.config_path);
    if (args.steps < 1) throw config_error("sweep: steps must be >= 1");
    if (args.log_spacing && !(args.from > 0.0 && args.to > 0.0))
      throw config_error("sweep: log spacing needs positive endpoints");

    std::vector<double> values(static_cast<std::size_t>(args.steps));
    for (int i = 0; i < args.steps; ++i) {
      const double frac =
          args.steps == 1 ? 0.0
                          : static_cast<double>(i) / (args.steps - 1);
      values[static_cast<std::size_t>(i)] =
          args.log_spacing
              ? std::exp(std::log(args.from) +
                         frac * (std::log(args.to) - std::log(args.from)))
              : args.from + frac * (args.to - args.from);
    }

    std::vector<SweepPoint> points;
    points.reserve(values.size());
    for (double value : values) {
      RunConfig config = base;
      if (args.param == "t" || args.param == "t_ch") {
        config.distance_km.reset();
        config.t_ch = value;
      } else if (args.param == "distance_km") {
        config.distance_km = value;
      } else if (args.param == "v_mod") {
        config.modulation.v_mod = value;
      } else if (args.param == "xi") {
        if (config.hardware)
          throw config_error(
              "sweep: xi is budget-defined for hardware-backed configs");
        config.channel.xi = value;
      } else if (args.param == "beta") {
        config.protocol.beta = value;
      } else {
        throw config_error("sweep: unknown parameter '" + args.param +
                           "' (expected t, distance_km, v_mod, xi or beta)");
      }
      rebuild_channel(config);
      SweepPoint pt;
      pt.value = value;
      pt.report =
          evaluate_keyrate(config.modulation, config.channel,
                           config.detection, config.protocol, config.trust,
                           config.route);
      points.push_back(pt);
    }

    if (args.format == OutputFormat::csv ||
        args.format == OutputFormat::text) {
      print_sweep_csv(out, args.param, points);
    } else {
      json j;
      j["schema"] = sweep_csv_schema;
      j["param"] = args.param;
      j["points"] = json::array();
      for (const auto& pt : points) {
        json row = {{"value", pt.value},
                    {"t_total", pt.report.t_total},
                    {"xi", pt.report.xi_total},
                    {"snr", pt.report.snr},
                    {"i_ab_bits", pt.report.i_ab},
                    {"chi_eb_bits", pt.report.chi_eb},
                    {"secret_fraction_bits", pt.report.secret_fraction},
                    {"key_rate_bps", pt.report.key_rate},
                    {"abort", pt.report.abort}};
        j["points"].push_back(row);
      }
      out << j.dump(2) << "\n";
    }
    return exit_code::ok;
  });
}

int run_simulate(const SimulateArgs& args, std::ostream& out,
                 std::ostream& err) {
  return guarded(err, [&]() {
    RunConfig config = load_run_config(args.config_path);
    if (args.seed) config.sim.seed = *args.seed;
    if (args.n_symbols) config.sim.n_symbols = *args.n_symbols;
    try {
      config.sim.validate();
    } catch (const error& e) {
      throw config_error(std::string("simulate: ") + e.what());
    }

    const SimOutput sim = simulate(config.sim);
    const EstimationResult est =
        estimate(sim, config.modulation, config.sim.reveal_fraction);

    if (!args.dump_path.empty()) dump_records(args.dump_path, sim.records);

    if (args.format == OutputFormat::text)
      print_estimation_text(out, config, sim, est);
    else
      out << estimation_json(config, sim, est).dump(2) << "\n";

    return est.calibration_suspect ? exit_code::calibration : exit_code::ok;
  });
}

int run_budget(const BudgetArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() {
    if (args.mu != 1.0 && args.mu != 2.0)
      throw config_error("budget: mu must be 1 (homodyne) or 2 (heterodyne)");
    const DetectionMode detection =
        args.mu == 1.0 ? DetectionMode::homodyne : DetectionMode::heterodyne;
    const HardwareParams hw =
        parse_hardware_file(resolve_config_path(args.hardware_path));
    const NoiseBudget budget =
        assemble_budget(hw, args.t, args.v_mod, detection);
    const auto [xi_ch, xi_rec] = split_budget(budget);

    switch (args.format) {
      case OutputFormat::text:
        out << "noise budget at t = " << format_double(args.t)
            << ", v_mod = " << format_double(args.v_mod)
            << ", mu = " << format_double(args.mu) << " (SNU)\n";
        for (const auto& [name, value] : budget.components)
          out << "  " << name << " = " << format_double(value) << "\n";
        out << "  total = " << format_double(budget.total) << "\n";
        out << "  channel part = " << format_double(xi_ch)
            << ", receiver part = " << format_double(xi_rec) << "\n";
        break;
      case OutputFormat::json: {
        json j = budget_json(budget);
        j["schema"] = budget_csv_schema;
        j["t"] = args.t;
        j["v_mod"] = args.v_mod;
        j["mu"] = args.mu;
        out << j.dump(2) << "\n";
        break;
      }
      case OutputFormat::csv:
        out << "# schema: " << budget_csv_schema << "\n";
        out << "component,xi_snu\n";
        for (const auto& [name, value] : budget.components)
          out << csv_field(name) << ',' << format_double(value) << '\n';
        out << "total," << format_double(budget.total) << '\n';
        out << "xi_ch," << format_double(xi_ch) << '\n';
        out << "xi_rec," << format_double(xi_rec) << '\n';
        break;
    }
    return exit_code::ok;
  });
}

}  // namespace cvqkd
