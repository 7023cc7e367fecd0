// End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
// the process exit status is the number of failed criteria.

#include <cvqkd/config.hpp>
#include <cvqkd/estimation.hpp>
#include <cvqkd/gaussian.hpp>
#include <cvqkd/noise.hpp>
#include <cvqkd/security.hpp>
#include <cvqkd/simulate.hpp>
#include <cvqkd/states.hpp>
#include <cvqkd/units.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace cvqkd;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("criterion %2d: %s  %s\n", criterion, pass ? "PASS" : "FAIL",
              detail.c_str());
  if (!pass) ++failures;
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

Matd squeezer(double r) {
  Matd s = Matd::Zero(2, 2);
  s(0, 0) = std::exp(r);
  s(1, 1) = std::exp(-r);
  return s;
}

Matd random_two_mode_state(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  std::uniform_real_distribution<double> angle(0.0,
                                               2.0 * 3.14159265358979323846);
  std::uniform_real_distribution<double> squeeze(-1.0, 1.0);
  std::uniform_real_distribution<double> thermal(1.0, 4.0);
  const Matd s = beamsplitter(unit(gen), 0, 1, 2) *
                 direct_sum(mode_rotation(angle(gen), 0, 1),
                            mode_rotation(angle(gen), 0, 1)) *
                 direct_sum(squeezer(squeeze(gen)), squeezer(squeeze(gen))) *
                 beamsplitter(unit(gen), 0, 1, 2);
  Matd d = Matd::Zero(4, 4);
  const double nu1 = thermal(gen), nu2 = thermal(gen);
  d.diagonal() << nu1, nu1, nu2, nu2;
  return apply_symplectic(s, d);
}

Matd pm_matrix(double v_mod, double t, double xi) {
  Matd m = Matd::Zero(4, 4);
  const double c = std::sqrt(t) * v_mod;
  m(0, 0) = m(1, 1) = v_mod;
  m(2, 2) = m(3, 3) = t * v_mod + 1.0 + xi;
  m(0, 2) = m(2, 0) = m(1, 3) = m(3, 1) = c;
  return m;
}

// 1. The purification and entangling-cloner constructions of the Holevo
//    bound agree over a broad parameter grid.
void criterion_1() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  int points = 0;
  for (double vm : {1.0, 5.0, 20.0})
    for (double t : {0.1, 0.5, 0.9})
      for (double xi : {0.0, 0.01, 0.1})
        for (auto det : {DetectionMode::homodyne, DetectionMode::heterodyne}) {
          const double v = vm + 1.0;
          const double dev = std::abs(holevo_purification(v, t, xi, det) -
                                      holevo_cloner(v, t, xi, det));
          worst = std::max(worst, dev);
          ++points;
        }
  const double dt = seconds_since(t0);
  report(1, worst < 1e-9 && dt < 5.0,
         "Holevo routes on " + std::to_string(points) +
             " grid points: max |pur - cloner| = " + fmt(worst) + " (" +
             fmt(dt) + " s)");
}

// 2. Closed-form two-mode symplectic eigenvalues match the generic solver.
void criterion_2() {
  std::mt19937_64 gen(20240201);
  std::uniform_real_distribution<double> diag(1.0, 21.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  int tested = 0;
  while (tested < 1000) {
    const double a = diag(gen), b = diag(gen);
    const double c = unit(gen) * std::sqrt((a - 1.0) * (b - 1.0));
    const auto [nu1, nu2] = two_mode_symplectic_eigenvalues(a, b, c);
    if (nu2 < 1.0) continue;
    const auto nus =
        symplectic_eigenvalues(detail::standard_form(a, b, c));
    worst = std::max({worst, std::abs(nus[0] - std::max(nu1, nu2)),
                      std::abs(nus[1] - std::min(nu1, nu2))});
    ++tested;
  }
  report(2, worst < 1e-10,
         "closed vs generic eigenvalues on 1000 states: max dev = " +
             fmt(worst));
}

// 3. A heterodyne measurement equals a balanced beamsplit followed by two
//    homodyne measurements, in either order.
void criterion_3() {
  std::mt19937_64 gen(20240202);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Matd sigma = random_two_mode_state(gen);
    const Matd direct = partial_heterodyne(sigma, 1);
    const Matd split = apply_symplectic(
        beamsplitter(0.5, 1, 2, 3), direct_sum(sigma, Matd::Identity(2, 2)));
    const Matd qp = partial_homodyne(partial_homodyne(split, 1, Quadrature::q),
                                     1, Quadrature::p);
    const Matd pq = partial_homodyne(partial_homodyne(split, 2, Quadrature::p),
                                     1, Quadrature::q);
    worst = std::max({worst, (qp - direct).cwiseAbs().maxCoeff(),
                      (pq - direct).cwiseAbs().maxCoeff()});
  }
  report(3, worst < 1e-10,
         "split-and-homodyne vs heterodyne on 1000 states: max dev = " +
             fmt(worst));
}

// 4. The prepare-and-measure to entanglement-based mapping reproduces the
//    evolved two-mode matrix, and inverts exactly.
void criterion_4() {
  double worst_map = 0.0, worst_round = 0.0;
  for (double vm : {2.0, 10.0, 40.0})
    for (double t : {0.1, 0.5, 1.0})
      for (double xi : {0.0, 0.05, 0.2}) {
        const Matd pm = pm_matrix(vm, t, xi);
        const Matd eb = pm_to_eb(pm, vm);
        const double v = vm + 1.0;
        const Matd expect = detail::standard_form(
            v, t * (v - 1.0) + 1.0 + xi, std::sqrt(t * (v * v - 1.0)));
        worst_map =
            std::max(worst_map, (eb - expect).cwiseAbs().maxCoeff());
        worst_round = std::max(
            worst_round, (eb_to_pm(eb, vm) - pm).cwiseAbs().maxCoeff());
      }
  report(4, worst_map < 1e-12 && worst_round < 1e-12,
         "PM->EB map dev = " + fmt(worst_map) +
             ", round trip dev = " + fmt(worst_round) + " on 27 points");
}

// 5. The explicit three-mode heterodyne receiver splitting has the expected
//    block structure, and its (A, B1) marginal is the heterodyne-form
//    two-mode matrix.
void criterion_5() {
  double worst = 0.0;
  for (double vm : {2.0, 10.0})
    for (double t : {0.25, 0.9})
      for (double xi : {0.0, 0.08}) {
        const double v = vm + 1.0;
        const Matd ab = noisy_channel(tmsvs(v), t, xi);
        const Matd split = heterodyne_split(ab);
        const Matd a = ab.block<2, 2>(0, 0);
        const Matd b = ab.block<2, 2>(2, 2);
        const Matd c = ab.block<2, 2>(0, 2);
        const Matd eye = Matd::Identity(2, 2);
        const double rh = 1.0 / std::sqrt(2.0);
        worst = std::max(
            {worst, (split.block<2, 2>(0, 0) - a).cwiseAbs().maxCoeff(),
             (split.block<2, 2>(2, 2) - (b + eye) / 2.0).cwiseAbs().maxCoeff(),
             (split.block<2, 2>(4, 4) - (b + eye) / 2.0).cwiseAbs().maxCoeff(),
             (split.block<2, 2>(0, 2) - rh * c).cwiseAbs().maxCoeff(),
             (split.block<2, 2>(0, 4) + rh * c).cwiseAbs().maxCoeff(),
             (split.block<2, 2>(2, 4) - (eye - b) / 2.0)
                 .cwiseAbs()
                 .maxCoeff()});
        const Matd expect = detail::standard_form(
            v, (t * (v - 1.0) + 2.0 + xi) / 2.0,
            std::sqrt(t * (v * v - 1.0) / 2.0));
        worst = std::max(
            worst, (drop_mode(split, 2) - expect).cwiseAbs().maxCoeff());
      }
  report(5, worst < 1e-12,
         "three-mode splitting block structure: max dev = " + fmt(worst));
}

// 6. Pure states carry zero entropy and trivial channels leak nothing.
void criterion_6() {
  bool pure_ok = true;
  for (double v : {1.0, 2.0, 5.0, 20.0})
    pure_ok = pure_ok && von_neumann_entropy(tmsvs(v)) == 0.0;
  const double chi_id =
      std::abs(holevo_purification(11.0, 1.0, 0.0, DetectionMode::homodyne));
  const double chi_nosig =
      std::abs(holevo_purification(1.0, 0.5, 0.0, DetectionMode::homodyne));
  report(6, pure_ok && chi_id < 1e-12 && chi_nosig < 1e-12,
         "pure-state entropy exactly 0; chi(identity) = " + fmt(chi_id) +
             ", chi(no signal) = " + fmt(chi_nosig));
}

// 7. Reverse reconciliation yields positive key below 3 dB of loss.
void criterion_7() {
  const double i = mutual_information(0.05, 10.0, 0.0, 1.0);
  const double chi =
      holevo_purification(11.0, 0.05, 0.0, DetectionMode::homodyne);
  report(7, i - chi > 0.0,
         "secret fraction at t = 0.05: r = " + fmt(i - chi));
}

// 8. Switching to a dual-quadrature receiver exactly doubles the electronic
//    noise terms and leaves every optical term untouched.
void criterion_8() {
  const std::string hw_path =
      std::string(CVQKD_SOURCE_DIR) + "/configs/hardware_good.txt";
  const HardwareParams hw = parse_hardware_file(hw_path);
  const double t_total = 0.34281206780105417;
  const NoiseBudget hom =
      assemble_budget(hw, t_total, 5.0, DetectionMode::homodyne);
  const NoiseBudget het =
      assemble_budget(hw, t_total, 5.0, DetectionMode::heterodyne);
  bool ok = true;
  for (const char* k : {"detection", "adc", "cmrr"})
    ok = ok && het.components.at(k) == 2.0 * hom.components.at(k);
  for (const char* k : {"rin_sig", "rin_lo", "modulation", "pnc", "raman"})
    ok = ok && het.components.at(k) == hom.components.at(k);
  report(8, ok,
         "receiver terms double exactly, optical terms bit-identical");
}

// 9. The derived Raman acceptance window at 1550 nm / 1 GHz is about 8 pm.
void criterion_9() {
  const double w = wavelength_window(1550e-9, 1e9);
  const bool ok = std::abs(w - 8.0e-12) < 0.05 * 8.0e-12;
  report(9, ok, "window(1550 nm, 1 GHz) = " + fmt(w * 1e12) + " pm");
}

// 10. Estimation on a million simulated symbols recovers the ground truth:
//     transmittance to 1% relative, excess noise to 0.01 absolute, and the
//     variance and covariance routes agree within combined standard errors.
void criterion_10() {
  const auto t0 = std::chrono::steady_clock::now();
  RunConfig config = load_run_config(std::string(CVQKD_SOURCE_DIR) +
                                     "/configs/sim_accept.conf");
  const SimOutput sim = simulate(config.sim);
  const EstimationResult est =
      estimate(sim, config.modulation, config.sim.reveal_fraction);

  const double t_true = config.channel.t_total;   // 0.5
  const double xi_true = config.channel.xi;       // 0.05
  const double t_err = std::abs(est.direct.t - t_true) / t_true;
  const double xi_err = std::abs(est.direct.xi - xi_true);
  const double dt_t = std::abs(est.direct.t - est.covariance.t);
  const double dt_se = 3.0 * std::hypot(est.direct.se_t, est.covariance.se_t);
  const double dx_x = std::abs(est.direct.xi - est.covariance.xi);
  const double dx_se =
      3.0 * std::hypot(est.direct.se_xi, est.covariance.se_xi);
  const double dt = seconds_since(t0);

  const bool ok = sim.records.size() == 1000000 && t_err < 0.01 &&
                  xi_err < 0.01 && est.routes_agree && dt_t <= dt_se &&
                  dx_x <= dx_se && dt < 60.0;
  report(10, ok,
         "1e6 symbols: |dT|/T = " + fmt(t_err) + ", |dxi| = " + fmt(xi_err) +
             ", route gaps " + fmt(dt_t) + "/" + fmt(dx_x) +
             " vs 3-sigma " + fmt(dt_se) + "/" + fmt(dx_se) + " (" + fmt(dt) +
             " s)");
}

// 11. The command-line simulator is byte-deterministic: identical config and
//     seed give identical record dumps and identical reports.
void criterion_11() {
  const fs::path dir = fs::temp_directory_path() / "cvqkd_acceptance";
  fs::create_directories(dir);
  const std::string config =
      std::string(CVQKD_SOURCE_DIR) + "/configs/sim_accept.conf";
  const std::string cli = CVQKD_CLI_PATH;

  const auto run_once = [&](const std::string& tag) {
    const fs::path dump = dir / ("records_" + tag + ".csv");
    const fs::path rep = dir / ("report_" + tag + ".json");
    const std::string cmd = cli + " simulate --config " + config +
                            " --seed 9 --symbols 50000 --dump " +
                            dump.string() + " > " + rep.string();
    return std::system(cmd.c_str()) == 0;
  };
  const auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };

  const bool ran = run_once("a") && run_once("b");
  const std::string da = slurp(dir / "records_a.csv");
  const std::string db = slurp(dir / "records_b.csv");
  const std::string ra = slurp(dir / "report_a.json");
  const std::string rb = slurp(dir / "report_b.json");
  const bool ok = ran && !da.empty() && da == db && !ra.empty() && ra == rb;
  report(11, ok,
         "two identical CLI runs: dumps " +
             std::string(da == db ? "identical" : "differ") + ", reports " +
             std::string(ra == rb ? "identical" : "differ"));
}

// 12. Quadrature unit conversions compose to the identity and variances scale
//     as the squared amplitudes.
void criterion_12() {
  const auto snu = QuadratureUnit::snu();
  const auto nu = QuadratureUnit::nu();
  const auto si =
      QuadratureUnit::si(2.0 * 3.14159265358979323846 * 193.4e12);
  double worst = 0.0;
  for (auto axis : {Quadrature::q, Quadrature::p}) {
    for (auto kind : {ValueKind::amplitude, ValueKind::variance}) {
      double x = 1.234;
      x = convert_quadrature(x, snu, nu, axis, kind);
      x = convert_quadrature(x, nu, si, axis, kind);
      x = convert_quadrature(x, si, snu, axis, kind);
      worst = std::max(worst, std::abs(x - 1.234) / 1.234);
    }
    const double amp = convert_quadrature(1.0, nu, si, axis);
    const double var =
        convert_quadrature(1.0, nu, si, axis, ValueKind::variance);
    worst = std::max(worst, std::abs(var - amp * amp) / (amp * amp));
  }
  const double half =
      convert_quadrature(1.0, snu, nu, Quadrature::q, ValueKind::variance);
  worst = std::max(worst, std::abs(half - 0.5));
  report(12, worst < 1e-14,
         "unit round trips and variance scaling: max rel dev = " + fmt(worst));
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();
  criterion_12();
  if (failures == 0)
    std::printf("all 12 criteria passed\n");
  else
    std::printf("%d criteria failed\n", failures);
  return failures;
}
