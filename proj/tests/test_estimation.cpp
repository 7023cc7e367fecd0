#include <doctest.h>

#include <cvqkd/estimation.hpp>
#include <cvqkd/simulate.hpp>

#include <cmath>
#include <random>

using namespace cvqkd;

namespace {

SimConfig reference_config(std::size_t n, DetectionMode det,
                           std::uint64_t seed) {
  SimConfig cfg;
  cfg.n_symbols = n;
  cfg.seed = seed;
  cfg.modulation = ModulationSpec{10.0};
  cfg.channel = ChannelParams{0.5, 0.05, std::nullopt};
  cfg.detection = det;
  cfg.phi = 2.5;
  cfg.xi_det_frames = 0.1;
  cfg.reveal_fraction = 0.25;
  cfg.n_calibration = 100000;
  return cfg;
}

CalibrationFrames synthetic_frames(double phi, double xi_det, std::size_t n,
                                   std::uint64_t seed) {
  CalibrationFrames f;
  std::mt19937_64 gen(seed);
  const double sd_shot = std::sqrt(phi);
  const double sd_dark = std::sqrt(phi * xi_det);
  for (std::size_t i = 0; i < n; ++i)
    f.vacuum.push_back(sd_shot * rng::gaussian(gen) +
                       sd_dark * rng::gaussian(gen));
  for (std::size_t i = 0; i < n; ++i)
    f.dark.push_back(sd_dark * rng::gaussian(gen));
  return f;
}

}  // namespace

TEST_CASE("shot-noise calibration recovers the receiver gain") {
  const double phi = 2.5, xi_det = 0.1;
  const CalibrationFrames f = synthetic_frames(phi, xi_det, 200000, 17);
  const CalibrationEstimate cal = calibrate_phi(f);
  CHECK(cal.n_vacuum == 200000);
  CHECK(cal.n_dark == 200000);
  CHECK(cal.se_phi > 0.0);
  CHECK(std::abs(cal.phi - phi) < 5.0 * cal.se_phi);
  CHECK(std::abs(cal.n_det - phi * xi_det) < 5.0 * cal.se_n_det);
}

TEST_CASE("calibration rejects degenerate or inconsistent frames") {
  CHECK_THROWS_AS(calibrate_phi(CalibrationFrames{}), calibration_error);
  // Dark variance above the vacuum variance implies a negative shot-noise
  // gain, which no receiver can produce.
  CalibrationFrames bad;
  std::mt19937_64 gen(3);
  for (int i = 0; i < 10000; ++i) {
    bad.vacuum.push_back(0.1 * rng::gaussian(gen));
    bad.dark.push_back(1.0 * rng::gaussian(gen));
  }
  CHECK_THROWS_AS(calibrate_phi(bad), calibration_error);
}

TEST_CASE("variance-route algebra inverts the channel map exactly") {
  // Homodyne: v_b = t v_mod + 1 + xi, v_cond = 1 + xi.
  VarianceEstimate hom;
  hom.v_b = 6.05;
  hom.v_cond = 1.05;
  hom.mu = 1.0;
  const TransmissionEstimate th = estimate_t_xi(hom, 10.0);
  CHECK(th.t == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(th.xi == doctest::Approx(0.05).epsilon(1e-13));

  // Heterodyne halves both contributions per quadrature.
  VarianceEstimate het;
  het.v_b = 3.525;
  het.v_cond = 1.025;
  het.mu = 2.0;
  const TransmissionEstimate tt = estimate_t_xi(het, 10.0);
  CHECK(tt.t == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(tt.xi == doctest::Approx(0.05).epsilon(1e-13));
}

TEST_CASE("snr from variances") {
  CHECK(snr_from_variances(6.05, 1.05) ==
        doctest::Approx(6.05 / 1.05 - 1.0).epsilon(1e-15));
  CHECK_THROWS_AS(snr_from_variances(6.05, 0.0), error);
}

TEST_CASE("homodyne pipeline recovers the ground truth") {
  const SimConfig cfg = reference_config(200000, DetectionMode::homodyne, 3);
  const SimOutput sim = simulate(cfg);
  const EstimationResult est =
      estimate(sim, cfg.modulation, cfg.reveal_fraction);

  CHECK(est.calibration.phi == doctest::Approx(2.5).epsilon(0.02));
  CHECK(est.calibration.n_det == doctest::Approx(0.25).epsilon(0.05));

  CHECK(std::abs(est.direct.t - 0.5) < 5.0 * est.direct.se_t);
  CHECK(std::abs(est.direct.xi - 0.05) < 5.0 * est.direct.se_xi);
  CHECK(est.direct.t == doctest::Approx(0.5).epsilon(0.02));

  CHECK(std::abs(est.covariance.t - 0.5) < 5.0 * est.covariance.se_t);
  CHECK(std::abs(est.covariance.xi - 0.05) < 5.0 * est.covariance.se_xi);
  CHECK(est.covariance.a_eb == doctest::Approx(11.0).epsilon(1e-12));

  CHECK(est.routes_agree);
  CHECK_FALSE(est.calibration_suspect);
  CHECK(est.snr ==
        doctest::Approx(snr_from_variances(est.variances.v_b,
                                           est.variances.v_cond))
            .epsilon(1e-12));
  // True SNR is t v_mod / (1 + xi) = 5 / 1.05.
  CHECK(est.snr == doctest::Approx(5.0 / 1.05).epsilon(0.05));
}

TEST_CASE("heterodyne pipeline recovers the ground truth") {
  const SimConfig cfg = reference_config(200000, DetectionMode::heterodyne, 4);
  const SimOutput sim = simulate(cfg);
  const EstimationResult est =
      estimate(sim, cfg.modulation, cfg.reveal_fraction);

  CHECK(est.variances.mu == 2.0);
  CHECK(std::abs(est.direct.t - 0.5) < 5.0 * est.direct.se_t);
  CHECK(std::abs(est.direct.xi - 0.05) < 5.0 * est.direct.se_xi);
  CHECK(est.routes_agree);
  CHECK_FALSE(est.calibration_suspect);
}

TEST_CASE("covariance route is internally consistent with the variance route") {
  const SimConfig cfg = reference_config(100000, DetectionMode::homodyne, 5);
  const SimOutput sim = simulate(cfg);
  const auto revealed =
      revealed_indices(sim.records.size(), cfg.reveal_fraction);
  const CalibrationEstimate cal = calibrate_phi(sim.frames);
  const VarianceEstimate var =
      estimate_variances(sim.records, revealed, cal.phi, cal.n_det);
  const CovarianceEstimate cov = estimate_covariance_eb(
      sim.records, revealed, cal.phi, cal.n_det, cfg.modulation.v_mod);

  // Both routes share the Bob marginal, so the reconstructed EB diagonal is
  // an exact function of the measured variance.
  CHECK(cov.b_eb ==
        doctest::Approx(var.mu * var.v_b - var.mu + 1.0).epsilon(1e-12));
  CHECK(cov.a_eb == 11.0);
  CHECK(cov.n_revealed == revealed.size());
  CHECK(var.n_revealed == revealed.size());
  CHECK(var.n_total == sim.records.size());
}

TEST_CASE("estimators validate their inputs") {
  const SimConfig cfg = reference_config(1000, DetectionMode::homodyne, 6);
  const SimOutput sim = simulate(cfg);
  const std::vector<std::size_t> none;
  CHECK_THROWS_AS(estimate_variances(sim.records, none, 2.5, 0.25), error);
  CHECK_THROWS_AS(estimate_variances(sim.records,
                                     revealed_indices(sim.records.size(), 0.25),
                                     0.0, 0.25),
                  calibration_error);
  CHECK_THROWS_AS(estimate_covariance_eb(sim.records, none, 2.5, 0.25, 10.0),
                  error);
  // Mixing homodyne and heterodyne records has no single mu.
  auto mixed = sim.records;
  mixed[0].basis = Basis::both;
  CHECK_THROWS_AS(
      estimate_variances(mixed, revealed_indices(mixed.size(), 0.25), 2.5,
                         0.25),
      error);
}

TEST_CASE("zero-noise channel yields a near-zero excess-noise estimate") {
  SimConfig cfg = reference_config(200000, DetectionMode::homodyne, 8);
  cfg.channel = ChannelParams{0.5, 0.0, std::nullopt};
  cfg.xi_det_frames = 0.0;
  const SimOutput sim = simulate(cfg);
  const EstimationResult est =
      estimate(sim, cfg.modulation, cfg.reveal_fraction);
  CHECK(std::abs(est.direct.xi) < 5.0 * est.direct.se_xi);
  CHECK_FALSE(est.calibration_suspect);
}
