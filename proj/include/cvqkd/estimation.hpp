#pragma once

// Parameter estimation from simulated (or recorded) detector voltages:
// receiver calibration from vacuum/dark frames, channel transmittance and
// excess noise by two routes (variance differences, and direct covariance-
// matrix reconstruction from disclosed symbols), with standard errors.

#include <cstddef>
#include <string>
#include <vector>

#include "cvqkd/simulate.hpp"

namespace cvqkd {

// Calibration data that cannot support estimation at all (empty frames,
// non-positive recovered gain) — mapped to its own process exit code.
struct calibration_error : error {
  using error::error;
};

// Conversion gain and electronic-noise floor recovered from calibration
// frames: phi = V(vacuum) - V(dark), n_det = V(dark), both in V^2.
struct CalibrationEstimate {
  double phi = 0.0;
  double n_det = 0.0;
  double se_phi = 0.0;
  double se_n_det = 0.0;
  std::size_t n_vacuum = 0;
  std::size_t n_dark = 0;
};

CalibrationEstimate calibrate_phi(const CalibrationFrames& frames);

// Measurement variances in shot-noise units, corrected for conversion gain
// and electronic noise. v_b is Bob's marginal variance over all symbols;
// v_cond the conditional variance given Alice's data, from pooled residuals
// of a linear fit on the disclosed symbols. Per-quadrature values are kept
// for symmetry checks.
struct VarianceEstimate {
  double v_b = 0.0;
  double v_cond = 0.0;
  double se_v_b = 0.0;
  double se_v_cond = 0.0;
  double v_b_q = 0.0;
  double v_b_p = 0.0;
  double v_cond_q = 0.0;
  double v_cond_p = 0.0;
  double slope_q = 0.0;  // fitted conditional-mean slope vs 2 * alice value
  double slope_p = 0.0;
  std::size_t n_total = 0;
  std::size_t n_revealed = 0;
  double mu = 1.0;  // measured quadratures per symbol, derived from records
};

VarianceEstimate estimate_variances(const std::vector<SymbolRecord>& records,
                                    const std::vector<std::size_t>& revealed,
                                    double phi, double n_det = 0.0);

// Variance-difference route: xi = mu (v_cond - 1), t = mu (v_b - v_cond) /
// v_mod, with first-order standard errors.
struct TransmissionEstimate {
  double t = 0.0;
  double xi = 0.0;
  double se_t = 0.0;
  double se_xi = 0.0;
};

TransmissionEstimate estimate_t_xi(const VarianceEstimate& variances,
                                   double v_mod);

// Covariance route: reconstruct the entanglement-based two-mode matrix
// (a_eb, b_eb, c_eb) from Bob's variance and the Alice-Bob cross moment of
// the disclosed symbols, then read t and xi off the standard form.
struct CovarianceEstimate {
  double a_eb = 0.0;
  double b_eb = 0.0;
  double c_eb = 0.0;
  double t = 0.0;
  double xi = 0.0;
  double se_t = 0.0;
  double se_xi = 0.0;
  double c_pm_q = 0.0;  // per-branch cross moments, prepare-and-measure frame
  double c_pm_p = 0.0;
  std::size_t n_revealed = 0;
};

CovarianceEstimate estimate_covariance_eb(
    const std::vector<SymbolRecord>& records,
    const std::vector<std::size_t>& revealed, double phi, double n_det,
    double v_mod);

// Measured signal-to-noise ratio.
inline double snr_from_variances(double v_b, double v_cond) {
  if (!(v_cond > 0)) throw error("snr_from_variances: v_cond must be > 0");
  return v_b / v_cond - 1.0;
}

// Full pipeline over one simulation output. Routes are compared at three
// combined standard errors; discrepancies and unphysical estimates are
// reported as warnings, never silently clamped.
struct EstimationResult {
  CalibrationEstimate calibration;
  VarianceEstimate variances;
  TransmissionEstimate direct;
  CovarianceEstimate covariance;
  double snr = 0.0;
  bool routes_agree = true;
  bool calibration_suspect = false;
  std::vector<std::string> warnings;
};

EstimationResult estimate(const SimOutput& sim,
                          const ModulationSpec& modulation,
                          double reveal_fraction);

}  // namespace cvqkd
