#pragma once

// Canonical protocol states and their evolution. Mode ordering is fixed as
// (Alice, Bob[, ancillas...]) throughout. All covariances are in shot-noise
// units with quadrature ordering (q, p) per mode; sigma_z correlations are
// positive on q and negative on p.

#include <cmath>
#include <optional>

#include "cvqkd/gaussian.hpp"

namespace cvqkd {

// Gaussian modulation strength. v_mod is the variance of the modulated
// quadrature *operator*; the i.i.d. components q, p each have variance
// v_mod / 4, and the ensemble mean photon number is v_mod / 2.
struct ModulationSpec {
  double v_mod = 0.0;

  double component_variance() const { return v_mod / 4.0; }
  double v() const { return v_mod + 1.0; }  // EB-picture variance
  double mean_photons() const { return v_mod / 2.0; }

  void validate() const {
    if (!(v_mod >= 0.0)) throw error("ModulationSpec: v_mod must be >= 0");
  }
};

// Detection choice; mu is the number of measured quadratures per symbol.
enum class DetectionMode { homodyne = 1, heterodyne = 2 };

inline double mu_of(DetectionMode d) {
  return d == DetectionMode::homodyne ? 1.0 : 2.0;
}

// Optional split of total transmittance/noise into channel and receiver
// parts, used by trusted-device analyses: t_total = t_ch * eta_coup * eta_det
// and xi = xi_ch + xi_rec (all xi referred to the channel output).
struct ChannelDecomposition {
  double t_ch = 1.0;
  double eta_coup = 1.0;
  double eta_det = 1.0;
  double xi_ch = 0.0;
  double xi_rec = 0.0;

  double t_rec() const { return eta_coup * eta_det; }
};

// Total transmittance and output-referred excess noise of the link.
struct ChannelParams {
  double t_total = 1.0;
  double xi = 0.0;
  std::optional<ChannelDecomposition> split;

  void validate() const {
    if (!(t_total > 0.0 && t_total <= 1.0))
      throw error("ChannelParams: t_total must lie in (0, 1]");
    if (!(xi >= 0.0)) throw error("ChannelParams: xi must be >= 0");
    if (split) {
      const auto& s = *split;
      if (std::abs(s.t_ch * s.eta_coup * s.eta_det - t_total) >
          1e-9 * std::max(1.0, t_total))
        throw error("ChannelParams: decomposition does not multiply to t_total");
      if (std::abs(s.xi_ch + s.xi_rec - xi) > 1e-9 * std::max(1.0, xi))
        throw error("ChannelParams: decomposition does not sum to xi");
    }
  }
};

namespace detail {
inline Matd standard_form(double a, double b, double c) {
  Matd m = Matd::Zero(4, 4);
  m(0, 0) = m(1, 1) = a;
  m(2, 2) = m(3, 3) = b;
  m(0, 2) = m(2, 0) = c;
  m(1, 3) = m(3, 1) = -c;
  return m;
}
}  // namespace detail

// Two-mode squeezed vacuum state of variance v >= 1:
// [[v I, sqrt(v^2-1) sigma_z], [sqrt(v^2-1) sigma_z, v I]]. Pure for all v.
inline Matd tmsvs(double v) {
  if (!(v >= 1.0)) throw error("tmsvs: variance must be >= 1");
  return detail::standard_form(v, v, std::sqrt(v * v - 1.0));
}

// Lossy, noisy bosonic channel acting on mode 2 (Bob) of a two-mode state:
// Bob's block -> t * B + (1 - t + xi) I, correlations scaled by sqrt(t),
// Alice's block untouched. Equivalent to mixing Bob's mode with a thermal
// ancilla of variance 1 + xi/(1-t) on a transmittance-t beamsplitter; the
// closed form stays finite and continuous at t = 1.
inline Matd noisy_channel(const Matd& sigma, double t, double xi) {
  require_covariance(sigma);
  if (sigma.rows() != 4)
    throw dimension_error("noisy_channel: expected a two-mode state");
  if (!(t > 0.0 && t <= 1.0)) throw error("noisy_channel: t must lie in (0, 1]");
  if (!(xi >= 0.0)) throw error("noisy_channel: xi must be >= 0");
  Matd out = sigma;
  const double rt = std::sqrt(t);
  out.block<2, 2>(0, 2) *= rt;
  out.block<2, 2>(2, 0) *= rt;
  out.block<2, 2>(2, 2) =
      t * sigma.block<2, 2>(2, 2) + (1.0 - t + xi) * Eigen::Matrix2d::Identity();
  return out;
}

// Split Bob's mode (mode 2) on a balanced beamsplitter against vacuum for
// dual-quadrature detection. Returns the three-mode state (A, B1, B2).
inline Matd heterodyne_split(const Matd& sigma) {
  require_covariance(sigma);
  if (sigma.rows() != 4)
    throw dimension_error("heterodyne_split: expected a two-mode state");
  const Matd ext = direct_sum(sigma, Matd::Identity(2, 2));
  return apply_symplectic(beamsplitter(0.5, 1, 2, 3), ext);
}

// Map the prepare-and-measure description
//   [[v_mod I, c I], [c I, v_b I]]
// (Alice's transmitted-data covariance against Bob's mode) onto the
// equivalent entanglement-based two-mode state
//   [[(v_mod + 1) I, c' sigma_z], [c' sigma_z, v_b I]],
// where c' = c * sqrt((v_mod + 2) / v_mod). This composes the rescaling of
// Alice's data with the deconvolution of her readout, so that a channel-
// evolved PM matrix lands exactly on the EB matrix of the shared state.
inline Matd pm_to_eb(const Matd& sigma_pm, double v_mod) {
  require_covariance(sigma_pm);
  if (sigma_pm.rows() != 4)
    throw dimension_error("pm_to_eb: expected a two-mode matrix");
  if (!(v_mod > 0.0)) throw error("pm_to_eb: v_mod must be > 0");
  const double a = sigma_pm(0, 0), c = sigma_pm(0, 2), b = sigma_pm(2, 2);
  const double scale = std::max(1.0, sigma_pm.lpNorm<Eigen::Infinity>());
  Matd pm_form = Matd::Zero(4, 4);
  pm_form(0, 0) = pm_form(1, 1) = a;
  pm_form(2, 2) = pm_form(3, 3) = b;
  pm_form(0, 2) = pm_form(2, 0) = pm_form(1, 3) = pm_form(3, 1) = c;
  if ((sigma_pm - pm_form).lpNorm<Eigen::Infinity>() > 1e-9 * scale)
    throw error("pm_to_eb: input is not in PM form [[v I, c I], [c I, b I]]");
  if (std::abs(a - v_mod) > 1e-9 * std::max(1.0, v_mod))
    throw error("pm_to_eb: Alice block does not match v_mod");
  return detail::standard_form(v_mod + 1.0, b,
                               c * std::sqrt((v_mod + 2.0) / v_mod));
}

// Inverse of pm_to_eb: recover the PM description from the EB state.
inline Matd eb_to_pm(const Matd& sigma_eb, double v_mod) {
  require_covariance(sigma_eb);
  if (sigma_eb.rows() != 4)
    throw dimension_error("eb_to_pm: expected a two-mode matrix");
  if (!(v_mod > 0.0)) throw error("eb_to_pm: v_mod must be > 0");
  const double a = sigma_eb(0, 0), c = sigma_eb(0, 2), b = sigma_eb(2, 2);
  const double scale = std::max(1.0, sigma_eb.lpNorm<Eigen::Infinity>());
  if ((sigma_eb - detail::standard_form(a, b, c)).lpNorm<Eigen::Infinity>() >
      1e-9 * scale)
    throw error("eb_to_pm: input is not in two-mode standard form");
  if (std::abs(a - (v_mod + 1.0)) > 1e-9 * std::max(1.0, v_mod))
    throw error("eb_to_pm: Alice block does not match v_mod + 1");
  const double c_pm = c / std::sqrt((v_mod + 2.0) / v_mod);
  Matd out = Matd::Zero(4, 4);
  out(0, 0) = out(1, 1) = v_mod;
  out(2, 2) = out(3, 3) = b;
  out(0, 2) = out(2, 0) = out(1, 3) = out(3, 1) = c_pm;
  return out;
}

}  // namespace cvqkd
