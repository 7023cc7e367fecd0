#pragma once

// Hardware excess-noise models for a coherent-state CV-QKD link. Every model
// returns a quadrature-variance contribution in shot-noise units, referred to
// the channel output (Bob's side, before any dual-quadrature splitting), so
// contributions from independent mechanisms add. mu is the number of measured
// quadratures (1 homodyne, 2 heterodyne); only the receiver-electronics
// models (detection, ADC, CMRR) scale with mu, because those setups duplicate
// the receiver chain per quadrature.

#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <string>

#include "cvqkd/states.hpp"
#include "cvqkd/units.hpp"

namespace cvqkd {

// Datasheet-level description of the transmitter and receiver hardware.
// SI units throughout; cmrr is the linear amplitude ratio (file input is in
// dB and converted on load).
struct HardwareParams {
  double rin_sig = 0.0;  // relative intensity noise of the signal laser, 1/Hz
  double rin_lo = 0.0;   // relative intensity noise of the local oscillator, 1/Hz
  double bandwidth_b = 0.0;   // electronic bandwidth, Hz
  double pulse_tau = 0.0;     // pulse duration, s
  double opt_freq_f = 0.0;    // optical frequency, Hz
  double p_lo = 0.0;          // local-oscillator power, W
  double cmrr = std::numeric_limits<double>::infinity();  // linear ratio
  double nep = 0.0;                // noise-equivalent power, W/sqrt(Hz)
  double responsivity_rho = 0.0;   // A/W
  double ti_gain_g = 0.0;          // transimpedance gain, V/A
  double adc_range_ru = 0.0;       // full ADC voltage range, V
  int adc_bits_n = 0;              // ADC resolution, bits
  double v_adc_intr = 0.0;         // intrinsic ADC noise, V^2
  double n_raman_dbm_per_nm =
      -std::numeric_limits<double>::infinity();  // Raman power density, dBm/nm
  double delta_lambda = 0.0;  // optical filter window, m (0 = derive)
  double wavelength = 0.0;    // signal wavelength, m (used to derive window)
  double amp_gain_g = 0.0;    // modulator driver amplifier gain
  double du_dac = 0.0;        // DAC voltage resolution, V
  double u_pi = 0.0;          // modulator half-wave voltage, V
  double u_dac = 0.0;         // DAC full range, V (quadrant-modulation variant)
  double pt_omega = 0.0;      // pilot-tone angular frequency, rad/s
  double pt_dt = 0.0;         // pilot-tone sampling-time jitter, s
  double pt_photons = 0.0;    // mean pilot-tone photon number
  long pt_samples_n = 0;      // pilot-tone samples per phase estimate
};

// Named noise components and their sum (all SNU).
struct NoiseBudget {
  std::map<std::string, double> components;
  double total = 0.0;
};

// --- transmitter-side models -------------------------------------------------

// Intensity noise of the signal laser: xi = T * v_mod * sqrt(rin_sig * B).
inline double xi_rin_signal(double t, double v_mod, double rin_sig, double b) {
  if (t < 0 || v_mod < 0 || rin_sig < 0 || b < 0)
    throw error("xi_rin_signal: arguments must be >= 0");
  return t * v_mod * std::sqrt(rin_sig * b);
}

// Intensity noise of the local oscillator: xi = (1/4) rin_lo * B * V,
// where V is the quadrature variance excluding this contribution.
inline double xi_rin_lo(double rin_lo, double b, double v_not_rin) {
  if (rin_lo < 0 || b < 0) throw error("xi_rin_lo: arguments must be >= 0");
  if (v_not_rin < 1.0)
    throw error("xi_rin_lo: variance must contain at least shot noise");
  return 0.25 * rin_lo * b * v_not_rin;
}

// Finite-resolution modulation voltage (upper bound):
// xi <= T * v_mod * (x + x^2/2)^2 with x = pi * g * dU / U_pi.
inline double xi_modulation(double t, double v_mod, double amp_gain_g,
                            double du_dac, double u_pi) {
  if (!(u_pi > 0)) throw error("xi_modulation: u_pi must be > 0");
  const double x = 3.14159265358979323846 * amp_gain_g * du_dac / u_pi;
  return t * v_mod * (x + 0.5 * x * x) * (x + 0.5 * x * x);
}

// Transfer function of the double Mach-Zehnder quadrature modulator:
// alpha' = (1/2) alpha (cos phi1 + i cos phi2).
inline std::complex<double> modulator_output(std::complex<double> alpha_in,
                                             double phi1, double phi2) {
  return 0.5 * alpha_in *
         std::complex<double>(std::cos(phi1), std::cos(phi2));
}

// --- channel/reference-side models -------------------------------------------

// Residual phase noise after pilot-tone correction:
// xi = (1/2) v_mod * v_pt / (N * n_pt) with v_pt = 1 + xi_pt.
inline double xi_pnc(double v_mod, double v_pt, long pt_samples_n,
                     double pt_photons) {
  if (pt_samples_n < 1) throw error("xi_pnc: need at least one pilot sample");
  if (!(pt_photons > 0)) throw error("xi_pnc: pilot photon number must be > 0");
  return 0.5 * v_mod * v_pt / (static_cast<double>(pt_samples_n) * pt_photons);
}

// Pilot-tone phase error from sampling-time jitter (upper bound):
// xi <= 4 n_pt (w dt + (w dt)^2 / 2)^2.
inline double xi_pt_phase(double pt_photons, double pt_omega, double pt_dt) {
  const double x = pt_omega * pt_dt;
  return 4.0 * pt_photons * (x + 0.5 * x * x) * (x + 0.5 * x * x);
}

// Wavelength window corresponding to an electronic bandwidth B at carrier
// wavelength lambda: delta_lambda = lambda^2 * B / c.
inline double wavelength_window(double lambda, double b) {
  if (!(lambda > 0) || b < 0)
    throw error("wavelength_window: lambda must be > 0 and b >= 0");
  return lambda * lambda * b / speed_of_light;
}

// Raman scattering noise from a co-propagating classical channel:
// xi = 2 * delta_lambda * 10^(N_ram/10) * tau / (h f) * 1e6.
// N_ram is a power density in dBm/nm and delta_lambda is in meters; the 1e6
// constant converts the mW/nm density to W/m so the product is a power.
inline double xi_raman(double n_raman_dbm_per_nm, double delta_lambda,
                       double tau, double f) {
  if (delta_lambda < 0 || tau < 0 || !(f > 0))
    throw error("xi_raman: invalid arguments");
  return 2.0 * delta_lambda * std::pow(10.0, n_raman_dbm_per_nm / 10.0) * tau /
         (planck_h * f) * 1e6;
}

// --- receiver-side models (scale with mu) -------------------------------------

// Finite common-mode rejection of the balanced receiver:
// xi = mu / (4 CMRR^2) * (h f v_mod^2 rin_sig B / (4 tau P_lo)
//                         + tau P_lo rin_lo B / (h f)).
inline double xi_cmrr(double mu, double cmrr, double v_mod, double tau,
                      double f, double p_lo, double rin_sig, double rin_lo,
                      double b) {
  if (!(cmrr > 0)) throw error("xi_cmrr: cmrr must be > 0");
  if (!(p_lo > 0)) throw error("xi_cmrr: p_lo must be > 0");
  const double hf = planck_h * f;
  return mu / (4.0 * cmrr * cmrr) *
         (hf * v_mod * v_mod * rin_sig * b / (4.0 * tau * p_lo) +
          tau * p_lo * rin_lo * b / hf);
}

// Electronic noise of the balanced receiver: xi = mu NEP^2 B tau / (h f P_lo).
inline double xi_detection(double mu, double nep, double b, double tau,
                           double f, double p_lo) {
  if (!(p_lo > 0)) throw error("xi_detection: p_lo must be > 0");
  return mu * nep * nep * b * tau / (planck_h * f * p_lo);
}

// ADC quantization and intrinsic noise:
// xi = mu tau / (h f g^2 rho^2 P_lo) * (R_U^2 / (12 * 2^(2n)) + V_intr).
inline double xi_adc(double mu, double tau, double f, double ti_gain_g,
                     double responsivity_rho, double p_lo, double adc_range_ru,
                     int adc_bits_n, double v_adc_intr) {
  if (!(p_lo > 0)) throw error("xi_adc: p_lo must be > 0");
  if (!(ti_gain_g > 0) || !(responsivity_rho > 0))
    throw error("xi_adc: gain and responsivity must be > 0");
  if (adc_bits_n < 1) throw error("xi_adc: need at least 1 bit");
  const double lsb_var = adc_range_ru * adc_range_ru /
                         (12.0 * std::exp2(2.0 * adc_bits_n));
  return mu * tau /
         (planck_h * f * ti_gain_g * ti_gain_g * responsivity_rho *
          responsivity_rho * p_lo) *
         (lsb_var + v_adc_intr);
}

// --- referral conventions ------------------------------------------------------

enum class NoiseReferral { to_input, to_output };

// Re-refer an excess noise across a transmittance t: xi_out = t * xi_in.
inline double noise_convention(double xi, double t, NoiseReferral direction) {
  if (!(t > 0)) throw error("noise_convention: t must be > 0");
  return direction == NoiseReferral::to_output ? t * xi : xi / t;
}

// Channel noise in "big Xi" form: (1 - t_ch) / t_ch + xi_a (input-referred).
inline double big_xi_channel(double t_ch, double xi_a) {
  if (!(t_ch > 0)) throw error("big_xi_channel: t_ch must be > 0");
  return (1.0 - t_ch) / t_ch + xi_a;
}

// Receiver noise in "big Xi" form: (1 - eta) / eta + nu_el / eta.
inline double big_xi_detection(double eta_det, double nu_el) {
  if (!(eta_det > 0)) throw error("big_xi_detection: eta_det must be > 0");
  return (1.0 - eta_det) / eta_det + nu_el / eta_det;
}

// Assemble the full budget for a link: evaluates every model from the
// hardware description at total transmittance t_total and modulation v_mod,
// then adds the LO intensity-noise term, whose reference variance is the
// optical variance 1 + T v_mod plus the other optical components. Components
// are keyed rin_sig, rin_lo, modulation, pnc, raman, cmrr, detection, adc.
NoiseBudget assemble_budget(const HardwareParams& hw, double t_total,
                            double v_mod, DetectionMode detection);

// Channel/receiver split of an assembled budget: receiver-electronics
// components (detection, cmrr, adc) form xi_rec; everything else is xi_ch.
std::pair<double, double> split_budget(const NoiseBudget& budget);

}  // namespace cvqkd
