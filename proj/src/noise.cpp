#include "cvqkd/noise.hpp"

#include <cmath>

namespace cvqkd {

// A component is evaluated only when its driving parameters are set, so a
// partly specified hardware description yields a budget over the modelled
// terms and an all-defaults description yields zero.
NoiseBudget assemble_budget(const HardwareParams& hw, double t_total,
                            double v_mod, DetectionMode detection) {
  if (!(t_total > 0.0 && t_total <= 1.0))
    throw error("assemble_budget: t_total must lie in (0, 1]");
  if (!(v_mod >= 0.0)) throw error("assemble_budget: v_mod must be >= 0");
  const double mu = mu_of(detection);
  NoiseBudget budget;
  auto& comp = budget.components;

  // Optical, channel-side terms first: they feed the LO intensity-noise
  // reference variance.
  double sig = 0.0;
  if (hw.rin_sig > 0.0) {
    if (!(hw.bandwidth_b > 0.0))
      throw error("assemble_budget: rin_sig requires bandwidth_b");
    sig = xi_rin_signal(t_total, v_mod, hw.rin_sig, hw.bandwidth_b);
  }
  comp["rin_sig"] = sig;

  double mod = 0.0;
  if (hw.u_pi > 0.0) {
    mod = xi_modulation(t_total, v_mod, hw.amp_gain_g, hw.du_dac, hw.u_pi);
  } else if (hw.du_dac != 0.0) {
    throw error("assemble_budget: du_dac given without u_pi");
  }
  comp["modulation"] = mod;

  double pnc = 0.0;
  if (hw.pt_samples_n > 0) {
    if (!(hw.pt_photons > 0.0))
      throw error("assemble_budget: pilot tone requires pt_photons > 0");
    const double xi_pt = xi_pt_phase(hw.pt_photons, hw.pt_omega, hw.pt_dt);
    pnc = xi_pnc(v_mod, 1.0 + xi_pt, hw.pt_samples_n, hw.pt_photons);
  }
  comp["pnc"] = pnc;

  double raman = 0.0;
  if (std::isfinite(hw.n_raman_dbm_per_nm)) {
    double dl = hw.delta_lambda;
    if (dl <= 0.0) {
      if (!(hw.wavelength > 0.0))
        throw error(
            "assemble_budget: raman term requires delta_lambda or wavelength");
      dl = wavelength_window(hw.wavelength, hw.bandwidth_b);
    }
    raman = xi_raman(hw.n_raman_dbm_per_nm, dl, hw.pulse_tau, hw.opt_freq_f);
  }
  comp["raman"] = raman;

  // LO intensity noise scales the total optical variance reaching the
  // receiver: shot noise, the attenuated modulation, and the optical excess
  // terms above (receiver electronics are not optical power and enter later).
  double lo = 0.0;
  if (hw.rin_lo > 0.0) {
    const double v_not_rin = 1.0 + t_total * v_mod + sig + mod + pnc + raman;
    lo = xi_rin_lo(hw.rin_lo, hw.bandwidth_b, v_not_rin);
  }
  comp["rin_lo"] = lo;

  // Receiver electronics, per measured quadrature.
  double cmrr = 0.0;
  if (std::isfinite(hw.cmrr)) {
    cmrr = xi_cmrr(mu, hw.cmrr, v_mod, hw.pulse_tau, hw.opt_freq_f, hw.p_lo,
                   hw.rin_sig, hw.rin_lo, hw.bandwidth_b);
  }
  comp["cmrr"] = cmrr;

  double det = 0.0;
  if (hw.nep > 0.0) {
    det = xi_detection(mu, hw.nep, hw.bandwidth_b, hw.pulse_tau, hw.opt_freq_f,
                       hw.p_lo);
  }
  comp["detection"] = det;

  double adc = 0.0;
  if (hw.adc_range_ru > 0.0 || hw.v_adc_intr > 0.0) {
    adc = xi_adc(mu, hw.pulse_tau, hw.opt_freq_f, hw.ti_gain_g,
                 hw.responsivity_rho, hw.p_lo, hw.adc_range_ru, hw.adc_bits_n,
                 hw.v_adc_intr);
  }
  comp["adc"] = adc;

  budget.total = 0.0;
  for (const auto& [name, value] : comp) budget.total += value;
  return budget;
}

std::pair<double, double> split_budget(const NoiseBudget& budget) {
  double xi_rec = 0.0;
  for (const char* name : {"cmrr", "detection", "adc"}) {
    auto it = budget.components.find(name);
    if (it != budget.components.end()) xi_rec += it->second;
  }
  return {budget.total - xi_rec, xi_rec};
}

}  // namespace cvqkd
