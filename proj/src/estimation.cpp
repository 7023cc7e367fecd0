#include "cvqkd/estimation.hpp"

#include <cmath>

namespace cvqkd {

namespace {

// Mean of squares (calibration frames are zero-mean by construction) and its
// standard error: for Gaussian samples Var(u^2) = 2 (E u^2)^2.
std::pair<double, double> mean_square(const std::vector<double>& u) {
  if (u.size() < 2)
    throw calibration_error("calibration needs at least two frames");
  double acc = 0.0;
  for (double x : u) acc += x * x;
  const double m = acc / static_cast<double>(u.size());
  return {m, m * std::sqrt(2.0 / static_cast<double>(u.size()))};
}

struct BranchStats {
  double var = 0.0;      // marginal variance, noise-corrected, SNU
  double se_var = 0.0;
  double cond = 0.0;     // residual variance about the fitted line, SNU
  double se_cond = 0.0;
  double slope = 0.0;    // fitted slope of x on 2 * alice
  double cross = 0.0;    // mean of (2 * alice) * x over revealed, SNU
  double se_cross = 0.0;
  std::size_t n = 0;          // records measuring this branch
  std::size_t n_revealed = 0;
};

// One quadrature branch: marginal variance over all records that measured
// it, conditional variance from pooled residuals of a least-squares fit on
// the revealed subset, and the Alice-Bob cross moment. Voltages map to SNU
// via x = u / sqrt(phi); the electronic-noise floor n_det (V^2) is
// subtracted at the variance level.
BranchStats branch_stats(const std::vector<SymbolRecord>& records,
                         const std::vector<std::size_t>& revealed,
                         Quadrature branch, double phi, double n_det) {
  if (!(phi > 0.0)) throw calibration_error("conversion gain must be > 0");
  const bool is_q = branch == Quadrature::q;
  const double inv_sqrt_phi = 1.0 / std::sqrt(phi);
  const double floor_snu = n_det / phi;

  BranchStats s;
  double sum = 0.0, sum_sq = 0.0;
  for (const auto& rec : records) {
    const double u = is_q ? rec.u_q : rec.u_p;
    if (std::isnan(u)) continue;
    const double x = u * inv_sqrt_phi;
    sum += x;
    sum_sq += x * x;
    ++s.n;
  }
  if (s.n < 2) return s;
  const double nf = static_cast<double>(s.n);
  const double mean = sum / nf;
  const double var_raw = (sum_sq - nf * mean * mean) / (nf - 1.0);
  s.var = var_raw - floor_snu;
  s.se_var = var_raw * std::sqrt(2.0 / (nf - 1.0));

  double sa = 0.0, sx = 0.0, saa = 0.0, sax = 0.0, sxx = 0.0;
  double sp = 0.0, spp = 0.0;  // products (2a) * x for the cross moment
  std::size_t m = 0;
  for (std::size_t idx : revealed) {
    const auto& rec = records[idx];
    const double u = is_q ? rec.u_q : rec.u_p;
    if (std::isnan(u)) continue;
    const double a2 = 2.0 * (is_q ? rec.alice_q : rec.alice_p);
    const double x = u * inv_sqrt_phi;
    sa += a2;
    sx += x;
    saa += a2 * a2;
    sax += a2 * x;
    sxx += x * x;
    const double prod = a2 * x;
    sp += prod;
    spp += prod * prod;
    ++m;
  }
  s.n_revealed = m;
  if (m < 3) return s;
  const double mf = static_cast<double>(m);

  const double var_a = saa / mf - (sa / mf) * (sa / mf);
  if (var_a > 0.0) {
    s.slope = (sax / mf - (sa / mf) * (sx / mf)) / var_a;
    const double intercept = sx / mf - s.slope * (sa / mf);
    const double ss_res = sxx - 2.0 * s.slope * sax +
                          s.slope * s.slope * saa -
                          mf * intercept * intercept;
    const double cond_raw = ss_res / (mf - 2.0);
    s.cond = cond_raw - floor_snu;
    s.se_cond = cond_raw * std::sqrt(2.0 / (mf - 2.0));
  }

  s.cross = sp / mf;  // zero-mean by protocol
  const double var_prod = spp / mf - (sp / mf) * (sp / mf);
  s.se_cross = std::sqrt(std::max(0.0, var_prod) / mf);
  return s;
}

// 1 for one quadrature per symbol, 2 for both; rejects mixed record sets.
double derive_mu(const std::vector<SymbolRecord>& records) {
  if (records.empty()) throw error("estimation: no records");
  bool any_both = false, any_single = false;
  for (const auto& rec : records)
    (rec.basis == Basis::both ? any_both : any_single) = true;
  if (any_both && any_single)
    throw error("estimation: records mix single- and dual-quadrature symbols");
  return any_both ? 2.0 : 1.0;
}

}  // namespace

CalibrationEstimate calibrate_phi(const CalibrationFrames& frames) {
  CalibrationEstimate cal;
  const auto [v_vac, se_vac] = mean_square(frames.vacuum);
  const auto [v_dark, se_dark] = mean_square(frames.dark);
  cal.phi = v_vac - v_dark;
  cal.n_det = v_dark;
  cal.se_phi = std::sqrt(se_vac * se_vac + se_dark * se_dark);
  cal.se_n_det = se_dark;
  cal.n_vacuum = frames.vacuum.size();
  cal.n_dark = frames.dark.size();
  if (!(cal.phi > 0.0))
    throw calibration_error(
        "vacuum frames carry no signal above the dark floor (phi <= 0)");
  return cal;
}

VarianceEstimate estimate_variances(const std::vector<SymbolRecord>& records,
                                    const std::vector<std::size_t>& revealed,
                                    double phi, double n_det) {
  VarianceEstimate est;
  est.mu = derive_mu(records);
  const BranchStats q = branch_stats(records, revealed, Quadrature::q, phi,
                                     n_det);
  const BranchStats p = branch_stats(records, revealed, Quadrature::p, phi,
                                     n_det);
  const std::size_t n_eff = q.n + p.n;
  const std::size_t m_eff = q.n_revealed + p.n_revealed;
  if (n_eff < 4) throw error("estimate_variances: too few records");
  if (m_eff < 6) throw error("estimate_variances: too few revealed symbols");

  est.v_b_q = q.var;
  est.v_b_p = p.var;
  est.v_cond_q = q.cond;
  est.v_cond_p = p.cond;
  est.slope_q = q.slope;
  est.slope_p = p.slope;
  est.n_total = records.size();
  est.n_revealed = m_eff;

  const double nq = static_cast<double>(q.n), np = static_cast<double>(p.n);
  est.v_b = (nq * q.var + np * p.var) / static_cast<double>(n_eff);
  est.se_v_b = std::sqrt(nq * nq * q.se_var * q.se_var +
                         np * np * p.se_var * p.se_var) /
               static_cast<double>(n_eff);

  const double mq = static_cast<double>(q.n_revealed);
  const double mp = static_cast<double>(p.n_revealed);
  est.v_cond = (mq * q.cond + mp * p.cond) / static_cast<double>(m_eff);
  est.se_v_cond = std::sqrt(mq * mq * q.se_cond * q.se_cond +
                            mp * mp * p.se_cond * p.se_cond) /
                  static_cast<double>(m_eff);
  return est;
}

TransmissionEstimate estimate_t_xi(const VarianceEstimate& variances,
                                   double v_mod) {
  if (!(v_mod > 0.0)) throw error("estimate_t_xi: v_mod must be > 0");
  TransmissionEstimate est;
  const double mu = variances.mu;
  est.t = mu * (variances.v_b - variances.v_cond) / v_mod;
  est.xi = mu * (variances.v_cond - 1.0);
  est.se_t = mu *
             std::sqrt(variances.se_v_b * variances.se_v_b +
                       variances.se_v_cond * variances.se_v_cond) /
             v_mod;
  est.se_xi = mu * variances.se_v_cond;
  return est;
}

CovarianceEstimate estimate_covariance_eb(
    const std::vector<SymbolRecord>& records,
    const std::vector<std::size_t>& revealed, double phi, double n_det,
    double v_mod) {
  if (!(v_mod > 0.0)) throw error("estimate_covariance_eb: v_mod must be > 0");
  const double mu = derive_mu(records);
  const BranchStats q = branch_stats(records, revealed, Quadrature::q, phi,
                                     n_det);
  const BranchStats p = branch_stats(records, revealed, Quadrature::p, phi,
                                     n_det);
  const std::size_t m_eff = q.n_revealed + p.n_revealed;
  if (m_eff < 6) throw error("estimate_covariance_eb: too few revealed symbols");

  CovarianceEstimate est;
  est.c_pm_q = q.cross;
  est.c_pm_p = p.cross;
  est.n_revealed = m_eff;

  // Both branches estimate the same magnitude with positive sign: the
  // entangled description's sign flip on p is part of the data mapping and
  // is applied uniformly here.
  const double mq = static_cast<double>(q.n_revealed);
  const double mp = static_cast<double>(p.n_revealed);
  const double c_pm = (mq * q.cross + mp * p.cross) / static_cast<double>(m_eff);
  const double se_c = std::sqrt(mq * mq * q.se_cross * q.se_cross +
                                mp * mp * p.se_cross * p.se_cross) /
                      static_cast<double>(m_eff);

  const double nq = static_cast<double>(q.n), np = static_cast<double>(p.n);
  const double b_pm = (nq * q.var + np * p.var) / (nq + np);
  const double se_b_pm = std::sqrt(nq * nq * q.se_var * q.se_var +
                                   np * np * p.se_var * p.se_var) /
                         (nq + np);

  est.a_eb = v_mod + 1.0;
  est.b_eb = mu * b_pm - mu + 1.0;
  est.c_eb = std::sqrt(mu * (v_mod + 2.0) / v_mod) * c_pm;
  est.t = mu * (c_pm / v_mod) * (c_pm / v_mod);
  est.xi = mu * (b_pm - 1.0) - est.t * v_mod;
  est.se_t = 2.0 * mu * std::abs(c_pm) * se_c / (v_mod * v_mod);
  est.se_xi = std::sqrt(mu * mu * se_b_pm * se_b_pm +
                        v_mod * v_mod * est.se_t * est.se_t);
  return est;
}

EstimationResult estimate(const SimOutput& sim,
                          const ModulationSpec& modulation,
                          double reveal_fraction) {
  modulation.validate();
  if (!(modulation.v_mod > 0.0))
    throw error("estimate: v_mod must be > 0 for parameter estimation");

  EstimationResult result;
  result.calibration = calibrate_phi(sim.frames);
  const auto revealed = revealed_indices(sim.records.size(), reveal_fraction);
  result.variances = estimate_variances(sim.records, revealed,
                                        result.calibration.phi,
                                        result.calibration.n_det);
  result.direct = estimate_t_xi(result.variances, modulation.v_mod);
  result.covariance =
      estimate_covariance_eb(sim.records, revealed, result.calibration.phi,
                             result.calibration.n_det, modulation.v_mod);
  result.snr =
      snr_from_variances(result.variances.v_b, result.variances.v_cond);

  const double dt = result.direct.t - result.covariance.t;
  const double dxi = result.direct.xi - result.covariance.xi;
  const double se_dt = std::sqrt(result.direct.se_t * result.direct.se_t +
                                 result.covariance.se_t *
                                     result.covariance.se_t);
  const double se_dxi = std::sqrt(result.direct.se_xi * result.direct.se_xi +
                                  result.covariance.se_xi *
                                      result.covariance.se_xi);
  result.routes_agree =
      std::abs(dt) <= 3.0 * se_dt && std::abs(dxi) <= 3.0 * se_dxi;
  if (!result.routes_agree) {
    result.warnings.push_back(
        "variance-difference and covariance routes disagree beyond three "
        "combined standard errors");
    result.calibration_suspect = true;
  }

  if (result.direct.xi < 0.0) {
    if (result.direct.xi < -3.0 * result.direct.se_xi) {
      result.warnings.push_back(
          "excess-noise estimate is negative beyond three standard errors; "
          "check the conversion-gain calibration");
      result.calibration_suspect = true;
    } else {
      result.warnings.push_back(
          "excess-noise estimate is negative within sampling error (reported "
          "unclamped)");
    }
  }
  if (result.direct.t <= 0.0 ||
      result.direct.t > 1.0 + 3.0 * result.direct.se_t) {
    result.warnings.push_back(
        "transmittance estimate outside (0, 1] beyond sampling error");
    result.calibration_suspect = true;
  }
  return result;
}

}  // namespace cvqkd
