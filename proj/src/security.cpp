#include "cvqkd/security.hpp"

#include <cmath>

namespace cvqkd {

namespace {

double code_rate_rhs(double r, double beta, double mu, double eb_n0) {
  return beta * 0.5 * mu * std::log2(1.0 + 2.0 * r * eb_n0);
}

}  // namespace

CodeRateResult implicit_code_rate(double beta, double mu, double eb_n0) {
  if (beta < 0.0 || beta > 1.0)
    throw error("implicit_code_rate: beta must lie in [0, 1]");
  if (!(mu > 0.0)) throw error("implicit_code_rate: mu must be > 0");
  if (!(eb_n0 >= 0.0)) throw error("implicit_code_rate: eb_n0 must be >= 0");

  CodeRateResult result;
  if (beta == 0.0 || eb_n0 == 0.0) return result;  // only the trivial root

  // Upper end of the bracket: grow until R exceeds the (logarithmic) RHS.
  double hi = 20.0;
  for (int k = 0; k < 64 && code_rate_rhs(hi, beta, mu, eb_n0) + 1e-9 >= hi;
       ++k)
    hi = 1.5 * code_rate_rhs(hi, beta, mu, eb_n0) + 1.0;

  // Scan from the right for the first sign change of f(R) = R - RHS(R);
  // the largest fixed point lies in that cell. f(hi) > 0 by construction.
  const int cells = 4000;
  const double step = hi / cells;
  double right = hi;
  double f_right = right - code_rate_rhs(right, beta, mu, eb_n0);
  double left = right, f_left = f_right;
  bool bracketed = false;
  for (int k = 1; k <= cells; ++k) {
    left = hi - k * step;
    f_left = left - code_rate_rhs(left, beta, mu, eb_n0);
    if (f_left <= 0.0 && f_right > 0.0) {
      bracketed = true;
      break;
    }
    right = left;
    f_right = f_left;
  }
  if (!bracketed) return result;  // no non-trivial fixed point

  int iterations = 0;
  while (right - left > 1e-12 && iterations < 200) {
    const double mid = 0.5 * (left + right);
    const double f_mid = mid - code_rate_rhs(mid, beta, mu, eb_n0);
    if (f_mid <= 0.0)
      left = mid;
    else
      right = mid;
    ++iterations;
  }
  result.rate = 0.5 * (left + right);
  result.snr_equiv = 2.0 * result.rate * eb_n0;
  result.iterations = iterations;
  if (result.rate < 1e-9) result.rate = 0.0;  // collapsed onto the trivial root
  return result;
}

std::tuple<double, double, double> covariance_ab_triple(double v, double t,
                                                        double xi) {
  if (!(v >= 1.0)) throw error("covariance_ab: v must be >= 1");
  if (!(t > 0.0 && t <= 1.0)) throw error("covariance_ab: t must lie in (0, 1]");
  if (!(xi >= 0.0)) throw error("covariance_ab: xi must be >= 0");
  return {v, t * (v - 1.0) + 1.0 + xi, std::sqrt(t * (v * v - 1.0))};
}

Matd covariance_ab(double v, double t, double xi) {
  const auto [a, b, c] = covariance_ab_triple(v, t, xi);
  return detail::standard_form(a, b, c);
}

double holevo_purification(double v, double t, double xi,
                           DetectionMode detection) {
  const auto [a, b, c] = covariance_ab_triple(v, t, xi);
  const auto [nu1, nu2] = two_mode_symplectic_eigenvalues(a, b, c);
  const double s_ab = g_entropy(nu1) + g_entropy(nu2);
  double nu3;
  if (detection == DetectionMode::homodyne) {
    nu3 = std::sqrt(a * (a - c * c / b));
  } else {
    nu3 = a - c * c / (b + 1.0);
  }
  return s_ab - g_entropy(nu3);
}

double holevo_from_cov(const Matd& sigma, Index measured_mode,
                       DetectionMode detection) {
  const Matd eve = drop_mode(sigma, measured_mode);
  const Matd conditional =
      detection == DetectionMode::homodyne
          ? partial_homodyne(sigma, measured_mode, Quadrature::q)
          : partial_heterodyne(sigma, measured_mode);
  return von_neumann_entropy(eve) - von_neumann_entropy(conditional);
}

double holevo_cloner(double v, double t, double xi, DetectionMode detection) {
  if (!(v >= 1.0)) throw error("holevo_cloner: v must be >= 1");
  if (!(t > 0.0 && t < 1.0))
    throw error(
        "holevo_cloner: t must lie in (0, 1); at t = 1 the attack degenerates "
        "— use the purification bound");
  if (!(xi >= 0.0)) throw error("holevo_cloner: xi must be >= 0");

  // Eve's two-mode squeezed ancilla reproduces (t, xi) when mixed with Bob's
  // mode on a transmittance-t beamsplitter.
  const double w = xi / (1.0 - t) + 1.0;
  const Matd before = direct_sum(tmsvs(v), tmsvs(w));  // (A, B, E1, E2)
  const Matd after = apply_symplectic(beamsplitter(t, 1, 2, 4), before);

  // Eve's marginal (E1, E2) in closed form; S(E) from its symplectic pair.
  const double a_e = (1.0 - t) * v + t * w;
  const double c_e = std::sqrt(t * (w * w - 1.0));
  const auto [nu1, nu2] = two_mode_symplectic_eigenvalues(a_e, w, c_e);
  const double s_e = g_entropy(nu1) + g_entropy(nu2);

  // Conditioning on Bob's measurement: take the (B, E1, E2) marginal and
  // measure its first mode; the remaining 4x4 is Eve's conditional state.
  const Matd b_e1_e2 = drop_mode(after, 0);
  const Matd conditional =
      detection == DetectionMode::homodyne
          ? partial_homodyne(b_e1_e2, 0, Quadrature::q)
          : partial_heterodyne(b_e1_e2, 0);
  double s_e_cond = 0.0;
  for (double nu : symplectic_eigenvalues(conditional))
    s_e_cond += g_entropy(nu);
  return s_e - s_e_cond;
}

std::pair<double, double> covariance_trust(const ChannelParams& channel,
                                           TrustAssumption trust) {
  channel.validate();
  if (trust == TrustAssumption::strict) return {channel.t_total, channel.xi};
  if (!channel.split)
    throw error(
        "covariance_trust: loose trust requires the channel/receiver "
        "decomposition");
  return {channel.split->t_ch, channel.split->xi_ch};
}

KeyRateReport evaluate_keyrate(const ModulationSpec& modulation,
                               const ChannelParams& channel,
                               DetectionMode detection,
                               const ProtocolParams& protocol,
                               TrustAssumption trust, HolevoRoute route) {
  modulation.validate();
  channel.validate();
  protocol.validate();

  KeyRateReport report;
  report.t_total = channel.t_total;
  report.xi_total = channel.xi;
  report.v_mod = modulation.v_mod;
  report.mu = mu_of(detection);
  report.trust = trust;
  report.route = route;

  // Information rate always uses the full link: Bob measures after every
  // imperfection regardless of who is trusted with it.
  report.snr = snr(channel.t_total, modulation.v_mod, channel.xi, report.mu);
  report.i_ab =
      mutual_information(channel.t_total, modulation.v_mod, channel.xi,
                         report.mu);

  const auto [t_e, xi_e] = covariance_trust(channel, trust);
  const double v = modulation.v();
  report.chi_eb = route == HolevoRoute::purification
                      ? holevo_purification(v, t_e, xi_e, detection)
                      : holevo_cloner(v, t_e, xi_e, detection);

  report.secret_fraction =
      secret_fraction(protocol.beta, report.i_ab, report.chi_eb, protocol.fer,
                      protocol.nu_disclosed);
  report.key_rate = protocol.symbol_rate * report.secret_fraction;
  report.abort = !(report.secret_fraction > 0.0);
  return report;
}

}  // namespace cvqkd
