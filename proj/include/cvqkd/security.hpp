#pragma once

// Asymptotic security analysis for Gaussian-modulated coherent-state CV-QKD
// with reverse reconciliation: mutual information, Holevo bound against
// collective attacks by two independent constructions, and the resulting
// secret fraction / key rate.

#include <optional>
#include <string>
#include <utility>

#include "cvqkd/gaussian.hpp"
#include "cvqkd/noise.hpp"
#include "cvqkd/states.hpp"

namespace cvqkd {

// Post-processing and framing parameters of the protocol.
struct ProtocolParams {
  double beta = 1.0;       // reconciliation efficiency, in [0, 1]
  double fer = 0.0;        // frame error rate, in [0, 1)
  double nu_disclosed = 0.0;  // fraction of frames disclosed, in [0, 1)
  double symbol_rate = 1.0;   // symbols per second

  void validate() const {
    if (beta < 0 || beta > 1) throw error("beta must lie in [0, 1]");
    if (fer < 0 || fer >= 1) throw error("fer must lie in [0, 1)");
    if (nu_disclosed < 0 || nu_disclosed >= 1)
      throw error("nu_disclosed must lie in [0, 1)");
    if (!(symbol_rate > 0)) throw error("symbol_rate must be > 0");
  }
};

// Which parts of the receiver Eve is assumed to control.
//   strict: receiver loss and electronic noise are attributed to the channel
//           (Eve benefits from them).
//   loose:  receiver loss and noise are trusted local imperfections; only the
//           fiber segment enters Eve's state.
enum class TrustAssumption { strict, loose };

// Construction used for the Holevo bound.
enum class HolevoRoute { purification, cloner };

// Signal-to-noise ratio of Bob's measurement:
// snr = (t v_mod / mu) / (1 + xi / mu).
inline double snr(double t, double v_mod, double xi, double mu) {
  if (!(mu > 0)) throw error("snr: mu must be > 0");
  return (t * v_mod / mu) / (1.0 + xi / mu);
}

// Shannon mutual information of the Gaussian channel between Alice's
// modulation and Bob's measurement: I = (mu/2) log2(1 + snr).
inline double mutual_information(double t, double v_mod, double xi,
                                 double mu) {
  return 0.5 * mu * std::log2(1.0 + snr(t, v_mod, xi, mu));
}

// Largest code rate consistent with operating at efficiency beta on an AWGN
// channel: the largest fixed point of R = beta (mu/2) log2(1 + 2 R Eb/N0).
struct CodeRateResult {
  double rate = 0.0;        // bits per channel use
  double snr_equiv = 0.0;   // 2 R Eb/N0 at the fixed point
  int iterations = 0;
};

CodeRateResult implicit_code_rate(double beta, double mu, double eb_n0);

// Covariance matrix of the (A, B) two-mode state after the channel, in the
// standard form (a, b, c): a = V, b = T (V - 1) + 1 + xi, c = sqrt(T (V^2-1)).
std::tuple<double, double, double> covariance_ab_triple(double v, double t,
                                                        double xi);
Matd covariance_ab(double v, double t, double xi);

// Holevo bound chi(E:B) via the purification argument: Eve holds the
// purifying system, so S(E) = S(AB) and S(E|b) = S(A|b) after Bob's
// measurement. Requires t in (0, 1], xi >= 0.
double holevo_purification(double v, double t, double xi,
                           DetectionMode detection);

// Holevo bound chi(E:B) via an explicit entangling-cloner attack: Eve injects
// one arm of a two-mode squeezed state of variance W = xi / (1 - t) + 1 on a
// beamsplitter of transmittance t and keeps both of her modes. Requires
// t in (0, 1); at t = 1 the cloner degenerates and the purification route
// must be used.
double holevo_cloner(double v, double t, double xi, DetectionMode detection);

// Effective (t, xi) entering Eve's state under a trust assumption. strict
// uses the total transmittance and total excess noise; loose uses only the
// fiber segment (t_ch, xi_ch) and requires ChannelParams::split.
std::pair<double, double> covariance_trust(const ChannelParams& channel,
                                           TrustAssumption trust);

// Holevo bound from a generic bipartite covariance matrix: S(E) from the full
// spectrum, S(E|b) from the state conditioned on measuring `measured_mode` of
// sigma (homodyne of q or heterodyne). Eve's modes are everything else.
double holevo_from_cov(const Matd& sigma, Eigen::Index measured_mode,
                       DetectionMode detection);

// Secret fraction r = (1 - fer)(1 - nu)(beta I_AB - chi). Negative values are
// returned as-is; callers decide whether to abort.
inline double secret_fraction(double beta, double i_ab, double chi, double fer,
                              double nu_disclosed) {
  return (1.0 - fer) * (1.0 - nu_disclosed) * (beta * i_ab - chi);
}

// Full key-rate evaluation for one operating point.
struct KeyRateReport {
  double t_total = 0.0;
  double xi_total = 0.0;
  double v_mod = 0.0;
  double mu = 1.0;
  double snr = 0.0;
  double i_ab = 0.0;           // bits per symbol
  double chi_eb = 0.0;         // bits per symbol
  double secret_fraction = 0.0;  // bits per symbol, unclamped
  double key_rate = 0.0;         // bits per second, unclamped
  bool abort = false;            // secret_fraction <= 0
  TrustAssumption trust = TrustAssumption::strict;
  HolevoRoute route = HolevoRoute::purification;
};

KeyRateReport evaluate_keyrate(const ModulationSpec& modulation,
                               const ChannelParams& channel,
                               DetectionMode detection,
                               const ProtocolParams& protocol,
                               TrustAssumption trust = TrustAssumption::strict,
                               HolevoRoute route = HolevoRoute::purification);

}  // namespace cvqkd
