#include "cvqkd/simulate.hpp"

#include <cmath>
#include <limits>

namespace cvqkd {

namespace {
constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();
}

std::string to_string(Basis basis) {
  switch (basis) {
    case Basis::q:
      return "q";
    case Basis::p:
      return "p";
    case Basis::both:
      return "both";
  }
  throw error("to_string: invalid basis");
}

Basis basis_from_string(const std::string& s) {
  if (s == "q") return Basis::q;
  if (s == "p") return Basis::p;
  if (s == "both") return Basis::both;
  throw error("basis_from_string: expected q, p or both, got '" + s + "'");
}

void SimConfig::validate() const {
  modulation.validate();
  channel.validate();
  if (n_symbols == 0) throw error("SimConfig: n_symbols must be >= 1");
  if (!(phi > 0.0)) throw error("SimConfig: phi must be > 0");
  if (!(xi_det_frames >= 0.0))
    throw error("SimConfig: xi_det_frames must be >= 0");
  if (reveal_fraction < 0.0 || reveal_fraction > 1.0)
    throw error("SimConfig: reveal_fraction must lie in [0, 1]");
  if (n_calibration < 2)
    throw error("SimConfig: n_calibration must be >= 2");
  if (adc.enabled) {
    if (!(adc.range_ru > 0.0)) throw error("SimConfig: adc range must be > 0");
    if (adc.adc_bits_n < 1) throw error("SimConfig: adc bits must be >= 1");
  }
}

std::pair<double, double> sample_alice(std::mt19937_64& gen,
                                       const ModulationSpec& modulation) {
  const double sd = std::sqrt(modulation.component_variance());
  const double q = sd * rng::gaussian(gen);
  const double p = sd * rng::gaussian(gen);
  return {q, p};
}

Measurement measure(std::mt19937_64& gen, double alice_q, double alice_p,
                    double t, double xi, DetectionMode detection) {
  Measurement m;
  const double rt = std::sqrt(t);
  if (detection == DetectionMode::homodyne) {
    // Uniform basis choice, then one quadrature: mean sqrt(t) * 2a,
    // conditional variance 1 + xi (shot noise plus excess noise).
    m.basis = rng::uniform(gen) < 0.5 ? Basis::q : Basis::p;
    const double a = m.basis == Basis::q ? alice_q : alice_p;
    const double outcome =
        rt * 2.0 * a + std::sqrt(1.0 + xi) * rng::gaussian(gen);
    m.bob_q = m.basis == Basis::q ? outcome : nan_value;
    m.bob_p = m.basis == Basis::p ? outcome : nan_value;
  } else {
    // Balanced split before detection halves the signal power and averages
    // the conditional noise with vacuum: mean sqrt(t/2) * 2a, variance
    // 1 + xi/2 per quadrature. Both quadratures track Alice positively; the
    // sign flip of the entangled description lives in the data mapping, not
    // in the physical channel.
    const double scale = rt / std::sqrt(2.0);
    const double sd = std::sqrt(1.0 + xi / 2.0);
    m.basis = Basis::both;
    m.bob_q = scale * 2.0 * alice_q + sd * rng::gaussian(gen);
    m.bob_p = scale * 2.0 * alice_p + sd * rng::gaussian(gen);
  }
  return m;
}

double to_voltage(std::mt19937_64& gen, double outcome, double phi,
                  double n_det) {
  return std::sqrt(phi) * outcome + std::sqrt(n_det) * rng::gaussian(gen);
}

double adc_quantize(double u, const AdcModel& adc) {
  if (!adc.enabled) return u;
  const double lsb = adc.range_ru / std::exp2(adc.adc_bits_n);
  const double half = adc.range_ru / 2.0;
  const double clipped = std::min(std::max(u, -half), half);
  return std::round(clipped / lsb) * lsb;
}

CalibrationFrames calibration_frames(std::uint64_t seed, std::size_t n_frames,
                                     double phi, double xi_det,
                                     const AdcModel& adc) {
  CalibrationFrames frames;
  frames.vacuum.resize(n_frames);
  frames.dark.resize(n_frames);
  const double sd_shot = std::sqrt(phi);
  const double sd_dark = std::sqrt(phi * xi_det);
  for (std::size_t start = 0; start < n_frames; start += rng::chunk_symbols) {
    const std::uint64_t chunk = start / rng::chunk_symbols;
    std::mt19937_64 gen_vac(rng::stream_seed(seed, rng::tag_vacuum, chunk));
    std::mt19937_64 gen_dark(rng::stream_seed(seed, rng::tag_dark, chunk));
    const std::size_t end = std::min(n_frames, start + rng::chunk_symbols);
    for (std::size_t i = start; i < end; ++i) {
      // Vacuum frame: shot noise plus the receiver's own electronic noise.
      frames.vacuum[i] = adc_quantize(
          sd_shot * rng::gaussian(gen_vac) + sd_dark * rng::gaussian(gen_vac),
          adc);
      frames.dark[i] = adc_quantize(sd_dark * rng::gaussian(gen_dark), adc);
    }
  }
  return frames;
}

SimOutput simulate(const SimConfig& config) {
  config.validate();
  SimOutput out;
  out.records.resize(config.n_symbols);
  out.rng_algorithm = rng::algorithm;

  const double t = config.channel.t_total;
  const double xi = config.channel.xi;
  const double n_det = config.phi * config.xi_det_frames;

  for (std::size_t start = 0; start < config.n_symbols;
       start += rng::chunk_symbols) {
    const std::uint64_t chunk = start / rng::chunk_symbols;
    std::mt19937_64 gen_alice(
        rng::stream_seed(config.seed, rng::tag_alice, chunk));
    std::mt19937_64 gen_meas(
        rng::stream_seed(config.seed, rng::tag_measurement, chunk));
    std::mt19937_64 gen_volt(
        rng::stream_seed(config.seed, rng::tag_voltage, chunk));
    const std::size_t end =
        std::min(config.n_symbols, start + rng::chunk_symbols);
    for (std::size_t i = start; i < end; ++i) {
      SymbolRecord& rec = out.records[i];
      const auto [aq, ap] = sample_alice(gen_alice, config.modulation);
      rec.alice_q = aq;
      rec.alice_p = ap;
      const Measurement m =
          measure(gen_meas, aq, ap, t, xi, config.detection);
      rec.basis = m.basis;
      rec.bob_q = m.bob_q;
      rec.bob_p = m.bob_p;
      rec.u_q = std::isnan(m.bob_q)
                    ? nan_value
                    : adc_quantize(
                          to_voltage(gen_volt, m.bob_q, config.phi, n_det),
                          config.adc);
      rec.u_p = std::isnan(m.bob_p)
                    ? nan_value
                    : adc_quantize(
                          to_voltage(gen_volt, m.bob_p, config.phi, n_det),
                          config.adc);
    }
  }

  out.frames = calibration_frames(config.seed, config.n_calibration,
                                  config.phi, config.xi_det_frames, config.adc);
  return out;
}

std::vector<std::size_t> revealed_indices(std::size_t n_records,
                                          double reveal_fraction) {
  if (reveal_fraction < 0.0 || reveal_fraction > 1.0)
    throw error("revealed_indices: fraction must lie in [0, 1]");
  const auto m = static_cast<std::size_t>(
      std::floor(reveal_fraction * static_cast<double>(n_records)));
  std::vector<std::size_t> idx(m);
  for (std::size_t i = 0; i < m; ++i) idx[i] = i;
  return idx;
}

}  // namespace cvqkd
