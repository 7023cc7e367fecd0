#pragma once

// Monte-Carlo model of one prepare-and-measure run: Gaussian modulation at
// Alice, a lossy noisy channel, homodyne or heterodyne detection, conversion
// to detector voltages with electronic noise and optional ADC quantization,
// plus calibration frames (shot-noise and dark). All randomness is drawn from
// per-purpose, per-chunk mt19937_64 generators seeded from one master seed,
// with an explicit Box-Muller transform, so output is byte-identical across
// platforms and independent of how many symbols are requested beyond the
// chunk containing them.

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "cvqkd/states.hpp"

namespace cvqkd {

namespace rng {

// splitmix64 finalizer (mix step of the splitmix64 generator).
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Seed of the generator serving a (purpose, chunk) pair.
inline std::uint64_t stream_seed(std::uint64_t master_seed, std::uint64_t tag,
                                 std::uint64_t chunk_index) {
  return splitmix64(splitmix64(master_seed ^ tag) + chunk_index);
}

// Uniform in [0, 1) from the top 53 bits of one mt19937_64 output.
inline double uniform(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Standard normal via Box-Muller; always consumes exactly two generator
// outputs and never caches the second deviate, so the draw count per symbol
// is fixed.
inline double gaussian(std::mt19937_64& gen) {
  const double u1 =
      static_cast<double>((gen() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
  const double u2 = uniform(gen);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * 3.14159265358979323846 * u2);
}

inline constexpr std::uint64_t tag_alice = 0x616c696365ull;
inline constexpr std::uint64_t tag_measurement = 0x6d656173ull;
inline constexpr std::uint64_t tag_voltage = 0x766f6c74ull;
inline constexpr std::uint64_t tag_vacuum = 0x766163ull;
inline constexpr std::uint64_t tag_dark = 0x6461726bull;
inline constexpr std::uint64_t chunk_symbols = 65536;

inline constexpr const char* algorithm = "mt19937_64+box-muller";

}  // namespace rng

// Which quadrature(s) a record carries.
enum class Basis { q = 0, p = 1, both = 2 };

std::string to_string(Basis basis);
Basis basis_from_string(const std::string& s);

// One transmitted symbol. alice_q/alice_p are the modulation components
// (variance v_mod/4 each); bob_* are measurement outcomes in shot-noise
// units; u_* are the digitized detector voltages. Unmeasured quadratures
// (homodyne) are NaN.
struct SymbolRecord {
  double alice_q = 0.0;
  double alice_p = 0.0;
  Basis basis = Basis::q;
  double bob_q = 0.0;
  double bob_p = 0.0;
  double u_q = 0.0;
  double u_p = 0.0;
};

// Quantizer stage: voltages are rounded to range/2^bits steps and clipped to
// [-range/2, range/2] when enabled.
struct AdcModel {
  bool enabled = false;
  double range_ru = 0.0;
  int adc_bits_n = 0;
};

struct SimConfig {
  std::size_t n_symbols = 0;
  std::uint64_t seed = 0;
  ModulationSpec modulation;
  ChannelParams channel;
  DetectionMode detection = DetectionMode::homodyne;
  double phi = 1.0;            // voltage-conversion gain, V^2 per SNU
  double xi_det_frames = 0.0;  // electronic noise per receiver chain, SNU
  double reveal_fraction = 0.10;
  std::size_t n_calibration = 100000;  // frames per calibration set
  AdcModel adc;

  void validate() const;
};

// Receiver calibration data: voltages with LO on / signal blocked (vacuum)
// and with LO off (dark).
struct CalibrationFrames {
  std::vector<double> vacuum;
  std::vector<double> dark;
};

struct SimOutput {
  std::vector<SymbolRecord> records;
  CalibrationFrames frames;
  std::string rng_algorithm;
};

// Alice's modulation draw: two independent N(0, v_mod/4) components.
std::pair<double, double> sample_alice(std::mt19937_64& gen,
                                       const ModulationSpec& modulation);

// Bob's measurement of one symbol sent through (t, xi). Homodyne consumes one
// uniform (basis choice) and one gaussian; heterodyne consumes two gaussians.
struct Measurement {
  Basis basis = Basis::q;
  double bob_q = 0.0;
  double bob_p = 0.0;
};

Measurement measure(std::mt19937_64& gen, double alice_q, double alice_p,
                    double t, double xi, DetectionMode detection);

// Detector voltage for one quadrature outcome: sqrt(phi) * x plus electronic
// noise of variance n_det (in V^2).
double to_voltage(std::mt19937_64& gen, double outcome, double phi,
                  double n_det);

// Quantize a voltage; identity when the model is disabled.
double adc_quantize(double u, const AdcModel& adc);

// n_frames vacuum and dark voltage frames for the given receiver settings.
CalibrationFrames calibration_frames(std::uint64_t seed, std::size_t n_frames,
                                     double phi, double xi_det,
                                     const AdcModel& adc);

// Full run: symbols, measurements, voltages, and calibration frames.
SimOutput simulate(const SimConfig& config);

// Indices disclosed for parameter estimation: the first
// floor(reveal_fraction * n) symbols.
std::vector<std::size_t> revealed_indices(std::size_t n_records,
                                          double reveal_fraction);

}  // namespace cvqkd
