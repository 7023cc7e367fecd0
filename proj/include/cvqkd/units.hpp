#pragma once

// Quadrature-unit conversions between the three conventions in common use:
//   SNU (shot-noise units):    q = a + a*,                  [q,p] = 2i
//   NU  (natural units):       q = (a + a*) / sqrt(2),      [q,p] = i
//   SI  (hbar-ful units):      q = sqrt(hbar/(2 omega)) (a + a*), [q,p] = i hbar
// Amplitude scale factors to SNU:  q_SNU = sqrt(2) q_NU = sqrt(2 omega / hbar) q_SI,
//                                  p_SNU = sqrt(2) p_NU = sqrt(2 / (hbar omega)) p_SI.
// Variance conversions square the amplitude factor.

#include <cmath>

#include "cvqkd/gaussian.hpp"

namespace cvqkd {

inline constexpr double planck_h = 6.62607015e-34;  // J s (exact)
inline constexpr double planck_hbar = planck_h / (2.0 * 3.14159265358979323846);
inline constexpr double speed_of_light = 299792458.0;  // m/s (exact)

enum class UnitSystem { snu, nu, si };

struct QuadratureUnit {
  UnitSystem system = UnitSystem::snu;
  double omega = 0.0;           // rad/s, required for SI
  double hbar = planck_hbar;    // J s

  static QuadratureUnit snu() { return {UnitSystem::snu, 0.0, planck_hbar}; }
  static QuadratureUnit nu() { return {UnitSystem::nu, 0.0, planck_hbar}; }
  static QuadratureUnit si(double omega, double hbar = planck_hbar) {
    return {UnitSystem::si, omega, hbar};
  }
};

enum class ValueKind { amplitude, variance };

namespace detail {
// Factor f such that value_SNU = f * value_unit for the given axis.
inline double to_snu_factor(const QuadratureUnit& u, Quadrature axis) {
  switch (u.system) {
    case UnitSystem::snu:
      return 1.0;
    case UnitSystem::nu:
      return std::sqrt(2.0);
    case UnitSystem::si:
      if (u.omega <= 0.0)
        throw error("unit conversion: SI units require omega > 0");
      if (u.hbar <= 0.0) throw error("unit conversion: hbar must be > 0");
      return axis == Quadrature::q ? std::sqrt(2.0 * u.omega / u.hbar)
                                   : std::sqrt(2.0 / (u.hbar * u.omega));
  }
  throw error("unit conversion: unknown unit system");
}
}  // namespace detail

// Convert a quadrature amplitude (or variance) between unit systems.
// The conversion is exact scale multiplication; round trips are identities.
inline double convert_quadrature(double value, const QuadratureUnit& from,
                                 const QuadratureUnit& to,
                                 Quadrature axis = Quadrature::q,
                                 ValueKind kind = ValueKind::amplitude) {
  const double f = detail::to_snu_factor(from, axis) /
                   detail::to_snu_factor(to, axis);
  return kind == ValueKind::amplitude ? value * f : value * f * f;
}

}  // namespace cvqkd
