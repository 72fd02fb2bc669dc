#pragma once

#include <numbers>

// Frequencies are carried as ordinary frequencies in MHz (nu = omega / 2pi) and
// lengths in micrometres. Conversion to SI happens only where a physical
// prefactor is needed.
namespace rydeit::units {

inline constexpr double pi = std::numbers::pi;
inline constexpr double hbar = 1.054571817e-34;          // J s
inline constexpr double epsilon0 = 8.8541878128e-12;     // F / m
inline constexpr double elementary_charge = 1.602176634e-19;  // C
inline constexpr double coulomb_constant = 1.0 / (4.0 * pi * epsilon0);

inline constexpr double mhz_to_angular(double mhz) { return 2.0 * pi * mhz * 1e6; }
inline constexpr double angular_to_mhz(double rad_per_s) { return rad_per_s / (2.0 * pi * 1e6); }

/// Decay rate of a level with the given lifetime, as Gamma / 2pi in MHz.
inline constexpr double lifetime_to_mhz(double lifetime_s) { return angular_to_mhz(1.0 / lifetime_s); }

inline constexpr double per_cm3_to_per_m3(double n) { return n * 1e6; }
inline constexpr double per_m3_to_per_cm3(double n) { return n * 1e-6; }
inline constexpr double per_m3_to_per_um3(double n) { return n * 1e-18; }
inline constexpr double per_um3_to_per_m3(double n) { return n * 1e18; }

}  // namespace rydeit::units
