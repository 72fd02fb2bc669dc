#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "rydeit/ensemble.hpp"

namespace rydeit {

enum class SweepVariable { detuning_mhz, rabi_mhz, field_v_per_m };

std::string_view column_name(SweepVariable v);

struct SpectrumRow {
  double x = 0.0;
  double chi_real = 0.0;
  double chi_imag = 0.0;
  double transmission = 0.0;  // exp(-k chi_I l)

  double absorbed_fraction() const { return 1.0 - transmission; }
};

struct Spectrum {
  SweepVariable variable = SweepVariable::detuning_mhz;
  std::vector<SpectrumRow> rows;
};

/// Transmitted power fraction exp(-k chi_I l).
double transmission(double chi_i, const CloudParams& cloud);

/// E = hbar Omega / d (V/m) for Omega in rad/s, and the inverse.
double rabi_to_field(double omega_p_rad_s, double dipole);
double field_to_rabi(double field_v_per_m, double dipole);

Spectrum make_spectrum(SweepVariable variable, std::span<const double> x, std::span<const Susceptibility> chi,
                       const CloudParams& cloud);

}  // namespace rydeit
