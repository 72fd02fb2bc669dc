#include "rydeit/spectrum.hpp"

#include <cmath>
#include <stdexcept>

#include "rydeit/units.hpp"

namespace rydeit {

std::string_view column_name(SweepVariable v) {
  switch (v) {
    case SweepVariable::detuning_mhz:
      return "delta_p_mhz";
    case SweepVariable::rabi_mhz:
      return "omega_p_mhz";
    case SweepVariable::field_v_per_m:
      return "field_v_per_m";
  }
  return "x";
}

double transmission(double chi_i, const CloudParams& cloud) {
  return std::exp(-cloud.wavevector * chi_i * cloud.path_length);
}

double rabi_to_field(double omega_p_rad_s, double dipole) {
  if (!(dipole > 0.0)) throw std::invalid_argument("rabi_to_field: dipole must be > 0");
  return units::hbar * omega_p_rad_s / dipole;
}

double field_to_rabi(double field_v_per_m, double dipole) {
  if (!(dipole > 0.0)) throw std::invalid_argument("field_to_rabi: dipole must be > 0");
  return dipole * field_v_per_m / units::hbar;
}

Spectrum make_spectrum(SweepVariable variable, std::span<const double> x, std::span<const Susceptibility> chi,
                       const CloudParams& cloud) {
  if (x.size() != chi.size()) throw std::invalid_argument("make_spectrum: length mismatch");
  Spectrum s{variable, {}};
  s.rows.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    s.rows.push_back({x[i], chi[i].chi_r(), chi[i].chi_i(), transmission(chi[i].chi_i(), cloud)});
  }
  return s;
}

}  // namespace rydeit
