#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rydeit/execution.hpp"
#include "rydeit/pair_model.hpp"
#include "rydeit/spectrum.hpp"

namespace rydeit {

/// Static snapshot of a spherical cloud; lengths in um.
struct CloudSample {
  std::vector<Eigen::Vector3d> positions;
  std::vector<std::uint8_t> ion_flags;
  std::uint64_t seed = 0;
  double radius = 0.0;

  std::size_t size() const { return positions.size(); }
  std::size_t ion_count() const;
  bool is_ion(std::size_t i) const { return ion_flags[i] != 0; }
};

/// Uniform positions in a sphere holding `atom_count` atoms at `density_um3`;
/// exactly round(ion_fraction * atom_count) of them are flagged as ions.
CloudSample sample_cloud(double density_um3, std::size_t atom_count, double ion_fraction, std::uint64_t seed);

/// Atoms closer than this to an ion are excluded from the shift statistics.
inline constexpr double kCoincidenceRadius = 1e-3;  // um

/// Field at distance r (um) from a point charge e is kCoulombField / r^2 in V/cm.
double coulomb_field_constant();

/// Net field vector (V/cm) at atom `index` from all ions.
Eigen::Vector3d local_field_vector(const CloudSample& sample, std::size_t index);
/// |local_field_vector|. Throws for ions and for ion-atom separations below kCoincidenceRadius.
double local_field(const CloudSample& sample, std::size_t index);

/// Quadratic Stark shift -alpha0 E^2 / 2 of the Rydberg level (MHz).
double stark_shift(double field_v_per_cm, double alpha0);

struct ShiftSample {
  std::vector<double> shifts;  // MHz, neutral atoms inside the analysis radius
  std::size_t excluded = 0;    // atoms dropped for coincidence with an ion
};

/// Stark shifts of neutral atoms within `analysis_fraction` of the sample radius.
ShiftSample compute_shifts(const CloudSample& sample, double alpha0, double analysis_fraction = 0.5,
                           Execution execution = Execution::parallel);

/// Mean of the non-interacting three-level susceptibility over atoms whose Rydberg
/// level is displaced by the sampled shifts.
Spectrum ion_spectrum(const LaserParams& lasers, const AtomParams& atom, const ShiftSample& shifts,
                      std::span<const double> grid, const CloudParams& cloud,
                      const NumericalSettings& numerics = {}, Execution execution = Execution::parallel);

struct PeakFit {
  double position = 0.0;         // MHz
  double height = 0.0;           // reference chi_I minus chi_I at the peak
  double relative_height = 0.0;  // height / reference chi_I at the peak
};

/// Locates the EIT transparency maximum as the peak of (reference - spectrum) in chi_I,
/// refined by a parabola through the three points around the grid maximum.
PeakFit fit_transparency_peak(const Spectrum& spectrum, const Spectrum& reference);

struct IonMonteCarloSettings {
  std::size_t atom_count = 10000;
  double ion_fraction = 0.0;
  int realizations = 32;
  std::uint64_t seed = 1;
  double analysis_fraction = 0.5;
  Execution execution = Execution::parallel;
};

struct IonMonteCarloResult {
  Spectrum spectrum;            // averaged over realizations
  Spectrum reference;           // coupling off, no ions
  PeakFit peak;                 // fitted on the averaged spectrum
  std::vector<double> realization_peaks;
  double peak_mean = 0.0;
  double peak_stddev = 0.0;     // sample standard deviation across realizations
  std::size_t analysed_atoms = 0;
  std::size_t excluded_atoms = 0;
};

/// Seed for realization `index`: splitmix64(master + index).
std::uint64_t realization_seed(std::uint64_t master, std::uint64_t index);

IonMonteCarloResult run_ion_montecarlo(const LaserParams& lasers, const AtomParams& atom,
                                       const RydbergState& state, const CloudParams& cloud,
                                       std::span<const double> grid, const IonMonteCarloSettings& mc,
                                       const NumericalSettings& numerics = {});

}  // namespace rydeit
