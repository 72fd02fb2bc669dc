#include "rydeit/ion_mc.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "rydeit/kernels.hpp"
#include "rydeit/units.hpp"

namespace rydeit {

namespace {

// Distribution objects in <random> are implementation-defined; these keep samples
// identical across standard libraries.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  return std::min(n - 1, static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n)));
}

}  // namespace

std::size_t CloudSample::ion_count() const {
  return static_cast<std::size_t>(std::count(ion_flags.begin(), ion_flags.end(), std::uint8_t{1}));
}

CloudSample sample_cloud(double density_um3, std::size_t atom_count, double ion_fraction, std::uint64_t seed) {
  if (!(density_um3 > 0.0)) throw std::invalid_argument("sample_cloud: density must be > 0");
  if (atom_count < 100) throw std::invalid_argument("sample_cloud: atom_count must be >= 100");
  if (!(ion_fraction >= 0.0 && ion_fraction <= 1.0)) throw std::invalid_argument("sample_cloud: ion fraction outside [0, 1]");

  CloudSample s;
  s.seed = seed;
  s.radius = std::cbrt(static_cast<double>(atom_count) / (4.0 / 3.0 * units::pi * density_um3));
  s.positions.reserve(atom_count);

  std::mt19937_64 rng(seed);
  while (s.positions.size() < atom_count) {
    Eigen::Vector3d p(2.0 * uniform01(rng) - 1.0, 2.0 * uniform01(rng) - 1.0, 2.0 * uniform01(rng) - 1.0);
    if (p.squaredNorm() <= 1.0) s.positions.push_back(s.radius * p);
  }

  // Partial Fisher-Yates: the first n_ions entries of the permutation become ions.
  const auto n_ions = static_cast<std::size_t>(std::llround(ion_fraction * static_cast<double>(atom_count)));
  std::vector<std::size_t> order(atom_count);
  for (std::size_t i = 0; i < atom_count; ++i) order[i] = i;
  s.ion_flags.assign(atom_count, 0);
  for (std::size_t i = 0; i < n_ions; ++i) {
    std::swap(order[i], order[i + uniform_index(rng, atom_count - i)]);
    s.ion_flags[order[i]] = 1;
  }
  return s;
}

double coulomb_field_constant() {
  // e / (4 pi eps0 r^2) with r in um, converted from V/m to V/cm.
  return units::coulomb_constant * units::elementary_charge * 1e12 * 1e-2;
}

Eigen::Vector3d local_field_vector(const CloudSample& sample, std::size_t index) {
  if (index >= sample.size()) throw std::out_of_range("local_field: atom index out of range");
  if (sample.is_ion(index)) throw std::invalid_argument("local_field: indexed atom is an ion");
  const std::size_t atoms[] = {index};
  const auto r = kernels::serial::ion_fields(sample, atoms).front();
  if (r.nearest_ion < kCoincidenceRadius) {
    std::ostringstream msg;
    msg << "local_field: atom " << index << " lies " << r.nearest_ion << " um from an ion";
    throw NumericalError(msg.str());
  }
  return r.field;
}

double local_field(const CloudSample& sample, std::size_t index) { return local_field_vector(sample, index).norm(); }

double stark_shift(double field_v_per_cm, double alpha0) {
  if (!(field_v_per_cm >= 0.0)) throw std::invalid_argument("stark_shift: field magnitude must be >= 0");
  return -0.5 * alpha0 * field_v_per_cm * field_v_per_cm;
}

ShiftSample compute_shifts(const CloudSample& sample, double alpha0, double analysis_fraction, Execution execution) {
  const double r_max = analysis_fraction * sample.radius;
  std::vector<std::size_t> atoms;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    if (!sample.is_ion(i) && sample.positions[i].norm() < r_max) atoms.push_back(i);
  }
  const auto fields = kernels::ion_fields(execution, sample, atoms);

  ShiftSample out;
  out.shifts.reserve(fields.size());
  for (const auto& f : fields) {
    if (f.nearest_ion < kCoincidenceRadius) {
      ++out.excluded;
      continue;
    }
    out.shifts.push_back(stark_shift(f.field.norm(), alpha0));
  }
  return out;
}

Spectrum ion_spectrum(const LaserParams& lasers, const AtomParams& atom, const ShiftSample& shifts,
                      std::span<const double> grid, const CloudParams& cloud, const NumericalSettings& numerics,
                      Execution execution) {
  if (shifts.shifts.empty()) throw std::invalid_argument("ion_spectrum: empty analysis region");
  if (grid.empty()) throw std::invalid_argument("ion_spectrum: empty detuning grid");
  cloud.validate();
  const SingleAtomSolver solver(lasers, atom, numerics);
  const auto mean = kernels::mean_shifted_susceptibility(execution, solver, shifts.shifts, grid, cloud.density);
  std::vector<Susceptibility> chi(mean.size());
  for (std::size_t i = 0; i < mean.size(); ++i) chi[i].value = mean[i];
  return make_spectrum(SweepVariable::detuning_mhz, grid, chi, cloud);
}

PeakFit fit_transparency_peak(const Spectrum& spectrum, const Spectrum& reference) {
  const auto& a = spectrum.rows;
  const auto& b = reference.rows;
  if (a.size() != b.size() || a.size() < 3) throw std::invalid_argument("fit_transparency_peak: need matching grids of >= 3 points");
  std::vector<double> signal(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].x != b[i].x) throw std::invalid_argument("fit_transparency_peak: grids differ");
    signal[i] = b[i].chi_imag - a[i].chi_imag;
  }
  const auto k = static_cast<std::size_t>(std::max_element(signal.begin(), signal.end()) - signal.begin());

  PeakFit fit{a[k].x, signal[k], signal[k] / b[k].chi_imag};
  if (k == 0 || k + 1 == a.size()) return fit;

  // Vertex of the parabola through (x0, y0), (x1, y1), (x2, y2).
  const double x0 = a[k - 1].x, x1 = a[k].x, x2 = a[k + 1].x;
  const double y0 = signal[k - 1], y1 = signal[k], y2 = signal[k + 1];
  const double d0 = (y1 - y0) / (x1 - x0), d1 = (y2 - y1) / (x2 - x1);
  const double curvature = (d1 - d0) / (x2 - x0);
  if (!(curvature < 0.0)) return fit;
  const double xv = 0.5 * (x0 + x1) - d0 / (2.0 * curvature);
  const double yv = y1 + d0 * (xv - x1) + curvature * (xv - x0) * (xv - x1);
  // Reference chi_I at the vertex by linear interpolation.
  const std::size_t j = xv < x1 ? k - 1 : k;
  const double t = (xv - a[j].x) / (a[j + 1].x - a[j].x);
  const double ref = (1.0 - t) * b[j].chi_imag + t * b[j + 1].chi_imag;
  return {xv, yv, yv / ref};
}

std::uint64_t realization_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + index * 0x9e3779b97f4a7c15ULL + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

IonMonteCarloResult run_ion_montecarlo(const LaserParams& lasers, const AtomParams& atom,
                                       const RydbergState& state, const CloudParams& cloud,
                                       std::span<const double> grid, const IonMonteCarloSettings& mc,
                                       const NumericalSettings& numerics) {
  if (mc.realizations < 1) throw std::invalid_argument("run_ion_montecarlo: realizations must be >= 1");
  cloud.validate();
  state.validate();
  AtomParams rydberg_atom = atom;
  rydberg_atom.gamma_r = units::lifetime_to_mhz(state.lifetime);
  const double density_um3 = units::per_m3_to_per_um3(cloud.density);

  LaserParams coupling_off = lasers;
  coupling_off.omega_c = 0.0;
  const ShiftSample unshifted{{0.0}, 0};

  IonMonteCarloResult out;
  out.reference = ion_spectrum(coupling_off, rydberg_atom, unshifted, grid, cloud, numerics, mc.execution);

  std::vector<cplx> sum(grid.size(), 0.0);
  for (int i = 0; i < mc.realizations; ++i) {
    const auto sample = sample_cloud(density_um3, mc.atom_count, mc.ion_fraction,
                                     realization_seed(mc.seed, static_cast<std::uint64_t>(i)));
    const auto shifts = compute_shifts(sample, state.alpha0, mc.analysis_fraction, mc.execution);
    out.analysed_atoms += shifts.shifts.size();
    out.excluded_atoms += shifts.excluded;
    const auto spec = ion_spectrum(lasers, rydberg_atom, shifts, grid, cloud, numerics, mc.execution);
    out.realization_peaks.push_back(fit_transparency_peak(spec, out.reference).position);
    for (std::size_t j = 0; j < grid.size(); ++j) sum[j] += cplx(spec.rows[j].chi_real, spec.rows[j].chi_imag);
  }

  std::vector<Susceptibility> mean(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) mean[j].value = sum[j] / static_cast<double>(mc.realizations);
  out.spectrum = make_spectrum(SweepVariable::detuning_mhz, grid, mean, cloud);
  out.peak = fit_transparency_peak(out.spectrum, out.reference);

  const auto n = static_cast<double>(out.realization_peaks.size());
  for (double p : out.realization_peaks) out.peak_mean += p / n;
  if (out.realization_peaks.size() > 1) {
    double ss = 0.0;
    for (double p : out.realization_peaks) ss += (p - out.peak_mean) * (p - out.peak_mean);
    out.peak_stddev = std::sqrt(ss / (n - 1.0));
  }
  return out;
}

}  // namespace rydeit
