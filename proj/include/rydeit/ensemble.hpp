#pragma once

#include <functional>
#include <string>

#include "rydeit/execution.hpp"
#include "rydeit/pair_model.hpp"

namespace rydeit {

/// Per-state constants. c6 is in MHz um^6 (ordinary-frequency convention).
struct RydbergState {
  int n = 0;
  double c6 = 0.0;
  double lifetime = 0.0;  // s
  double alpha0 = 0.0;    // MHz / (V/cm)^2

  /// 48S1/2: C6 back-derived from a 4 um blockade radius at Omega_c / 2pi = 2 MHz.
  static RydbergState s48();
  /// 42S1/2: C6 back-derived from a 3 um blockade radius at Omega_c / 2pi = 2.5 MHz.
  static RydbergState s42();
  void validate() const;
};

struct CloudParams {
  double density = 0.0;      // m^-3
  double path_length = 0.0;  // m
  double wavevector = 0.0;   // m^-1

  void validate() const;
};

/// Peak density of the experiment, 2.2e10 cm^-3, in m^-3.
inline constexpr double kPeakDensity = 2.2e16;
inline constexpr double kPathLength = 0.52e-3;

/// |V(R)| = C6 / R^6 in MHz for r in um.
double vdw_shift(const RydbergState& state, double r_um);

/// (C6 / Omega_c)^(1/6) in um.
double blockade_radius(const RydbergState& state, double omega_c_mhz);

/// Poissonian nearest-neighbour density 4 pi N r^2 exp(-4/3 pi N r^3), per um.
double nn_pdf(double r_um, double density_um3);
double nn_cdf(double r_um, double density_um3);
/// Closed form Gamma(4/3) (4 pi N / 3)^(-1/3).
double mean_nn_separation(double density_um3);

double atoms_in_blockade_sphere(double density_um3, double r_b_um);

/// Distribution of interatomic separations averaged over. `r_cut` is the radius beyond
/// which the remaining probability mass is treated as non-interacting.
struct NeighbourDistribution {
  std::function<double(double)> pdf;
  std::function<double(double)> cdf;
  double r_cut = 0.0;

  static NeighbourDistribution uniform(double density_um3, double tail_mass);
};

struct QuadratureSettings {
  int intervals = 200;           // log-spaced trapezoid panels; must be even
  double r_min = 0.5;            // um; mass below is assigned chi(V(r_min))
  double tail_mass = 1e-6;       // mass beyond r_cut is assigned chi(V = 0)
  double tolerance = 0.005;      // allowed relative change from halving the node count
  bool check_convergence = true;
  Execution execution = Execution::parallel;
};

struct EnsembleResult {
  Susceptibility chi;
  /// Same quadrature on every other node.
  Susceptibility coarse_chi;
  double relative_change = 0.0;
  int nodes = 0;
};

/// Thrown when halving the quadrature changes the result by more than the tolerance.
class QuadratureError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Pair susceptibility weighted by the nearest-neighbour distribution of `cloud.density`.
/// The Rydberg decay rate is taken from `state.lifetime`.
EnsembleResult ensemble_susceptibility(const LaserParams& lasers, const AtomParams& atom,
                                       const RydbergState& state, const CloudParams& cloud,
                                       const QuadratureSettings& quadrature = {},
                                       const NumericalSettings& numerics = {});

/// As above with an explicit separation distribution.
EnsembleResult ensemble_susceptibility(const LaserParams& lasers, const AtomParams& atom,
                                       const RydbergState& state, const CloudParams& cloud,
                                       const NeighbourDistribution& distribution,
                                       const QuadratureSettings& quadrature,
                                       const NumericalSettings& numerics = {});

}  // namespace rydeit
