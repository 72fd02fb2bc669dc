#pragma once

#include <span>
#include <variant>
#include <vector>

#include "rydeit/ensemble.hpp"
#include "rydeit/ion_mc.hpp"
#include "rydeit/spectrum.hpp"

namespace rydeit {

class FitError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Non-interacting three-level atom.
struct SingleModel {};
/// Atom pair at fixed interaction `interaction` (MHz).
struct PairModel {
  double interaction = 0.0;
};
/// Pair model averaged over nearest-neighbour separations.
struct EnsembleModel {
  RydbergState state;
  QuadratureSettings quadrature;
};
/// Single atoms Stark-shifted by a static ion distribution.
struct IonModel {
  RydbergState state;
  IonMonteCarloSettings montecarlo;
};

using ModelSelector = std::variant<SingleModel, PairModel, EnsembleModel, IonModel>;

/// One row per probe detuning in `grid` (MHz, strictly increasing); `lasers.delta_p` is ignored.
Spectrum sweep_spectrum(const ModelSelector& model, const LaserParams& lasers, const AtomParams& atom,
                        const CloudParams& cloud, std::span<const double> grid,
                        const NumericalSettings& numerics = {}, Execution execution = Execution::parallel);

struct DensityFitSettings {
  double gamma_e = 6.07;          // MHz
  double lambda_p = 780.241e-9;   // m
  double path_length = kPathLength;
  int max_iterations = 200;
};

struct DensityFit {
  double density = 0.0;        // m^-3
  double center = 0.0;         // MHz
  double density_sigma = 0.0;  // 1 sigma
  double center_sigma = 0.0;
  double rms_residual = 0.0;
  std::vector<double> residuals;
  int iterations = 0;
};

/// Weighted least squares of T(D) = exp(-N sigma0 l / (1 + 4 (D - c)^2 / Gamma_e^2)) over (N, c).
/// With `sigma` empty the fit is unweighted and the covariance is scaled by the reduced chi^2.
DensityFit fit_density(std::span<const double> delta_mhz, std::span<const double> transmission,
                       std::span<const double> sigma, const DensityFitSettings& settings = {});

struct Chi3Point {
  double field = 0.0;  // V/m
  double chi_i = 0.0;
};

struct Chi3Fit {
  double chi1_im = 0.0;
  double chi3_im = 0.0;        // m^2 V^-2
  double cutoff_field = 0.0;   // V/m
  double residual = 0.0;       // rms
  std::size_t points = 0;
};

/// chi_I = a + b E^2 on points with E <= cutoff. chi3_im is b, or 4b/3 when
/// `degenerate_kerr_factor` is set (chi_eff = chi1 + 3/4 chi3 E^2).
Chi3Fit fit_chi3(std::span<const Chi3Point> points, double cutoff_field, bool degenerate_kerr_factor = false);

}  // namespace rydeit
