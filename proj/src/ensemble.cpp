#include "rydeit/ensemble.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "rydeit/kernels.hpp"
#include "rydeit/units.hpp"

namespace rydeit {

RydbergState RydbergState::s48() { return {48, 2.0 * std::pow(4.0, 6), 58e-6, 38.2}; }

RydbergState RydbergState::s42() { return {42, 2.5 * std::pow(3.0, 6), 41e-6, 38.2}; }

void RydbergState::validate() const {
  if (!(c6 > 0.0)) throw std::invalid_argument("RydbergState: c6 must be > 0");
  if (!(lifetime > 0.0)) throw std::invalid_argument("RydbergState: lifetime must be > 0");
}

void CloudParams::validate() const {
  if (!(density > 0.0) || !(path_length > 0.0) || !(wavevector > 0.0)) {
    throw std::invalid_argument("CloudParams: density, path length and wavevector must be > 0");
  }
}

double vdw_shift(const RydbergState& state, double r_um) {
  if (!(r_um > 0.0)) throw std::invalid_argument("vdw_shift: separation must be > 0");
  const double r3 = r_um * r_um * r_um;
  return state.c6 / (r3 * r3);
}

double blockade_radius(const RydbergState& state, double omega_c_mhz) {
  if (!(omega_c_mhz > 0.0)) throw std::invalid_argument("blockade_radius: coupling Rabi frequency must be > 0");
  return std::pow(state.c6 / omega_c_mhz, 1.0 / 6.0);
}

double nn_pdf(double r_um, double density_um3) {
  return 4.0 * units::pi * density_um3 * r_um * r_um *
         std::exp(-4.0 / 3.0 * units::pi * density_um3 * r_um * r_um * r_um);
}

double nn_cdf(double r_um, double density_um3) {
  return -std::expm1(-4.0 / 3.0 * units::pi * density_um3 * r_um * r_um * r_um);
}

double mean_nn_separation(double density_um3) {
  return std::tgamma(4.0 / 3.0) * std::pow(4.0 / 3.0 * units::pi * density_um3, -1.0 / 3.0);
}

double atoms_in_blockade_sphere(double density_um3, double r_b_um) {
  return 4.0 / 3.0 * units::pi * r_b_um * r_b_um * r_b_um * density_um3;
}

NeighbourDistribution NeighbourDistribution::uniform(double density_um3, double tail_mass) {
  if (!(density_um3 > 0.0)) throw std::invalid_argument("NeighbourDistribution: density must be > 0");
  if (!(tail_mass > 0.0 && tail_mass < 1.0)) throw std::invalid_argument("NeighbourDistribution: tail mass in (0, 1)");
  NeighbourDistribution d;
  d.pdf = [density_um3](double r) { return nn_pdf(r, density_um3); };
  d.cdf = [density_um3](double r) { return nn_cdf(r, density_um3); };
  d.r_cut = std::cbrt(-std::log(tail_mass) / (4.0 / 3.0 * units::pi * density_um3));
  return d;
}

EnsembleResult ensemble_susceptibility(const LaserParams& lasers, const AtomParams& atom,
                                       const RydbergState& state, const CloudParams& cloud,
                                       const QuadratureSettings& quadrature, const NumericalSettings& numerics) {
  cloud.validate();
  return ensemble_susceptibility(
      lasers, atom, state, cloud,
      NeighbourDistribution::uniform(units::per_m3_to_per_um3(cloud.density), quadrature.tail_mass), quadrature,
      numerics);
}

EnsembleResult ensemble_susceptibility(const LaserParams& lasers, const AtomParams& atom,
                                       const RydbergState& state, const CloudParams& cloud,
                                       const NeighbourDistribution& distribution,
                                       const QuadratureSettings& quadrature, const NumericalSettings& numerics) {
  state.validate();
  cloud.validate();
  const int m = quadrature.intervals;
  if (m < 2 || m % 2 != 0) throw std::invalid_argument("ensemble_susceptibility: intervals must be even and >= 2");
  if (!(quadrature.r_min > 0.0) || !(distribution.r_cut > quadrature.r_min)) {
    throw std::invalid_argument("ensemble_susceptibility: need 0 < r_min < r_cut");
  }

  AtomParams rydberg_atom = atom;
  rydberg_atom.gamma_r = units::lifetime_to_mhz(state.lifetime);

  // Trapezoid in u = ln r, so that dr = r du.
  const double u0 = std::log(quadrature.r_min);
  const double h = (std::log(distribution.r_cut) - u0) / m;
  std::vector<double> radii(m + 1), interactions(m + 2);
  for (int i = 0; i <= m; ++i) {
    radii[i] = std::exp(u0 + h * i);
    interactions[i] = vdw_shift(state, radii[i]);
  }
  interactions[m + 1] = 0.0;  // tail beyond r_cut

  const auto chi = kernels::pair_susceptibilities(quadrature.execution, lasers, rydberg_atom, interactions,
                                                  cloud.density, numerics);

  auto integrate = [&](int stride) {
    cplx weighted = 0.0;
    double mass = 0.0;
    for (int i = 0; i <= m; i += stride) {
      const double end = (i == 0 || i == m) ? 0.5 : 1.0;
      const double w = end * distribution.pdf(radii[i]) * radii[i];
      weighted += w * chi[i].value;
      mass += w;
    }
    // Normalize so the body carries exactly the analytic mass between the cutoffs.
    const double body = distribution.cdf(radii[m]) - distribution.cdf(radii[0]);
    const double below = distribution.cdf(radii[0]);
    const double above = 1.0 - distribution.cdf(radii[m]);
    const cplx body_chi = mass > 0.0 ? body * weighted / mass : cplx(0.0);
    return Susceptibility{below * chi[0].value + body_chi + above * chi[m + 1].value};
  };

  EnsembleResult out;
  out.chi = integrate(1);
  out.coarse_chi = integrate(2);
  out.nodes = m + 1;
  out.relative_change = std::abs(out.chi.value - out.coarse_chi.value) / std::abs(out.chi.value);
  if (quadrature.check_convergence && !(out.relative_change <= quadrature.tolerance)) {
    std::ostringstream msg;
    msg << "ensemble_susceptibility: quadrature not converged (relative change " << out.relative_change
        << " with " << m << " intervals)";
    throw QuadratureError(msg.str());
  }
  return out;
}

}  // namespace rydeit
