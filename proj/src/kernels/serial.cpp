#include "common.hpp"

namespace rydeit::kernels::serial {

std::vector<Susceptibility> evaluate(std::size_t n, const std::function<Susceptibility(std::size_t)>& f) {
  std::vector<Susceptibility> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
  return out;
}

std::vector<Susceptibility> pair_susceptibilities(const LaserParams& lasers, const AtomParams& atom,
                                                  std::span<const double> interactions, double density_m3,
                                                  const NumericalSettings& numerics) {
  std::vector<Susceptibility> out(interactions.size());
  for (std::size_t i = 0; i < interactions.size(); ++i) {
    out[i] = pair_susceptibility(lasers, atom, interactions[i], density_m3, numerics);
  }
  return out;
}

std::vector<FieldResult> ion_fields(const CloudSample& sample, std::span<const std::size_t> atoms) {
  const auto ions = detail::ion_indices(sample);
  std::vector<FieldResult> out(atoms.size());
  for (std::size_t i = 0; i < atoms.size(); ++i) out[i] = detail::field_at(sample, ions, atoms[i]);
  return out;
}

std::vector<cplx> mean_shifted_susceptibility(const SingleAtomSolver& solver, std::span<const double> shifts,
                                              std::span<const double> grid, double density_m3) {
  std::vector<cplx> out(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) out[j] = detail::shifted_mean(solver, shifts, grid[j], density_m3);
  return out;
}

}  // namespace rydeit::kernels::serial
