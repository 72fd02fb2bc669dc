#include <exception>

#include "common.hpp"

namespace rydeit::kernels::omp {

namespace {

// Runs body(i) for i in [0, n) across threads. Exceptions cannot leave an
// OpenMP region, so they are parked per index and the first one rethrown.
template <typename Body>
void parallel_for(std::size_t n, Body&& body) {
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

std::vector<Susceptibility> evaluate(std::size_t n, const std::function<Susceptibility(std::size_t)>& f) {
  std::vector<Susceptibility> out(n);
  parallel_for(n, [&](std::size_t i) { out[i] = f(i); });
  return out;
}

std::vector<Susceptibility> pair_susceptibilities(const LaserParams& lasers, const AtomParams& atom,
                                                  std::span<const double> interactions, double density_m3,
                                                  const NumericalSettings& numerics) {
  std::vector<Susceptibility> out(interactions.size());
  parallel_for(interactions.size(), [&](std::size_t i) {
    out[i] = pair_susceptibility(lasers, atom, interactions[i], density_m3, numerics);
  });
  return out;
}

std::vector<FieldResult> ion_fields(const CloudSample& sample, std::span<const std::size_t> atoms) {
  const auto ions = detail::ion_indices(sample);
  std::vector<FieldResult> out(atoms.size());
  const auto count = static_cast<std::ptrdiff_t>(atoms.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    out[static_cast<std::size_t>(i)] = detail::field_at(sample, ions, atoms[static_cast<std::size_t>(i)]);
  }
  return out;
}

std::vector<cplx> mean_shifted_susceptibility(const SingleAtomSolver& solver, std::span<const double> shifts,
                                              std::span<const double> grid, double density_m3) {
  std::vector<cplx> out(grid.size());
  parallel_for(grid.size(), [&](std::size_t j) { out[j] = detail::shifted_mean(solver, shifts, grid[j], density_m3); });
  return out;
}

}  // namespace rydeit::kernels::omp
