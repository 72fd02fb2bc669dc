#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "rydeit/execution.hpp"
#include "rydeit/ion_mc.hpp"
#include "rydeit/pair_model.hpp"

// Data-parallel inner loops. `omp` is the production path; `serial` is the
// reference it is tested against. Each output element depends only on its own
// index and reductions run in index order, so the two agree bit for bit.
namespace rydeit::kernels {

struct FieldResult {
  Eigen::Vector3d field = Eigen::Vector3d::Zero();  // V/cm
  double nearest_ion = 0.0;                         // um; +inf when there are no ions
};

namespace serial {
// out[i] = f(i); an exception is rethrown from the lowest failing index.
std::vector<Susceptibility> evaluate(std::size_t n, const std::function<Susceptibility(std::size_t)>& f);

std::vector<Susceptibility> pair_susceptibilities(const LaserParams& lasers, const AtomParams& atom,
                                                  std::span<const double> interactions, double density_m3,
                                                  const NumericalSettings& numerics);

std::vector<FieldResult> ion_fields(const CloudSample& sample, std::span<const std::size_t> atoms);

// out[j] = mean over shifts of chi(grid[j], shift), summed in shift order.
std::vector<cplx> mean_shifted_susceptibility(const SingleAtomSolver& solver, std::span<const double> shifts,
                                              std::span<const double> grid, double density_m3);
}  // namespace serial

namespace omp {
// out[i] = f(i); an exception is rethrown from the lowest failing index.
std::vector<Susceptibility> evaluate(std::size_t n, const std::function<Susceptibility(std::size_t)>& f);

std::vector<Susceptibility> pair_susceptibilities(const LaserParams& lasers, const AtomParams& atom,
                                                  std::span<const double> interactions, double density_m3,
                                                  const NumericalSettings& numerics);

std::vector<FieldResult> ion_fields(const CloudSample& sample, std::span<const std::size_t> atoms);

// out[j] = mean over shifts of chi(grid[j], shift), summed in shift order.
std::vector<cplx> mean_shifted_susceptibility(const SingleAtomSolver& solver, std::span<const double> shifts,
                                              std::span<const double> grid, double density_m3);
}  // namespace omp

inline std::vector<Susceptibility> evaluate(Execution ex, std::size_t n,
                                            const std::function<Susceptibility(std::size_t)>& f) {
  return ex == Execution::serial ? serial::evaluate(n, f) : omp::evaluate(n, f);
}

inline std::vector<Susceptibility> pair_susceptibilities(Execution ex, const LaserParams& lasers,
                                                         const AtomParams& atom, std::span<const double> v,
                                                         double density_m3, const NumericalSettings& numerics) {
  return ex == Execution::serial ? serial::pair_susceptibilities(lasers, atom, v, density_m3, numerics)
                                 : omp::pair_susceptibilities(lasers, atom, v, density_m3, numerics);
}

inline std::vector<FieldResult> ion_fields(Execution ex, const CloudSample& sample,
                                           std::span<const std::size_t> atoms) {
  return ex == Execution::serial ? serial::ion_fields(sample, atoms) : omp::ion_fields(sample, atoms);
}

inline std::vector<cplx> mean_shifted_susceptibility(Execution ex, const SingleAtomSolver& solver,
                                                     std::span<const double> shifts, std::span<const double> grid,
                                                     double density_m3) {
  return ex == Execution::serial ? serial::mean_shifted_susceptibility(solver, shifts, grid, density_m3)
                                 : omp::mean_shifted_susceptibility(solver, shifts, grid, density_m3);
}

}  // namespace rydeit::kernels
