#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "rydeit/ion_mc.hpp"
#include "rydeit/kernels.hpp"

namespace rydeit::kernels::detail {

inline std::vector<std::size_t> ion_indices(const CloudSample& sample) {
  std::vector<std::size_t> ions;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    if (sample.is_ion(i)) ions.push_back(i);
  }
  return ions;
}

inline FieldResult field_at(const CloudSample& sample, const std::vector<std::size_t>& ions, std::size_t atom) {
  const double k = coulomb_field_constant();
  FieldResult out;
  double nearest2 = std::numeric_limits<double>::infinity();
  const Eigen::Vector3d& p = sample.positions[atom];
  for (std::size_t ion : ions) {
    if (ion == atom) continue;
    const Eigen::Vector3d d = p - sample.positions[ion];
    const double r2 = d.squaredNorm();
    nearest2 = std::min(nearest2, r2);
    out.field += (k / (r2 * std::sqrt(r2))) * d;
  }
  out.nearest_ion = std::sqrt(nearest2);
  return out;
}

inline cplx shifted_mean(const SingleAtomSolver& solver, std::span<const double> shifts, double delta_p,
                         double density_m3) {
  cplx sum = 0.0;
  for (double s : shifts) sum += solver.susceptibility(delta_p, s, density_m3).value;
  return sum / static_cast<double>(shifts.size());
}

}  // namespace rydeit::kernels::detail
