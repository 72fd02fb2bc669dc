#pragma once

#include <complex>
#include <random>

#include <Eigen/Dense>

namespace testing {

inline Eigen::MatrixXcd random_matrix(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = {g(rng), g(rng)};
  }
  return m;
}

inline Eigen::MatrixXcd random_hermitian(int n, std::mt19937_64& rng) {
  const Eigen::MatrixXcd a = random_matrix(n, rng);
  return 0.5 * (a + a.adjoint());
}

// Random positive density matrix with unit trace.
inline Eigen::MatrixXcd random_density(int n, std::mt19937_64& rng) {
  const Eigen::MatrixXcd a = random_matrix(n, rng);
  Eigen::MatrixXcd rho = a * a.adjoint();
  return rho / rho.trace();
}

inline double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace testing
