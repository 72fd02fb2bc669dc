#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rydeit {

using cplx = std::complex<double>;
using Operator = Eigen::MatrixXcd;

/// Thrown for malformed operator algebra (dimension mismatches, bad indices).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a numerical routine cannot produce a trustworthy result.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tolerances shared by every steady-state solve.
struct NumericalSettings {
  double hermiticity_tol = 1e-10;
  double trace_tol = 1e-10;
  double min_eigenvalue = -1e-9;
  double residual_tol = 1e-9;
  /// Reciprocal condition estimate below which the steady state is treated as non-unique.
  double min_rcond = 1e-15;
};

/// A dissipator rate * (L rho L^+ - 1/2 {L^+ L, rho}).
struct LindbladTerm {
  Operator op;
  double rate = 0.0;
};

/// Matrix of the Liouvillian acting on column-stacked density matrices,
/// vec(rho)[i + d*j] = rho(i, j).
struct Superoperator {
  int hilbert_dim = 0;
  Eigen::MatrixXcd matrix;
};

/// Quality figures of a steady-state solution.
struct SolveDiagnostics {
  double hermiticity = 0.0;   // max |rho - rho^+|
  double trace_error = 0.0;   // |tr rho - 1|
  double min_eigenvalue = 0.0;
  double residual = 0.0;      // ||L vec(rho)||_inf
  double rcond = 0.0;
};

class DensityMatrix {
 public:
  DensityMatrix() = default;
  explicit DensityMatrix(Eigen::MatrixXcd entries);

  int dim() const { return static_cast<int>(entries_.rows()); }
  const Eigen::MatrixXcd& matrix() const { return entries_; }
  cplx operator()(int i, int j) const { return entries_(i, j); }
  cplx trace() const { return entries_.trace(); }

  double hermiticity_error() const;
  double min_eigenvalue() const;

 private:
  Eigen::MatrixXcd entries_;
};

struct SteadyState {
  DensityMatrix rho;
  SolveDiagnostics diagnostics;
};

Eigen::VectorXcd vectorize(const Eigen::MatrixXcd& rho);
Eigen::MatrixXcd unvectorize(const Eigen::VectorXcd& v, int dim);

Operator tensor_product(const Operator& a, const Operator& b);

/// Matrix unit |i><j| of dimension dim.
Operator basis_operator(int dim, int i, int j);

/// dρ/dt = -i[H, ρ] + Σ rate (LρL† − ½{L†L, ρ}). H must be Hermitian.
Superoperator build_liouvillian(const Operator& hamiltonian,
                                std::span<const LindbladTerm> terms);

/// Unique steady state of L via row replacement with the trace constraint and a
/// dense LU solve. Throws NumericalError when the system is singular or when the
/// solution fails any check in `settings`.
/// Worst diagnostics over every steady state solved since the last reset (all threads).
struct SolveAudit {
  std::uint64_t solves = 0;
  double hermiticity = 0.0;
  double trace_error = 0.0;
  double min_eigenvalue = 0.0;
  double residual = 0.0;
};
SolveAudit solve_audit();
void reset_solve_audit();

SteadyState steady_state(const Superoperator& liouvillian,
                         const NumericalSettings& settings = {});

/// Same contract as steady_state() for a 3-level system, on fixed-size storage.
SteadyState steady_state(const Eigen::Matrix<cplx, 9, 9>& liouvillian,
                         const NumericalSettings& settings = {});

/// Reduced state of subsystem `keep` (0 or 1) of a bipartite system with dims (d1, d2).
DensityMatrix partial_trace(const DensityMatrix& rho, int keep, int d1, int d2);

}  // namespace rydeit
