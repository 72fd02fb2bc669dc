#include "rydeit/lindblad.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>

namespace rydeit {

namespace {

double max_abs(const Eigen::MatrixXcd& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

struct AtomicAudit {
  std::atomic<std::uint64_t> solves{0};
  std::atomic<double> hermiticity{0.0};
  std::atomic<double> trace_error{0.0};
  std::atomic<double> min_eigenvalue{0.0};
  std::atomic<double> residual{0.0};
};

AtomicAudit& audit() {
  static AtomicAudit a;
  return a;
}

void raise_to(std::atomic<double>& slot, double v) {
  double cur = slot.load(std::memory_order_relaxed);
  while (v > cur && !slot.compare_exchange_weak(cur, v, std::memory_order_relaxed)) {
  }
}

void lower_to(std::atomic<double>& slot, double v) {
  double cur = slot.load(std::memory_order_relaxed);
  while (v < cur && !slot.compare_exchange_weak(cur, v, std::memory_order_relaxed)) {
  }
}

void record(const SolveDiagnostics& d) {
  auto& a = audit();
  a.solves.fetch_add(1, std::memory_order_relaxed);
  raise_to(a.hermiticity, d.hermiticity);
  raise_to(a.trace_error, d.trace_error);
  lower_to(a.min_eigenvalue, d.min_eigenvalue);
  raise_to(a.residual, d.residual);
}

template <typename Matrix>
SteadyState solve_steady_state(const Matrix& liouvillian, int d, const NumericalSettings& settings) {
  using Vector = Eigen::Matrix<cplx, Matrix::RowsAtCompileTime, 1>;
  const auto d2 = liouvillian.rows();
  if (liouvillian.cols() != d2 || d2 != static_cast<Eigen::Index>(d) * d) {
    throw DimensionError("steady_state: superoperator is not d^2 x d^2");
  }

  // The ρ(0,0) equation is redundant given trace preservation; swap it for tr ρ = 1.
  Matrix system = liouvillian;
  system.row(0).setZero();
  for (int i = 0; i < d; ++i) system(0, i + d * i) = 1.0;
  Vector rhs = Vector::Zero(d2);
  rhs(0) = 1.0;

  Eigen::PartialPivLU<Matrix> lu(system);
  // Pivot ratio of U: cheap, and the only estimate on the small systems solved in bulk.
  // Eigen's rcond() is unreliable once a pivot is exactly zero, so it only tightens the ratio.
  const auto pivots = lu.matrixLU().diagonal().cwiseAbs();
  double rcond = pivots.minCoeff() / pivots.maxCoeff();
  if constexpr (Matrix::RowsAtCompileTime == Eigen::Dynamic) {
    if (rcond > 0.0) rcond = std::min(rcond, lu.rcond());
  }
  if (!(rcond > settings.min_rcond)) {
    std::ostringstream msg;
    msg << "steady_state: non-unique steady state (rcond = " << rcond << ")";
    throw NumericalError(msg.str());
  }
  const Vector x = lu.solve(rhs);

  SteadyState out;
  auto& diag = out.diagnostics;
  diag.rcond = rcond;
  diag.residual = (liouvillian * x).cwiseAbs().maxCoeff();
  if constexpr (Matrix::RowsAtCompileTime == Eigen::Dynamic) {
    out.rho = DensityMatrix(unvectorize(x, d));
    diag.hermiticity = out.rho.hermiticity_error();
    diag.min_eigenvalue = out.rho.min_eigenvalue();
  } else {
    // Fixed-size path: keep the checks off the heap.
    constexpr int kDim = Eigen::internal::meta_sqrt<Matrix::RowsAtCompileTime>::ret;
    using Small = Eigen::Matrix<cplx, kDim, kDim>;
    const Small rho = Eigen::Map<const Small>(x.data());
    diag.hermiticity = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    const Small herm = 0.5 * (rho + rho.adjoint());
    diag.min_eigenvalue = Eigen::SelfAdjointEigenSolver<Small>(herm, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
    out.rho = DensityMatrix(Eigen::MatrixXcd(rho));
  }
  diag.trace_error = std::abs(out.rho.trace() - 1.0);
  record(diag);

  if (!(diag.hermiticity <= settings.hermiticity_tol) || !(diag.trace_error <= settings.trace_tol) ||
      !(diag.min_eigenvalue >= settings.min_eigenvalue) || !(diag.residual <= settings.residual_tol)) {
    std::ostringstream msg;
    msg << "steady_state: solution failed checks (hermiticity " << diag.hermiticity << ", trace error "
        << diag.trace_error << ", min eigenvalue " << diag.min_eigenvalue << ", residual "
        << diag.residual << ")";
    throw NumericalError(msg.str());
  }
  return out;
}

}  // namespace

SolveAudit solve_audit() {
  const auto& a = audit();
  return {a.solves.load(), a.hermiticity.load(), a.trace_error.load(), a.min_eigenvalue.load(), a.residual.load()};
}

void reset_solve_audit() {
  auto& a = audit();
  a.solves = 0;
  a.hermiticity = 0.0;
  a.trace_error = 0.0;
  a.min_eigenvalue = 0.0;
  a.residual = 0.0;
}

DensityMatrix::DensityMatrix(Eigen::MatrixXcd entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() == 0) {
    throw DimensionError("DensityMatrix: entries must be a non-empty square matrix");
  }
}

double DensityMatrix::hermiticity_error() const {
  return max_abs(entries_ - entries_.adjoint());
}

double DensityMatrix::min_eigenvalue() const {
  const Eigen::MatrixXcd herm = 0.5 * (entries_ + entries_.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

Eigen::VectorXcd vectorize(const Eigen::MatrixXcd& rho) {
  return rho.reshaped();  // column-major storage: index i + d*j
}

Eigen::MatrixXcd unvectorize(const Eigen::VectorXcd& v, int dim) {
  if (v.size() != static_cast<Eigen::Index>(dim) * dim) {
    throw DimensionError("unvectorize: length is not dim^2");
  }
  return v.reshaped(dim, dim);
}

Operator tensor_product(const Operator& a, const Operator& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols()) {
    throw DimensionError("tensor_product: operands must be square");
  }
  const auto db = b.rows();
  Operator out(a.rows() * db, a.cols() * db);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * db, j * db, db, db) = a(i, j) * b;
    }
  }
  return out;
}

Operator basis_operator(int dim, int i, int j) {
  if (i < 0 || j < 0 || i >= dim || j >= dim) throw DimensionError("basis_operator: index out of range");
  Operator op = Operator::Zero(dim, dim);
  op(i, j) = 1.0;
  return op;
}

Superoperator build_liouvillian(const Operator& hamiltonian, std::span<const LindbladTerm> terms) {
  const auto d = hamiltonian.rows();
  if (hamiltonian.cols() != d) throw DimensionError("build_liouvillian: Hamiltonian is not square");
  if (max_abs(hamiltonian - hamiltonian.adjoint()) > 1e-10) {
    throw std::invalid_argument("build_liouvillian: Hamiltonian is not Hermitian");
  }
  const Operator id = Operator::Identity(d, d);

  Superoperator out{static_cast<int>(d), {}};
  const cplx minus_i(0.0, -1.0);
  out.matrix = minus_i * (tensor_product(id, hamiltonian) - tensor_product(hamiltonian.transpose(), id));

  for (const auto& term : terms) {
    if (term.op.rows() != d || term.op.cols() != d) {
      throw DimensionError("build_liouvillian: collapse operator dimension differs from H");
    }
    if (!(term.rate >= 0.0)) throw std::invalid_argument("build_liouvillian: negative rate");
    if (term.rate == 0.0) continue;
    const Operator n = term.op.adjoint() * term.op;
    out.matrix += term.rate * (tensor_product(term.op.conjugate(), term.op) -
                               0.5 * tensor_product(id, n) - 0.5 * tensor_product(n.transpose(), id));
  }
  return out;
}

SteadyState steady_state(const Superoperator& liouvillian, const NumericalSettings& settings) {
  return solve_steady_state(liouvillian.matrix, liouvillian.hilbert_dim, settings);
}

SteadyState steady_state(const Eigen::Matrix<cplx, 9, 9>& liouvillian, const NumericalSettings& settings) {
  return solve_steady_state(liouvillian, 3, settings);
}

DensityMatrix partial_trace(const DensityMatrix& rho, int keep, int d1, int d2) {
  if (d1 <= 0 || d2 <= 0 || rho.dim() != d1 * d2) {
    throw DimensionError("partial_trace: dim(rho) != d1*d2");
  }
  if (keep != 0 && keep != 1) throw DimensionError("partial_trace: keep must be 0 or 1");
  const auto& m = rho.matrix();
  const int dk = keep == 0 ? d1 : d2;
  const int dt = keep == 0 ? d2 : d1;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dk, dk);
  for (int i = 0; i < dk; ++i) {
    for (int j = 0; j < dk; ++j) {
      cplx s = 0.0;
      for (int t = 0; t < dt; ++t) {
        // composite index of |a>_1 |b>_2 is a*d2 + b
        s += keep == 0 ? m(i * d2 + t, j * d2 + t) : m(t * d2 + i, t * d2 + j);
      }
      out(i, j) = s;
    }
  }
  return DensityMatrix(std::move(out));
}

}  // namespace rydeit
