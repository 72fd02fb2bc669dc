#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "helpers.hpp"
#include "rydeit/lindblad.hpp"

using namespace rydeit;
using testing::max_abs;

namespace {

Operator ket_bra(int d, int i, int j) { return basis_operator(d, i, j); }

}  // namespace

TEST_CASE("tensor product of identities is the identity") {
  const Operator id2 = Operator::Identity(2, 2);
  CHECK(max_abs(tensor_product(id2, id2) - Operator::Identity(4, 4)) == 0.0);
}

TEST_CASE("|e><g| on atom one touches exactly three entries") {
  const Operator op = tensor_product(ket_bra(3, 1, 0), Operator::Identity(3, 3));
  int nonzero = 0;
  for (int i = 0; i < 9; ++i) {
    for (int j = 0; j < 9; ++j) {
      if (op(i, j) != cplx(0.0)) {
        ++nonzero;
        // |e b><g b| with composite index a*3 + b
        CHECK(i == 3 + j % 3);
        CHECK(j / 3 == 0);
      }
    }
  }
  CHECK(nonzero == 3);
}

TEST_CASE("mixed-product property against brute-force multiplication") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    const auto a = testing::random_matrix(3, rng), b = testing::random_matrix(3, rng);
    const auto c = testing::random_matrix(3, rng), d = testing::random_matrix(3, rng);
    // brute-force Kronecker with (A x B)[i*3+k, j*3+l] = A[i,j] B[k,l]
    auto kron = [](const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& y) {
      Eigen::MatrixXcd out(9, 9);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          for (int k = 0; k < 3; ++k)
            for (int l = 0; l < 3; ++l) out(i * 3 + k, j * 3 + l) = x(i, j) * y(k, l);
      return out;
    };
    CHECK(max_abs(tensor_product(a, b) - kron(a, b)) == 0.0);
    CHECK(max_abs(tensor_product(a, b) * tensor_product(c, d) - tensor_product(a * c, b * d)) < 1e-12);
  }
}

TEST_CASE("tensor product rejects non-square factors") {
  CHECK_THROWS_AS(tensor_product(Operator::Zero(2, 3), Operator::Identity(2, 2)), DimensionError);
}

TEST_CASE("vectorize is column stacking and round-trips") {
  std::mt19937_64 rng(3);
  const auto m = testing::random_matrix(3, rng);
  const auto v = vectorize(m);
  CHECK(v(1) == m(1, 0));
  CHECK(v(3) == m(0, 1));
  CHECK(max_abs(unvectorize(v, 3) - m) == 0.0);
}

TEST_CASE("empty Hamiltonian and no terms give the zero superoperator") {
  const auto l = build_liouvillian(Operator::Zero(3, 3), {});
  CHECK(l.hilbert_dim == 3);
  CHECK(max_abs(l.matrix) == 0.0);
}

TEST_CASE("Liouvillian reproduces the commutator and dissipator") {
  std::mt19937_64 rng(11);
  const auto h = testing::random_hermitian(3, rng);
  const auto jump = testing::random_matrix(3, rng);
  const std::vector<LindbladTerm> terms{{jump, 0.7}};
  const auto l = build_liouvillian(h, terms);
  const auto rho = testing::random_density(3, rng);
  const cplx i(0.0, 1.0);
  const Eigen::MatrixXcd jdj = jump.adjoint() * jump;
  const Eigen::MatrixXcd expected = -i * (h * rho - rho * h) +
                                    0.7 * (jump * rho * jump.adjoint() - 0.5 * (jdj * rho + rho * jdj));
  CHECK(max_abs(unvectorize(l.matrix * vectorize(rho), 3) - expected) < 1e-12);
}

TEST_CASE("two-level decay matches the analytic solution") {
  // basis g = 0, e = 1
  const double gamma = 1.3;
  const std::vector<LindbladTerm> terms{{ket_bra(2, 0, 1), gamma}};
  const auto l = build_liouvillian(Operator::Zero(2, 2), terms);
  Eigen::MatrixXcd rho0(2, 2);
  rho0 << 0.4, cplx(0.2, 0.1), cplx(0.2, -0.1), 0.6;
  for (double t : {0.01, 0.05, 0.3}) {
    const Eigen::MatrixXcd prop = (l.matrix * t).exp();
    const auto rho = unvectorize(prop * vectorize(rho0), 2);
    CHECK(std::abs(rho(1, 1) - 0.6 * std::exp(-gamma * t)) < 1e-12);
    CHECK(std::abs(rho(0, 1) - rho0(0, 1) * std::exp(-0.5 * gamma * t)) < 1e-12);
    CHECK(std::abs(rho.trace() - 1.0) < 1e-12);
  }
}

TEST_CASE("Liouvillian action preserves Hermiticity") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const auto h = testing::random_hermitian(3, rng);
    const std::vector<LindbladTerm> terms{{testing::random_matrix(3, rng), 0.5}, {testing::random_matrix(3, rng), 2.0}};
    const auto l = build_liouvillian(h, terms);
    const auto rho0 = testing::random_hermitian(3, rng);
    const auto out = unvectorize(l.matrix * vectorize(rho0), 3);
    CHECK(max_abs(out - out.adjoint()) < 1e-12);
  }
}

TEST_CASE("build_liouvillian validates its inputs") {
  Operator non_hermitian = Operator::Zero(2, 2);
  non_hermitian(0, 1) = 1.0;
  CHECK_THROWS_AS(build_liouvillian(non_hermitian, {}), std::invalid_argument);
  const std::vector<LindbladTerm> wrong_dim{{Operator::Identity(3, 3), 1.0}};
  CHECK_THROWS_AS(build_liouvillian(Operator::Zero(2, 2), wrong_dim), DimensionError);
  const std::vector<LindbladTerm> negative{{Operator::Identity(2, 2), -1.0}};
  CHECK_THROWS_AS(build_liouvillian(Operator::Zero(2, 2), negative), std::invalid_argument);
}

TEST_CASE("pure decay relaxes to the ground state") {
  const std::vector<LindbladTerm> terms{{ket_bra(2, 0, 1), 1.0}};
  const auto ss = steady_state(build_liouvillian(Operator::Zero(2, 2), terms));
  CHECK(std::abs(ss.rho(0, 0) - 1.0) < 1e-12);
  CHECK(std::abs(ss.rho(1, 1)) < 1e-12);
}

TEST_CASE("driven two-level steady state follows the saturation formula") {
  const double gamma = 1.0;
  for (auto [omega, delta] : {std::pair{1.0, 0.0}, std::pair{2.5, 0.7}, std::pair{0.3, -1.1}}) {
    Operator h = Operator::Zero(2, 2);
    h(1, 1) = -delta;
    h(0, 1) = h(1, 0) = 0.5 * omega;
    const std::vector<LindbladTerm> terms{{ket_bra(2, 0, 1), gamma}};
    const auto ss = steady_state(build_liouvillian(h, terms));
    const double expected = (omega * omega / 4.0) / (delta * delta + gamma * gamma / 4.0 + omega * omega / 2.0);
    CHECK(ss.rho(1, 1).real() == doctest::Approx(expected).epsilon(1e-12));
    if (omega == 1.0) CHECK(ss.rho(1, 1).real() == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  }
}

TEST_CASE("resonant ladder approaches the dark-state projector as the Rydberg decay vanishes") {
  const double op = 0.8, oc = 2.0, gamma_e = 6.0;
  Operator h = Operator::Zero(3, 3);
  h(0, 1) = h(1, 0) = 0.5 * op;
  h(1, 2) = h(2, 1) = 0.5 * oc;
  Eigen::VectorXcd dark(3);
  dark << oc, 0.0, -op;
  dark.normalize();
  double previous_coherence = 1.0;
  for (double gamma_r : {1e-2, 1e-4, 1e-6}) {
    const std::vector<LindbladTerm> terms{{ket_bra(3, 0, 1), gamma_e}, {ket_bra(3, 1, 2), gamma_r}};
    const auto ss = steady_state(build_liouvillian(h, terms));
    const double fidelity = (dark.adjoint() * ss.rho.matrix() * dark)(0, 0).real();
    const double coherence = std::abs(ss.rho(1, 0));
    CHECK(coherence < previous_coherence);
    previous_coherence = coherence;
    if (gamma_r == 1e-6) {
      CHECK(fidelity > 1.0 - 1e-5);
      CHECK(coherence < 1e-6);
    }
  }
}

TEST_CASE("steady state reports diagnostics within tolerance") {
  std::mt19937_64 rng(17);
  const auto h = testing::random_hermitian(3, rng);
  const std::vector<LindbladTerm> terms{{ket_bra(3, 0, 1), 1.0}, {ket_bra(3, 1, 2), 0.5}, {ket_bra(3, 2, 0), 0.2}};
  const auto l = build_liouvillian(h, terms);
  const auto ss = steady_state(l);
  CHECK(ss.diagnostics.hermiticity <= 1e-10);
  CHECK(ss.diagnostics.trace_error <= 1e-10);
  CHECK(ss.diagnostics.min_eigenvalue >= -1e-9);
  CHECK(ss.diagnostics.residual <= 1e-9);

  // the fixed-size overload agrees with the dynamic one
  const Eigen::Matrix<cplx, 9, 9> fixed = l.matrix;
  const auto ss_fixed = steady_state(fixed);
  CHECK(max_abs(ss_fixed.rho.matrix() - ss.rho.matrix()) < 1e-12);
}

TEST_CASE("a Liouvillian without a unique steady state is rejected") {
  const auto l = build_liouvillian(Operator::Zero(3, 3), {});
  CHECK_THROWS_AS(steady_state(l), NumericalError);
  Operator h = Operator::Zero(2, 2);
  h(0, 1) = h(1, 0) = 1.0;
  CHECK_THROWS_AS(steady_state(build_liouvillian(h, {})), NumericalError);
}

TEST_CASE("solve audit tracks every steady state") {
  reset_solve_audit();
  const std::vector<LindbladTerm> terms{{ket_bra(2, 0, 1), 1.0}};
  steady_state(build_liouvillian(Operator::Zero(2, 2), terms));
  steady_state(build_liouvillian(Operator::Zero(2, 2), terms));
  const auto audit = solve_audit();
  CHECK(audit.solves == 2);
  CHECK(audit.residual <= 1e-9);
}

TEST_CASE("partial trace of a product state returns the factor") {
  std::mt19937_64 rng(23);
  const auto r1 = testing::random_density(3, rng), r2 = testing::random_density(3, rng);
  const DensityMatrix prod(tensor_product(r1, r2));
  CHECK(max_abs(partial_trace(prod, 0, 3, 3).matrix() - r1) < 1e-14);
  CHECK(max_abs(partial_trace(prod, 1, 3, 3).matrix() - r2) < 1e-14);
  const auto r3 = testing::random_density(2, rng);
  const DensityMatrix uneven(tensor_product(r1, r3));
  CHECK(max_abs(partial_trace(uneven, 0, 3, 2).matrix() - r1) < 1e-14);
  CHECK(max_abs(partial_trace(uneven, 1, 3, 2).matrix() - r3) < 1e-14);
}

TEST_CASE("partial trace of the blockaded state at theta = pi/4 has equal populations") {
  // amplitudes (0, -1, -1, 1)/sqrt(3) on (gg, gr, rg, ee) with composite index a*3 + b
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(9);
  const double s = 1.0 / std::sqrt(3.0);
  psi(0 * 3 + 2) = -s;
  psi(2 * 3 + 0) = -s;
  psi(1 * 3 + 1) = s;
  const DensityMatrix rho(psi * psi.adjoint());
  const auto a = partial_trace(rho, 0, 3, 3);
  for (int k = 0; k < 3; ++k) CHECK(a(k, k).real() == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("partial trace validates dimensions") {
  const DensityMatrix rho(Eigen::MatrixXcd::Identity(6, 6) / 6.0);
  CHECK_THROWS_AS(partial_trace(rho, 0, 3, 3), DimensionError);
  CHECK_THROWS_AS(partial_trace(rho, 2, 3, 2), DimensionError);
}
