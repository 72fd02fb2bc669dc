#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rydeit/ensemble.hpp"
#include "rydeit/units.hpp"

using namespace rydeit;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kN0 = 0.022;  // um^-3

// Composite Simpson on [a, b] with n (even) panels.
template <typename F>
double simpson(F f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + h * i);
  return s * h / 3.0;
}

LaserParams lasers_42s(double op) {
  LaserParams l;
  l.omega_p = op;
  l.omega_c = 2.5;
  l.gamma_p = 0.3;
  l.gamma_rel = 0.15;
  return l;
}

CloudParams cloud_at(double density_m3) {
  const auto atom = AtomParams::rubidium(41e-6);
  return {density_m3, kPathLength, atom.wavevector()};
}

}  // namespace

TEST_CASE("van der Waals shift") {
  const auto s = RydbergState::s48();
  CHECK(vdw_shift(s, 4.0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(vdw_shift(s, 8.0) == doctest::Approx(2.0 / 64.0).epsilon(1e-14));
  CHECK(vdw_shift(s, 2.0) == doctest::Approx(128.0).epsilon(1e-14));
  CHECK_THROWS_AS(vdw_shift(s, 0.0), std::invalid_argument);
}

TEST_CASE("blockade radii under the back-derived C6") {
  CHECK(blockade_radius(RydbergState::s48(), 2.0) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(blockade_radius(RydbergState::s42(), 2.5) == doctest::Approx(3.0).epsilon(1e-14));
  RydbergState big = RydbergState::s48();
  big.c6 *= 64.0;
  CHECK(blockade_radius(big, 2.0) == doctest::Approx(8.0).epsilon(1e-14));
  CHECK_THROWS_AS(blockade_radius(big, 0.0), std::invalid_argument);
}

TEST_CASE("nearest-neighbour distribution is normalized") {
  for (double n : {0.002, 0.022, 0.2}) {
    const double scale = std::cbrt(1.0 / n);
    const double mass = simpson([n](double r) { return nn_pdf(r, n); }, 0.0, 12.0 * scale, 20000);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(nn_cdf(12.0 * scale, n) == doctest::Approx(1.0).epsilon(1e-12));
    const double partial = simpson([n](double r) { return nn_pdf(r, n); }, 0.0, scale, 4000);
    CHECK(nn_cdf(scale, n) == doctest::Approx(partial).epsilon(1e-10));
  }
}

TEST_CASE("mean and most probable separation at peak density") {
  const double mean = simpson([](double r) { return r * nn_pdf(r, kN0); }, 0.0, 30.0, 40000);
  CHECK(mean == doctest::Approx(1.97).epsilon(0.01 / 1.97));
  CHECK(mean_nn_separation(kN0) == doctest::Approx(mean).epsilon(1e-9));
  double best = 0.0, best_r = 0.0;
  for (double r = 1.0; r < 3.0; r += 1e-5) {
    if (nn_pdf(r, kN0) > best) best = nn_pdf(r, kN0), best_r = r;
  }
  CHECK(best_r == doctest::Approx(std::cbrt(1.0 / (2.0 * kPi * kN0))).epsilon(1e-4));
  CHECK(best_r == doctest::Approx(1.93).epsilon(0.01));
}

TEST_CASE("atoms per blockade sphere") {
  const double n48 = atoms_in_blockade_sphere(kN0, 4.0);
  const double n42 = atoms_in_blockade_sphere(kN0, 3.0);
  CHECK(n48 == doctest::Approx(4.0 / 3.0 * kPi * 64.0 * kN0).epsilon(1e-14));
  CHECK(std::abs(n48 - 5.9) < 0.05);
  CHECK(std::abs(n42 - 2.5) < 0.05);
  CHECK(atoms_in_blockade_sphere(kN0, 0.0) == 0.0);
}

TEST_CASE("dilute ensemble approaches the single-atom susceptibility") {
  const auto atom = AtomParams::rubidium(41e-6);
  const double density = units::per_um3_to_per_m3(1e-4);
  const auto lasers = lasers_42s(1.0);
  const auto ens = ensemble_susceptibility(lasers, atom, RydbergState::s42(), cloud_at(density));
  const auto single = single_atom_susceptibility(lasers, atom, density);
  CHECK(ens.chi.chi_i() == doctest::Approx(single.chi_i()).epsilon(0.01));
}

TEST_CASE("weak-probe susceptibility per atom is nearly density independent") {
  const auto atom = AtomParams::rubidium(41e-6);
  const auto lasers = lasers_42s(0.3);
  double lo = 1e300, hi = 0.0;
  for (double f : {0.25, 0.5, 1.0}) {
    const double density = f * kPeakDensity;
    const double per_atom =
        ensemble_susceptibility(lasers, atom, RydbergState::s42(), cloud_at(density)).chi.chi_i() / density;
    lo = std::min(lo, per_atom);
    hi = std::max(hi, per_atom);
  }
  CHECK((hi - lo) / lo < 0.10);
}

TEST_CASE("doubling the quadrature nodes changes the result by less than 0.5%") {
  const auto atom = AtomParams::rubidium(41e-6);
  const auto lasers = lasers_42s(1.5);
  QuadratureSettings q;
  const auto base = ensemble_susceptibility(lasers, atom, RydbergState::s42(), cloud_at(kPeakDensity), q);
  q.intervals = 400;
  const auto fine = ensemble_susceptibility(lasers, atom, RydbergState::s42(), cloud_at(kPeakDensity), q);
  CHECK(std::abs(fine.chi.chi_i() / base.chi.chi_i() - 1.0) < 0.005);
  CHECK(base.relative_change < 0.005);
  CHECK(base.nodes == 201);
}

TEST_CASE("serial and parallel quadrature agree exactly") {
  const auto atom = AtomParams::rubidium(41e-6);
  const auto lasers = lasers_42s(1.2);
  QuadratureSettings q;
  q.intervals = 40;
  q.check_convergence = false;
  q.execution = Execution::serial;
  const auto s = ensemble_susceptibility(lasers, atom, RydbergState::s42(), cloud_at(kPeakDensity), q);
  q.execution = Execution::parallel;
  const auto p = ensemble_susceptibility(lasers, atom, RydbergState::s42(), cloud_at(kPeakDensity), q);
  CHECK(s.chi.value == p.chi.value);
}

TEST_CASE("a custom distribution concentrated at one separation reproduces the pair model") {
  const auto atom = AtomParams::rubidium(41e-6);
  const auto lasers = lasers_42s(1.0);
  const auto state = RydbergState::s42();
  QuadratureSettings q;
  q.check_convergence = false;
  NeighbourDistribution narrow;
  // every neighbour inside r_min: the whole mass is assigned chi(V(r_min))
  narrow.r_cut = 10.0;
  narrow.pdf = [](double) { return 0.0; };
  narrow.cdf = [](double) { return 1.0; };
  const auto ens = ensemble_susceptibility(lasers, atom, state, cloud_at(kPeakDensity), narrow, q);
  auto a = atom;
  a.gamma_r = units::lifetime_to_mhz(state.lifetime);
  const auto pair = pair_susceptibility(lasers, a, vdw_shift(state, q.r_min), kPeakDensity);
  CHECK(ens.chi.chi_i() == doctest::Approx(pair.chi_i()).epsilon(1e-9));
}

TEST_CASE("invalid quadrature settings are rejected") {
  const auto atom = AtomParams::rubidium(41e-6);
  QuadratureSettings q;
  q.intervals = 41;
  CHECK_THROWS_AS(ensemble_susceptibility(lasers_42s(1.0), atom, RydbergState::s42(), cloud_at(kPeakDensity), q),
                  std::invalid_argument);
}
