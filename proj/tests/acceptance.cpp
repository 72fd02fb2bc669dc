// One line per acceptance criterion; exit status is the number of failures.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "rydeit/cli/commands.hpp"
#include "rydeit/ensemble.hpp"
#include "rydeit/ion_mc.hpp"
#include "rydeit/pair_model.hpp"
#include "rydeit/spectra_fit.hpp"
#include "rydeit/units.hpp"

using namespace rydeit;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kN0 = kPeakDensity;  // m^-3

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double time_limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool pass = out.pass;
  std::string timing = std::to_string(dt).substr(0, 6) + " s";
  if (time_limit_s > 0.0) {
    timing += dt < time_limit_s ? " (< " : " (EXCEEDS ";
    timing += std::to_string(static_cast<int>(time_limit_s)) + " s)";
    pass = pass && dt < time_limit_s;
  }
  if (!pass) ++failures;
  std::printf("[%s] %2d %s: %s; %s\n", pass ? "PASS" : "FAIL", id, name, out.detail.c_str(), timing.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

std::string fmt(const char* f, double a, double b, double c) {
  char buf[200];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

LaserParams lasers_48s(double op) {
  LaserParams l;
  l.omega_p = op;
  l.omega_c = 2.0;
  l.gamma_p = 0.3;
  l.gamma_rel = 0.15;
  return l;
}

LaserParams lasers_42s(double op) {
  LaserParams l = lasers_48s(op);
  l.omega_c = 2.5;
  return l;
}

CloudParams cloud_at(double density, const AtomParams& atom) { return {density, kPathLength, atom.wavevector()}; }

double ensemble_chi_per_atom(double op, double density) {
  const auto atom = AtomParams::rubidium(41e-6);
  const auto r = ensemble_susceptibility(lasers_42s(op), atom, RydbergState::s42(), cloud_at(density, atom));
  return r.chi.chi_i() / density;
}

}  // namespace

int main() {
  reset_solve_audit();
  const NumericalSettings numerics;  // trace 1e-10, Hermiticity 1e-10, eigenvalue -1e-9, residual 1e-9

  criterion(1, "dark-state transparency", 1.0, [] {
    // Gamma_r = 10 s^-1 expressed in MHz; Omega_c/2pi = 10 MHz, zero laser linewidths.
    // The residual scales as Gamma_r Gamma_e / Omega_c^2, so the coupling strength matters.
    auto atom = AtomParams::rubidium(58e-6);
    atom.gamma_r = units::angular_to_mhz(10.0);
    const double oc = 10.0;
    double worst = 0.0;
    for (double tan_theta : {0.1, 0.5, 1.0}) {
      LaserParams l;
      l.omega_c = oc;
      l.omega_p = oc * tan_theta;
      const double chi = pair_susceptibility(l, atom, 0.0, kN0).chi_i();
      LaserParams off = l;
      off.omega_c = 0.0;
      const double chi_off = pair_susceptibility(off, atom, 0.0, kN0).chi_i();
      worst = std::max(worst, chi / chi_off);
    }
    return Outcome{worst < 1e-6, fmt("max chi_I / chi_I(coupling off) = %.3g over tan(theta) in {0.1, 0.5, 1} at Omega_c = 10 MHz", worst)};
  });

  criterion(2, "blockaded-state null vector", 1.0, [] {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
      const double theta = 0.5 * kPi * u(rng), phi = 2.0 * kPi * u(rng);
      LaserParams l;
      l.omega_c = 2.0;
      l.omega_p = 2.0 * std::tan(theta);
      l.phase = phi;
      const Operator h = blockade_subspace_hamiltonian(l);
      const auto state = blockaded_state(theta, phi);
      Eigen::VectorXcd psi(8);
      for (int s = 0; s < 8; ++s) psi(s) = state[static_cast<PairState>(s)];
      // residual relative to the Hamiltonian scale
      worst = std::max(worst, (h * psi).norm() / std::max(1.0, h.norm()));
    }
    return Outcome{worst < 1e-10, fmt("max residual %.3g over 50 random (theta, phi)", worst)};
  });

  criterion(3, "two-level cross-section oracle", 0.0, [] {
    const auto atom = AtomParams::rubidium(58e-6);
    LaserParams l;
    l.omega_p = 1e-3 * atom.gamma_e;
    const double chi = pair_susceptibility(l, atom, 0.0, kN0).chi_i();
    const double sigma = 3.0 * atom.lambda_p * atom.lambda_p / (2.0 * kPi);
    const double ratio = atom.wavevector() * chi / kN0 / sigma;
    const double od = atom.wavevector() * chi * kPathLength;
    const bool ok = std::abs(ratio - 1.0) < 1e-3 && std::abs(od - 3.3) <= 0.1;
    return Outcome{ok, fmt("k chi_I / N / (3 lambda^2 / 2pi) = %.6f, peak OD at N0 = %.3f", ratio, od)};
  });

  criterion(4, "sign reversal of the non-linearity", 5.0, [] {
    const auto atom = AtomParams::rubidium(58e-6);
    auto chi = [&](double op, double v) { return pair_susceptibility(lasers_48s(op), atom, v, kN0).chi_i(); };
    const double a03 = chi(0.3, 10.0), a10 = chi(1.0, 10.0), b03 = chi(0.3, 0.0), b10 = chi(1.0, 0.0);
    const bool ok = a10 > a03 && b10 < b03;
    char buf[200];
    std::snprintf(buf, sizeof buf, "v=10: chi_I(1.0)/chi_I(0.3) = %.4f; v=0: %.4f", a10 / a03, b10 / b03);
    return Outcome{ok, buf};
  });

  criterion(5, "blockade saturation", 0.0, [] {
    const auto atom = AtomParams::rubidium(58e-6);
    double worst = 0.0;
    for (double op : {0.3, 1.0}) {
      const double c10 = pair_susceptibility(lasers_48s(op), atom, 10.0, kN0).chi_i();
      const double c20 = pair_susceptibility(lasers_48s(op), atom, 20.0, kN0).chi_i();
      worst = std::max(worst, std::abs(c20 / c10 - 1.0));
    }
    return Outcome{worst < 0.05, fmt("max |chi_I(v=20) / chi_I(v=10) - 1| = %.4f at Omega_p = 0.3, 1.0", worst)};
  });

  criterion(6, "geometry numbers", 0.0, [] {
    const double n = units::per_m3_to_per_um3(kN0);
    // mean separation by Simpson quadrature of r p(r)
    const int panels = 40000;
    const double b = 30.0, h = b / panels;
    double s = 0.0;
    for (int i = 0; i <= panels; ++i) {
      const double r = h * i;
      const double w = (i == 0 || i == panels) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      s += w * r * nn_pdf(r, n);
    }
    const double mean = s * h / 3.0;
    const double rb48 = blockade_radius(RydbergState::s48(), 2.0);
    const double rb42 = blockade_radius(RydbergState::s42(), 2.5);
    const double n48 = atoms_in_blockade_sphere(n, rb48), n42 = atoms_in_blockade_sphere(n, rb42);
    const bool ok = std::abs(mean - 1.97) <= 0.02 && std::abs(rb48 - 4.0) < 1e-12 && std::abs(rb42 - 3.0) < 1e-12 &&
                    std::abs(n48 - 5.9) < 0.05 && std::abs(n42 - 2.5) < 0.05;
    char buf[240];
    std::snprintf(buf, sizeof buf, "mean separation %.4f um, R_b %.6f / %.6f um, atoms per sphere %.3f / %.3f", mean,
                  rb48, rb42, n48, n42);
    return Outcome{ok, buf};
  });

  std::vector<double> plateau_curve;  // chi_I / N for Omega_p = 0.1 ... 1.5
  criterion(7, "strong-probe plateau", 120.0, [&] {
    for (int k = 1; k <= 15; ++k) plateau_curve.push_back(ensemble_chi_per_atom(0.1 * k, kN0));
    double lo = 1e300, hi = 0.0, mean = 0.0;
    for (int k = 12; k <= 15; ++k) {
      const double v = plateau_curve[k - 1];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      mean += v / 4.0;
    }
    const bool ok = std::abs(mean / 1.2e-20 - 1.0) <= 0.30 && (hi - lo) / mean <= 0.10;
    return Outcome{ok, fmt("chi_I/N over [1.2, 1.5] MHz: mean %.4g m^3, spread %.2f%%", mean, 100.0 * (hi - lo) / mean)};
  });

  criterion(8, "chi3 fit", 0.0, [&] {
    const auto atom = AtomParams::rubidium(41e-6);
    std::vector<Chi3Point> ens, free;
    for (int k = 1; k <= 15; ++k) {
      const double op = 0.1 * k;
      const double field = rabi_to_field(units::mhz_to_angular(op), atom.dipole);
      ens.push_back({field, plateau_curve.at(k - 1) * kN0});
      if (k <= 8) free.push_back({field, pair_susceptibility(lasers_42s(op), atom, 0.0, kN0).chi_i()});
    }
    const double cutoff = rabi_to_field(units::mhz_to_angular(0.7 + 1e-9), atom.dipole);
    const double c3 = fit_chi3(ens, cutoff).chi3_im;
    const double c3_free = fit_chi3(free, cutoff).chi3_im;
    const bool ok = c3 > 0.0 && c3 >= 2e-8 && c3 <= 2e-6 && c3_free < 0.0;
    return Outcome{ok, fmt("chi3_im = %.3g m^2/V^2 (ensemble), %.3g (v = 0)", c3, c3_free)};
  });

  criterion(9, "density cooperativity", 300.0, [] {
    std::vector<double> weak, strong;
    for (int k = 1; k <= 8; ++k) {
      const double n = kN0 * k / 8.0;
      weak.push_back(ensemble_chi_per_atom(0.3, n));
      strong.push_back(ensemble_chi_per_atom(1.5, n));
    }
    double lo = 1e300, hi = 0.0;
    for (double v : weak) lo = std::min(lo, v), hi = std::max(hi, v);
    bool increasing = true;
    for (std::size_t i = 1; i < strong.size(); ++i) increasing = increasing && strong[i] > strong[i - 1];
    const double spread = (hi - lo) / lo;
    return Outcome{spread < 0.10 && increasing,
                   fmt("0.3 MHz spread %.2f%%, 1.5 MHz chi_I/N from %.4g to %.4g m^3", 100.0 * spread, strong.front(),
                       strong.back()) +
                       (increasing ? " (strictly increasing)" : " (NOT increasing)")};
  });

  std::vector<double> ion_grid;
  for (int i = 0; i <= 70; ++i) ion_grid.push_back(-10.0 + 0.2 * i);
  auto ion_run = [&](double fraction) {
    const auto atom = AtomParams::rubidium(58e-6);
    IonMonteCarloSettings mc;
    mc.atom_count = 10000;
    mc.realizations = 32;
    mc.seed = 1;
    mc.ion_fraction = fraction;
    LaserParams l = lasers_48s(0.3);
    return run_ion_montecarlo(l, atom, RydbergState::s48(), cloud_at(kN0, atom), ion_grid, mc, {});
  };
  IonMonteCarloResult five_percent;
  criterion(10, "ion Monte Carlo shift", 120.0, [&] {
    const auto r0 = ion_run(0.0), r2 = ion_run(0.02);
    five_percent = ion_run(0.05);
    const double s0 = std::abs(r0.peak.position), s2 = std::abs(r2.peak.position),
                 s5 = std::abs(five_percent.peak.position);
    const bool ok = s5 > 1.0 && s0 < s2 && s2 < s5 && s0 < 0.15;
    return Outcome{ok, fmt("|shift| at 0/2/5%% ions = %.3f / %.3f / %.3f MHz", s0, s2, s5)};
  });
  criterion(10, "ion Monte Carlo reproducibility", 0.0, [&] {
    const auto again = ion_run(0.05);
    bool same = again.spectrum.rows.size() == five_percent.spectrum.rows.size();
    for (std::size_t j = 0; same && j < again.spectrum.rows.size(); ++j) {
      same = cli::format_double(again.spectrum.rows[j].chi_imag) ==
                 cli::format_double(five_percent.spectrum.rows[j].chi_imag) &&
             cli::format_double(again.spectrum.rows[j].chi_real) ==
                 cli::format_double(five_percent.spectrum.rows[j].chi_real);
    }
    return Outcome{same, same ? "rerun with seed 1 is byte-identical" : "rerun differs"};
  });

  criterion(11, "solver hygiene", 0.0, [&] {
    const auto a = solve_audit();
    const bool tolerances = numerics.trace_tol <= 1e-10 && numerics.hermiticity_tol <= 1e-10 &&
                            numerics.min_eigenvalue >= -1e-9 && numerics.residual_tol <= 1e-9;
    const bool ok = tolerances && a.solves > 0 && a.trace_error <= 1e-10 && a.hermiticity <= 1e-10 &&
                    a.min_eigenvalue >= -1e-9 && a.residual <= 1e-9;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "%llu steady states: worst trace error %.2g, Hermiticity %.2g, min eigenvalue %.2g, residual %.2g",
                  static_cast<unsigned long long>(a.solves), a.trace_error, a.hermiticity, a.min_eigenvalue,
                  a.residual);
    return Outcome{ok, buf};
  });

  std::printf("%d failure(s)\n", failures);
  return failures == 0 ? 0 : 1;
}
