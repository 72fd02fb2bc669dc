#pragma once

#include <array>
#include <string_view>
#include <vector>

#include "rydeit/lindblad.hpp"

namespace rydeit {

/// Single-atom levels of the ladder g -> e -> r.
enum Level : int { kGround = 0, kExcited = 1, kRydberg = 2 };

/// Laser parameters, all as ordinary frequencies in MHz.
struct LaserParams {
  double omega_p = 0.0;    // probe Rabi frequency
  double omega_c = 0.0;    // coupling Rabi frequency
  double delta_p = 0.0;    // probe detuning
  double delta_c = 0.0;    // coupling detuning
  double gamma_p = 0.0;    // probe laser linewidth (g-e dephasing)
  double gamma_rel = 0.0;  // relative probe/coupling linewidth (g-r dephasing)
  double phase = 0.0;      // relative probe/coupling phase phi_r (rad)

  void validate() const;
};

struct AtomParams {
  double gamma_e = 6.07;         // MHz, Rb 5P3/2
  double gamma_r = 0.0;          // MHz
  double dipole = 0.0;           // C m
  double lambda_p = 780.241e-9;  // m

  /// Rb D2 line with the dipole fixed by the resonant cross-section 3 lambda^2 / 2pi.
  static AtomParams rubidium(double rydberg_lifetime_s);
  double wavevector() const;
  void validate() const;
};

/// Dipole moment for which a weak-probe two-level absorber has k chi_I / N = 3 lambda^2 / 2pi.
double cross_section_dipole(double gamma_e_mhz, double lambda_p);

/// Resonant two-level absorption cross-section 3 lambda^2 / 2pi (m^2).
double resonant_cross_section(double lambda_p);

/// Pair basis in the order {gg, ge, eg, gr, rg, ee, er, re, rr}.
enum class PairState : int { gg, ge, eg, gr, rg, ee, er, re, rr };

/// Index of a pair state in the tensor-product ordering |a>_1 |b>_2 -> 3a + b.
int tensor_index(PairState s);
int tensor_index(Level atom1, Level atom2);
std::string_view label(PairState s);

class StateVector {
 public:
  /// Amplitudes in PairState order; normalized on construction.
  explicit StateVector(const std::array<cplx, 9>& amplitudes);

  cplx operator[](PairState s) const { return amplitudes_[static_cast<int>(s)]; }
  /// Amplitudes in the tensor-product ordering used by the operators.
  Eigen::VectorXcd tensor_amplitudes() const;
  double norm() const;

 private:
  std::array<cplx, 9> amplitudes_;
};

struct Susceptibility {
  cplx value{0.0, 0.0};
  double chi_i() const { return value.imag(); }
  double chi_r() const { return value.real(); }
};

/// Rotating-frame H/h: -dp|e><e| - (dp + dc - shift)|r><r| + probe and coupling terms.
/// `rydberg_shift` displaces the Rydberg level (MHz).
Operator single_atom_hamiltonian(const LaserParams& lasers, double rydberg_shift = 0.0);

/// H1 (x) 1 + 1 (x) H1 + v |rr><rr|, v in MHz.
Operator pair_hamiltonian(const LaserParams& lasers, double v);

/// Pair Hamiltonian with |rr> deleted, i.e. the infinite-interaction limit (8x8, PairState order without rr).
Operator blockade_subspace_hamiltonian(const LaserParams& lasers);

/// Decay e->g, r->g and laser dephasing for one atom.
std::vector<LindbladTerm> single_atom_decoherence(const AtomParams& atom, const LaserParams& lasers);

/// The single-atom channels lifted onto both atoms (8 terms).
std::vector<LindbladTerm> decoherence_terms(const AtomParams& atom, const LaserParams& lasers);

/// Exchange operator |ab> -> |ba>.
Operator swap_operator();

/// Two-atom dark state, amplitudes cos^2 (gg), -sin cos e^{-i phi} (gr, rg), sin^2 e^{-2i phi} (rr).
StateVector dark_state(double theta, double phi);

/// Zero-energy eigenstate of the blockaded pair, with |ee> replacing |rr>.
StateVector blockaded_state(double theta, double phi);

/// 2 N d^2 / (eps0 hbar Omega_p): converts the reduced coherence into chi.
double susceptibility_prefactor(const AtomParams& atom, double omega_p_mhz, double density_m3);

/// Probe coherence with the sign fixed so that absorption is Im > 0.
cplx probe_coherence(const DensityMatrix& single_atom_rho);

struct PairSolution {
  SteadyState pair;
  DensityMatrix atom1;
  DensityMatrix atom2;
};

PairSolution solve_pair(const LaserParams& lasers, const AtomParams& atom, double v,
                        const NumericalSettings& settings = {});

Susceptibility pair_susceptibility(const LaserParams& lasers, const AtomParams& atom, double v,
                                   double density_m3, const NumericalSettings& settings = {});

/// Non-interacting three-level atom (no pair space).
Susceptibility single_atom_susceptibility(const LaserParams& lasers, const AtomParams& atom,
                                          double density_m3, const NumericalSettings& settings = {});

/// Three-level solver with the Liouvillian split into fixed, detuning and Rydberg-shift parts,
/// for sweeping many atoms with individually displaced two-photon resonances.
class SingleAtomSolver {
 public:
  /// `lasers.delta_p` is ignored; the probe detuning is supplied per solve.
  SingleAtomSolver(const LaserParams& lasers, const AtomParams& atom, NumericalSettings settings = {});

  /// Steady state at probe detuning `delta_p` with the Rydberg level displaced by `rydberg_shift`.
  SteadyState solve(double delta_p, double rydberg_shift) const;
  Susceptibility susceptibility(double delta_p, double rydberg_shift, double density_m3) const;

  const LaserParams& lasers() const { return lasers_; }
  const AtomParams& atom() const { return atom_; }

 private:
  using Liouvillian = Eigen::Matrix<cplx, 9, 9>;
  LaserParams lasers_;
  AtomParams atom_;
  NumericalSettings settings_;
  Liouvillian fixed_;
  Liouvillian per_detuning_;
  Liouvillian per_shift_;
};

}  // namespace rydeit
