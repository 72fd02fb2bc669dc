#include "rydeit/pair_model.hpp"

#include <cmath>
#include <stdexcept>

#include "rydeit/units.hpp"

namespace rydeit {

namespace {

constexpr std::array<std::string_view, 9> kPairLabels = {"gg", "ge", "eg", "gr", "rg", "ee", "er", "re", "rr"};
constexpr std::array<std::array<Level, 2>, 9> kPairLevels = {{
    {kGround, kGround},
    {kGround, kExcited},
    {kExcited, kGround},
    {kGround, kRydberg},
    {kRydberg, kGround},
    {kExcited, kExcited},
    {kExcited, kRydberg},
    {kRydberg, kExcited},
    {kRydberg, kRydberg},
}};

Operator projector(Level l) { return basis_operator(3, l, l); }

}  // namespace

void LaserParams::validate() const {
  if (!(omega_p >= 0.0) || !(omega_c >= 0.0)) throw std::invalid_argument("LaserParams: Rabi frequencies must be >= 0");
  if (!(gamma_p >= 0.0) || !(gamma_rel >= 0.0)) throw std::invalid_argument("LaserParams: linewidths must be >= 0");
  if (!std::isfinite(delta_p) || !std::isfinite(delta_c) || !std::isfinite(phase)) {
    throw std::invalid_argument("LaserParams: detunings and phase must be finite");
  }
}

AtomParams AtomParams::rubidium(double rydberg_lifetime_s) {
  AtomParams atom;
  atom.gamma_r = units::lifetime_to_mhz(rydberg_lifetime_s);
  atom.dipole = cross_section_dipole(atom.gamma_e, atom.lambda_p);
  return atom;
}

double AtomParams::wavevector() const { return 2.0 * units::pi / lambda_p; }

void AtomParams::validate() const {
  if (!(gamma_e > 0.0) || !(gamma_r > 0.0) || !(dipole > 0.0) || !(lambda_p > 0.0)) {
    throw std::invalid_argument("AtomParams: all fields must be strictly positive");
  }
}

double cross_section_dipole(double gamma_e_mhz, double lambda_p) {
  // Weak resonant probe: k chi_I / N = 2 k d^2 / (eps0 hbar Gamma_e) = 3 lambda^2 / 2pi.
  const double k = 2.0 * units::pi / lambda_p;
  const double gamma = units::mhz_to_angular(gamma_e_mhz);
  return std::sqrt(3.0 * units::pi * units::epsilon0 * units::hbar * gamma / (k * k * k));
}

double resonant_cross_section(double lambda_p) { return 3.0 * lambda_p * lambda_p / (2.0 * units::pi); }

int tensor_index(Level atom1, Level atom2) { return 3 * atom1 + atom2; }

int tensor_index(PairState s) {
  const auto& lv = kPairLevels[static_cast<int>(s)];
  return tensor_index(lv[0], lv[1]);
}

std::string_view label(PairState s) { return kPairLabels[static_cast<int>(s)]; }

StateVector::StateVector(const std::array<cplx, 9>& amplitudes) : amplitudes_(amplitudes) {
  const double n = norm();
  if (!(n > 0.0)) throw std::invalid_argument("StateVector: zero vector");
  for (auto& a : amplitudes_) a /= n;
}

double StateVector::norm() const {
  double s = 0.0;
  for (const auto& a : amplitudes_) s += std::norm(a);
  return std::sqrt(s);
}

Eigen::VectorXcd StateVector::tensor_amplitudes() const {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(9);
  for (int i = 0; i < 9; ++i) v(tensor_index(static_cast<PairState>(i))) = amplitudes_[i];
  return v;
}

Operator single_atom_hamiltonian(const LaserParams& lasers, double rydberg_shift) {
  Operator h = Operator::Zero(3, 3);
  h(kExcited, kExcited) = -lasers.delta_p;
  h(kRydberg, kRydberg) = -(lasers.delta_p + lasers.delta_c) + rydberg_shift;
  h(kGround, kExcited) = h(kExcited, kGround) = 0.5 * lasers.omega_p;
  const cplx coupling = 0.5 * lasers.omega_c * std::polar(1.0, lasers.phase);
  h(kExcited, kRydberg) = coupling;
  h(kRydberg, kExcited) = std::conj(coupling);
  return h;
}

Operator pair_hamiltonian(const LaserParams& lasers, double v) {
  const Operator h1 = single_atom_hamiltonian(lasers);
  const Operator id = Operator::Identity(3, 3);
  Operator h = tensor_product(h1, id) + tensor_product(id, h1);
  const int rr = tensor_index(kRydberg, kRydberg);
  h(rr, rr) += v;
  return h;
}

Operator blockade_subspace_hamiltonian(const LaserParams& lasers) {
  const Operator full = pair_hamiltonian(lasers, 0.0);
  Operator out(8, 8);
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) {
      out(i, j) = full(tensor_index(static_cast<PairState>(i)), tensor_index(static_cast<PairState>(j)));
    }
  }
  return out;
}

std::vector<LindbladTerm> single_atom_decoherence(const AtomParams& atom, const LaserParams& lasers) {
  // Dephasing projectors at twice the linewidth give the g-e (g-r) coherence an extra
  // decay of exactly gamma_p (gamma_rel).
  return {
      {basis_operator(3, kGround, kExcited), atom.gamma_e},
      {basis_operator(3, kGround, kRydberg), atom.gamma_r},
      {projector(kExcited), 2.0 * lasers.gamma_p},
      {projector(kRydberg), 2.0 * lasers.gamma_rel},
  };
}

std::vector<LindbladTerm> decoherence_terms(const AtomParams& atom, const LaserParams& lasers) {
  const Operator id = Operator::Identity(3, 3);
  std::vector<LindbladTerm> out;
  for (const auto& t : single_atom_decoherence(atom, lasers)) {
    out.push_back({tensor_product(t.op, id), t.rate});
    out.push_back({tensor_product(id, t.op), t.rate});
  }
  return out;
}

Operator swap_operator() {
  Operator s = Operator::Zero(9, 9);
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) s(3 * b + a, 3 * a + b) = 1.0;
  }
  return s;
}

StateVector dark_state(double theta, double phi) {
  const double c = std::cos(theta), s = std::sin(theta);
  const cplx mixed = -s * c * std::polar(1.0, -phi);
  std::array<cplx, 9> a{};
  a[static_cast<int>(PairState::gg)] = c * c;
  a[static_cast<int>(PairState::gr)] = mixed;
  a[static_cast<int>(PairState::rg)] = mixed;
  // product of single-atom dark states, so |rr> carries the phase twice
  a[static_cast<int>(PairState::rr)] = s * s * std::polar(1.0, -2.0 * phi);
  return StateVector(a);
}

StateVector blockaded_state(double theta, double phi) {
  const double c = std::cos(theta), s = std::sin(theta);
  const cplx mixed = -s * c * std::polar(1.0, -phi);
  std::array<cplx, 9> a{};
  a[static_cast<int>(PairState::gg)] = c * c - s * s;
  a[static_cast<int>(PairState::gr)] = mixed;
  a[static_cast<int>(PairState::rg)] = mixed;
  a[static_cast<int>(PairState::ee)] = s * s;
  return StateVector(a);  // normalizes by sqrt(cos^4 + 2 sin^4)
}

double susceptibility_prefactor(const AtomParams& atom, double omega_p_mhz, double density_m3) {
  return 2.0 * density_m3 * atom.dipole * atom.dipole /
         (units::epsilon0 * units::hbar * units::mhz_to_angular(omega_p_mhz));
}

cplx probe_coherence(const DensityMatrix& rho) { return -rho(kExcited, kGround); }

namespace {

void check_chi_inputs(const LaserParams& lasers, const AtomParams& atom, double density_m3) {
  lasers.validate();
  atom.validate();
  if (!(lasers.omega_p > 0.0)) throw std::invalid_argument("susceptibility: probe Rabi frequency must be > 0");
  if (!(density_m3 > 0.0)) throw std::invalid_argument("susceptibility: density must be > 0");
}

}  // namespace

PairSolution solve_pair(const LaserParams& lasers, const AtomParams& atom, double v,
                        const NumericalSettings& settings) {
  lasers.validate();
  atom.validate();
  const auto terms = decoherence_terms(atom, lasers);
  auto ss = steady_state(build_liouvillian(pair_hamiltonian(lasers, v), terms), settings);
  auto a1 = partial_trace(ss.rho, 0, 3, 3);
  auto a2 = partial_trace(ss.rho, 1, 3, 3);
  return {std::move(ss), std::move(a1), std::move(a2)};
}

Susceptibility pair_susceptibility(const LaserParams& lasers, const AtomParams& atom, double v,
                                   double density_m3, const NumericalSettings& settings) {
  check_chi_inputs(lasers, atom, density_m3);
  const auto sol = solve_pair(lasers, atom, v, settings);
  return {susceptibility_prefactor(atom, lasers.omega_p, density_m3) * probe_coherence(sol.atom1)};
}

Susceptibility single_atom_susceptibility(const LaserParams& lasers, const AtomParams& atom,
                                          double density_m3, const NumericalSettings& settings) {
  check_chi_inputs(lasers, atom, density_m3);
  const auto terms = single_atom_decoherence(atom, lasers);
  const auto ss = steady_state(build_liouvillian(single_atom_hamiltonian(lasers), terms), settings);
  return {susceptibility_prefactor(atom, lasers.omega_p, density_m3) * probe_coherence(ss.rho)};
}

SingleAtomSolver::SingleAtomSolver(const LaserParams& lasers, const AtomParams& atom, NumericalSettings settings)
    : lasers_(lasers), atom_(atom), settings_(settings) {
  lasers_.validate();
  atom_.validate();
  lasers_.delta_p = 0.0;
  const auto terms = single_atom_decoherence(atom_, lasers_);
  fixed_ = build_liouvillian(single_atom_hamiltonian(lasers_), terms).matrix;

  // The Liouvillian is linear in H, so the detuning and shift pieces can be split off.
  Operator h_detuning = Operator::Zero(3, 3);
  h_detuning(kExcited, kExcited) = -1.0;
  h_detuning(kRydberg, kRydberg) = -1.0;
  per_detuning_ = build_liouvillian(h_detuning, {}).matrix;
  per_shift_ = build_liouvillian(projector(kRydberg), {}).matrix;
}

SteadyState SingleAtomSolver::solve(double delta_p, double rydberg_shift) const {
  const Liouvillian l = fixed_ + delta_p * per_detuning_ + rydberg_shift * per_shift_;
  return steady_state(l, settings_);
}

Susceptibility SingleAtomSolver::susceptibility(double delta_p, double rydberg_shift, double density_m3) const {
  if (!(lasers_.omega_p > 0.0)) throw std::invalid_argument("susceptibility: probe Rabi frequency must be > 0");
  if (!(density_m3 > 0.0)) throw std::invalid_argument("susceptibility: density must be > 0");
  const auto ss = solve(delta_p, rydberg_shift);
  return {susceptibility_prefactor(atom_, lasers_.omega_p, density_m3) * probe_coherence(ss.rho)};
}

}  // namespace rydeit
