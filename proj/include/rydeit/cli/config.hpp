#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rydeit/ensemble.hpp"
#include "rydeit/ion_mc.hpp"
#include "rydeit/lindblad.hpp"
#include "rydeit/pair_model.hpp"

namespace rydeit::cli {

/// Invalid configuration or input file; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ModelKind { single, pair, ensemble, ion_mc };

std::string to_string(ModelKind k);

struct RunConfig {
  std::string rydberg_label;  // "42S", "48S" or "custom"
  RydbergState rydberg;

  // Lasers (MHz).
  std::vector<double> omega_p;
  double omega_c = 2.0;
  double delta_c = 0.0;
  double probe_detuning = 0.0;  // used by the nonlinearity sweep
  std::vector<double> delta_grid;
  double probe_linewidth = 0.3;
  double relative_linewidth = 0.15;

  AtomParams atom;  // gamma_r is filled from the Rydberg lifetime
  bool dipole_from_cross_section = true;

  std::vector<double> densities;  // m^-3
  double path_length = kPathLength;

  ModelKind model = ModelKind::pair;
  std::vector<double> interactions;  // MHz, pair model only

  std::size_t atom_count = 10000;
  std::vector<double> ion_fractions;
  int realizations = 32;
  std::uint64_t seed = 1;
  double analysis_fraction = 0.5;

  QuadratureSettings quadrature;
  NumericalSettings numerics;

  bool fit_chi3 = false;
  double chi3_cutoff = 0.7;  // MHz of probe Rabi frequency
  bool degenerate_kerr_factor = false;

  std::string out_dir = "out";

  /// The merged document this config was built from, with CLI overrides applied.
  nlohmann::json resolved;

  LaserParams lasers(double omega_p_mhz) const;
  CloudParams cloud(double density_m3) const;
};

/// Defaults for every key; the base that presets and files are merged onto.
nlohmann::json default_document();

/// Built-in presets: fig2, fig3a, fig4, fig5.
std::vector<std::string> preset_names();
nlohmann::json preset_document(const std::string& name);

/// Rejects unknown keys and wrongly typed values, naming the JSON pointer.
void validate_document(const nlohmann::json& doc);

/// Validates `doc` and converts it to a RunConfig.
RunConfig build_config(const nlohmann::json& doc);

struct Overrides {
  std::optional<std::string> config_path;
  std::optional<std::string> preset;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
};

/// defaults <- preset <- config file <- overrides, then validated.
RunConfig resolve_config(const Overrides& overrides);

}  // namespace rydeit::cli
