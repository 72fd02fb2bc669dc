#include "rydeit/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "rydeit/units.hpp"

namespace rydeit::cli {

using nlohmann::json;

namespace {

// Leaf type tags used by the schema below.
const json& schema() {
  static const json s = {
      {"rydberg", {{"state", "string"}, {"n", "integer"}, {"c6", "number"}, {"lifetime_s", "number"}, {"alpha0", "number"}}},
      {"lasers",
       {{"omega_p_mhz", "grid"},
        {"omega_c_mhz", "number"},
        {"delta_c_mhz", "number"},
        {"probe_detuning_mhz", "number"},
        {"delta_p_mhz", "grid"},
        {"probe_linewidth_mhz", "number"},
        {"relative_linewidth_mhz", "number"}}},
      {"atom", {{"gamma_e_mhz", "number"}, {"lambda_p_m", "number"}, {"dipole_cm", "number|null"}}},
      {"cloud", {{"densities_cm3", "number[]"}, {"path_length_m", "number"}}},
      {"model", {{"kind", "string"}, {"interactions_mhz", "number[]"}}},
      {"montecarlo",
       {{"atom_count", "integer"},
        {"ion_fractions", "number[]"},
        {"realizations", "integer"},
        {"seed", "integer"},
        {"analysis_fraction", "number"}}},
      {"numerics",
       {{"quadrature_intervals", "integer"},
        {"r_min_um", "number"},
        {"tail_mass", "number"},
        {"quadrature_tolerance", "number"},
        {"hermiticity_tol", "number"},
        {"trace_tol", "number"},
        {"min_eigenvalue", "number"},
        {"residual_tol", "number"},
        {"min_rcond", "number"}}},
      {"fit", {{"chi3", "boolean"}, {"chi3_cutoff_mhz", "number"}, {"degenerate_kerr_factor", "boolean"}}},
      {"output", {{"dir", "string"}, {"format", "string"}}},
  };
  return s;
}

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError("config " + (where.empty() ? std::string("/") : where) + ": " + what);
}

bool is_number_array(const json& v) {
  if (!v.is_array()) return false;
  for (const auto& x : v) {
    if (!x.is_number()) return false;
  }
  return true;
}

void check_leaf(const json& value, const std::string& type, const std::string& where) {
  bool ok = false;
  if (type == "string") ok = value.is_string();
  else if (type == "integer") ok = value.is_number_integer();
  else if (type == "number") ok = value.is_number();
  else if (type == "number|null") ok = value.is_number() || value.is_null();
  else if (type == "boolean") ok = value.is_boolean();
  else if (type == "number[]") ok = is_number_array(value);
  else if (type == "grid") {
    if (value.is_object()) {
      for (const auto& [k, v] : value.items()) {
        if (k != "start" && k != "stop" && k != "step") fail(where + "/" + k, "unknown key");
        if (!v.is_number()) fail(where + "/" + k, "expected number");
      }
      for (const char* k : {"start", "stop", "step"}) {
        if (!value.contains(k)) fail(where, std::string("grid object needs '") + k + "'");
      }
      ok = true;
    } else {
      ok = is_number_array(value);
    }
  }
  if (!ok) fail(where, "expected " + type);
}

void validate_against(const json& doc, const json& sch, const std::string& where) {
  if (!doc.is_object()) fail(where, "expected an object");
  for (const auto& [key, value] : doc.items()) {
    const std::string path = where + "/" + key;
    if (!sch.contains(key)) fail(path, "unknown key");
    const auto& sub = sch.at(key);
    if (sub.is_object()) validate_against(value, sub, path);
    else check_leaf(value, sub.get<std::string>(), path);
  }
}

std::vector<double> expand_grid(const json& g, const std::string& where) {
  std::vector<double> out;
  if (g.is_array()) {
    out = g.get<std::vector<double>>();
  } else {
    const double start = g.at("start"), stop = g.at("stop"), step = g.at("step");
    if (!(step > 0.0)) fail(where + "/step", "must be > 0");
    if (stop >= start) {
      const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
      // Snap to 1e-12 so 0.1 + 2 * 0.1 prints as 0.3 in file names and CSVs.
      for (std::size_t i = 0; i < n; ++i) {
        const double v = start + step * static_cast<double>(i);
        out.push_back(std::abs(v) < 1e3 ? std::round(v * 1e12) / 1e12 : v);
      }
    }
  }
  if (out.empty()) fail(where, "grid is empty");
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (!(out[i] > out[i - 1])) fail(where, "grid must be strictly increasing");
  }
  return out;
}

double positive(const json& doc, const char* block, const char* key) {
  const double v = doc.at(block).at(key);
  if (!(v > 0.0)) fail(std::string("/") + block + "/" + key, "must be > 0");
  return v;
}

double non_negative(const json& doc, const char* block, const char* key) {
  const double v = doc.at(block).at(key);
  if (!(v >= 0.0)) fail(std::string("/") + block + "/" + key, "must be >= 0");
  return v;
}

}  // namespace

std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::single:
      return "single";
    case ModelKind::pair:
      return "pair";
    case ModelKind::ensemble:
      return "ensemble";
    case ModelKind::ion_mc:
      return "ion-mc";
  }
  return "unknown";
}

LaserParams RunConfig::lasers(double omega_p_mhz) const {
  LaserParams l;
  l.omega_p = omega_p_mhz;
  l.omega_c = omega_c;
  l.delta_p = probe_detuning;
  l.delta_c = delta_c;
  l.gamma_p = probe_linewidth;
  l.gamma_rel = relative_linewidth;
  return l;
}

CloudParams RunConfig::cloud(double density_m3) const { return {density_m3, path_length, atom.wavevector()}; }

json default_document() {
  return {
      {"rydberg", {{"state", "48S"}}},
      {"lasers",
       {{"omega_p_mhz", json::array({0.3, 1.0})},
        {"omega_c_mhz", 2.0},
        {"delta_c_mhz", 0.0},
        {"probe_detuning_mhz", 0.0},
        {"delta_p_mhz", {{"start", -20.0}, {"stop", 20.0}, {"step", 0.1}}},
        {"probe_linewidth_mhz", 0.3},
        {"relative_linewidth_mhz", 0.15}}},
      {"atom", {{"gamma_e_mhz", 6.07}, {"lambda_p_m", 780.241e-9}, {"dipole_cm", nullptr}}},
      {"cloud", {{"densities_cm3", json::array({2.2e10})}, {"path_length_m", 0.52e-3}}},
      {"model", {{"kind", "pair"}, {"interactions_mhz", json::array({0.0, 10.0})}}},
      {"montecarlo",
       {{"atom_count", 10000},
        {"ion_fractions", json::array({0.0, 0.02, 0.05})},
        {"realizations", 32},
        {"seed", 1},
        {"analysis_fraction", 0.5}}},
      {"numerics",
       {{"quadrature_intervals", 200},
        {"r_min_um", 0.5},
        {"tail_mass", 1e-6},
        {"quadrature_tolerance", 0.005},
        {"hermiticity_tol", 1e-10},
        {"trace_tol", 1e-10},
        {"min_eigenvalue", -1e-9},
        {"residual_tol", 1e-9},
        {"min_rcond", 1e-15}}},
      {"fit", {{"chi3", false}, {"chi3_cutoff_mhz", 0.7}, {"degenerate_kerr_factor", false}}},
      {"output", {{"dir", "out"}, {"format", "csv"}}},
  };
}

std::vector<std::string> preset_names() { return {"fig2", "fig3a", "fig4", "fig5"}; }

json preset_document(const std::string& name) {
  if (name == "fig2") {
    // 48S, Omega_c/2pi = 2 MHz, 300 kHz / 150 kHz linewidths; V/2pi = 0 and 10 MHz.
    return {{"rydberg", {{"state", "48S"}}},
            {"lasers", {{"omega_p_mhz", json::array({0.3, 1.0})}, {"omega_c_mhz", 2.0}}},
            {"model", {{"kind", "pair"}, {"interactions_mhz", json::array({0.0, 10.0})}}}};
  }
  if (name == "fig3a") {
    return {{"rydberg", {{"state", "48S"}}},
            {"lasers",
             {{"omega_p_mhz", json::array({0.3})},
              {"omega_c_mhz", 2.0},
              {"delta_p_mhz", {{"start", -10.0}, {"stop", 4.0}, {"step", 0.2}}}}},
            {"model", {{"kind", "ion-mc"}}},
            {"montecarlo", {{"atom_count", 10000}, {"ion_fractions", json::array({0.0, 0.02, 0.05})}, {"realizations", 32}}}};
  }
  if (name == "fig4") {
    return {{"rydberg", {{"state", "42S"}}},
            {"lasers", {{"omega_p_mhz", {{"start", 0.1}, {"stop", 1.5}, {"step", 0.1}}}, {"omega_c_mhz", 2.5}}},
            {"cloud", {{"densities_cm3", json::array({2.2e10})}}},
            {"model", {{"kind", "ensemble"}}},
            {"fit", {{"chi3", true}, {"chi3_cutoff_mhz", 0.7}}}};
  }
  if (name == "fig5") {
    json densities = json::array();
    for (int k = 1; k <= 8; ++k) densities.push_back(2.2e10 * k / 8.0);
    return {{"rydberg", {{"state", "42S"}}},
            {"lasers", {{"omega_p_mhz", json::array({0.3, 1.0, 1.5})}, {"omega_c_mhz", 2.5}}},
            {"cloud", {{"densities_cm3", densities}}},
            {"model", {{"kind", "ensemble"}}}};
  }
  throw ConfigError("unknown preset '" + name + "'");
}

void validate_document(const json& doc) { validate_against(doc, schema(), ""); }

RunConfig build_config(const json& doc) {
  validate_document(doc);
  // Every key must be present after merging onto the defaults.
  json full = default_document();
  full.merge_patch(doc);

  // merge_patch drops null members; keep the key so resolved documents compare equal
  if (!full.at("atom").contains("dipole_cm")) full["atom"]["dipole_cm"] = nullptr;

  RunConfig c;
  c.resolved = full;

  const auto& ryd = full.at("rydberg");
  c.rydberg_label = ryd.at("state");
  if (c.rydberg_label == "48S") {
    c.rydberg = RydbergState::s48();
  } else if (c.rydberg_label == "42S") {
    c.rydberg = RydbergState::s42();
  } else if (c.rydberg_label == "custom") {
    for (const char* k : {"n", "c6", "lifetime_s", "alpha0"}) {
      if (!ryd.contains(k)) fail(std::string("/rydberg/") + k, "required for a custom state");
    }
    c.rydberg = {ryd.at("n").get<int>(), positive(full, "rydberg", "c6"), positive(full, "rydberg", "lifetime_s"),
                 ryd.at("alpha0").get<double>()};
  } else {
    fail("/rydberg/state", "expected 42S, 48S or custom");
  }
  if (c.rydberg_label != "custom") {
    // Explicit fields override the named state's constants.
    if (ryd.contains("n")) c.rydberg.n = ryd.at("n");
    if (ryd.contains("c6")) c.rydberg.c6 = positive(full, "rydberg", "c6");
    if (ryd.contains("lifetime_s")) c.rydberg.lifetime = positive(full, "rydberg", "lifetime_s");
    if (ryd.contains("alpha0")) c.rydberg.alpha0 = ryd.at("alpha0");
  }

  const auto& las = full.at("lasers");
  c.omega_p = expand_grid(las.at("omega_p_mhz"), "/lasers/omega_p_mhz");
  for (double w : c.omega_p) {
    if (!(w > 0.0)) fail("/lasers/omega_p_mhz", "probe Rabi frequencies must be > 0");
  }
  c.omega_c = non_negative(full, "lasers", "omega_c_mhz");
  c.delta_c = las.at("delta_c_mhz");
  c.probe_detuning = las.at("probe_detuning_mhz");
  c.delta_grid = expand_grid(las.at("delta_p_mhz"), "/lasers/delta_p_mhz");
  c.probe_linewidth = non_negative(full, "lasers", "probe_linewidth_mhz");
  c.relative_linewidth = non_negative(full, "lasers", "relative_linewidth_mhz");

  c.atom.gamma_e = positive(full, "atom", "gamma_e_mhz");
  c.atom.lambda_p = positive(full, "atom", "lambda_p_m");
  c.atom.gamma_r = units::lifetime_to_mhz(c.rydberg.lifetime);
  const auto& atom_doc = full.at("atom");
  if (!atom_doc.contains("dipole_cm") || atom_doc.at("dipole_cm").is_null()) {
    c.atom.dipole = cross_section_dipole(c.atom.gamma_e, c.atom.lambda_p);
  } else {
    c.atom.dipole = positive(full, "atom", "dipole_cm");
    c.dipole_from_cross_section = false;
  }

  const auto& cloud = full.at("cloud");
  for (double n : cloud.at("densities_cm3").get<std::vector<double>>()) {
    if (!(n > 0.0)) fail("/cloud/densities_cm3", "densities must be > 0");
    c.densities.push_back(units::per_cm3_to_per_m3(n));
  }
  if (c.densities.empty()) fail("/cloud/densities_cm3", "at least one density is required");
  c.path_length = positive(full, "cloud", "path_length_m");

  const std::string kind = full.at("model").at("kind");
  if (kind == "single") c.model = ModelKind::single;
  else if (kind == "pair") c.model = ModelKind::pair;
  else if (kind == "ensemble") c.model = ModelKind::ensemble;
  else if (kind == "ion-mc") c.model = ModelKind::ion_mc;
  else fail("/model/kind", "expected single, pair, ensemble or ion-mc");
  c.interactions = full.at("model").at("interactions_mhz").get<std::vector<double>>();
  if (c.model == ModelKind::pair && c.interactions.empty()) fail("/model/interactions_mhz", "pair model needs interactions");

  const auto& mc = full.at("montecarlo");
  const auto atom_count = mc.at("atom_count").get<long long>();
  if (atom_count < 100) fail("/montecarlo/atom_count", "must be >= 100");
  c.atom_count = static_cast<std::size_t>(atom_count);
  c.ion_fractions = mc.at("ion_fractions").get<std::vector<double>>();
  for (double f : c.ion_fractions) {
    if (!(f >= 0.0 && f <= 1.0)) fail("/montecarlo/ion_fractions", "fractions must lie in [0, 1]");
  }
  if (c.model == ModelKind::ion_mc && c.ion_fractions.empty()) fail("/montecarlo/ion_fractions", "ion-mc needs fractions");
  c.realizations = mc.at("realizations");
  if (c.realizations < 1) fail("/montecarlo/realizations", "must be >= 1");
  const auto& seed_node = mc.at("seed");
  if (!seed_node.is_number_unsigned() && !(seed_node.is_number_integer() && seed_node.get<std::int64_t>() >= 0)) {
    fail("/montecarlo/seed", "must be >= 0");
  }
  c.seed = mc.at("seed").get<std::uint64_t>();
  c.analysis_fraction = mc.at("analysis_fraction");
  if (!(c.analysis_fraction > 0.0 && c.analysis_fraction <= 1.0)) fail("/montecarlo/analysis_fraction", "must lie in (0, 1]");

  const auto& num = full.at("numerics");
  c.quadrature.intervals = num.at("quadrature_intervals");
  if (c.quadrature.intervals < 2 || c.quadrature.intervals % 2 != 0) {
    fail("/numerics/quadrature_intervals", "must be even and >= 2");
  }
  c.quadrature.r_min = positive(full, "numerics", "r_min_um");
  c.quadrature.tail_mass = positive(full, "numerics", "tail_mass");
  if (!(c.quadrature.tail_mass < 1.0)) fail("/numerics/tail_mass", "must be < 1");
  c.quadrature.tolerance = positive(full, "numerics", "quadrature_tolerance");
  c.numerics.hermiticity_tol = positive(full, "numerics", "hermiticity_tol");
  c.numerics.trace_tol = positive(full, "numerics", "trace_tol");
  c.numerics.min_eigenvalue = num.at("min_eigenvalue");
  c.numerics.residual_tol = positive(full, "numerics", "residual_tol");
  c.numerics.min_rcond = positive(full, "numerics", "min_rcond");

  const auto& fit = full.at("fit");
  c.fit_chi3 = fit.at("chi3");
  c.chi3_cutoff = positive(full, "fit", "chi3_cutoff_mhz");
  c.degenerate_kerr_factor = fit.at("degenerate_kerr_factor");

  c.out_dir = full.at("output").at("dir");
  if (full.at("output").at("format") != "csv") fail("/output/format", "only csv is supported");
  return c;
}

RunConfig resolve_config(const Overrides& overrides) {
  if (!overrides.config_path && !overrides.preset) throw ConfigError("either --config or --preset is required");
  json doc = json::object();
  if (overrides.preset) doc = preset_document(*overrides.preset);
  if (overrides.config_path) {
    std::ifstream in(*overrides.config_path);
    if (!in) throw ConfigError("cannot open config file '" + *overrides.config_path + "'");
    json file;
    try {
      file = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError("config file '" + *overrides.config_path + "' is not valid JSON: " + e.what());
    }
    validate_document(file);
    doc.merge_patch(file);
  }
  if (overrides.out_dir) doc["output"]["dir"] = *overrides.out_dir;
  if (overrides.seed) doc["montecarlo"]["seed"] = *overrides.seed;
  return build_config(doc);
}

}  // namespace rydeit::cli
