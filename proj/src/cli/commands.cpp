#include "rydeit/cli/commands.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <omp.h>

#include "rydeit/spectra_fit.hpp"
#include "rydeit/units.hpp"

namespace rydeit::cli {

using nlohmann::json;
namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

using Clock = std::chrono::steady_clock;

class Stopwatch {
 public:
  void lap(const std::string& stage) {
    const auto now = Clock::now();
    timings_[stage] = std::chrono::duration<double>(now - last_).count();
    last_ = now;
  }
  const json& timings() const { return timings_; }

 private:
  Clock::time_point last_ = Clock::now();
  json timings_ = json::object();
};

class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::vector<std::string>& header) : out_(path, std::ios::binary) {
    if (!out_) throw ConfigError("cannot write '" + path.string() + "'");
    row_strings(header);
  }
  void row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(format_double(v));
    row_strings(cells);
  }

 private:
  void row_strings(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }
  std::ofstream out_;
};

fs::path prepare_out_dir(const RunConfig& c) {
  fs::path dir(c.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + c.out_dir + "': " + ec.message());
  return dir;
}

void write_json(const fs::path& path, const json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << doc.dump(2) << '\n';
}

void write_spectrum(const fs::path& path, const Spectrum& s) {
  CsvWriter w(path, {std::string(column_name(s.variable)), "chi_real", "chi_imag", "transmission", "absorbed_fraction"});
  for (const auto& r : s.rows) w.row({r.x, r.chi_real, r.chi_imag, r.transmission, r.absorbed_fraction()});
}

// Parameters the physics leaves unstated and the tool supplies itself.
json assumed_values(const RunConfig& c) {
  json a = json::object();
  a["gamma_e_mhz"] = {{"value", c.atom.gamma_e}, {"note", "Rb 5P3/2 natural linewidth"}};
  if (c.dipole_from_cross_section) {
    a["dipole_cm"] = {{"value", c.atom.dipole}, {"note", "fixed by the resonant cross-section 3 lambda^2 / 2pi"}};
  }
  if (c.rydberg_label != "custom") {
    a["c6_mhz_um6"] = {{"value", c.rydberg.c6}, {"note", "back-derived from the blockade radius"}};
  }
  a["interaction_sign"] = {{"value", "repulsive"}, {"note", "V = +C6 / R^6"}};
  a["linewidth_model"] = {{"value", "dephasing projectors"}, {"note", "|e><e| at 2 gamma_p, |r><r| at 2 gamma_rel"}};
  a["r_min_um"] = {{"value", c.quadrature.r_min}, {"note", "lower quadrature cutoff"}};
  a["quadrature_intervals"] = {{"value", c.quadrature.intervals}, {"note", "log-spaced trapezoid"}};
  a["cloud_geometry"] = {{"value", "sphere"}, {"note", "ion Monte Carlo sample shape"}};
  a["analysis_fraction"] = {{"value", c.analysis_fraction}, {"note", "ion Monte Carlo analysis radius / sample radius"}};
  a["ion_fraction_meaning"] = {{"value", "fraction of atoms"}, {"note", "ion Monte Carlo"}};
  return a;
}

void write_metadata(const fs::path& dir, const std::string& command, const RunConfig& c,
                    const std::vector<std::string>& files, const Stopwatch& sw) {
  json meta;
  meta["tool"] = "sim";
  meta["version"] = kToolVersion;
  meta["command"] = command;
  meta["seed"] = c.seed;
  meta["config"] = c.resolved;
  meta["assumed"] = assumed_values(c);
  meta["outputs"] = files;
  meta["timings_s"] = sw.timings();
  write_json(dir / (command + "_metadata.json"), meta);
}

std::string density_tag(const RunConfig& c, double density_m3) {
  return c.densities.size() > 1 ? "_n" + format_double(units::per_m3_to_per_cm3(density_m3)) : "";
}

std::string describe(const std::exception& e, const std::string& context) { return context + ": " + e.what(); }

}  // namespace

CommandResult cmd_spectrum(const RunConfig& c) {
  const auto dir = prepare_out_dir(c);
  Stopwatch sw;
  CommandResult result;
  for (double op : c.omega_p) {
    const LaserParams lasers = c.lasers(op);
    for (double density : c.densities) {
      const CloudParams cloud = c.cloud(density);
      const std::string base = "spectrum_" + to_string(c.model) + "_op" + format_double(op) + density_tag(c, density);
      std::vector<std::pair<std::string, ModelSelector>> variants;
      switch (c.model) {
        case ModelKind::single:
          variants.emplace_back(base, SingleModel{});
          break;
        case ModelKind::pair:
          for (double v : c.interactions) variants.emplace_back(base + "_v" + format_double(v), PairModel{v});
          break;
        case ModelKind::ensemble:
          variants.emplace_back(base, EnsembleModel{c.rydberg, c.quadrature});
          break;
        case ModelKind::ion_mc:
          for (double f : c.ion_fractions) {
            IonMonteCarloSettings mc;
            mc.atom_count = c.atom_count;
            mc.ion_fraction = f;
            mc.realizations = c.realizations;
            mc.seed = c.seed;
            mc.analysis_fraction = c.analysis_fraction;
            variants.emplace_back(base + "_f" + format_double(f), IonModel{c.rydberg, mc});
          }
          break;
      }
      for (const auto& [name, model] : variants) {
        Spectrum s;
        try {
          s = sweep_spectrum(model, lasers, c.atom, cloud, c.delta_grid, c.numerics);
        } catch (const NumericalError& e) {
          throw NumericalError(describe(e, name));
        }
        write_spectrum(dir / (name + ".csv"), s);
        result.files.push_back(name + ".csv");
        sw.lap(name);
      }
    }
  }
  write_metadata(dir, "spectrum", c, result.files, sw);
  result.summary = {{"command", "spectrum"}, {"outputs", result.files}};
  return result;
}

CommandResult cmd_nonlinearity(const RunConfig& c) {
  if (c.model == ModelKind::ion_mc) throw ConfigError("config /model/kind: nonlinearity supports single, pair or ensemble");
  const auto dir = prepare_out_dir(c);
  Stopwatch sw;
  CommandResult result;

  std::vector<std::pair<std::string, double>> variants;
  if (c.model == ModelKind::pair) {
    for (double v : c.interactions) variants.emplace_back("_v" + format_double(v), v);
  } else {
    variants.emplace_back("", 0.0);
  }

  json fits = json::array();
  for (const auto& [suffix, v] : variants) {
    const std::string name = "nonlinearity" + suffix + ".csv";
    CsvWriter w(dir / name, {"density_cm3", "omega_p_mhz", "field_v_per_m", "chi_real", "chi_imag",
                             "chi_imag_per_density_m3", "transmission"});
    for (double density : c.densities) {
      const CloudParams cloud = c.cloud(density);
      std::vector<Chi3Point> points;
      for (double op : c.omega_p) {
        const LaserParams lasers = c.lasers(op);
        Susceptibility chi;
        try {
          switch (c.model) {
            case ModelKind::single:
              chi = single_atom_susceptibility(lasers, c.atom, density, c.numerics);
              break;
            case ModelKind::pair:
              chi = pair_susceptibility(lasers, c.atom, v, density, c.numerics);
              break;
            default:
              chi = ensemble_susceptibility(lasers, c.atom, c.rydberg, cloud, c.quadrature, c.numerics).chi;
              break;
          }
        } catch (const NumericalError& e) {
          std::ostringstream ctx;
          ctx << "nonlinearity at density " << units::per_m3_to_per_cm3(density) << " cm^-3, omega_p " << op << " MHz";
          throw NumericalError(describe(e, ctx.str()));
        }
        const double field = rabi_to_field(units::mhz_to_angular(op), c.atom.dipole);
        points.push_back({field, chi.chi_i()});
        w.row({units::per_m3_to_per_cm3(density), op, field, chi.chi_r(), chi.chi_i(), chi.chi_i() / density,
               transmission(chi.chi_i(), cloud)});
      }
      if (c.fit_chi3) {
        const double cutoff = rabi_to_field(units::mhz_to_angular(c.chi3_cutoff), c.atom.dipole);
        const auto fit = fit_chi3(points, cutoff, c.degenerate_kerr_factor);
        json entry = {{"density_cm3", units::per_m3_to_per_cm3(density)},
                      {"chi1_im", fit.chi1_im},
                      {"chi3_im_m2_per_v2", fit.chi3_im},
                      {"cutoff_field_v_per_m", fit.cutoff_field},
                      {"cutoff_omega_p_mhz", c.chi3_cutoff},
                      {"residual_rms", fit.residual},
                      {"points", fit.points},
                      {"degenerate_kerr_factor", c.degenerate_kerr_factor}};
        if (c.model == ModelKind::pair) entry["interaction_mhz"] = v;
        fits.push_back(entry);
      }
      sw.lap(name + " density " + format_double(units::per_m3_to_per_cm3(density)));
    }
    result.files.push_back(name);
  }
  if (c.fit_chi3) {
    write_json(dir / "nonlinearity_chi3.json", fits);
    result.files.push_back("nonlinearity_chi3.json");
  }
  write_metadata(dir, "nonlinearity", c, result.files, sw);
  result.summary = {{"command", "nonlinearity"}, {"outputs", result.files}, {"chi3_fits", fits}};
  return result;
}

CommandResult cmd_ionmc(const RunConfig& c) {
  if (c.ion_fractions.empty()) throw ConfigError("config /montecarlo/ion_fractions: at least one fraction is required");
  const auto dir = prepare_out_dir(c);
  Stopwatch sw;
  CommandResult result;
  json entries = json::array();
  for (double op : c.omega_p) {
    const LaserParams lasers = c.lasers(op);
    for (double density : c.densities) {
      const CloudParams cloud = c.cloud(density);
      const std::string base = "ionmc_op" + format_double(op) + density_tag(c, density);
      bool reference_written = false;
      for (double f : c.ion_fractions) {
        IonMonteCarloSettings mc;
        mc.atom_count = c.atom_count;
        mc.ion_fraction = f;
        mc.realizations = c.realizations;
        mc.seed = c.seed;
        mc.analysis_fraction = c.analysis_fraction;
        IonMonteCarloResult r;
        try {
          r = run_ion_montecarlo(lasers, c.atom, c.rydberg, cloud, c.delta_grid, mc, c.numerics);
        } catch (const NumericalError& e) {
          throw NumericalError(describe(e, base + " ion fraction " + format_double(f)));
        }
        if (!reference_written) {
          write_spectrum(dir / (base + "_reference.csv"), r.reference);
          result.files.push_back(base + "_reference.csv");
          reference_written = true;
        }
        const std::string name = base + "_f" + format_double(f) + ".csv";
        write_spectrum(dir / name, r.spectrum);
        result.files.push_back(name);
        entries.push_back({{"omega_p_mhz", op},
                           {"density_cm3", units::per_m3_to_per_cm3(density)},
                           {"ion_fraction", f},
                           {"peak_shift_mhz", r.peak.position},
                           {"peak_relative_height", r.peak.relative_height},
                           {"realizations", c.realizations},
                           {"realization_peak_mean_mhz", r.peak_mean},
                           {"realization_peak_stddev_mhz", r.peak_stddev},
                           {"realization_peaks_mhz", r.realization_peaks},
                           {"analysed_atoms", r.analysed_atoms},
                           {"excluded_atoms", r.excluded_atoms},
                           {"spectrum", name}});
        sw.lap(name);
      }
    }
  }
  write_json(dir / "ionmc_summary.json", entries);
  result.files.push_back("ionmc_summary.json");
  write_metadata(dir, "ionmc", c, result.files, sw);
  result.summary = {{"command", "ionmc"}, {"outputs", result.files}, {"peaks", entries}};
  return result;
}

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

struct TransmissionTable {
  std::vector<double> delta, transmission, sigma;
};

TransmissionTable read_transmission_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open input CSV '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("input CSV '" + path + "' is empty");
  const auto header = split_csv_line(line);
  int col_delta = -1, col_t = -1, col_sigma = -1;
  for (int i = 0; i < static_cast<int>(header.size()); ++i) {
    if (header[i] == "delta_mhz" || header[i] == "delta_p_mhz") col_delta = i;
    else if (header[i] == "transmission") col_t = i;
    else if (header[i] == "sigma") col_sigma = i;
  }
  if (col_delta < 0 || col_t < 0) {
    throw ConfigError("input CSV '" + path + "': header needs delta_mhz (or delta_p_mhz) and transmission columns");
  }
  TransmissionTable t;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw ConfigError("input CSV '" + path + "' line " + std::to_string(line_no) + ": expected " +
                        std::to_string(header.size()) + " cells");
    }
    auto number = [&](int col) {
      double v = 0.0;
      const auto& s = cells[static_cast<std::size_t>(col)];
      const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
      if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw ConfigError("input CSV '" + path + "' line " + std::to_string(line_no) + ": '" + s + "' is not a number");
      }
      return v;
    };
    t.delta.push_back(number(col_delta));
    t.transmission.push_back(number(col_t));
    if (col_sigma >= 0) t.sigma.push_back(number(col_sigma));
  }
  return t;
}

}  // namespace

CommandResult cmd_fit(const RunConfig& c, const std::string& input_csv) {
  Stopwatch sw;
  const auto table = read_transmission_csv(input_csv);
  if (table.delta.size() < 4) throw ConfigError("input CSV '" + input_csv + "': at least 4 data rows are required");
  sw.lap("read");

  DensityFitSettings settings;
  settings.gamma_e = c.atom.gamma_e;
  settings.lambda_p = c.atom.lambda_p;
  settings.path_length = c.path_length;
  const auto fit = fit_density(table.delta, table.transmission, table.sigma, settings);
  sw.lap("fit");

  const auto dir = prepare_out_dir(c);
  json report = {{"input", fs::path(input_csv).filename().string()},
                 {"points", table.delta.size()},
                 {"weighted", !table.sigma.empty()},
                 {"density_m3", fit.density},
                 {"density_cm3", units::per_m3_to_per_cm3(fit.density)},
                 {"density_sigma_cm3", units::per_m3_to_per_cm3(fit.density_sigma)},
                 {"center_mhz", fit.center},
                 {"center_sigma_mhz", fit.center_sigma},
                 {"rms_residual", fit.rms_residual},
                 {"iterations", fit.iterations},
                 {"residuals", fit.residuals}};
  write_json(dir / "fit_report.json", report);
  CommandResult result;
  result.files = {"fit_report.json"};
  write_metadata(dir, "fit", c, result.files, sw);
  result.summary = report;
  result.summary.erase("residuals");
  return result;
}

int run(int argc, const char* const* argv) {
  CLI::App app{"Rydberg-EIT pair-model simulator", "sim"};
  app.require_subcommand(1);

  Overrides overrides;
  std::string config_path, preset, out_dir, input;
  std::uint64_t seed = 0;
  int jobs = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run configuration");
    sub->add_option("--preset", preset, "built-in preset: fig2, fig3a, fig4, fig5");
    sub->add_option("--out", out_dir, "output directory")->envname("SIM_OUT_DIR");
    sub->add_option("--seed", seed, "Monte Carlo master seed");
    sub->add_option("--jobs", jobs, "maximum worker threads")->envname("SIM_JOBS")->check(CLI::PositiveNumber);
  };
  auto* spectrum = app.add_subcommand("spectrum", "probe spectra for each Omega_p and model variant");
  auto* nonlinearity = app.add_subcommand("nonlinearity", "chi_I versus probe Rabi frequency and density");
  auto* ionmc = app.add_subcommand("ionmc", "ion Stark-shift Monte Carlo spectra");
  auto* fit = app.add_subcommand("fit", "fit the ground-state density to a coupling-off transmission CSV");
  for (auto* sub : {spectrum, nonlinearity, ionmc, fit}) add_common(sub);
  fit->add_option("--input", input, "CSV with delta_mhz and transmission columns")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    auto* sub = app.get_subcommands().front();
    if (sub->count("--config")) overrides.config_path = config_path;
    if (sub->count("--preset")) overrides.preset = preset;
    if (!out_dir.empty()) overrides.out_dir = out_dir;
    if (sub->count("--seed")) overrides.seed = seed;
    if (jobs > 0) omp_set_num_threads(jobs);

    const RunConfig config = resolve_config(overrides);
    CommandResult result;
    if (sub == spectrum) result = cmd_spectrum(config);
    else if (sub == nonlinearity) result = cmd_nonlinearity(config);
    else if (sub == ionmc) result = cmd_ionmc(config);
    else result = cmd_fit(config, input);
    std::cout << result.summary.dump(2) << '\n';
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace rydeit::cli
