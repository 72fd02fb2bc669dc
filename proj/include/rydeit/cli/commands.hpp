#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "rydeit/cli/config.hpp"

namespace rydeit::cli {

inline constexpr const char* kToolVersion = "0.3.0";

struct CommandResult {
  std::vector<std::string> files;  // written, relative to the output directory
  nlohmann::json summary;          // printed to stdout by the front end
};

/// One spectrum CSV per (Omega_p, model variant) plus spectrum_metadata.json.
CommandResult cmd_spectrum(const RunConfig& config);
/// chi_I versus probe Rabi frequency per density, with an optional chi3 fit.
CommandResult cmd_nonlinearity(const RunConfig& config);
/// Ion Monte Carlo spectra per ion fraction and a peak-shift summary.
CommandResult cmd_ionmc(const RunConfig& config);
/// Density fit of a coupling-off transmission CSV.
CommandResult cmd_fit(const RunConfig& config, const std::string& input_csv);

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double v);

/// Parses `sim <command> ...`; returns the process exit code (0, 2 or 3).
int run(int argc, const char* const* argv);

}  // namespace rydeit::cli
