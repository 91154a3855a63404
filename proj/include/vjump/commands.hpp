#pragma once

#include "vjump/config.hpp"

#include "json.hpp"

#include <exception>
#include <filesystem>
#include <iosfwd>

namespace vjump {

struct CommandOptions {
  std::filesystem::path out_dir = ".";
  bool dump_forests = false;
  bool particles = false;
  double kappa_max = 0.0;  // 0 selects 1e3 max_rate / max_speed
  int samples = 64;
};

/// report.json: drift, every diffusion route, SK and minor-equality checks.
nlohmann::json run_analyze(const RunConfig& config, const CommandOptions& options);
/// spectrum.csv: |kappa|, direction, abscissa, bound ratio. Returns the summary.
nlohmann::json run_spectrum(const RunConfig& config, const CommandOptions& options);
/// decay.csv plus decay.json.
nlohmann::json run_decay(const RunConfig& config, const CommandOptions& options);
/// snapshots_<t>.csv and lyapunov.csv; particles.csv with options.particles.
nlohmann::json run_simulate(const RunConfig& config, const CommandOptions& options);

/// 2 validation, 3 precondition, 4 numerical guard, 1 anything else.
int exit_code_for(const std::exception& error) noexcept;
nlohmann::json error_object(const std::exception& error);

/// 17 significant digits, so values survive a text round trip.
std::string format_double(double value);

}  // namespace vjump
