#pragma once

#include "vjump/model.hpp"
#include "vjump/spectral.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace vjump {

struct GridConfig {
  double half_width = 0.0;
  int points = 0;
};

struct DecayConfig {
  double t_min = 0.0;
  double t_max = 0.0;
  int per_decade = 0;
};

struct ParticleConfig {
  std::size_t count = 0;
  double dt = 0.0;  // 0 selects default_time_step
  std::uint64_t seed = 0;
};

/// One JSON document driving every command. Speed indices (rates, initial
/// components) are 1-based in the file and 0-based in memory.
struct RunConfig {
  VelocityModel model;
  bool asymmetric = false;
  std::optional<GridConfig> grid;
  InitialDatum initial;
  std::vector<double> times;
  std::optional<DecayConfig> decay;
  std::optional<ParticleConfig> particles;
  std::string outputs;

  Grid make_grid() const;  // ValidationError("grid") when absent
};

/// Throws ValidationError naming the offending field path.
RunConfig parse_config(const nlohmann::json& document);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace vjump
