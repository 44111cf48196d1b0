#pragma once

// JSON experiment configuration; the schema is documented in README.md.

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "uwcrb/ssp.hpp"

namespace uwcrb {

struct MonteCarloSpec {
  double h = 0.0;
  double z_d = 0.0;
  std::size_t trials = 10000;
  std::uint64_t seed = 1;
};

struct OutputSpec {
  std::string csv = "sweep.csv";
  std::string mc_csv = "mc.csv";
  std::string mc_json = "mc.json";
};

struct SweepConfig {
  double horizontal_extent = 10000.0;  // D_h
  double depth_extent = 2000.0;        // D_z
  double source_depth = 0.0;
  std::size_t n_h = 200;
  std::size_t n_z = 100;
  SoundSpeedProfile profile;
  NoiseModel noise;
  MonteCarloSpec montecarlo;
  OutputSpec output;
};

/// Throws ParseError (with line and column) on malformed JSON and
/// ValidationError naming the offending field otherwise.
SweepConfig parse_config(const std::string& text);
SweepConfig config_from_json(const nlohmann::json& j);
/// IoError if the file cannot be read.
SweepConfig load_config(const std::filesystem::path& path);

}  // namespace uwcrb
