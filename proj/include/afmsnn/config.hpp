#pragma once

// Run configuration: one INI file with sections; every physical quantity
// carries its unit in the key name.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "afmsnn/patterns.hpp"
#include "afmsnn/span.hpp"

namespace afmsnn {

/// Fixed neuron constants and the bounds the calibration searches over.
struct CalibrationSpec {
  double f_ex_hz = 27.5e12;
  double sigma = 1e14;          // rad/s per A
  double beta = 0.11e-15;       // V*s
  double bias_fraction = 0.999; // sigma*i_bias relative to omega_e/2
  double pulse_overdrive = 1.2; // total drive during the pulse, relative to threshold
  double pulse_duration = 10e-12;
  double alpha_min = 0.3, alpha_max = 0.9;
  double f_e_min_hz = 5e9, f_e_max_hz = 200e9;
  double target_k0 = 100e-12;   // latency at kappa0
  double target_k15 = 50e-12;   // latency at 1.5 kappa0
  double tolerance = 0.10;      // relative
  double dt = 0.01e-12;
  int stride = 10;
  double chain_horizon = 300e-12;
  double cutoff_horizon = 1000e-12;
  int sweep_points = 10;

  void validate() const;
};

struct LibrarySpec {
  std::string symbol = "O";
  int size = 20;
  int max_flips = 3;
  std::uint64_t seed = 1;
  VariantMode mode = VariantMode::kAdditionalOnly;
  double base_time = 100e-12;
  double shift_per_pixel = 10e-12;
};

struct ReadoutSpec {
  std::vector<std::string> symbols{"Z", "O", "X"};
  double coincidence_tolerance = 5e-12;
  double margin = 0.0;
  double horizon = 500e-12;
};

struct RunConfig {
  CalibrationSpec calibration;
  LibrarySpec library;
  TrainerConfig trainer;
  std::uint64_t trainer_seed = 0;
  double span_horizon = 300e-12;
  double weight_unit = kKappa0;
  ReadoutSpec readout;
  double energy_per_op = 1e-15;  // J
  std::filesystem::path output_dir = "out";

  /// Throws ConfigError naming the offending key.
  void validate() const;
};

/// Parses INI text. Seeds are mandatory; everything else has defaults.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);
/// Canonical INI rendering of a configuration (round-trips through parse_config).
std::string format_config(const RunConfig& cfg);

/// --out wins over AFMSNN_OUT_DIR, which wins over the config file.
std::filesystem::path resolve_output_dir(const RunConfig& cfg, const std::string& cli_out);

}  // namespace afmsnn
