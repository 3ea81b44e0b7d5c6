#pragma once

// Shared fixtures: the default configuration and one calibration per test binary.

#include "afmsnn/calibration.hpp"
#include "afmsnn/config.hpp"

namespace afmsnn::test {

inline const RunConfig& default_config() {
  static const RunConfig cfg = load_config(AFMSNN_SOURCE_DIR "/config/default.ini");
  return cfg;
}

inline const CalibrationReport& calibration() {
  static const CalibrationReport rep = calibrate(default_config().calibration);
  return rep;
}

inline const CalibratedNeurond& neuron() { return calibration().neuron; }

}  // namespace afmsnn::test
