#pragma once

// File formats: columnar text tables (tab-separated, one header line whose
// column names carry units) and JSON documents. Every write is whole-file
// atomic: the content goes to a temporary sibling which is then renamed.

#include <Eigen/Core>
#include <filesystem>
#include <string>
#include <vector>

#include "afmsnn/calibration.hpp"
#include "afmsnn/energy.hpp"
#include "afmsnn/network.hpp"
#include "afmsnn/readout.hpp"
#include "afmsnn/span.hpp"

namespace afmsnn {

void write_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

std::string format_table(const std::vector<std::string>& columns, const std::vector<std::vector<double>>& rows);

/// time_ps, V_<k>_V for every neuron (or only `neurons` when given).
std::string trace_table(const SimResultd& result, const NeuronParamsd& params, const std::vector<int>& neurons = {});
/// epoch, error_ps, spiked, synaptic_ops, w_1..w_25.
std::string training_record_table(const TrainingRecord& record);
/// row, col, w_initial, w_final: one line per pixel.
std::string weight_map_table(const TrainingRecord& record);

std::string calibration_json(const CalibrationReport& report);
CalibratedNeurond calibrated_neuron_from_json(const std::string& text);

/// Trained weights with the seed and the full configuration embedded.
std::string weights_json(const std::string& label, const Eigen::VectorXd& weights, std::uint64_t seed,
                         const std::string& config_text);
SpanChannel weights_from_json(const std::string& text);

std::string network_json(const MultiSpanNetwork& net);
std::string energy_json(const EnergyReport& report);

}  // namespace afmsnn
