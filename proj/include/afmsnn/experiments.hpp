#pragma once

// End-to-end experiments: latency calibration, readout training, evaluation
// over a library, and multi-readout classification. Each one writes its data
// files into an output directory and returns a short text summary.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "afmsnn/calibration.hpp"
#include "afmsnn/config.hpp"
#include "afmsnn/energy.hpp"
#include "afmsnn/readout.hpp"
#include "afmsnn/span.hpp"

namespace afmsnn {

enum class Experiment { kFig1, kTrain, kEval, kMultispan };

Experiment parse_experiment(std::string_view name);
const char* to_string(Experiment e);

SpanNetwork span_network(const RunConfig& cfg, const CalibratedNeurond& cal);
TrainingLibrary library_for(const RunConfig& cfg, const std::string& label);

struct TrainedSpan {
  std::string label;
  TrainingLibrary library;
  TrainingResult result;
};

TrainedSpan train_symbol(const RunConfig& cfg, const CalibratedNeurond& cal, const std::string& label);

/// One library entry judged against the recognition window around the
/// library's base time; `training_target` is the entry's own training target.
struct EvalRow {
  std::string label;
  int hamming = 0;
  int added = 0;
  int missing = 0;
  double training_target = 0.0;  // s
  Evaluation evaluation;
};

std::vector<EvalRow> evaluate_library(const SpanNetwork& net, const Eigen::VectorXd& weights,
                                      const TrainingLibrary& library, const TrainerConfig& cfg);
/// Every single-missing-pixel variant of the correct symbol, judged like evaluate_library.
std::vector<EvalRow> missing_pixel_probes(const SpanNetwork& net, const Eigen::VectorXd& weights,
                                          const TrainingLibrary& library, const TrainerConfig& cfg);
std::string eval_table(const std::vector<EvalRow>& rows);

struct TimingSummary {
  std::optional<double> inference_latency;  // s, input layer -> output neuron
  std::optional<double> readout_latency;    // s, input layer -> readout
  double training_simulated_time = 0.0;     // s, epochs x library size x horizon
  double reference_training_time = 40e-9;   // s
  std::string convention;
};

std::string timing_json(const TimingSummary& t);

struct ExperimentOptions {
  std::filesystem::path out_dir = "out";
  /// Pre-trained weight files (one per readout label) that replace training.
  std::vector<std::filesystem::path> weight_files;
  /// A previously written calibration file that replaces the search.
  std::optional<std::filesystem::path> calibration_file;
};

struct ExperimentOutput {
  std::vector<std::filesystem::path> files;
  std::string summary;
};

/// Runs the calibration search, or loads it from `options.calibration_file`.
CalibratedNeurond obtain_calibration(const RunConfig& cfg, const ExperimentOptions& options,
                                     std::optional<CalibrationReport>* report = nullptr);

ExperimentOutput run_experiment(Experiment which, const RunConfig& cfg, const ExperimentOptions& options);

/// Latency sweep over [lo, hi] (in kappa0 units) written as a table.
ExperimentOutput run_sweep(const RunConfig& cfg, const ExperimentOptions& options, double lo_k0, double hi_k0,
                           int points);

/// Symbol fixture, configured library and configuration, no simulation.
ExperimentOutput run_export(const RunConfig& cfg, const ExperimentOptions& options);

}  // namespace afmsnn
