#pragma once

// Supervised training of a single readout neuron (SPAN). 25 input neurons, one
// per pixel, feed the readout through trainable couplings; a black pixel
// pulses its input neuron at t = 0. The readout learns to fire at a prescribed
// delay after the input layer.

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <vector>

#include "afmsnn/network.hpp"
#include "afmsnn/patterns.hpp"
#include "afmsnn/units.hpp"

namespace afmsnn {

struct TrainerConfig {
  double learning_rate = 0.05;
  double tau = 100e-12;                // s
  int epochs = 60;
  double window = 10e-12;              // s, full width of the recognition window
  std::optional<double> t_input;       // s; detected input spike time when unset
  double init_max = 2.0 / kGridCells;  // initial weights ~ U[0, init_max]

  void validate() const;
};

/// Input layer + readout. Weights are dimensionless multiples of
/// `weight_unit`; the applied coupling is w * weight_unit.
struct SpanNetwork {
  CalibratedNeurond neuron;
  double weight_unit = kKappa0;
  double horizon = 300e-12;  // s

  static constexpr int kInputs = kGridCells;
  static constexpr int kReadout = kGridCells;  // neuron index of the readout

  void validate() const;
};

/// Response of the network to one symbol.
struct SymbolResponse {
  std::optional<double> t_output;                // s, first readout spike
  std::vector<std::optional<double>> t_inputs;   // s, per input neuron
  long synaptic_ops = 0;

  /// Mean spike time of the inputs that fired; nullopt for a blank symbol.
  std::optional<double> input_reference() const;
};

struct EpochResult {
  Eigen::VectorXd weights;          // after the update and clamp
  Eigen::VectorXd mean_update;      // averaged, before clamping
  double error = 0.0;               // s, t_a - t_d of the correct symbol
  bool spiked = false;              // did the correct symbol produce a readout spike
  long synaptic_ops = 0;
  std::vector<SymbolResponse> responses;  // one per library entry
};

struct EpochRecord {
  int epoch = 0;  // 1-based
  double error_ps = 0.0;
  bool spiked = false;
  long synaptic_ops = 0;
  Eigen::VectorXd weights;  // after the epoch's update
};

struct TrainingRecord {
  std::uint64_t seed = 0;
  Eigen::VectorXd initial_weights;
  std::vector<EpochRecord> epochs;

  long total_synaptic_ops() const;
  /// First epoch whose error is within `tolerance_ps`, or nullopt.
  std::optional<int> first_epoch_within(double tolerance_ps) const;
};

struct TrainingResult {
  Eigen::VectorXd weights;
  TrainingRecord record;
};

enum class Verdict { kInWindow, kOutOfWindow, kNoSpike };

const char* to_string(Verdict v);

struct Evaluation {
  Verdict verdict = Verdict::kNoSpike;
  std::optional<double> latency;  // s, readout spike relative to the input layer
  double t_target = 0.0;          // s, relative to the input layer
};

/// lambda (e/2)^2 [(u_d + 1) e^{-u_d} - (u_a + 1) e^{-u_a}] with u = (t - t_i) / tau.
double delta_weight(double t_i, double t_d, double t_a, const TrainerConfig& cfg);

/// Runs the input layer + readout for `symbol`.
SimResultd simulate_symbol(const SpanNetwork& net, const Eigen::VectorXd& weights, const SymbolGrid& symbol);
SymbolResponse respond(const SpanNetwork& net, const Eigen::VectorXd& weights, const SymbolGrid& symbol);

/// Per-input weight change for one symbol. A missing readout spike counts as a
/// spike at the horizon; white pixels and silent inputs get no update.
Eigen::VectorXd symbol_update(const SymbolResponse& response, const SymbolGrid& symbol, double t_target,
                              const SpanNetwork& net, const TrainerConfig& cfg);

/// One pass over the library: simulate each entry, average the updates,
/// add them and clamp at zero.
EpochResult train_epoch(const SpanNetwork& net, const TrainingLibrary& library, const Eigen::VectorXd& weights,
                        const TrainerConfig& cfg);

Eigen::VectorXd initial_weights(const TrainerConfig& cfg, std::uint64_t seed);

TrainingResult train(const SpanNetwork& net, const TrainingLibrary& library, const TrainerConfig& cfg,
                     std::uint64_t rng_seed);

/// In-window iff the readout fires within window/2 of `t_target` (both relative to the input layer).
Evaluation evaluate(const SpanNetwork& net, const Eigen::VectorXd& weights, const SymbolGrid& symbol, double t_target,
                    double window, const std::optional<double>& t_input = std::nullopt);

}  // namespace afmsnn
