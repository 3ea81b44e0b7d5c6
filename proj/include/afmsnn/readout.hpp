#pragma once

// Multi-readout classifier. Several trained readouts share one input layer.
// Each readout drives its own output neuron together with a shared clock
// neuron, both through a weak coupling: only a readout spike that coincides
// with the clock spike can fire the output.
//
// Neuron layout: inputs 0..24, readouts 25..25+S-1, clock 25+S, outputs after.

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "afmsnn/network.hpp"
#include "afmsnn/patterns.hpp"
#include "afmsnn/span.hpp"

namespace afmsnn {

struct SpanChannel {
  std::string label;
  Eigen::VectorXd weights;  // in units of MultiSpanNetwork::weight_unit
};

struct MultiSpanNetwork {
  CalibratedNeurond neuron;
  double weight_unit = kKappa0;
  std::vector<SpanChannel> spans;
  DriveWaveformd clock_drive;
  double kappa_weak = 0.0;   // absolute coupling of the output layer
  double horizon = 500e-12;  // s

  static constexpr int kInputs = kGridCells;

  int span_index(std::size_t k) const { return kInputs + static_cast<int>(k); }
  int clock_index() const { return kInputs + static_cast<int>(spans.size()); }
  int output_index(std::size_t k) const { return clock_index() + 1 + static_cast<int>(k); }
  int neuron_count() const { return kInputs + 2 * static_cast<int>(spans.size()) + 1; }

  void validate() const;
};

/// Coincidence test on a motif that mirrors one output channel: a pulse-driven
/// neuron relays through kappa0 to a "readout" neuron, whose coupling-driven
/// spike meets a pulse-driven clock spike at an output coupled by `kappa` to
/// both. `clock_offset` places the clock spike relative to the readout spike
/// (nullopt: the clock stays silent); `with_readout = false` leaves the
/// readout's driver silent. Returns the output spike count.
int coincidence_response(const CalibratedNeurond& cal, double kappa, std::optional<double> clock_offset,
                         bool with_readout = true, double horizon = 500e-12);

struct WeakCouplingReport {
  double kappa_weak = 0.0;  // chosen value
  double kappa_min = 0.0;   // smallest coupling that still fires on two spikes `tolerance` apart
  double tolerance = 0.0;
  double margin = 0.0;
};

/// Bisects over [0.1 kappa0, 2 kappa0] for the smallest coupling at which a
/// clock spike `coincidence_tolerance` before or after the readout spike fires
/// the output, then adds `margin` (relative). The result is re-checked: either
/// spike alone must leave the output silent, and offsets within the tolerance
/// must give exactly one output spike. The acceptance width grows steeply with
/// the margin, so the default keeps it at zero.
WeakCouplingReport calibrate_weak_coupling(const CalibratedNeurond& cal, double coincidence_tolerance = 5e-12,
                                           double margin = 0.0);

/// Pulse start that makes a lone neuron spike at `t_spike`.
double clock_pulse_start(const CalibratedNeurond& cal, double t_spike);

struct Classification {
  std::optional<std::string> label;
  std::vector<std::optional<double>> span_spikes;    // s, per channel
  std::vector<std::optional<double>> output_spikes;  // s, per channel
  std::optional<double> clock_spike;                 // s
  std::optional<double> input_reference;             // s, mean input-layer spike
  long synaptic_ops = 0;
  std::vector<std::string> fired;  // labels of every output that spiked

  bool ambiguous() const { return fired.size() >= 2; }
  /// Output spike relative to the input layer, when a label was found.
  std::optional<double> inference_latency() const;
};

SimResultd simulate_multispan(const MultiSpanNetwork& net, const SymbolGrid& symbol);

/// Runs the network and records every spike of interest; `label` is set only
/// when exactly one output fired.
Classification observe(const MultiSpanNetwork& net, const SymbolGrid& symbol);

/// The unique output that fired, or no label if none did. Throws
/// AmbiguousClassification when two or more outputs fire.
Classification classify(const MultiSpanNetwork& net, const SymbolGrid& symbol);

/// Clock drive that puts the clock spike `base_time` after the input layer.
MultiSpanNetwork build_multispan(const CalibratedNeurond& cal, std::vector<SpanChannel> spans, double kappa_weak,
                                 double base_time = 100e-12, double weight_unit = kKappa0,
                                 double horizon = 500e-12);

}  // namespace afmsnn
