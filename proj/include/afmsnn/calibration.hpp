#pragma once

// Calibration of the neuron model against the two-neuron chain latencies.
// omega_ex, the bias fraction and the input pulse are fixed; alpha and f_e
// are found by nested bisection: for each alpha, f_e is tuned so that
// latency(kappa0) hits its target, and alpha is tuned so that
// latency(1.5 kappa0) hits its own.

#include <optional>
#include <vector>

#include "afmsnn/config.hpp"
#include "afmsnn/network.hpp"

namespace afmsnn {

struct LatencyPoint {
  double kappa = 0.0;
  std::optional<double> latency;  // s; nullopt when the second neuron stays silent
};

struct CalibrationReport {
  CalibratedNeurond neuron;
  double alpha = 0.0;
  double f_e_hz = 0.0;
  double latency_k0 = 0.0;         // s
  double latency_k15 = 0.0;        // s
  double peak_voltage = 0.0;       // V, isolated spike
  double spike_width = 0.0;        // s, full width at half maximum
  double single_spike_time = 0.0;  // s after the pulse onset
  double kappa_cutoff = 0.0;       // smallest coupling that still fires within the cutoff horizon
  std::vector<LatencyPoint> sweep; // [kappa_cutoff, 2 kappa0]
  int evaluations = 0;             // chain simulations spent in the search
};

/// Neuron with the given alpha and f_e; the detection threshold is half the
/// isolated spike's peak. Throws CalibrationFailed unless the input pulse
/// elicits exactly one spike.
CalibratedNeurond make_neuron(const CalibrationSpec& spec, double alpha, double f_e_hz);

/// Isolated-neuron response to the input pulse: (peak voltage, FWHM, spike time).
struct SpikeShape {
  double peak_voltage = 0.0;
  double width = 0.0;
  double t_spike = 0.0;
  double phi_advance = 0.0;  // rad, net rotation after the spike
};
SpikeShape spike_shape(const CalibratedNeurond& cal, double horizon = 200e-12);

/// Chain latency, or nullopt if the second neuron stays silent within `horizon`.
std::optional<double> try_latency(double kappa, const CalibratedNeurond& cal, double horizon);

/// Smallest coupling in [lo, hi] that still fires the second neuron within `horizon`.
double find_cutoff(const CalibratedNeurond& cal, double horizon, double lo = 0.05 * kKappa0, double hi = kKappa0);

std::vector<LatencyPoint> latency_sweep(const CalibratedNeurond& cal, double kappa_lo, double kappa_hi, int points,
                                        double horizon);

/// Throws CalibrationFailed (with the best residuals found) when the search
/// space is empty or the targets cannot be met within tolerance.
CalibrationReport calibrate(const CalibrationSpec& spec);

}  // namespace afmsnn
