#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "afmsnn/errors.hpp"

namespace afmsnn {

struct SpikeEvent {
  std::size_t neuron_id = 0;
  double t_spike = 0.0;  // s
  double v_peak = 0.0;   // V
};

/// Finds one spike per contiguous run of samples at or above `threshold`.
/// The spike time is the largest sample of the run, refined with a parabola
/// through it and its two neighbours. Sample i sits at t0 + i * sample_dt.
template <typename Scalar>
std::vector<SpikeEvent> detect_spikes(std::span<const Scalar> trace, double sample_dt, double threshold,
                                      double t0 = 0.0, std::size_t neuron_id = 0) {
  if (trace.size() < 3) throw EmptyTraceError("detect_spikes: trace needs at least 3 samples");
  if (!(threshold > 0)) throw InvalidArgument("detect_spikes: threshold must be positive");
  if (!(sample_dt > 0)) throw InvalidArgument("detect_spikes: sample_dt must be positive");

  std::vector<SpikeEvent> events;
  const std::size_t n = trace.size();
  std::size_t i = 0;
  while (i < n) {
    if (static_cast<double>(trace[i]) < threshold) {
      ++i;
      continue;
    }
    std::size_t peak = i;
    std::size_t j = i;
    for (; j < n && static_cast<double>(trace[j]) >= threshold; ++j)
      if (trace[j] > trace[peak]) peak = j;

    double offset = 0.0;
    double v_peak = static_cast<double>(trace[peak]);
    if (peak > 0 && peak + 1 < n) {
      const double a = static_cast<double>(trace[peak - 1]);
      const double b = static_cast<double>(trace[peak]);
      const double c = static_cast<double>(trace[peak + 1]);
      const double curvature = a - 2.0 * b + c;
      if (curvature < 0.0) {
        offset = 0.5 * (a - c) / curvature;
        v_peak = b - 0.25 * (a - c) * offset;
      }
    }
    events.push_back({neuron_id, t0 + (static_cast<double>(peak) + offset) * sample_dt, v_peak});
    i = j;
  }
  return events;
}

}  // namespace afmsnn
