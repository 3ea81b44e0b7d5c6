#include "afmsnn/readout.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "afmsnn/errors.hpp"

namespace afmsnn {

namespace {

// Spike time of an isolated neuron whose input pulse starts at `start`.
double lone_spike_time(const CalibratedNeurond& cal, double start) {
  std::vector<NeuronParamsd> params{cal.params};
  CouplingMatrixd k(1);
  auto p = cal.input_pulse;
  p.t_start = start;
  std::vector<DriveWaveformd> drives{DriveWaveformd::single(p)};
  const auto r = simulate(params, k, drives, cal.options(start + p.duration + 100e-12));
  const auto t = r.first_spike(0);
  if (!t) throw NoSpikeError("the input pulse does not elicit a spike");
  return *t;
}

}  // namespace

void MultiSpanNetwork::validate() const {
  neuron.params.validate();
  if (spans.empty()) throw InvalidArgument("multispan: need at least one readout channel");
  for (const auto& s : spans)
    if (s.weights.size() != kInputs) throw DimensionMismatch("multispan: channel '" + s.label + "' needs 25 weights");
  if (!(kappa_weak > 0)) throw InvalidArgument("multispan: kappa_weak must be positive");
  if (!(horizon > 0)) throw InvalidArgument("multispan: horizon must be positive");
  clock_drive.validate();
}

int coincidence_response(const CalibratedNeurond& cal, double kappa, std::optional<double> clock_offset,
                         bool with_readout, double horizon) {
  // 0 driver -> 1 readout (kappa0); 1 readout, 2 clock -> 3 output (kappa).
  std::vector<NeuronParamsd> params(4, cal.params);
  CouplingMatrixd k(4);
  k.set(1, 0, kKappa0);
  k.set(3, 1, kappa);
  k.set(3, 2, kappa);
  std::vector<DriveWaveformd> drives(4);
  if (with_readout) drives[0] = DriveWaveformd::single(cal.input_pulse);
  if (clock_offset) {
    const auto chain = simulate_chain(kKappa0, cal, horizon);
    const auto t_readout = chain.first_spike(1);
    if (!t_readout) throw NoSpikeError("coincidence_response: the relay at kappa0 does not fire");
    auto p = cal.input_pulse;
    p.t_start = clock_pulse_start(cal, *t_readout + *clock_offset);
    drives[2] = DriveWaveformd::single(p);
  }
  const auto r = simulate(params, k, drives, cal.options(horizon));
  return static_cast<int>(r.spikes[3].size());
}

WeakCouplingReport calibrate_weak_coupling(const CalibratedNeurond& cal, double coincidence_tolerance, double margin) {
  if (!(coincidence_tolerance >= 0)) throw InvalidArgument("calibrate_weak_coupling: tolerance must be >= 0");
  if (!(margin >= 0)) throw InvalidArgument("calibrate_weak_coupling: margin must be >= 0");
  const double k_lo = 0.1 * kKappa0;
  const double k_hi = 2.0 * kKappa0;
  auto fires = [&](double kappa) {
    return coincidence_response(cal, kappa, coincidence_tolerance) >= 1 &&
           coincidence_response(cal, kappa, -coincidence_tolerance) >= 1;
  };

  if (!fires(k_hi))
    throw NoFeasibleCoupling("calibrate_weak_coupling: two spikes within the tolerance never fire the output below 2 kappa0");
  double lo = k_lo, hi = k_hi;
  if (fires(lo)) {
    hi = lo;
  } else {
    while (hi - lo > 1e-4 * kKappa0) {
      const double mid = 0.5 * (lo + hi);
      (fires(mid) ? hi : lo) = mid;
    }
  }

  WeakCouplingReport rep;
  rep.kappa_min = hi;
  rep.tolerance = coincidence_tolerance;
  rep.margin = margin;
  rep.kappa_weak = hi * (1.0 + margin);
  if (rep.kappa_weak > k_hi)
    throw NoFeasibleCoupling("calibrate_weak_coupling: margin pushes the coupling above 2 kappa0");
  if (coincidence_response(cal, rep.kappa_weak, std::nullopt) != 0 ||
      coincidence_response(cal, rep.kappa_weak, 0.0, false) != 0)
    throw NoFeasibleCoupling(fmt::format(
        "calibrate_weak_coupling: a single spike already fires the output at kappa = {:.4g} kappa0",
        rep.kappa_weak / kKappa0));
  const double t = coincidence_tolerance;
  for (double offset : {-t, -0.5 * t, 0.0, 0.5 * t, t})
    if (coincidence_response(cal, rep.kappa_weak, offset) != 1)
      throw NoFeasibleCoupling("calibrate_weak_coupling: coincident spikes do not give exactly one output spike");
  return rep;
}

double clock_pulse_start(const CalibratedNeurond& cal, double t_spike) {
  double start = t_spike - (lone_spike_time(cal, 0.0) - cal.input_pulse.t_start);
  if (start < 0) throw InvalidArgument("clock_pulse_start: requested spike time is earlier than the response latency");
  // One correction absorbs pulse-edge quantization on the time grid.
  start += t_spike - lone_spike_time(cal, start);
  return std::max(start, 0.0);
}

std::optional<double> Classification::inference_latency() const {
  if (!label || !input_reference) return std::nullopt;
  for (const auto& t : output_spikes)
    if (t) return *t - *input_reference;
  return std::nullopt;
}

SimResultd simulate_multispan(const MultiSpanNetwork& net, const SymbolGrid& symbol) {
  net.validate();
  const int n = net.neuron_count();
  std::vector<NeuronParamsd> params(static_cast<std::size_t>(n), net.neuron.params);
  CouplingMatrixd kappa(n);
  for (std::size_t s = 0; s < net.spans.size(); ++s) {
    for (int j = 0; j < MultiSpanNetwork::kInputs; ++j)
      kappa.set(net.span_index(s), j, net.spans[s].weights[j] * net.weight_unit);
    kappa.set(net.output_index(s), net.span_index(s), net.kappa_weak);
    kappa.set(net.output_index(s), net.clock_index(), net.kappa_weak);
  }
  std::vector<DriveWaveformd> drives(static_cast<std::size_t>(n));
  for (int j = 0; j < MultiSpanNetwork::kInputs; ++j)
    if (symbol.pixels[static_cast<std::size_t>(j)]) drives[static_cast<std::size_t>(j)] = DriveWaveformd::single(net.neuron.input_pulse);
  drives[static_cast<std::size_t>(net.clock_index())] = net.clock_drive;
  return simulate(params, kappa, drives, net.neuron.options(net.horizon));
}

Classification observe(const MultiSpanNetwork& net, const SymbolGrid& symbol) {
  const auto sim = simulate_multispan(net, symbol);
  Classification c;
  c.synaptic_ops = sim.synaptic_op_count;
  c.clock_spike = sim.first_spike(static_cast<std::size_t>(net.clock_index()));
  double sum = 0.0;
  int fired = 0;
  for (int j = 0; j < MultiSpanNetwork::kInputs; ++j)
    if (const auto t = sim.first_spike(static_cast<std::size_t>(j))) {
      sum += *t;
      ++fired;
    }
  if (fired) c.input_reference = sum / fired;

  for (std::size_t s = 0; s < net.spans.size(); ++s) {
    c.span_spikes.push_back(sim.first_spike(static_cast<std::size_t>(net.span_index(s))));
    c.output_spikes.push_back(sim.first_spike(static_cast<std::size_t>(net.output_index(s))));
    if (c.output_spikes.back()) c.fired.push_back(net.spans[s].label);
  }
  if (c.fired.size() == 1) c.label = c.fired.front();
  return c;
}

Classification classify(const MultiSpanNetwork& net, const SymbolGrid& symbol) {
  auto c = observe(net, symbol);
  if (c.ambiguous()) {
    std::string list;
    for (const auto& w : c.fired) list += (list.empty() ? "" : ", ") + w;
    throw AmbiguousClassification("classify: several outputs fired (" + list + "); kappa_weak or clock is miscalibrated");
  }
  return c;
}

MultiSpanNetwork build_multispan(const CalibratedNeurond& cal, std::vector<SpanChannel> spans, double kappa_weak,
                                 double base_time, double weight_unit, double horizon) {
  MultiSpanNetwork net;
  net.neuron = cal;
  net.weight_unit = weight_unit;
  net.spans = std::move(spans);
  net.kappa_weak = kappa_weak;
  net.horizon = horizon;
  // The clock fires base_time after the input layer's spike.
  auto pulse = cal.input_pulse;
  pulse.t_start = clock_pulse_start(cal, lone_spike_time(cal, cal.input_pulse.t_start) + base_time);
  net.clock_drive = DriveWaveformd::single(pulse);
  return net;
}

}  // namespace afmsnn
