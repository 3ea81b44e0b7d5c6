#include "afmsnn/energy.hpp"

#include "afmsnn/errors.hpp"

namespace afmsnn {

namespace {

constexpr const char* kConvention =
    "one operation per spike per non-zero outgoing synapse of the spiking neuron, summed over every simulated run";

}  // namespace

EnergyReport energy_report(std::span<const SimResultd> results, double energy_per_op) {
  long ops = 0;
  double time = 0.0;
  for (const auto& r : results) {
    ops += r.synaptic_op_count;
    if (r.times.size() > 0) time += r.times[r.times.size() - 1];
  }
  return energy_report(ops, time, energy_per_op);
}

EnergyReport energy_report(long synaptic_ops, double simulated_time, double energy_per_op) {
  if (synaptic_ops < 0) throw InvalidArgument("energy_report: negative operation count");
  if (!(energy_per_op >= 0)) throw InvalidArgument("energy_report: energy per operation must be >= 0");
  EnergyReport rep;
  rep.synaptic_op_count = synaptic_ops;
  rep.energy_per_op = energy_per_op;
  rep.total_energy = static_cast<double>(synaptic_ops) * energy_per_op;
  rep.simulated_time = simulated_time;
  rep.convention = kConvention;
  return rep;
}

}  // namespace afmsnn
