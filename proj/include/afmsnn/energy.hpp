#pragma once

#include <span>
#include <string>

#include "afmsnn/network.hpp"

namespace afmsnn {

/// Synaptic-operation energy accounting. One operation is one spike crossing
/// one non-zero synapse.
struct EnergyReport {
  long synaptic_op_count = 0;
  double energy_per_op = 1e-15;  // J
  double total_energy = 0.0;     // J, = synaptic_op_count * energy_per_op
  double simulated_time = 0.0;   // s of simulated physical time
  std::string convention;
};

EnergyReport energy_report(std::span<const SimResultd> results, double energy_per_op = 1e-15);
EnergyReport energy_report(long synaptic_ops, double simulated_time, double energy_per_op = 1e-15);

}  // namespace afmsnn
