#include "afmsnn/span.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "afmsnn/errors.hpp"

namespace afmsnn {

namespace {

// (u + 1) e^{-u}: strictly decreasing for u > 0.
double kernel(double u) { return (u + 1.0) * std::exp(-u); }

std::optional<double> reference_time(const SymbolResponse& r, const std::optional<double>& fixed) {
  return fixed ? fixed : r.input_reference();
}

}  // namespace

void TrainerConfig::validate() const {
  if (!(learning_rate > 0)) throw InvalidArgument("trainer: learning rate must be positive");
  if (!(tau > 0)) throw InvalidArgument("trainer: tau must be positive");
  if (epochs < 1) throw InvalidArgument("trainer: need at least one epoch");
  if (!(window > 0)) throw InvalidArgument("trainer: window must be positive");
  if (!(init_max >= 0)) throw InvalidArgument("trainer: init_max must be non-negative");
  if (t_input && !std::isfinite(*t_input)) throw InvalidArgument("trainer: t_input must be finite");
}

void SpanNetwork::validate() const {
  neuron.params.validate();
  if (!(weight_unit > 0)) throw InvalidArgument("span network: weight unit must be positive");
  if (!(horizon > 0)) throw InvalidArgument("span network: horizon must be positive");
}

std::optional<double> SymbolResponse::input_reference() const {
  double sum = 0.0;
  int count = 0;
  for (const auto& t : t_inputs)
    if (t) {
      sum += *t;
      ++count;
    }
  if (count == 0) return std::nullopt;
  return sum / count;
}

long TrainingRecord::total_synaptic_ops() const {
  long total = 0;
  for (const auto& e : epochs) total += e.synaptic_ops;
  return total;
}

std::optional<int> TrainingRecord::first_epoch_within(double tolerance_ps) const {
  for (const auto& e : epochs)
    if (e.spiked && std::abs(e.error_ps) < tolerance_ps) return e.epoch;
  return std::nullopt;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::kInWindow: return "in-window";
    case Verdict::kOutOfWindow: return "out-of-window";
    case Verdict::kNoSpike: return "no-spike";
  }
  return "?";
}

double delta_weight(double t_i, double t_d, double t_a, const TrainerConfig& cfg) {
  constexpr double half_e = std::numbers::e / 2.0;
  const double u_d = (t_d - t_i) / cfg.tau;
  const double u_a = (t_a - t_i) / cfg.tau;
  return cfg.learning_rate * half_e * half_e * (kernel(u_d) - kernel(u_a));
}

SimResultd simulate_symbol(const SpanNetwork& net, const Eigen::VectorXd& weights, const SymbolGrid& symbol) {
  if (weights.size() != SpanNetwork::kInputs)
    throw DimensionMismatch("simulate_symbol: expected 25 weights, got " + std::to_string(weights.size()));
  constexpr int n = SpanNetwork::kInputs + 1;
  std::vector<NeuronParamsd> params(n, net.neuron.params);
  CouplingMatrixd kappa(n);
  for (int k = 0; k < SpanNetwork::kInputs; ++k)
    kappa.set(SpanNetwork::kReadout, k, weights[k] * net.weight_unit, true);
  std::vector<DriveWaveformd> drives(n);
  for (int k = 0; k < SpanNetwork::kInputs; ++k)
    if (symbol.pixels[static_cast<std::size_t>(k)]) drives[static_cast<std::size_t>(k)] = DriveWaveformd::single(net.neuron.input_pulse);
  return simulate(params, kappa, drives, net.neuron.options(net.horizon));
}

SymbolResponse respond(const SpanNetwork& net, const Eigen::VectorXd& weights, const SymbolGrid& symbol) {
  const auto sim = simulate_symbol(net, weights, symbol);
  SymbolResponse r;
  r.t_output = sim.first_spike(SpanNetwork::kReadout);
  r.t_inputs.resize(SpanNetwork::kInputs);
  for (int k = 0; k < SpanNetwork::kInputs; ++k) r.t_inputs[static_cast<std::size_t>(k)] = sim.first_spike(static_cast<std::size_t>(k));
  r.synaptic_ops = sim.synaptic_op_count;
  return r;
}

Eigen::VectorXd symbol_update(const SymbolResponse& response, const SymbolGrid& symbol, double t_target,
                              const SpanNetwork& net, const TrainerConfig& cfg) {
  Eigen::VectorXd dw = Eigen::VectorXd::Zero(SpanNetwork::kInputs);
  const auto t_ref = reference_time(response, cfg.t_input);
  if (!t_ref) return dw;  // blank symbol: nothing fired, nothing to learn
  const double t_d = *t_ref + t_target;
  const double t_a = response.t_output.value_or(net.horizon);
  for (int k = 0; k < SpanNetwork::kInputs; ++k) {
    const auto& t_i = response.t_inputs[static_cast<std::size_t>(k)];
    if (!symbol.pixels[static_cast<std::size_t>(k)] || !t_i) continue;
    dw[k] = delta_weight(*t_i, t_d, t_a, cfg);
  }
  return dw;
}

EpochResult train_epoch(const SpanNetwork& net, const TrainingLibrary& library, const Eigen::VectorXd& weights,
                        const TrainerConfig& cfg) {
  if (library.entries.empty()) throw InvalidArgument("train_epoch: empty library");
  if (weights.size() != SpanNetwork::kInputs) throw DimensionMismatch("train_epoch: expected 25 weights");
  if ((weights.array() < 0).any()) throw InvalidArgument("train_epoch: weights must be non-negative");

  EpochResult out;
  out.mean_update = Eigen::VectorXd::Zero(SpanNetwork::kInputs);
  out.responses.reserve(library.size());
  // Fixed summation order: library order.
  for (const auto& entry : library.entries) {
    auto r = respond(net, weights, entry.grid);
    out.mean_update += symbol_update(r, entry.grid, entry.t_target, net, cfg);
    out.synaptic_ops += r.synaptic_ops;
    out.responses.push_back(std::move(r));
  }
  out.mean_update /= static_cast<double>(library.size());
  out.weights = (weights + out.mean_update).cwiseMax(0.0);

  const auto& correct = out.responses.front();
  const auto t_ref = reference_time(correct, cfg.t_input);
  if (!t_ref) throw InvalidArgument("train_epoch: the correct symbol has no black pixels");
  out.spiked = correct.t_output.has_value();
  out.error = correct.t_output.value_or(net.horizon) - (*t_ref + library.entries.front().t_target);
  return out;
}

Eigen::VectorXd initial_weights(const TrainerConfig& cfg, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, cfg.init_max);
  Eigen::VectorXd w(SpanNetwork::kInputs);
  for (Eigen::Index k = 0; k < w.size(); ++k) w[k] = cfg.init_max > 0 ? u(rng) : 0.0;
  return w;
}

TrainingResult train(const SpanNetwork& net, const TrainingLibrary& library, const TrainerConfig& cfg,
                     std::uint64_t rng_seed) {
  net.validate();
  cfg.validate();
  TrainingResult out;
  out.record.seed = rng_seed;
  out.record.initial_weights = initial_weights(cfg, rng_seed);
  out.weights = out.record.initial_weights;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    auto step = train_epoch(net, library, out.weights, cfg);
    out.weights = step.weights;
    out.record.epochs.push_back({epoch, to_ps(step.error), step.spiked, step.synaptic_ops, step.weights});
  }
  return out;
}

Evaluation evaluate(const SpanNetwork& net, const Eigen::VectorXd& weights, const SymbolGrid& symbol, double t_target,
                    double window, const std::optional<double>& t_input) {
  Evaluation ev;
  ev.t_target = t_target;
  const auto r = respond(net, weights, symbol);
  const auto t_ref = reference_time(r, t_input);
  if (!r.t_output || !t_ref) return ev;
  ev.latency = *r.t_output - *t_ref;
  ev.verdict = std::abs(*ev.latency - t_target) <= 0.5 * window ? Verdict::kInWindow : Verdict::kOutOfWindow;
  return ev;
}

}  // namespace afmsnn
