#pragma once

// Coupled networks of AFM neurons. Neuron i receives sum_k kappa(i, k) * phi_k'
// as synaptic input; all neurons share one clock and are advanced together by
// a synchronous RK4 step.

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "afmsnn/errors.hpp"
#include "afmsnn/neuron.hpp"
#include "afmsnn/spikes.hpp"

namespace afmsnn {

template <typename Scalar>
struct Pulse {
  Scalar t_start{};
  Scalar duration{};
  Scalar amplitude{};  // A

  Scalar t_end() const { return t_start + duration; }
};

/// Extra drive current on top of a neuron's bias: a baseline plus rectangular pulses.
template <typename Scalar>
struct DriveWaveform {
  std::vector<Pulse<Scalar>> pulses;
  Scalar baseline{0};

  Scalar current_at(Scalar t) const {
    Scalar i = baseline;
    for (const auto& p : pulses)
      if (t >= p.t_start && t < p.t_end()) i += p.amplitude;
    return i;
  }

  void validate() const {
    for (const auto& p : pulses)
      if (!(p.duration > 0)) throw InvalidArgument("drive waveform: pulse durations must be positive");
    auto sorted = pulses;
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.t_start < b.t_start; });
    for (std::size_t i = 1; i < sorted.size(); ++i)
      if (sorted[i].t_start < sorted[i - 1].t_end())
        throw InvalidArgument("drive waveform: pulses overlap");
  }

  static DriveWaveform single(const Pulse<Scalar>& p) { return DriveWaveform{{p}, Scalar(0)}; }
};

/// kappa(i, k) is the weight of neuron k's output into neuron i. Entries are
/// non-negative and the diagonal is always zero.
template <typename Scalar>
class CouplingMatrix {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Mask = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

  CouplingMatrix() = default;
  explicit CouplingMatrix(Eigen::Index n) : kappa_(Matrix::Zero(n, n)), trainable_(Mask::Constant(n, n, false)) {}

  Eigen::Index size() const { return kappa_.rows(); }

  void set(Eigen::Index target, Eigen::Index source, Scalar value, bool trainable = false) {
    if (target < 0 || source < 0 || target >= size() || source >= size())
      throw DimensionMismatch("coupling: index out of range");
    if (target == source) throw InvalidArgument("coupling: self-coupling is not allowed");
    if (!(value >= 0) || !std::isfinite(static_cast<double>(value)))
      throw InvalidArgument("coupling: weights must be finite and non-negative");
    kappa_(target, source) = value;
    trainable_(target, source) = trainable;
  }

  Scalar operator()(Eigen::Index target, Eigen::Index source) const { return kappa_(target, source); }
  const Matrix& kappa() const { return kappa_; }
  const Mask& trainable_mask() const { return trainable_; }

  /// Number of non-zero synapses leaving `source`.
  Eigen::Index outgoing_synapses(Eigen::Index source) const {
    Eigen::Index count = 0;
    for (Eigen::Index i = 0; i < size(); ++i)
      if (i != source && kappa_(i, source) != Scalar(0)) ++count;
    return count;
  }

 private:
  Matrix kappa_;
  Mask trainable_;
};

template <typename Scalar>
struct SimOptions {
  Scalar dt{};
  Scalar t_end{};
  int stride = 10;         // store every stride-th step
  Scalar threshold{};      // spike detection threshold, V
  Scalar synaptic_delay{0};
};

template <typename Scalar>
struct SimResult {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> times;
  Matrix phi;      // samples x neurons
  Matrix phi_dot;  // samples x neurons
  std::vector<std::vector<SpikeEvent>> spikes;
  long synaptic_op_count = 0;

  std::size_t neuron_count() const { return spikes.size(); }

  std::optional<double> first_spike(std::size_t neuron) const {
    if (neuron >= spikes.size() || spikes[neuron].empty()) return std::nullopt;
    return spikes[neuron].front().t_spike;
  }

  /// Output voltages V = beta * phi' for every stored sample.
  Matrix voltages(std::span<const NeuronParams<Scalar>> params) const {
    Matrix v(phi_dot.rows(), phi_dot.cols());
    for (Eigen::Index k = 0; k < phi_dot.cols(); ++k) v.col(k) = params[k].beta * phi_dot.col(k);
    return v;
  }
};

using CouplingMatrixd = CouplingMatrix<double>;
using DriveWaveformd = DriveWaveform<double>;
using Pulsed = Pulse<double>;
using SimOptionsd = SimOptions<double>;
using SimResultd = SimResult<double>;

namespace detail {

template <typename Scalar>
class NetworkRhs {
 public:
  using Vec = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

  NetworkRhs(std::span<const NeuronParams<Scalar>> params, const CouplingMatrix<Scalar>& coupling,
             std::span<const DriveWaveform<Scalar>> drives)
      : drives_(drives) {
    const auto n = static_cast<Eigen::Index>(params.size());
    // Networks here are sparse (a few dozen synapses among n^2 entries), so the
    // non-zero entries are kept as a list in fixed row-major order.
    const auto& kappa = coupling.kappa();
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index k = 0; k < n; ++k)
        if (kappa(i, k) != Scalar(0)) synapses_.push_back({i, k, kappa(i, k)});
    omega_ex_.resize(n);
    alpha_.resize(n);
    half_omega_e_.resize(n);
    sigma_.resize(n);
    i_bias_.resize(n);
    current_.resize(n);
    coupling_in_.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& p = params[static_cast<std::size_t>(i)];
      omega_ex_[i] = p.omega_ex;
      alpha_[i] = p.alpha;
      half_omega_e_[i] = Scalar(0.5) * p.omega_e;
      sigma_[i] = p.sigma;
      i_bias_[i] = p.i_bias;
    }
  }

  /// `source_rate` is the phi' that feeds the synapses; it differs from
  /// `phi_dot` only when a synaptic delay is active.
  void operator()(const Vec& phi, const Vec& phi_dot, const Vec& source_rate, Scalar t, Vec& out) {
    for (Eigen::Index i = 0; i < current_.size(); ++i)
      current_[i] = i_bias_[i] + drives_[static_cast<std::size_t>(i)].current_at(t);
    coupling_in_.setZero();
    for (const auto& syn : synapses_) coupling_in_[syn.target] += syn.kappa * source_rate[syn.source];
    out = omega_ex_ * (sigma_ * current_ + coupling_in_ - alpha_ * phi_dot - half_omega_e_ * (Scalar(2) * phi).sin());
  }

 private:
  struct Synapse {
    Eigen::Index target, source;
    Scalar kappa;
  };
  std::vector<Synapse> synapses_;
  std::span<const DriveWaveform<Scalar>> drives_;
  Vec omega_ex_, alpha_, half_omega_e_, sigma_, i_bias_, current_, coupling_in_;
};

}  // namespace detail

/// Integrates the coupled network from `initial` (rest states when empty) and
/// extracts spikes from the sampled voltage traces.
template <typename Scalar>
SimResult<Scalar> simulate(std::span<const NeuronParams<Scalar>> params, const CouplingMatrix<Scalar>& coupling,
                           std::span<const DriveWaveform<Scalar>> drives, const SimOptions<Scalar>& opts,
                           std::span<const NeuronState<Scalar>> initial = {}) {
  using Vec = Eigen::Array<Scalar, Eigen::Dynamic, 1>;
  const auto n = static_cast<Eigen::Index>(params.size());
  if (coupling.size() != n || static_cast<Eigen::Index>(drives.size()) != n ||
      (!initial.empty() && static_cast<Eigen::Index>(initial.size()) != n))
    throw DimensionMismatch("simulate: params, coupling, drives and initial states must agree in size");
  if (!(opts.dt > 0) || !(opts.t_end >= 0) || opts.stride < 1)
    throw InvalidArgument("simulate: need dt > 0, t_end >= 0 and stride >= 1");
  if (!(opts.synaptic_delay >= 0)) throw InvalidArgument("simulate: synaptic delay must be non-negative");
  for (const auto& p : params) p.validate();
  for (const auto& d : drives) d.validate();

  Vec phi(n), phi_dot(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto s = initial.empty() ? rest_state(params[static_cast<std::size_t>(i)])
                                   : initial[static_cast<std::size_t>(i)];
    phi[i] = s.phi;
    phi_dot[i] = s.phi_dot;
  }

  const auto steps = static_cast<long>(std::llround(static_cast<double>(opts.t_end / opts.dt)));
  const long samples = steps / opts.stride + 1;

  SimResult<Scalar> result;
  result.times.resize(samples);
  result.phi.resize(samples, n);
  result.phi_dot.resize(samples, n);
  result.times[0] = Scalar(0);
  result.phi.row(0) = phi.matrix().transpose();
  result.phi_dot.row(0) = phi_dot.matrix().transpose();

  detail::NetworkRhs<Scalar> rhs(params, coupling, drives);
  const Scalar dt = opts.dt;
  const Scalar half = Scalar(0.5) * dt;
  const bool delayed = opts.synaptic_delay > 0;

  // Step-boundary history of phi', only kept for the fixed-delay hook.
  std::vector<Vec> history;
  if (delayed) {
    history.reserve(static_cast<std::size_t>(steps) + 1);
    history.push_back(phi_dot);
  }
  auto delayed_rate = [&](Scalar t) -> Vec {
    const Scalar tau = t - opts.synaptic_delay;
    if (tau <= 0) return history.front();
    const Scalar pos = tau / dt;
    auto lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= history.size()) return history.back();
    const Scalar frac = pos - static_cast<Scalar>(lo);
    return (Scalar(1) - frac) * history[lo] + frac * history[lo + 1];
  };

  Vec a1(n), a2(n), a3(n), a4(n);
  Vec p2(n), v2(n), p3(n), v3(n), p4(n), v4(n);
  for (long s = 0; s < steps; ++s) {
    const Scalar t = static_cast<Scalar>(s) * dt;
    if (delayed) {
      rhs(phi, phi_dot, delayed_rate(t), t, a1);
    } else {
      rhs(phi, phi_dot, phi_dot, t, a1);
    }
    p2 = phi + half * phi_dot;
    v2 = phi_dot + half * a1;
    if (delayed) {
      rhs(p2, v2, delayed_rate(t + half), t + half, a2);
    } else {
      rhs(p2, v2, v2, t + half, a2);
    }
    p3 = phi + half * v2;
    v3 = phi_dot + half * a2;
    if (delayed) {
      rhs(p3, v3, delayed_rate(t + half), t + half, a3);
    } else {
      rhs(p3, v3, v3, t + half, a3);
    }
    p4 = phi + dt * v3;
    v4 = phi_dot + dt * a3;
    if (delayed) {
      rhs(p4, v4, delayed_rate(t + dt), t + dt, a4);
    } else {
      rhs(p4, v4, v4, t + dt, a4);
    }
    phi += dt / Scalar(6) * (phi_dot + Scalar(2) * v2 + Scalar(2) * v3 + v4);
    phi_dot += dt / Scalar(6) * (a1 + Scalar(2) * a2 + Scalar(2) * a3 + a4);

    if (!phi.isFinite().all() || !phi_dot.isFinite().all()) {
      Eigen::Index bad = 0;
      for (Eigen::Index i = 0; i < n; ++i)
        if (!std::isfinite(static_cast<double>(phi[i])) || !std::isfinite(static_cast<double>(phi_dot[i]))) {
          bad = i;
          break;
        }
      throw NonFiniteError("simulate: neuron " + std::to_string(bad) + " became non-finite at step " +
                           std::to_string(s + 1) + " (t = " + std::to_string(static_cast<double>(t + dt)) +
                           " s); dt is too large for these parameters");
    }
    if (delayed) history.push_back(phi_dot);
    if ((s + 1) % opts.stride == 0) {
      const long row = (s + 1) / opts.stride;
      result.times[row] = static_cast<Scalar>(s + 1) * dt;
      result.phi.row(row) = phi.matrix().transpose();
      result.phi_dot.row(row) = phi_dot.matrix().transpose();
    }
  }

  const double sample_dt = static_cast<double>(dt) * opts.stride;
  result.spikes.resize(static_cast<std::size_t>(n));
  if (samples >= 3) {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v(samples);
    for (Eigen::Index k = 0; k < n; ++k) {
      v = params[static_cast<std::size_t>(k)].beta * result.phi_dot.col(k);
      result.spikes[static_cast<std::size_t>(k)] =
          detect_spikes<Scalar>(std::span<const Scalar>(v.data(), static_cast<std::size_t>(samples)), sample_dt,
                                static_cast<double>(opts.threshold), 0.0, static_cast<std::size_t>(k));
    }
  }
  for (Eigen::Index k = 0; k < n; ++k)
    result.synaptic_op_count +=
        static_cast<long>(result.spikes[static_cast<std::size_t>(k)].size()) * coupling.outgoing_synapses(k);
  return result;
}

template <typename Scalar>
SimResult<Scalar> simulate(const std::vector<NeuronParams<Scalar>>& params, const CouplingMatrix<Scalar>& coupling,
                           const std::vector<DriveWaveform<Scalar>>& drives, const SimOptions<Scalar>& opts) {
  return simulate<Scalar>(std::span<const NeuronParams<Scalar>>(params), coupling,
                          std::span<const DriveWaveform<Scalar>>(drives), opts);
}

/// A neuron model together with the stimulus and detection settings found by
/// calibration. Every neuron in a network built from it shares these values.
template <typename Scalar>
struct CalibratedNeuron {
  NeuronParams<Scalar> params;
  Pulse<Scalar> input_pulse;  // elicits exactly one spike from rest
  Scalar threshold{};         // spike detection threshold, V
  Scalar dt{};
  int stride = 10;

  SimOptions<Scalar> options(Scalar t_end) const { return {dt, t_end, stride, threshold, Scalar(0)}; }
};

using CalibratedNeurond = CalibratedNeuron<double>;

/// Two-neuron chain: neuron 0 is pulsed at t = 0 and drives neuron 1 through `coupling`.
template <typename Scalar>
SimResult<Scalar> simulate_chain(Scalar coupling, const CalibratedNeuron<Scalar>& cal, Scalar horizon) {
  std::vector<NeuronParams<Scalar>> params(2, cal.params);
  CouplingMatrix<Scalar> kappa(2);
  kappa.set(1, 0, coupling);
  std::vector<DriveWaveform<Scalar>> drives{DriveWaveform<Scalar>::single(cal.input_pulse), DriveWaveform<Scalar>{}};
  return simulate(params, kappa, drives, cal.options(horizon));
}

/// Spike-time difference t2 - t1 in the two-neuron chain.
template <typename Scalar>
Scalar latency(Scalar coupling, const CalibratedNeuron<Scalar>& cal, Scalar horizon) {
  const auto r = simulate_chain(coupling, cal, horizon);
  const auto t1 = r.first_spike(0);
  if (!t1) throw NoSpikeError("latency: the driven neuron did not fire");
  const auto t2 = r.first_spike(1);
  if (!t2) throw NoSpikeError("latency: the coupled neuron did not fire");
  return static_cast<Scalar>(*t2 - *t1);
}

}  // namespace afmsnn
