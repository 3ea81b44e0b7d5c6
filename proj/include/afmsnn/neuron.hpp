#pragma once

// Single antiferromagnetic neuron: the in-plane Neel angle phi obeys a driven,
// damped pendulum equation
//
//   phi'' / omega_ex + alpha * phi' + (omega_e / 2) * sin(2 phi) = sigma * I + sum_k kappa_k * phi_k'
//
// and the spin-pumping output voltage is V = beta * phi'.

#include <cmath>
#include <string>

#include "afmsnn/errors.hpp"

namespace afmsnn {

template <typename Scalar>
struct NeuronParams {
  Scalar omega_ex{};  // exchange frequency, rad/s
  Scalar alpha{};     // effective Gilbert damping
  Scalar omega_e{};   // easy-axis anisotropy frequency, rad/s
  Scalar sigma{};     // spin-torque efficiency, rad/s per A
  Scalar beta{};      // spin-pumping efficiency, V*s
  Scalar i_bias{};    // constant bias current, A

  /// Static current above which the neuron rotates continuously.
  Scalar threshold_current() const { return omega_e / (Scalar(2) * sigma); }

  /// sigma * i_bias relative to omega_e / 2.
  Scalar bias_fraction() const { return Scalar(2) * sigma * i_bias / omega_e; }

  void validate() const {
    using std::isfinite;
    if (!(omega_ex > 0) || !(omega_e > 0) || !(alpha > 0) || !(beta > 0) || !(sigma > 0))
      throw InvalidArgument("neuron params: omega_ex, omega_e, alpha, beta and sigma must be positive");
    if (!isfinite(i_bias)) throw InvalidArgument("neuron params: i_bias must be finite");
    if (!(std::abs(bias_fraction()) < Scalar(1)))
      throw InvalidArgument("neuron params: bias current is supercritical (|sigma*i_bias| >= omega_e/2)");
  }
};

template <typename Scalar>
struct NeuronState {
  Scalar phi{};      // rad, unwrapped
  Scalar phi_dot{};  // rad/s

  bool finite() const { return std::isfinite(phi) && std::isfinite(phi_dot); }
};

using NeuronParamsd = NeuronParams<double>;
using NeuronStated = NeuronState<double>;

/// Angular acceleration for the given drive current and summed synaptic input
/// (sum_k kappa_k * phi_k', in rad/s).
template <typename Scalar>
Scalar acceleration(const NeuronState<Scalar>& state, const NeuronParams<Scalar>& params,
                    Scalar i_drive, Scalar coupling_in) {
  using std::sin;
  return params.omega_ex * (params.sigma * (params.i_bias + i_drive) + coupling_in -
                            params.alpha * state.phi_dot -
                            Scalar(0.5) * params.omega_e * sin(Scalar(2) * state.phi));
}

template <typename Scalar>
Scalar voltage(const NeuronState<Scalar>& state, const NeuronParams<Scalar>& params) {
  return params.beta * state.phi_dot;
}

/// Stable equilibrium under the bias current alone.
template <typename Scalar>
NeuronState<Scalar> rest_state(const NeuronParams<Scalar>& params) {
  using std::asin;
  return {Scalar(0.5) * asin(params.bias_fraction()), Scalar(0)};
}

/// One classical RK4 step. `drive_fn(t)` returns the extra drive current and
/// `coupling_fn(t)` the summed synaptic input at time t.
template <typename Scalar, typename DriveFn, typename CouplingFn>
NeuronState<Scalar> step(const NeuronState<Scalar>& state, const NeuronParams<Scalar>& params,
                         DriveFn&& drive_fn, CouplingFn&& coupling_fn, Scalar t, Scalar dt) {
  if (!(dt > 0)) throw InvalidArgument("step: dt must be positive");
  const Scalar half = Scalar(0.5) * dt;
  auto rhs = [&](const NeuronState<Scalar>& s, Scalar ts) {
    return acceleration(s, params, static_cast<Scalar>(drive_fn(ts)),
                        static_cast<Scalar>(coupling_fn(ts)));
  };

  const Scalar a1 = rhs(state, t);
  const NeuronState<Scalar> s2{state.phi + half * state.phi_dot, state.phi_dot + half * a1};
  const Scalar a2 = rhs(s2, t + half);
  const NeuronState<Scalar> s3{state.phi + half * s2.phi_dot, state.phi_dot + half * a2};
  const Scalar a3 = rhs(s3, t + half);
  const NeuronState<Scalar> s4{state.phi + dt * s3.phi_dot, state.phi_dot + dt * a3};
  const Scalar a4 = rhs(s4, t + dt);

  NeuronState<Scalar> next{
      state.phi + dt / Scalar(6) * (state.phi_dot + Scalar(2) * s2.phi_dot + Scalar(2) * s3.phi_dot + s4.phi_dot),
      state.phi_dot + dt / Scalar(6) * (a1 + Scalar(2) * a2 + Scalar(2) * a3 + a4)};
  if (!next.finite())
    throw NonFiniteError("step: state became non-finite at t = " + std::to_string(static_cast<double>(t)) +
                         " s (dt too large?)");
  return next;
}

}  // namespace afmsnn
