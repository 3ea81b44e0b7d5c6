#include <cmath>
#include <numbers>

#include "afmsnn/network.hpp"
#include "afmsnn/neuron.hpp"
#include "afmsnn/units.hpp"
#include "doctest.h"

using namespace afmsnn;

namespace {

NeuronParamsd params(double bias_fraction = 0.0) {
  NeuronParamsd p;
  p.omega_ex = angular(27.5e12);
  p.alpha = 0.56;
  p.omega_e = angular(32e9);
  p.sigma = 1e14;
  p.beta = 0.11e-15;
  p.i_bias = bias_fraction * p.threshold_current();
  return p;
}

// Integrates one neuron under a constant extra current for `t_end`.
NeuronStated run_constant(const NeuronParamsd& p, NeuronStated s, double current, double t_end, double dt = 0.01e-12,
                          double* max_phi_dot = nullptr) {
  const long steps = std::lround(t_end / dt);
  auto drive = [&](double) { return current; };
  auto none = [](double) { return 0.0; };
  for (long i = 0; i < steps; ++i) {
    s = step(s, p, drive, none, i * dt, dt);
    if (max_phi_dot) *max_phi_dot = std::max(*max_phi_dot, s.phi_dot);
  }
  return s;
}

}  // namespace

TEST_CASE("acceleration matches the pendulum equation") {
  auto p = params();
  CHECK(acceleration(NeuronStated{0.0, 0.0}, p, 0.0, 0.0) == 0.0);

  // Total drive exactly balancing the anisotropy at phi = pi/4.
  const double i_balance = p.threshold_current();
  CHECK(acceleration(NeuronStated{std::numbers::pi / 4, 0.0}, p, i_balance, 0.0) ==
        doctest::Approx(0.0).epsilon(1e-12).scale(p.omega_ex * p.omega_e));

  // Independent scalar evaluation of the right-hand side.
  p.i_bias = 0.3 * p.threshold_current();
  const double phi = 0.7, phi_dot = 2.5e11, i_drive = 0.2 * p.threshold_current(), coupling = 1.3e9;
  const double expected =
      p.omega_ex * (p.sigma * (p.i_bias + i_drive) + coupling - p.alpha * phi_dot - 0.5 * p.omega_e * std::sin(2 * phi));
  CHECK(acceleration(NeuronStated{phi, phi_dot}, p, i_drive, coupling) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("voltage is beta times the angular velocity") {
  const auto p = params();
  CHECK(voltage(NeuronStated{1.0, 0.0}, p) == 0.0);
  CHECK(voltage(NeuronStated{0.0, 1e12}, p) == doctest::Approx(1.1e-4).epsilon(1e-12));
}

TEST_CASE("parameter validation") {
  auto p = params();
  CHECK_NOTHROW(p.validate());
  p.alpha = 0.0;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
  p = params(1.0);
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
  p = params();
  p.beta = -1.0;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
}

TEST_CASE("rest is a fixed point of the integrator") {
  const auto p = params();
  NeuronStated s{0.0, 0.0};
  for (int i = 0; i < 1000; ++i) {
    const auto next = step(s, p, [](double) { return 0.0; }, [](double) { return 0.0; }, i * 0.01e-12, 0.01e-12);
    CHECK(std::abs(next.phi - s.phi) < 1e-12);
    s = next;
  }
  CHECK(s.phi_dot == 0.0);
}

TEST_CASE("subcritical constant drive settles on the analytic equilibrium") {
  const auto p = params();
  const auto s = run_constant(p, NeuronStated{0.0, 0.0}, 0.4 * p.threshold_current(), 1000e-12);
  CHECK(std::abs(s.phi - 0.5 * std::asin(0.4)) < 1e-3);
  CHECK(rest_state(params(0.4)).phi == doctest::Approx(0.5 * std::asin(0.4)));
}

TEST_CASE("static rotation threshold lies between 0.9x and 1.5x") {
  const auto p = params();
  const auto below = run_constant(p, NeuronStated{0.0, 0.0}, 0.9 * p.threshold_current(), 500e-12);
  CHECK(std::abs(below.phi) < std::numbers::pi / 2);
  const auto above = run_constant(p, NeuronStated{0.0, 0.0}, 1.5 * p.threshold_current(), 500e-12);
  CHECK(above.phi >= 3 * std::numbers::pi);  // at least three half-turns
}

TEST_CASE("a suprathreshold pulse produces one half-turn") {
  const auto p = params(0.999);
  const auto rest = rest_state(p);
  const double pulse = (1.2 - 0.999) * p.threshold_current();
  auto s = run_constant(p, rest, pulse, 10e-12);
  double peak = 0.0;
  s = run_constant(p, s, 0.0, 200e-12, 0.01e-12, &peak);
  CHECK(s.phi - rest.phi == doctest::Approx(std::numbers::pi).epsilon(1e-3));
  CHECK(std::abs(s.phi_dot) < 1e-3 * peak);  // back at rest
  // A picosecond-scale pulse of tens of microvolts.
  CHECK(voltage(NeuronStated{0.0, peak}, p) > 1e-5);
  CHECK(voltage(NeuronStated{0.0, peak}, p) < 1e-3);
}

TEST_CASE("step rejects bad time steps and non-finite states") {
  const auto p = params();
  auto zero = [](double) { return 0.0; };
  CHECK_THROWS_AS(step(NeuronStated{0.0, 0.0}, p, zero, zero, 0.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(step(NeuronStated{0.0, std::nan("")}, p, zero, zero, 0.0, 1e-14), NonFiniteError);
  CHECK(NeuronStated{0.0, 1.0}.finite());
  CHECK_FALSE(NeuronStated{INFINITY, 1.0}.finite());
}

TEST_CASE("step is deterministic") {
  const auto p = params(0.5);
  auto drive = [](double t) { return t > 1e-12 ? 1e-4 : 0.0; };
  auto none = [](double) { return 0.0; };
  NeuronStated a{0.1, 0.0}, b{0.1, 0.0};
  for (int i = 0; i < 500; ++i) {
    a = step(a, p, drive, none, i * 1e-14, 1e-14);
    b = step(b, p, drive, none, i * 1e-14, 1e-14);
  }
  CHECK(a.phi == b.phi);
  CHECK(a.phi_dot == b.phi_dot);
}
