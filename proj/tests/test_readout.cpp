#include "afmsnn/errors.hpp"
#include "afmsnn/readout.hpp"
#include "afmsnn/units.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace afmsnn;

namespace {

const WeakCouplingReport& weak() {
  static const WeakCouplingReport rep = calibrate_weak_coupling(test::neuron(), 5e-12, 0.0);
  return rep;
}

const Eigen::VectorXd kUniform = Eigen::VectorXd::Constant(25, 0.12);

// Readout latency of a uniform-weight channel for `symbol`, relative to the input layer.
double channel_latency(const SymbolGrid& symbol) {
  SpanNetwork span;
  span.neuron = test::neuron();
  span.weight_unit = test::default_config().weight_unit;
  const auto r = respond(span, kUniform, symbol);
  REQUIRE(r.t_output);
  return *r.t_output - *r.input_reference();
}

}  // namespace

TEST_CASE("weak coupling passes coincidences only") {
  const auto& cal = test::neuron();
  const auto& rep = weak();
  CHECK(rep.kappa_weak > 0);
  CHECK(rep.kappa_weak < kKappa0);
  CHECK(coincidence_response(cal, rep.kappa_weak, std::nullopt) == 0);
  CHECK(coincidence_response(cal, rep.kappa_weak, 0.0, false) == 0);
  for (double offset : {-5e-12, -2.5e-12, 0.0, 2.5e-12, 5e-12})
    CHECK(coincidence_response(cal, rep.kappa_weak, offset) == 1);
  CHECK(coincidence_response(cal, rep.kappa_weak, 50e-12) == 0);
  CHECK(coincidence_response(cal, rep.kappa_weak, -50e-12) == 0);
}

TEST_CASE("weak coupling rejects impossible requests") {
  const auto& cal = test::neuron();
  CHECK_THROWS_AS(calibrate_weak_coupling(cal, 5e-12, 10.0), NoFeasibleCoupling);
  CHECK_THROWS_AS(calibrate_weak_coupling(cal, -1e-12), InvalidArgument);
  CHECK_THROWS_AS(calibrate_weak_coupling(cal, 5e-12, -0.1), InvalidArgument);
}

TEST_CASE("clock pulse lands the spike on the requested time") {
  const auto& cal = test::neuron();
  for (double t : {60e-12, 114.8e-12, 203.3e-12}) {
    auto p = cal.input_pulse;
    p.t_start = clock_pulse_start(cal, t);
    std::vector<NeuronParamsd> params{cal.params};
    std::vector<DriveWaveformd> d{DriveWaveformd::single(p)};
    const auto r = simulate(params, CouplingMatrixd(1), d, cal.options(t + 50e-12));
    REQUIRE(r.first_spike(0));
    CHECK(std::abs(*r.first_spike(0) - t) < 0.1e-12);
  }
  CHECK_THROWS_AS(clock_pulse_start(cal, 1e-12), InvalidArgument);
}

TEST_CASE("multi-readout network") {
  const auto& cal = test::neuron();
  const auto& o = builtin_symbol("O");
  const double base = channel_latency(o);

  SUBCASE("one matching channel labels the input") {
    const auto net = build_multispan(cal, {{"O", kUniform}}, weak().kappa_weak, base,
                                     test::default_config().weight_unit);
    CHECK(net.neuron_count() == 28);
    const auto c = classify(net, o);
    REQUIRE(c.label);
    CHECK(*c.label == "O");
    REQUIRE(c.inference_latency());
    CHECK(*c.inference_latency() > base);
  }

  SUBCASE("two channels firing together are ambiguous") {
    const auto net = build_multispan(cal, {{"A", kUniform}, {"B", kUniform}}, weak().kappa_weak, base,
                                     test::default_config().weight_unit);
    CHECK_THROWS_AS(classify(net, o), AmbiguousClassification);
    const auto c = observe(net, o);
    CHECK(c.ambiguous());
    CHECK_FALSE(c.label);
  }

  SUBCASE("a channel far from the clock is blocked") {
    const auto net = build_multispan(cal, {{"O", kUniform}}, weak().kappa_weak, base + 30e-12,
                                     test::default_config().weight_unit);
    const auto c = classify(net, o);
    CHECK(c.span_spikes[0]);
    CHECK_FALSE(c.label);
  }

  SUBCASE("blank input and clock independence") {
    const auto net = build_multispan(cal, {{"O", kUniform}}, weak().kappa_weak, base,
                                     test::default_config().weight_unit);
    SymbolGrid blank;
    const auto c = classify(net, blank);
    CHECK_FALSE(c.label);
    REQUIRE(c.clock_spike);
    for (const auto& s : builtin_symbols()) {
      const auto cs = observe(net, s);
      REQUIRE(cs.clock_spike);
      CHECK(std::abs(*cs.clock_spike - *c.clock_spike) < 1e-12);
    }
  }
}

TEST_CASE("multi-readout validation") {
  MultiSpanNetwork net;
  net.neuron = test::neuron();
  net.kappa_weak = 0.004;
  CHECK_THROWS_AS(net.validate(), InvalidArgument);
  net.spans.push_back({"O", Eigen::VectorXd::Zero(3)});
  CHECK_THROWS_AS(net.validate(), DimensionMismatch);
}
