#include <cmath>

#include "afmsnn/errors.hpp"
#include "afmsnn/span.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace afmsnn;

namespace {

// Independent transcription of the weight-update kernel.
double oracle_delta(double t_i, double t_d, double t_a, double lambda, double tau) {
  const double e = std::exp(1.0);
  const double ud = (t_d - t_i) / tau;
  const double ua = (t_a - t_i) / tau;
  return lambda * (e / 2) * (e / 2) * ((ud + 1) * std::exp(-ud) - (ua + 1) * std::exp(-ua));
}

SpanNetwork test_network() {
  SpanNetwork net;
  net.neuron = test::neuron();
  net.weight_unit = test::default_config().weight_unit;
  return net;
}

}  // namespace

TEST_CASE("weight update kernel") {
  TrainerConfig cfg;
  CHECK(delta_weight(0.0, 100e-12, 100e-12, cfg) == 0.0);
  CHECK(delta_weight(5e-12, 37e-12, 37e-12, cfg) == 0.0);
  CHECK(delta_weight(0.0, 100e-12, 150e-12, cfg) ==
        doctest::Approx(oracle_delta(0.0, 100e-12, 150e-12, cfg.learning_rate, cfg.tau)).epsilon(1e-14));
  CHECK(delta_weight(0.0, 100e-12, 150e-12, cfg) > 0);  // late spike strengthens
  CHECK(delta_weight(0.0, 100e-12, 60e-12, cfg) < 0);   // early spike weakens
}

TEST_CASE("update sign follows the timing error on a grid") {
  TrainerConfig cfg;
  const double t_i = 10e-12;
  for (int a = 0; a < 10; ++a)
    for (int d = 0; d < 10; ++d) {
      const double t_a = t_i + 5e-12 + 30e-12 * a;
      const double t_d = t_i + 5e-12 + 30e-12 * d + 1e-12;
      const double dw = delta_weight(t_i, t_d, t_a, cfg);
      CHECK((dw > 0) == (t_a > t_d));
      CHECK(dw != 0.0);
    }
}

TEST_CASE("trainer configuration validation") {
  TrainerConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.tau = 0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.epochs = 0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.init_max = -1;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
}

TEST_CASE("blank input gives no readout spike") {
  const auto net = test_network();
  SymbolGrid blank;
  const auto r = respond(net, Eigen::VectorXd::Constant(25, 0.5), blank);
  CHECK_FALSE(r.t_output);
  CHECK_FALSE(r.input_reference());
  CHECK(r.synaptic_ops == 0);
  const auto ev = evaluate(net, Eigen::VectorXd::Constant(25, 0.5), blank, 100e-12, 10e-12);
  CHECK(ev.verdict == Verdict::kNoSpike);
}

TEST_CASE("epoch update equals the brute-force average") {
  const auto net = test_network();
  const auto& cfg = test::default_config();
  const auto lib = make_library(builtin_symbol("O"), 4, 2, 11, VariantMode::kAdditionalOnly);
  const Eigen::VectorXd w = initial_weights(cfg.trainer, 3) * 3.0;
  const auto step = train_epoch(net, lib, w, cfg.trainer);

  Eigen::VectorXd expected = Eigen::VectorXd::Zero(25);
  for (std::size_t s = 0; s < lib.size(); ++s) {
    const auto& r = step.responses[s];
    const auto& grid = lib.entries[s].grid;
    const double t_a = r.t_output.value_or(net.horizon);
    const double t_d = *r.input_reference() + lib.entries[s].t_target;
    for (int k = 0; k < 25; ++k)
      if (grid.pixels[static_cast<std::size_t>(k)] && r.t_inputs[static_cast<std::size_t>(k)])
        expected[k] += oracle_delta(*r.t_inputs[static_cast<std::size_t>(k)], t_d, t_a, cfg.trainer.learning_rate,
                                    cfg.trainer.tau);
  }
  expected /= static_cast<double>(lib.size());
  for (int k = 0; k < 25; ++k) {
    if (expected[k] == 0.0) {
      CHECK(step.mean_update[k] == 0.0);
    } else {
      CHECK(std::abs(step.mean_update[k] - expected[k]) <= 1e-12 * std::abs(expected[k]));
    }
  }
  CHECK((step.weights - (w + expected).cwiseMax(0.0)).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("white pixels receive no update") {
  const auto net = test_network();
  const auto& cfg = test::default_config();
  const auto& o = builtin_symbol("O");
  const auto r = respond(net, Eigen::VectorXd::Constant(25, 0.1), o);
  const auto dw = symbol_update(r, o, 100e-12, net, cfg.trainer);
  for (int k = 0; k < 25; ++k)
    if (!o.pixels[static_cast<std::size_t>(k)]) CHECK(dw[k] == 0.0);
}

TEST_CASE("weights are clamped at zero") {
  const auto net = test_network();
  auto cfg = test::default_config().trainer;
  cfg.learning_rate = 50.0;  // overshoot on purpose
  const auto lib = make_library(builtin_symbol("O"), 2, 1, 1, VariantMode::kAdditionalOnly);
  // Strong weights make the readout fire far too early: the update is large and negative.
  const auto step = train_epoch(net, lib, Eigen::VectorXd::Constant(25, 0.4), cfg);
  CHECK(step.weights.minCoeff() == 0.0);
  CHECK((step.weights.array() >= 0.0).all());
  CHECK_THROWS_AS(train_epoch(net, lib, Eigen::VectorXd::Constant(25, -0.1), cfg), InvalidArgument);
}

TEST_CASE("training is deterministic") {
  const auto net = test_network();
  auto cfg = test::default_config().trainer;
  cfg.epochs = 2;
  const auto lib = make_library(builtin_symbol("X"), 3, 1, 2, VariantMode::kAdditionalOnly);
  const auto a = train(net, lib, cfg, 99);
  const auto b = train(net, lib, cfg, 99);
  CHECK(a.weights == b.weights);
  REQUIRE(a.record.epochs.size() == 2);
  CHECK(a.record.epochs[1].error_ps == b.record.epochs[1].error_ps);
  CHECK(a.record.total_synaptic_ops() == a.record.epochs[0].synaptic_ops + a.record.epochs[1].synaptic_ops);
}

TEST_CASE("initial weights lie in the configured range") {
  TrainerConfig cfg;
  const auto w = initial_weights(cfg, 5);
  CHECK(w.minCoeff() >= 0.0);
  CHECK(w.maxCoeff() <= cfg.init_max);
  CHECK(w == initial_weights(cfg, 5));
  CHECK(w != initial_weights(cfg, 6));
}
