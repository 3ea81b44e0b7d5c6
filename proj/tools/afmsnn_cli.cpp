// afmsnn: command-line driver for the AFM spiking-network experiments.
//
// Exit codes: 0 success, 2 configuration error, 3 calibration/training failure.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "afmsnn/config.hpp"
#include "afmsnn/errors.hpp"
#include "afmsnn/experiments.hpp"

namespace {

struct CommonFlags {
  std::string config = "config/default.ini";
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string symbol;
  std::optional<int> epochs;
  std::vector<std::string> weights;
  std::string calibration;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "INI configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "Override both the library and the trainer seed");
  cmd->add_option("--out", f.out, "Output directory (overrides AFMSNN_OUT_DIR and the config)");
  cmd->add_option("--symbol", f.symbol, "Symbol to train on / evaluate");
  cmd->add_option("--epochs", f.epochs, "Training epochs")->check(CLI::PositiveNumber);
  cmd->add_option("--weights", f.weights, "Pre-trained weights file(s) to use instead of training")
      ->check(CLI::ExistingFile);
  cmd->add_option("--calibration", f.calibration, "Calibration file to use instead of the search")
      ->check(CLI::ExistingFile);
}

afmsnn::RunConfig resolve(const CommonFlags& f, afmsnn::ExperimentOptions& opts) {
  auto cfg = afmsnn::load_config(f.config);
  if (f.seed) {
    cfg.library.seed = *f.seed;
    cfg.trainer_seed = *f.seed;
  }
  if (!f.symbol.empty()) cfg.library.symbol = f.symbol;
  if (f.epochs) cfg.trainer.epochs = *f.epochs;
  cfg.validate();
  opts.out_dir = afmsnn::resolve_output_dir(cfg, f.out);
  for (const auto& w : f.weights) opts.weight_files.emplace_back(w);
  if (!f.calibration.empty()) opts.calibration_file = f.calibration;
  return cfg;
}

void report(const afmsnn::ExperimentOutput& out) {
  std::cout << out.summary;
  for (const auto& p : out.files) std::cout << "wrote " << p.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Antiferromagnetic spiking neural network simulator"};
  app.require_subcommand(1);
  CommonFlags flags;
  double sweep_lo = 0.8, sweep_hi = 2.0;
  int sweep_points = 10;

  auto* calibrate = app.add_subcommand("calibrate", "Fit the neuron model to the chain latencies and export the latency figure data");
  auto* train = app.add_subcommand("train", "Train one readout on a symbol library");
  auto* eval = app.add_subcommand("eval", "Evaluate a trained readout over its library");
  auto* classify = app.add_subcommand("classify", "Multi-readout classification with clock and coincidence layer");
  auto* sweep = app.add_subcommand("sweep", "Chain latency versus coupling");
  auto* exporter = app.add_subcommand("export", "Write the symbol fixture, library and resolved configuration");
  for (auto* cmd : {calibrate, train, eval, classify, sweep, exporter}) add_common(cmd, flags);
  sweep->add_option("--lo", sweep_lo, "Lowest coupling, in kappa0 units");
  sweep->add_option("--hi", sweep_hi, "Highest coupling, in kappa0 units");
  sweep->add_option("--points", sweep_points, "Number of sweep points")->check(CLI::Range(2, 1000));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    afmsnn::ExperimentOptions opts;
    const auto cfg = resolve(flags, opts);
    if (calibrate->parsed()) report(afmsnn::run_experiment(afmsnn::Experiment::kFig1, cfg, opts));
    else if (train->parsed()) report(afmsnn::run_experiment(afmsnn::Experiment::kTrain, cfg, opts));
    else if (eval->parsed()) report(afmsnn::run_experiment(afmsnn::Experiment::kEval, cfg, opts));
    else if (classify->parsed()) report(afmsnn::run_experiment(afmsnn::Experiment::kMultispan, cfg, opts));
    else if (sweep->parsed()) report(afmsnn::run_sweep(cfg, opts, sweep_lo, sweep_hi, sweep_points));
    else if (exporter->parsed()) report(afmsnn::run_export(cfg, opts));
  } catch (const afmsnn::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const afmsnn::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "fatal: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
