#include "afmsnn/experiments.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>
#include <random>

#include "afmsnn/errors.hpp"
#include "afmsnn/io.hpp"
#include "afmsnn/units.hpp"
#include "json.hpp"

namespace afmsnn {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double ps_or_nan(const std::optional<double>& t) { return t ? to_ps(*t) : kNaN; }

std::string ps_text(const std::optional<double>& t) { return t ? fmt::format("{:.2f} ps", to_ps(*t)) : "none"; }

struct Writer {
  std::filesystem::path dir;
  ExperimentOutput out;

  void operator()(const std::string& name, const std::string& content) {
    const auto path = dir / name;
    write_atomic(path, content);
    out.files.push_back(path);
  }
};

/// `flips` pixels of `symbol` flipped at distinct random positions; only white
/// pixels are eligible in additional-only mode.
SymbolGrid corrupt(const SymbolGrid& symbol, int flips, VariantMode mode, std::uint64_t seed) {
  std::vector<int> pool;
  for (int k = 0; k < kGridCells; ++k)
    if (mode == VariantMode::kMixed || !symbol.pixels[static_cast<std::size_t>(k)]) pool.push_back(k);
  if (static_cast<int>(pool.size()) < flips) throw UnsatisfiableError("corrupt: not enough pixels to flip");
  std::mt19937_64 rng(seed);
  std::shuffle(pool.begin(), pool.end(), rng);
  SymbolGrid g = symbol;
  for (int j = 0; j < flips; ++j) {
    auto px = g.pixels[static_cast<std::size_t>(pool[static_cast<std::size_t>(j)])];
    g.pixels[static_cast<std::size_t>(pool[static_cast<std::size_t>(j)])] = !px;
  }
  g.label = symbol.label + fmt::format("~{}flip", flips);
  return g;
}

TimingSummary training_timing(const RunConfig& cfg) {
  TimingSummary t;
  t.training_simulated_time = cfg.trainer.epochs * cfg.library.size * cfg.span_horizon;
  t.convention = fmt::format("training time = epochs ({}) x library size ({}) x per-symbol horizon ({:.0f} ps); "
                             "inference latency = output-neuron spike minus mean input-layer spike",
                             cfg.trainer.epochs, cfg.library.size, to_ps(cfg.span_horizon));
  return t;
}

std::string fig1_summary(const CalibrationReport& r) {
  std::string s = fmt::format(
      "calibration: alpha = {:.6g}, f_e = {:.6g} GHz, threshold = {:.4g} V (peak {:.4g} V, FWHM {:.2f} ps)\n"
      "latency at kappa0 = {:.2f} ps, at 1.5 kappa0 = {:.2f} ps; cutoff = {:.4f} kappa0\n",
      r.alpha, r.f_e_hz / 1e9, r.neuron.threshold, r.peak_voltage, to_ps(r.spike_width), to_ps(r.latency_k0),
      to_ps(r.latency_k15), r.kappa_cutoff / kKappa0);
  for (const auto& p : r.sweep) s += fmt::format("  kappa = {:.4f} kappa0 -> {}\n", p.kappa / kKappa0, ps_text(p.latency));
  return s;
}

std::string sweep_table(const std::vector<LatencyPoint>& sweep) {
  std::vector<std::vector<double>> rows;
  for (const auto& p : sweep) rows.push_back({p.kappa, p.kappa / kKappa0, ps_or_nan(p.latency)});
  return format_table({"kappa", "kappa_over_kappa0", "latency_ps"}, rows);
}

std::vector<TrainedSpan> obtain_spans(const RunConfig& cfg, const CalibratedNeurond& cal,
                                      const ExperimentOptions& options, const std::vector<std::string>& labels) {
  std::vector<TrainedSpan> spans;
  std::map<std::string, SpanChannel> loaded;
  for (const auto& f : options.weight_files) {
    auto ch = weights_from_json(read_file(f));
    loaded[ch.label] = ch;
  }
  for (const auto& label : labels) {
    if (const auto it = loaded.find(label); it != loaded.end()) {
      TrainedSpan t;
      t.label = label;
      t.library = library_for(cfg, label);
      t.result.weights = it->second.weights;
      spans.push_back(std::move(t));
    } else {
      spans.push_back(train_symbol(cfg, cal, label));
    }
  }
  return spans;
}

ExperimentOutput run_fig1(const RunConfig& cfg, const ExperimentOptions& options) {
  Writer w{options.out_dir, {}};
  std::optional<CalibrationReport> rep;
  obtain_calibration(cfg, options, &rep);
  if (!rep) {
    // Loaded from a file: rebuild the latency figures from the stored neuron.
    CalibrationReport r;
    r.neuron = calibrated_neuron_from_json(read_file(*options.calibration_file));
    r.alpha = r.neuron.params.alpha;
    r.f_e_hz = r.neuron.params.omega_e / (2.0 * kPi);
    r.latency_k0 = latency(kKappa0, r.neuron, cfg.calibration.chain_horizon);
    r.latency_k15 = latency(1.5 * kKappa0, r.neuron, cfg.calibration.chain_horizon);
    const auto shape = spike_shape(r.neuron);
    r.peak_voltage = shape.peak_voltage;
    r.spike_width = shape.width;
    r.single_spike_time = shape.t_spike - r.neuron.input_pulse.t_start;
    r.kappa_cutoff = find_cutoff(r.neuron, cfg.calibration.cutoff_horizon);
    r.sweep = latency_sweep(r.neuron, r.kappa_cutoff, 2.0 * kKappa0, cfg.calibration.sweep_points,
                            cfg.calibration.cutoff_horizon);
    rep = r;
  }
  w("calibration.json", calibration_json(*rep));
  w("fig1_chain_k0.tsv", trace_table(simulate_chain(kKappa0, rep->neuron, 200e-12), rep->neuron.params));
  w("fig1_chain_k15.tsv", trace_table(simulate_chain(1.5 * kKappa0, rep->neuron, 200e-12), rep->neuron.params));
  w("latency_sweep.tsv", sweep_table(rep->sweep));
  w.out.summary = fig1_summary(*rep);
  return w.out;
}

ExperimentOutput run_train(const RunConfig& cfg, const ExperimentOptions& options) {
  Writer w{options.out_dir, {}};
  const auto cal = obtain_calibration(cfg, options);
  const auto trained = train_symbol(cfg, cal, cfg.library.symbol);
  const auto net = span_network(cfg, cal);
  const auto& rec = trained.result.record;

  w("library.json", serialize_library(trained.library));
  w("training_record.tsv", training_record_table(rec));
  w("weight_map.tsv", weight_map_table(rec));
  w("weights.json", weights_json(trained.label, trained.result.weights, rec.seed, format_config(cfg)));

  const auto rows = evaluate_library(net, trained.result.weights, trained.library, cfg.trainer);
  w("eval_table.tsv", eval_table(rows));

  const auto sim = simulate_symbol(net, trained.result.weights, trained.library.correct);
  int first_input = 0;
  while (!trained.library.correct.pixels[static_cast<std::size_t>(first_input)]) ++first_input;
  w("fig3_traces.tsv", trace_table(sim, cal.params, {first_input, SpanNetwork::kReadout}));

  auto timing = training_timing(cfg);
  timing.readout_latency = rows.front().evaluation.latency;
  const auto energy = energy_report(rec.total_synaptic_ops(), timing.training_simulated_time, cfg.energy_per_op);
  w("energy.json", energy_json(energy));
  w("timing.json", timing_json(timing));

  const auto first = rec.first_epoch_within(to_ps(cfg.trainer.window));
  int out_of_window = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) out_of_window += rows[i].evaluation.verdict != Verdict::kInWindow;
  w.out.summary = fmt::format(
      "trained '{}' for {} epochs: final error {:+.2f} ps, |error| < {:.0f} ps first at epoch {}\n"
      "correct symbol: {} (latency {}); {} of {} variants rejected\n"
      "energy: {} synaptic ops x {:.3g} pJ = {:.4g} pJ; training simulated time {:.1f} ns\n",
      trained.label, cfg.trainer.epochs, rec.epochs.back().error_ps, to_ps(cfg.trainer.window),
      first ? std::to_string(*first) : "never", to_string(rows.front().evaluation.verdict),
      ps_text(rows.front().evaluation.latency), out_of_window, rows.size() - 1, energy.synaptic_op_count,
      energy.energy_per_op / kPicojoule, energy.total_energy / kPicojoule, timing.training_simulated_time / kNanosecond);
  return w.out;
}

ExperimentOutput run_eval(const RunConfig& cfg, const ExperimentOptions& options) {
  Writer w{options.out_dir, {}};
  const auto cal = obtain_calibration(cfg, options);
  const auto spans = obtain_spans(cfg, cal, options, {cfg.library.symbol});
  const auto& span = spans.front();
  const auto net = span_network(cfg, cal);
  const auto rows = evaluate_library(net, span.result.weights, span.library, cfg.trainer);
  const auto probes = missing_pixel_probes(net, span.result.weights, span.library, cfg.trainer);
  w("eval_table.tsv", eval_table(rows));
  w("missing_pixel_probes.tsv", eval_table(probes));

  std::string s = fmt::format("evaluation of '{}' over {} library entries:\n", span.label, rows.size());
  for (const auto& r : rows)
    s += fmt::format("  {:<8} hamming {}  training target {:6.1f} ps  latency {:>10}  {}\n", r.label, r.hamming,
                     to_ps(r.training_target), ps_text(r.evaluation.latency), to_string(r.evaluation.verdict));
  w.out.summary = s;
  return w.out;
}

ExperimentOutput run_multispan(const RunConfig& cfg, const ExperimentOptions& options) {
  Writer w{options.out_dir, {}};
  const auto cal = obtain_calibration(cfg, options);
  const auto spans = obtain_spans(cfg, cal, options, cfg.readout.symbols);
  const auto weak = calibrate_weak_coupling(cal, cfg.readout.coincidence_tolerance, cfg.readout.margin);

  std::vector<SpanChannel> channels;
  for (const auto& s : spans) {
    channels.push_back({s.label, s.result.weights});
    w(fmt::format("weights_{}.json", s.label), weights_json(s.label, s.result.weights, cfg.trainer_seed, format_config(cfg)));
  }
  const auto net = build_multispan(cal, channels, weak.kappa_weak, cfg.library.base_time, cfg.weight_unit,
                                   cfg.readout.horizon);
  w("network.json", network_json(net));

  std::vector<SymbolGrid> probes;
  for (const auto& s : cfg.readout.symbols) probes.push_back(builtin_symbol(s));
  for (const auto& s : cfg.readout.symbols)
    probes.push_back(corrupt(builtin_symbol(s), cfg.library.max_flips, cfg.library.mode, cfg.library.seed));
  SymbolGrid blank;
  blank.label = "blank";
  probes.push_back(blank);

  std::string table = "input\texpected\tresult\tclock_ps\tinference_latency_ps";
  for (const auto& s : spans) table += fmt::format("\tspan_{0}_ps\toutput_{0}_ps", s.label);
  table += '\n';
  std::string summary = fmt::format("kappa_weak = {:.4f} kappa0 (coincidence threshold {:.4f} kappa0 + {:.0f}% margin)\n",
                                    weak.kappa_weak / kKappa0, weak.kappa_min / kKappa0, 100 * weak.margin);
  TimingSummary timing = training_timing(cfg);
  timing.training_simulated_time *= static_cast<double>(spans.size());
  long ops = 0;
  for (const auto& s : spans) ops += s.result.record.total_synaptic_ops();

  for (std::size_t i = 0; i < probes.size(); ++i) {
    const auto& sym = probes[i];
    const bool trained_symbol = i < cfg.readout.symbols.size();
    const std::string expected = trained_symbol ? sym.label : "none";
    const auto c = observe(net, sym);
    const std::string result = c.ambiguous() ? "ambiguous" : c.label.value_or("none");
    ops += c.synaptic_ops;
    if (trained_symbol && sym.label == cfg.library.symbol) timing.inference_latency = c.inference_latency();
    table += fmt::format("{}\t{}\t{}\t{:.10g}\t{:.10g}", sym.label, expected, result, ps_or_nan(c.clock_spike),
                         ps_or_nan(c.inference_latency()));
    for (std::size_t k = 0; k < spans.size(); ++k)
      table += fmt::format("\t{:.10g}\t{:.10g}", k < c.span_spikes.size() ? ps_or_nan(c.span_spikes[k]) : kNaN,
                           k < c.output_spikes.size() ? ps_or_nan(c.output_spikes[k]) : kNaN);
    table += '\n';
    summary += fmt::format("  input {:<8} -> {:<9} (expected {}, inference latency {})\n", sym.label, result, expected,
                           ps_text(c.inference_latency()));
    if (trained_symbol) {
      std::vector<int> cols;
      for (std::size_t k = 0; k < spans.size(); ++k) cols.push_back(net.span_index(k));
      cols.push_back(net.clock_index());
      for (std::size_t k = 0; k < spans.size(); ++k) cols.push_back(net.output_index(k));
      w(fmt::format("fig8_traces_{}.tsv", sym.label), trace_table(simulate_multispan(net, sym), cal.params, cols));
    }
  }
  if (!timing.inference_latency) {
    // Fall back to the first trained symbol that produced an output.
    for (const auto& s : cfg.readout.symbols) {
      if (auto l = observe(net, builtin_symbol(s)).inference_latency()) {
        timing.inference_latency = l;
        break;
      }
    }
  }
  w("classification.tsv", table);
  w("energy.json", energy_json(energy_report(ops, timing.training_simulated_time, cfg.energy_per_op)));
  w("timing.json", timing_json(timing));
  w.out.summary = summary;
  return w.out;
}

}  // namespace

Experiment parse_experiment(std::string_view name) {
  if (name == "fig1") return Experiment::kFig1;
  if (name == "train") return Experiment::kTrain;
  if (name == "eval") return Experiment::kEval;
  if (name == "multispan") return Experiment::kMultispan;
  throw InvalidArgument("unknown experiment '" + std::string(name) + "' (fig1, train, eval, multispan)");
}

const char* to_string(Experiment e) {
  switch (e) {
    case Experiment::kFig1: return "fig1";
    case Experiment::kTrain: return "train";
    case Experiment::kEval: return "eval";
    case Experiment::kMultispan: return "multispan";
  }
  return "?";
}

SpanNetwork span_network(const RunConfig& cfg, const CalibratedNeurond& cal) {
  SpanNetwork net;
  net.neuron = cal;
  net.weight_unit = cfg.weight_unit;
  net.horizon = cfg.span_horizon;
  net.validate();
  return net;
}

TrainingLibrary library_for(const RunConfig& cfg, const std::string& label) {
  const auto& l = cfg.library;
  return make_library(builtin_symbol(label), l.size, l.max_flips, l.seed, l.mode, l.base_time, l.shift_per_pixel);
}

TrainedSpan train_symbol(const RunConfig& cfg, const CalibratedNeurond& cal, const std::string& label) {
  TrainedSpan t;
  t.label = label;
  t.library = library_for(cfg, label);
  t.result = train(span_network(cfg, cal), t.library, cfg.trainer, cfg.trainer_seed);
  return t;
}

std::vector<EvalRow> evaluate_library(const SpanNetwork& net, const Eigen::VectorXd& weights,
                                      const TrainingLibrary& library, const TrainerConfig& cfg) {
  std::vector<EvalRow> rows;
  for (const auto& e : library.entries)
    rows.push_back({e.grid.label, hamming(e.grid, library.correct), added_pixels(e.grid, library.correct),
                    missing_pixels(e.grid, library.correct), e.t_target,
                    evaluate(net, weights, e.grid, library.base_time, cfg.window, cfg.t_input)});
  return rows;
}

std::vector<EvalRow> missing_pixel_probes(const SpanNetwork& net, const Eigen::VectorXd& weights,
                                          const TrainingLibrary& library, const TrainerConfig& cfg) {
  std::vector<EvalRow> rows;
  for (int k = 0; k < kGridCells; ++k) {
    if (!library.correct.pixels[static_cast<std::size_t>(k)]) continue;
    SymbolGrid g = library.correct;
    g.pixels[static_cast<std::size_t>(k)] = false;
    g.label = library.correct.label + fmt::format("-r{}c{}", k / kGridSide, k % kGridSide);
    rows.push_back({g.label, 1, 0, 1, target_time(g, library),
                    evaluate(net, weights, g, library.base_time, cfg.window, cfg.t_input)});
  }
  return rows;
}

std::string eval_table(const std::vector<EvalRow>& rows) {
  std::string out = "label\thamming\tadded\tmissing\ttraining_target_ps\twindow_center_ps\tlatency_ps\tverdict\n";
  for (const auto& r : rows)
    out += fmt::format("{}\t{}\t{}\t{}\t{:.10g}\t{:.10g}\t{:.10g}\t{}\n", r.label, r.hamming, r.added, r.missing,
                       to_ps(r.training_target), to_ps(r.evaluation.t_target), ps_or_nan(r.evaluation.latency),
                       to_string(r.evaluation.verdict));
  return out;
}

std::string timing_json(const TimingSummary& t) {
  nlohmann::ordered_json j;
  j["inference_latency_ps"] = t.inference_latency ? nlohmann::ordered_json(to_ps(*t.inference_latency)) : nullptr;
  j["readout_latency_ps"] = t.readout_latency ? nlohmann::ordered_json(to_ps(*t.readout_latency)) : nullptr;
  j["training_simulated_time_ns"] = t.training_simulated_time / kNanosecond;
  j["reference_training_time_ns"] = t.reference_training_time / kNanosecond;
  j["training_time_ratio"] = t.training_simulated_time / t.reference_training_time;
  j["convention"] = t.convention;
  return j.dump(2) + "\n";
}

CalibratedNeurond obtain_calibration(const RunConfig& cfg, const ExperimentOptions& options,
                                     std::optional<CalibrationReport>* report) {
  if (options.calibration_file) return calibrated_neuron_from_json(read_file(*options.calibration_file));
  auto rep = calibrate(cfg.calibration);
  if (report) *report = rep;
  return rep.neuron;
}

ExperimentOutput run_experiment(Experiment which, const RunConfig& cfg, const ExperimentOptions& options) {
  cfg.validate();
  switch (which) {
    case Experiment::kFig1: return run_fig1(cfg, options);
    case Experiment::kTrain: return run_train(cfg, options);
    case Experiment::kEval: return run_eval(cfg, options);
    case Experiment::kMultispan: return run_multispan(cfg, options);
  }
  throw InvalidArgument("run_experiment: unknown experiment");
}

ExperimentOutput run_sweep(const RunConfig& cfg, const ExperimentOptions& options, double lo_k0, double hi_k0,
                           int points) {
  cfg.validate();
  if (!(lo_k0 > 0) || !(hi_k0 > lo_k0)) throw ConfigError("sweep: need 0 < lo < hi");
  Writer w{options.out_dir, {}};
  const auto cal = obtain_calibration(cfg, options);
  const auto sweep = latency_sweep(cal, lo_k0 * kKappa0, hi_k0 * kKappa0, points, cfg.calibration.cutoff_horizon);
  w("latency_sweep.tsv", sweep_table(sweep));
  std::string s;
  for (const auto& p : sweep) s += fmt::format("kappa = {:.4f} kappa0 -> {}\n", p.kappa / kKappa0, ps_text(p.latency));
  w.out.summary = s;
  return w.out;
}

ExperimentOutput run_export(const RunConfig& cfg, const ExperimentOptions& options) {
  cfg.validate();
  Writer w{options.out_dir, {}};
  w("symbols.txt", format_symbol_fixture(builtin_symbols()));
  w("library.json", serialize_library(library_for(cfg, cfg.library.symbol)));
  w("config.ini", format_config(cfg));
  w.out.summary = fmt::format("exported symbols, the '{}' library and the resolved configuration\n", cfg.library.symbol);
  return w.out;
}

}  // namespace afmsnn
