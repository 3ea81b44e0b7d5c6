#include "afmsnn/io.hpp"

#include <fmt/format.h>

#include <fstream>
#include <sstream>

#include "afmsnn/errors.hpp"
#include "afmsnn/units.hpp"
#include "json.hpp"

namespace afmsnn {

using nlohmann::ordered_json;

namespace {

ordered_json neuron_json(const CalibratedNeurond& cal) {
  const auto& p = cal.params;
  ordered_json j;
  j["omega_ex_rad_per_s"] = p.omega_ex;
  j["alpha"] = p.alpha;
  j["omega_e_rad_per_s"] = p.omega_e;
  j["sigma_rad_per_s_per_a"] = p.sigma;
  j["beta_v_s"] = p.beta;
  j["i_bias_a"] = p.i_bias;
  j["pulse_start_ps"] = to_ps(cal.input_pulse.t_start);
  j["pulse_duration_ps"] = to_ps(cal.input_pulse.duration);
  j["pulse_amplitude_a"] = cal.input_pulse.amplitude;
  j["threshold_v"] = cal.threshold;
  j["dt_ps"] = to_ps(cal.dt);
  j["stride"] = cal.stride;
  return j;
}

CalibratedNeurond neuron_from(const ordered_json& j) {
  CalibratedNeurond cal;
  auto& p = cal.params;
  p.omega_ex = j.at("omega_ex_rad_per_s").get<double>();
  p.alpha = j.at("alpha").get<double>();
  p.omega_e = j.at("omega_e_rad_per_s").get<double>();
  p.sigma = j.at("sigma_rad_per_s_per_a").get<double>();
  p.beta = j.at("beta_v_s").get<double>();
  p.i_bias = j.at("i_bias_a").get<double>();
  cal.input_pulse = {from_ps(j.at("pulse_start_ps").get<double>()), from_ps(j.at("pulse_duration_ps").get<double>()),
                     j.at("pulse_amplitude_a").get<double>()};
  cal.threshold = j.at("threshold_v").get<double>();
  cal.dt = from_ps(j.at("dt_ps").get<double>());
  cal.stride = j.at("stride").get<int>();
  p.validate();
  return cal;
}

ordered_json parse(const std::string& text, const char* what) {
  try {
    return ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string(what) + ": malformed JSON: " + e.what());
  }
}

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string format_table(const std::vector<std::string>& columns, const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t c = 0; c < columns.size(); ++c) out += (c ? "\t" : "") + columns[c];
  out += '\n';
  for (const auto& row : rows) {
    if (row.size() != columns.size()) throw DimensionMismatch("format_table: row width differs from the header");
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += '\t';
      out += fmt::format("{:.10g}", row[c]);
    }
    out += '\n';
  }
  return out;
}

std::string trace_table(const SimResultd& result, const NeuronParamsd& params, const std::vector<int>& neurons) {
  std::vector<int> cols = neurons;
  if (cols.empty())
    for (Eigen::Index k = 0; k < result.phi_dot.cols(); ++k) cols.push_back(static_cast<int>(k));
  std::vector<std::string> header{"time_ps"};
  for (int k : cols) header.push_back(fmt::format("V_{}_V", k));
  std::vector<std::vector<double>> rows;
  rows.reserve(static_cast<std::size_t>(result.times.size()));
  for (Eigen::Index i = 0; i < result.times.size(); ++i) {
    std::vector<double> row{to_ps(result.times[i])};
    for (int k : cols) row.push_back(params.beta * result.phi_dot(i, k));
    rows.push_back(std::move(row));
  }
  return format_table(header, rows);
}

std::string training_record_table(const TrainingRecord& record) {
  std::vector<std::string> header{"epoch", "error_ps", "spiked", "synaptic_ops"};
  for (int k = 1; k <= SpanNetwork::kInputs; ++k) header.push_back(fmt::format("w_{}", k));
  std::vector<std::vector<double>> rows;
  for (const auto& e : record.epochs) {
    std::vector<double> row{static_cast<double>(e.epoch), e.error_ps, e.spiked ? 1.0 : 0.0,
                            static_cast<double>(e.synaptic_ops)};
    for (Eigen::Index k = 0; k < e.weights.size(); ++k) row.push_back(e.weights[k]);
    rows.push_back(std::move(row));
  }
  return format_table(header, rows);
}

std::string weight_map_table(const TrainingRecord& record) {
  if (record.epochs.empty()) throw InvalidArgument("weight_map_table: empty training record");
  const auto& final_w = record.epochs.back().weights;
  std::vector<std::vector<double>> rows;
  for (int k = 0; k < SpanNetwork::kInputs; ++k)
    rows.push_back({static_cast<double>(k / kGridSide), static_cast<double>(k % kGridSide), record.initial_weights[k],
                    final_w[k]});
  return format_table({"row", "col", "w_initial", "w_final"}, rows);
}

std::string calibration_json(const CalibrationReport& r) {
  ordered_json j;
  j["neuron"] = neuron_json(r.neuron);
  j["alpha"] = r.alpha;
  j["f_e_ghz"] = r.f_e_hz / 1e9;
  j["latency_k0_ps"] = to_ps(r.latency_k0);
  j["latency_k15_ps"] = to_ps(r.latency_k15);
  j["peak_voltage_v"] = r.peak_voltage;
  j["spike_fwhm_ps"] = to_ps(r.spike_width);
  j["single_spike_time_ps"] = to_ps(r.single_spike_time);
  j["kappa_cutoff"] = r.kappa_cutoff;
  auto& sweep = j["sweep"] = ordered_json::array();
  for (const auto& p : r.sweep)
    sweep.push_back({{"kappa", p.kappa}, {"latency_ps", p.latency ? ordered_json(to_ps(*p.latency)) : ordered_json()}});
  j["chain_simulations"] = r.evaluations;
  return j.dump(2) + "\n";
}

CalibratedNeurond calibrated_neuron_from_json(const std::string& text) {
  const auto j = parse(text, "calibration");
  try {
    return neuron_from(j.contains("neuron") ? j.at("neuron") : j);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("calibration: ") + e.what());
  }
}

std::string weights_json(const std::string& label, const Eigen::VectorXd& weights, std::uint64_t seed,
                         const std::string& config_text) {
  ordered_json j;
  j["label"] = label;
  j["seed"] = seed;
  j["weight_unit"] = "kappa0";
  j["weights"] = to_vector(weights);
  j["config"] = config_text;
  return j.dump(2) + "\n";
}

SpanChannel weights_from_json(const std::string& text) {
  const auto j = parse(text, "weights");
  try {
    SpanChannel ch;
    ch.label = j.at("label").get<std::string>();
    const auto w = j.at("weights").get<std::vector<double>>();
    if (w.size() != static_cast<std::size_t>(SpanNetwork::kInputs))
      throw DimensionMismatch("weights: expected 25 values, got " + std::to_string(w.size()));
    ch.weights = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
    if ((ch.weights.array() < 0).any()) throw InvalidArgument("weights: negative weight");
    return ch;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("weights: ") + e.what());
  }
}

std::string network_json(const MultiSpanNetwork& net) {
  ordered_json j;
  j["neuron"] = neuron_json(net.neuron);
  j["weight_unit"] = net.weight_unit;
  j["kappa_weak"] = net.kappa_weak;
  j["kappa_weak_over_kappa0"] = net.kappa_weak / kKappa0;
  j["horizon_ps"] = to_ps(net.horizon);
  auto& pulses = j["clock_drive"] = ordered_json::array();
  for (const auto& p : net.clock_drive.pulses)
    pulses.push_back({{"t_start_ps", to_ps(p.t_start)}, {"duration_ps", to_ps(p.duration)}, {"amplitude_a", p.amplitude}});
  auto& spans = j["spans"] = ordered_json::array();
  for (const auto& s : net.spans) spans.push_back({{"label", s.label}, {"weights", to_vector(s.weights)}});
  return j.dump(2) + "\n";
}

std::string energy_json(const EnergyReport& r) {
  ordered_json j;
  j["synaptic_op_count"] = r.synaptic_op_count;
  j["energy_per_op_pj"] = r.energy_per_op / kPicojoule;
  j["total_energy_pj"] = r.total_energy / kPicojoule;
  j["simulated_time_ns"] = r.simulated_time / kNanosecond;
  j["convention"] = r.convention;
  return j.dump(2) + "\n";
}

}  // namespace afmsnn
