#include "afmsnn/config.hpp"

#include <fmt/format.h>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "afmsnn/errors.hpp"
#include "afmsnn/units.hpp"

namespace afmsnn {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"neuron", {"f_ex_thz", "sigma_rad_per_s_per_a", "beta_v_s", "bias_fraction"}},
      {"pulse", {"overdrive", "duration_ps"}},
      {"calibration",
       {"alpha_min", "alpha_max", "f_e_min_ghz", "f_e_max_ghz", "target_k0_ps", "target_k15_ps", "tolerance",
        "chain_horizon_ps", "cutoff_horizon_ps", "sweep_points"}},
      {"integration", {"dt_ps", "stride"}},
      {"library", {"symbol", "size", "max_flips", "seed", "mode", "base_time_ps", "shift_per_pixel_ps"}},
      {"trainer",
       {"learning_rate", "tau_ps", "epochs", "window_ps", "horizon_ps", "init_max", "weight_unit", "seed",
        "t_input_ps"}},
      {"readout", {"symbols", "coincidence_tolerance_ps", "margin", "horizon_ps"}},
      {"energy", {"energy_per_op_pj"}},
      {"output", {"dir"}},
  };
  return keys;
}

template <typename T>
void read(const pt::ptree& tree, const std::string& key, T& out) {
  const auto node = tree.get_optional<std::string>(key);
  if (!node) return;
  try {
    if constexpr (std::is_same_v<T, std::string>) {
      out = *node;
    } else {
      std::size_t used = 0;
      if constexpr (std::is_same_v<T, double>) out = std::stod(*node, &used);
      else if constexpr (std::is_same_v<T, int>) out = std::stoi(*node, &used);
      else out = static_cast<T>(std::stoull(*node, &used));
      if (used != node->size()) throw std::invalid_argument("trailing characters");
    }
  } catch (const std::exception&) {
    throw ConfigError("config: cannot parse '" + key + "' = '" + *node + "'");
  }
}

void read_ps(const pt::ptree& tree, const std::string& key, double& seconds) {
  double ps = to_ps(seconds);
  read(tree, key, ps);
  seconds = from_ps(ps);
}

std::uint64_t require_seed(const pt::ptree& tree, const std::string& key) {
  if (!tree.get_optional<std::string>(key)) throw ConfigError("config: '" + key + "' is required (no implicit seeding)");
  std::uint64_t seed = 0;
  read(tree, key, seed);
  return seed;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

}  // namespace

void CalibrationSpec::validate() const {
  if (!(f_ex_hz > 0)) throw ConfigError("config: neuron.f_ex_thz must be positive");
  if (!(sigma > 0)) throw ConfigError("config: neuron.sigma_rad_per_s_per_a must be positive");
  if (!(beta > 0)) throw ConfigError("config: neuron.beta_v_s must be positive");
  if (!(bias_fraction >= 0) || !(bias_fraction < 1))
    throw ConfigError("config: neuron.bias_fraction must be in [0, 1) (a supercritical bias rotates continuously)");
  if (!(pulse_overdrive > 1)) throw ConfigError("config: pulse.overdrive must exceed 1 (suprathreshold)");
  if (!(pulse_duration > 0)) throw ConfigError("config: pulse.duration_ps must be positive");
  if (!(alpha_min > 0) || !(alpha_max > 0)) throw ConfigError("config: calibration alpha bounds must be positive");
  if (!(f_e_min_hz > 0) || !(f_e_max_hz > 0)) throw ConfigError("config: calibration f_e bounds must be positive");
  if (!(target_k0 > 0) || !(target_k15 > 0)) throw ConfigError("config: calibration targets must be positive");
  if (!(tolerance > 0)) throw ConfigError("config: calibration.tolerance must be positive");
  if (!(dt > 0)) throw ConfigError("config: integration.dt_ps must be positive");
  if (stride < 1) throw ConfigError("config: integration.stride must be >= 1");
  if (!(chain_horizon > target_k0)) throw ConfigError("config: calibration.chain_horizon_ps must exceed target_k0_ps");
  if (!(cutoff_horizon > 0)) throw ConfigError("config: calibration.cutoff_horizon_ps must be positive");
  if (sweep_points < 2) throw ConfigError("config: calibration.sweep_points must be >= 2");
}

void RunConfig::validate() const {
  calibration.validate();
  if (library.size < 2) throw ConfigError("config: library.size must be >= 2");
  if (library.max_flips < 1) throw ConfigError("config: library.max_flips must be >= 1");
  if (!(library.base_time > 0) || !(library.shift_per_pixel >= 0))
    throw ConfigError("config: library times must be positive");
  try {
    builtin_symbol(library.symbol);
    for (const auto& s : readout.symbols) builtin_symbol(s);
    trainer.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (readout.symbols.empty()) throw ConfigError("config: readout.symbols must not be empty");
  if (!(span_horizon > library.base_time)) throw ConfigError("config: trainer.horizon_ps must exceed the base time");
  if (!(weight_unit > 0)) throw ConfigError("config: trainer.weight_unit must be positive");
  if (!(readout.coincidence_tolerance >= 0)) throw ConfigError("config: readout.coincidence_tolerance_ps must be >= 0");
  if (!(readout.margin >= 0)) throw ConfigError("config: readout.margin must be >= 0");
  if (!(readout.horizon > 0)) throw ConfigError("config: readout.horizon_ps must be positive");
  if (!(energy_per_op >= 0)) throw ConfigError("config: energy.energy_per_op_pj must be >= 0");
}

RunConfig parse_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  for (const auto& [section, body] : tree) {
    const auto it = known_keys().find(section);
    if (it == known_keys().end()) throw ConfigError("config: unknown section [" + section + "]");
    for (const auto& kv : body)
      if (!it->second.count(kv.first)) throw ConfigError("config: unknown key " + section + "." + kv.first);
  }

  RunConfig cfg;
  auto& c = cfg.calibration;
  double f_ex_thz = c.f_ex_hz / 1e12;
  read(tree, "neuron.f_ex_thz", f_ex_thz);
  c.f_ex_hz = f_ex_thz * 1e12;
  read(tree, "neuron.sigma_rad_per_s_per_a", c.sigma);
  read(tree, "neuron.beta_v_s", c.beta);
  read(tree, "neuron.bias_fraction", c.bias_fraction);
  read(tree, "pulse.overdrive", c.pulse_overdrive);
  read_ps(tree, "pulse.duration_ps", c.pulse_duration);
  read(tree, "calibration.alpha_min", c.alpha_min);
  read(tree, "calibration.alpha_max", c.alpha_max);
  double f_lo = c.f_e_min_hz / 1e9, f_hi = c.f_e_max_hz / 1e9;
  read(tree, "calibration.f_e_min_ghz", f_lo);
  read(tree, "calibration.f_e_max_ghz", f_hi);
  c.f_e_min_hz = f_lo * 1e9;
  c.f_e_max_hz = f_hi * 1e9;
  read_ps(tree, "calibration.target_k0_ps", c.target_k0);
  read_ps(tree, "calibration.target_k15_ps", c.target_k15);
  read(tree, "calibration.tolerance", c.tolerance);
  read_ps(tree, "calibration.chain_horizon_ps", c.chain_horizon);
  read_ps(tree, "calibration.cutoff_horizon_ps", c.cutoff_horizon);
  read(tree, "calibration.sweep_points", c.sweep_points);
  read_ps(tree, "integration.dt_ps", c.dt);
  read(tree, "integration.stride", c.stride);

  auto& l = cfg.library;
  read(tree, "library.symbol", l.symbol);
  read(tree, "library.size", l.size);
  read(tree, "library.max_flips", l.max_flips);
  l.seed = require_seed(tree, "library.seed");
  std::string mode = l.mode == VariantMode::kMixed ? "mixed" : "additional";
  read(tree, "library.mode", mode);
  if (mode == "mixed") l.mode = VariantMode::kMixed;
  else if (mode == "additional") l.mode = VariantMode::kAdditionalOnly;
  else throw ConfigError("config: library.mode must be 'additional' or 'mixed'");
  read_ps(tree, "library.base_time_ps", l.base_time);
  read_ps(tree, "library.shift_per_pixel_ps", l.shift_per_pixel);

  auto& t = cfg.trainer;
  read(tree, "trainer.learning_rate", t.learning_rate);
  read_ps(tree, "trainer.tau_ps", t.tau);
  read(tree, "trainer.epochs", t.epochs);
  read_ps(tree, "trainer.window_ps", t.window);
  read_ps(tree, "trainer.horizon_ps", cfg.span_horizon);
  read(tree, "trainer.init_max", t.init_max);
  read(tree, "trainer.weight_unit", cfg.weight_unit);
  cfg.trainer_seed = require_seed(tree, "trainer.seed");
  if (tree.get_optional<std::string>("trainer.t_input_ps")) {
    double t_in = 0.0;
    read(tree, "trainer.t_input_ps", t_in);
    t.t_input = from_ps(t_in);
  }

  auto& r = cfg.readout;
  if (const auto s = tree.get_optional<std::string>("readout.symbols")) r.symbols = split_list(*s);
  read_ps(tree, "readout.coincidence_tolerance_ps", r.coincidence_tolerance);
  read(tree, "readout.margin", r.margin);
  read_ps(tree, "readout.horizon_ps", r.horizon);

  double e_pj = cfg.energy_per_op / kPicojoule;
  read(tree, "energy.energy_per_op_pj", e_pj);
  cfg.energy_per_op = e_pj * kPicojoule;

  std::string dir = cfg.output_dir.string();
  read(tree, "output.dir", dir);
  cfg.output_dir = dir;

  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string format_config(const RunConfig& cfg) {
  const auto& c = cfg.calibration;
  const auto& l = cfg.library;
  const auto& t = cfg.trainer;
  const auto& r = cfg.readout;
  std::string symbols;
  for (const auto& s : r.symbols) symbols += (symbols.empty() ? "" : ",") + s;
  std::string out;
  out += fmt::format("[neuron]\nf_ex_thz = {:.17g}\nsigma_rad_per_s_per_a = {:.17g}\nbeta_v_s = {:.17g}\nbias_fraction = {:.17g}\n\n",
                     c.f_ex_hz / 1e12, c.sigma, c.beta, c.bias_fraction);
  out += fmt::format("[pulse]\noverdrive = {:.17g}\nduration_ps = {:.17g}\n\n", c.pulse_overdrive, to_ps(c.pulse_duration));
  out += fmt::format(
      "[calibration]\nalpha_min = {:.17g}\nalpha_max = {:.17g}\nf_e_min_ghz = {:.17g}\nf_e_max_ghz = {:.17g}\n"
      "target_k0_ps = {:.17g}\ntarget_k15_ps = {:.17g}\ntolerance = {:.17g}\nchain_horizon_ps = {:.17g}\n"
      "cutoff_horizon_ps = {:.17g}\nsweep_points = {}\n\n",
      c.alpha_min, c.alpha_max, c.f_e_min_hz / 1e9, c.f_e_max_hz / 1e9, to_ps(c.target_k0), to_ps(c.target_k15),
      c.tolerance, to_ps(c.chain_horizon), to_ps(c.cutoff_horizon), c.sweep_points);
  out += fmt::format("[integration]\ndt_ps = {:.17g}\nstride = {}\n\n", to_ps(c.dt), c.stride);
  out += fmt::format(
      "[library]\nsymbol = {}\nsize = {}\nmax_flips = {}\nseed = {}\nmode = {}\nbase_time_ps = {:.17g}\n"
      "shift_per_pixel_ps = {:.17g}\n\n",
      l.symbol, l.size, l.max_flips, l.seed, l.mode == VariantMode::kMixed ? "mixed" : "additional",
      to_ps(l.base_time), to_ps(l.shift_per_pixel));
  out += fmt::format(
      "[trainer]\nlearning_rate = {:.17g}\ntau_ps = {:.17g}\nepochs = {}\nwindow_ps = {:.17g}\nhorizon_ps = {:.17g}\n"
      "init_max = {:.17g}\nweight_unit = {:.17g}\nseed = {}\n",
      t.learning_rate, to_ps(t.tau), t.epochs, to_ps(t.window), to_ps(cfg.span_horizon), t.init_max,
      cfg.weight_unit, cfg.trainer_seed);
  if (t.t_input) out += fmt::format("t_input_ps = {:.17g}\n", to_ps(*t.t_input));
  out += fmt::format("\n[readout]\nsymbols = {}\ncoincidence_tolerance_ps = {:.17g}\nmargin = {:.17g}\nhorizon_ps = {:.17g}\n\n",
                     symbols, to_ps(r.coincidence_tolerance), r.margin, to_ps(r.horizon));
  out += fmt::format("[energy]\nenergy_per_op_pj = {:.17g}\n\n", cfg.energy_per_op / kPicojoule);
  out += fmt::format("[output]\ndir = {}\n", cfg.output_dir.string());
  return out;
}

std::filesystem::path resolve_output_dir(const RunConfig& cfg, const std::string& cli_out) {
  if (!cli_out.empty()) return cli_out;
  if (const char* env = std::getenv("AFMSNN_OUT_DIR"); env && *env) return env;
  return cfg.output_dir;
}

}  // namespace afmsnn
