#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>

#include "afmsnn/calibration.hpp"
#include "afmsnn/config.hpp"
#include "afmsnn/energy.hpp"
#include "afmsnn/errors.hpp"
#include "afmsnn/io.hpp"
#include "afmsnn/units.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace afmsnn;
namespace fs = std::filesystem;

namespace {

std::string default_text() { return read_file(AFMSNN_SOURCE_DIR "/config/default.ini"); }

std::string replace(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  REQUIRE(pos != std::string::npos);
  return text.replace(pos, from.size(), to);
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("afmsnn_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(AFMSNN_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("default configuration loads") {
  const auto& cfg = test::default_config();
  CHECK(cfg.library.symbol == "O");
  CHECK(cfg.library.size == 20);
  CHECK(cfg.library.seed == 1);
  CHECK(cfg.trainer_seed == 7);
  CHECK(cfg.calibration.dt == doctest::Approx(0.01e-12));
  CHECK(cfg.energy_per_op == doctest::Approx(1e-15));
  CHECK(cfg.readout.symbols == std::vector<std::string>{"Z", "O", "X"});
}

TEST_CASE("configuration errors") {
  const auto text = default_text();
  CHECK_THROWS_AS(parse_config(text + "\n[bogus]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config(replace(text, "stride = 10", "stride = 10\nstrider = 3")), ConfigError);
  CHECK_THROWS_AS(parse_config(replace(text, "seed = 1\n", "")), ConfigError);
  CHECK_THROWS_AS(parse_config(replace(text, "seed = 7\n", "")), ConfigError);
  CHECK_THROWS_AS(parse_config(replace(text, "dt_ps = 0.01", "dt_ps = fast")), ConfigError);
  CHECK_THROWS_AS(parse_config(replace(text, "symbol = O", "symbol = Q")), ConfigError);
  CHECK_THROWS_AS(parse_config(replace(text, "mode = additional", "mode = sideways")), ConfigError);
  CHECK_THROWS_AS(parse_config(replace(text, "bias_fraction = 0.999", "bias_fraction = 1.2")), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/afmsnn.ini"), ConfigError);
}

TEST_CASE("configuration round-trips") {
  const auto cfg = parse_config(default_text());
  const auto text = format_config(cfg);
  const auto again = parse_config(text);
  CHECK(format_config(again) == text);
  CHECK(again.calibration.alpha_min == cfg.calibration.alpha_min);
  CHECK(again.readout.coincidence_tolerance == cfg.readout.coincidence_tolerance);
  CHECK(again.library.mode == cfg.library.mode);
}

TEST_CASE("output directory precedence") {
  auto cfg = test::default_config();
  cfg.output_dir = "from_config";
  ::unsetenv("AFMSNN_OUT_DIR");
  CHECK(resolve_output_dir(cfg, "") == fs::path("from_config"));
  ::setenv("AFMSNN_OUT_DIR", "from_env", 1);
  CHECK(resolve_output_dir(cfg, "") == fs::path("from_env"));
  CHECK(resolve_output_dir(cfg, "from_cli") == fs::path("from_cli"));
  ::unsetenv("AFMSNN_OUT_DIR");
}

TEST_CASE("energy accounting") {
  const auto a = energy_report(100, 1e-9, 1e-15);
  CHECK(a.synaptic_op_count == 100);
  CHECK(a.total_energy == doctest::Approx(1e-13));
  CHECK(a.total_energy / kPicojoule == doctest::Approx(0.1));
  const auto b = energy_report(31200, 0.0, 1e-15);
  CHECK(b.total_energy / kPicojoule == doctest::Approx(31.2));
  CHECK(energy_report(0, 0.0).total_energy == 0.0);
  CHECK_FALSE(a.convention.empty());

  SimResultd r1, r2;
  r1.synaptic_op_count = 3;
  r2.synaptic_op_count = 4;
  r1.times.setLinSpaced(11, 0.0, 1e-10);
  r2.times.setLinSpaced(11, 0.0, 2e-10);
  const std::vector<SimResultd> runs{r1, r2};
  const auto c = energy_report(runs, 1e-15);
  CHECK(c.synaptic_op_count == 7);
  CHECK(c.simulated_time == doctest::Approx(3e-10));
}

TEST_CASE("atomic writes and tables") {
  const auto dir = scratch("io");
  const auto path = dir / "nested" / "table.tsv";
  write_atomic(path, format_table({"a_ps", "b"}, {{1.0, 0.5}, {2.0, 1e-20}}));
  CHECK(read_file(path) == "a_ps\tb\n1\t0.5\n2\t1e-20\n");
  CHECK_FALSE(fs::exists(path.string() + ".tmp"));
  write_atomic(path, "replaced\n");
  CHECK(read_file(path) == "replaced\n");
  CHECK_THROWS_AS(read_file(dir / "missing.txt"), Error);
  CHECK_THROWS_AS(format_table({"a"}, {{1.0, 2.0}}), DimensionMismatch);
}

TEST_CASE("calibration survives a file round-trip") {
  const auto& rep = test::calibration();
  const auto cal = calibrated_neuron_from_json(calibration_json(rep));
  CHECK(cal.params.alpha == rep.neuron.params.alpha);
  CHECK(cal.params.omega_e == rep.neuron.params.omega_e);
  CHECK(cal.threshold == rep.neuron.threshold);
  CHECK(cal.input_pulse.duration == rep.neuron.input_pulse.duration);
  CHECK(latency(kKappa0, cal, 300e-12) == latency(kKappa0, rep.neuron, 300e-12));
}

TEST_CASE("calibration search failures") {
  auto spec = test::default_config().calibration;
  spec.alpha_max = spec.alpha_min;
  CHECK_THROWS_AS(calibrate(spec), CalibrationFailed);
  spec = test::default_config().calibration;
  spec.f_e_min_hz = 90e9;  // every f_e in range gives a latency far below 100 ps
  CHECK_THROWS_AS(calibrate(spec), CalibrationFailed);
}

TEST_CASE("command-line exit codes") {
  const auto dir = scratch("cli");
  const std::string config = AFMSNN_SOURCE_DIR "/config/default.ini";
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("") == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("train --epochs -3 --config " + config) == 2);

  const auto bad = dir / "bad.ini";
  write_atomic(bad, default_text() + "\n[bogus]\nx = 1\n");
  CHECK(run_cli("export --config " + bad.string()) == 2);

  const auto empty = dir / "empty_search.ini";
  write_atomic(empty, replace(default_text(), "alpha_max = 0.65", "alpha_max = 0.45"));
  CHECK(run_cli("calibrate --config " + empty.string() + " --out " + (dir / "cal").string()) == 3);

  CHECK(run_cli("export --config " + config + " --out " + (dir / "export").string()) == 0);
  CHECK(fs::exists(dir / "export" / "library.json"));
  CHECK(fs::exists(dir / "export" / "symbols.txt"));
}
