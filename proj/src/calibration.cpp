#include "afmsnn/calibration.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>

#include "afmsnn/errors.hpp"
#include "afmsnn/units.hpp"

namespace afmsnn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxBisections = 40;

struct InnerSolution {
  CalibratedNeurond neuron;
  double f_e_hz = 0.0;
  double latency_k0 = 0.0;
};

class Search {
 public:
  explicit Search(const CalibrationSpec& spec) : spec_(spec) {}

  double chain_latency(double kappa, const CalibratedNeurond& cal) {
    ++evaluations;
    return try_latency(kappa, cal, spec_.chain_horizon).value_or(kInf);
  }

  // latency(kappa0) is monotone in f_e; the direction is read off the bracket.
  InnerSolution solve_f_e(double alpha) {
    double lo = std::log(spec_.f_e_min_hz), hi = std::log(spec_.f_e_max_hz);
    auto eval = [&](double log_f) {
      InnerSolution s;
      s.f_e_hz = std::exp(log_f);
      s.neuron = make_neuron(spec_, alpha, s.f_e_hz);
      s.latency_k0 = chain_latency(kKappa0, s.neuron);
      return s;
    };
    auto s_lo = eval(lo), s_hi = eval(hi);
    const double target = spec_.target_k0;
    const bool rising = s_hi.latency_k0 > s_lo.latency_k0;
    if ((s_lo.latency_k0 - target) * (s_hi.latency_k0 - target) > 0)
      throw CalibrationFailed(fmt::format(
          "calibration: at alpha = {:.4g} the f_e range [{:.4g}, {:.4g}] GHz does not bracket latency(kappa0) = {:.4g} ps "
          "(got {:.4g} and {:.4g} ps at the ends)",
          alpha, spec_.f_e_min_hz / 1e9, spec_.f_e_max_hz / 1e9, to_ps(target), to_ps(s_lo.latency_k0),
          to_ps(s_hi.latency_k0)));
    InnerSolution best = s_lo;
    for (int i = 0; i < kMaxBisections; ++i) {
      const double mid = 0.5 * (lo + hi);
      auto s = eval(mid);
      if (std::abs(s.latency_k0 - target) < std::abs(best.latency_k0 - target)) best = s;
      if (std::abs(s.latency_k0 - target) < 1e-3 * kPicosecond) break;
      ((s.latency_k0 > target) == rising ? hi : lo) = mid;
    }
    return best;
  }

  int evaluations = 0;

 private:
  const CalibrationSpec& spec_;
};

}  // namespace

SpikeShape spike_shape(const CalibratedNeurond& cal, double horizon) {
  std::vector<NeuronParamsd> params{cal.params};
  CouplingMatrixd k(1);
  std::vector<DriveWaveformd> drives{DriveWaveformd::single(cal.input_pulse)};
  auto opts = cal.options(horizon);
  opts.threshold = std::numeric_limits<double>::max();  // detection not needed here
  const auto r = simulate(params, k, drives, opts);

  SpikeShape s;
  Eigen::Index peak = 0;
  s.peak_voltage = cal.params.beta * r.phi_dot.col(0).maxCoeff(&peak);
  s.t_spike = r.times[peak];
  const double half = 0.5 * s.peak_voltage;
  const double sample_dt = cal.dt * cal.stride;
  long above = 0;
  for (Eigen::Index i = 0; i < r.phi_dot.rows(); ++i)
    if (cal.params.beta * r.phi_dot(i, 0) >= half) ++above;
  s.width = static_cast<double>(above) * sample_dt;
  s.phi_advance = r.phi(r.phi.rows() - 1, 0) - r.phi(0, 0);
  return s;
}

CalibratedNeurond make_neuron(const CalibrationSpec& spec, double alpha, double f_e_hz) {
  CalibratedNeurond cal;
  auto& p = cal.params;
  p.omega_ex = angular(spec.f_ex_hz);
  p.omega_e = angular(f_e_hz);
  p.alpha = alpha;
  p.sigma = spec.sigma;
  p.beta = spec.beta;
  p.i_bias = spec.bias_fraction * p.threshold_current();
  p.validate();
  cal.input_pulse = {0.0, spec.pulse_duration, (spec.pulse_overdrive - spec.bias_fraction) * p.threshold_current()};
  cal.dt = spec.dt;
  cal.stride = spec.stride;

  // Shorten the pulse until it elicits exactly one spike.
  for (;;) {
    const auto shape = spike_shape(cal);
    if (!(shape.peak_voltage > 0))
      throw CalibrationFailed("calibration: the input pulse produces no voltage response");
    cal.threshold = 0.5 * shape.peak_voltage;

    std::vector<NeuronParamsd> params{cal.params};
    CouplingMatrixd k(1);
    std::vector<DriveWaveformd> drives{DriveWaveformd::single(cal.input_pulse)};
    const auto r = simulate(params, k, drives, cal.options(200e-12));
    const auto spikes = r.spikes[0].size();
    if (spikes == 1) break;
    if (spikes == 0 || cal.input_pulse.duration < 0.5e-12)
      throw CalibrationFailed(fmt::format(
          "calibration: the input pulse elicits {} spikes at alpha = {:.4g}, f_e = {:.4g} GHz (need exactly one)", spikes,
          alpha, f_e_hz / 1e9));
    cal.input_pulse.duration *= 0.5;
  }
  return cal;
}

std::optional<double> try_latency(double kappa, const CalibratedNeurond& cal, double horizon) {
  const auto r = simulate_chain(kappa, cal, horizon);
  const auto t1 = r.first_spike(0);
  const auto t2 = r.first_spike(1);
  if (!t1 || !t2) return std::nullopt;
  return *t2 - *t1;
}

double find_cutoff(const CalibratedNeurond& cal, double horizon, double lo, double hi) {
  if (!try_latency(hi, cal, horizon)) throw NoSpikeError("find_cutoff: the upper coupling does not fire either");
  if (try_latency(lo, cal, horizon)) return lo;
  while (hi - lo > 1e-4 * kKappa0) {
    const double mid = 0.5 * (lo + hi);
    (try_latency(mid, cal, horizon) ? hi : lo) = mid;
  }
  return hi;
}

std::vector<LatencyPoint> latency_sweep(const CalibratedNeurond& cal, double kappa_lo, double kappa_hi, int points,
                                        double horizon) {
  if (points < 2) throw InvalidArgument("latency_sweep: need at least two points");
  std::vector<LatencyPoint> out;
  for (int i = 0; i < points; ++i) {
    const double kappa = kappa_lo + (kappa_hi - kappa_lo) * i / (points - 1);
    out.push_back({kappa, try_latency(kappa, cal, horizon)});
  }
  return out;
}

CalibrationReport calibrate(const CalibrationSpec& spec) {
  spec.validate();
  if (!(spec.alpha_min < spec.alpha_max) || !(spec.f_e_min_hz < spec.f_e_max_hz))
    throw CalibrationFailed("calibration: empty search space (need alpha_min < alpha_max and f_e_min < f_e_max)");

  Search search(spec);
  const double target = spec.target_k15;
  auto outer = [&](double alpha) {
    auto s = search.solve_f_e(alpha);
    return std::pair{s, search.chain_latency(1.5 * kKappa0, s.neuron)};
  };

  double a_lo = spec.alpha_min, a_hi = spec.alpha_max;
  auto [s_lo, l_lo] = outer(a_lo);
  auto [s_hi, l_hi] = outer(a_hi);
  const double g_lo = l_lo - target, g_hi = l_hi - target;
  if (g_lo * g_hi > 0)
    throw CalibrationFailed(fmt::format(
        "calibration: the alpha range [{:.4g}, {:.4g}] does not bracket latency(1.5 kappa0) = {:.4g} ps; best residuals "
        "{:+.4g} ps / {:+.4g} ps at the ends",
        a_lo, a_hi, to_ps(target), to_ps(g_lo), to_ps(g_hi)));
  const bool rising = g_hi > g_lo;

  struct Best {
    double alpha;
    InnerSolution sol;
    double l15;
  } best{a_lo, s_lo, l_lo};
  if (std::abs(g_hi) < std::abs(g_lo)) best = {a_hi, s_hi, l_hi};
  for (int i = 0; i < kMaxBisections; ++i) {
    const double mid = 0.5 * (a_lo + a_hi);
    auto [s, l] = outer(mid);
    if (std::abs(l - target) < std::abs(best.l15 - target)) best = {mid, s, l};
    if (std::abs(l - target) < 1e-3 * kPicosecond || a_hi - a_lo < 1e-6) break;
    ((l > target) == rising ? a_hi : a_lo) = mid;
  }

  const double r0 = best.sol.latency_k0 / spec.target_k0 - 1.0;
  const double r15 = best.l15 / spec.target_k15 - 1.0;
  if (std::abs(r0) > spec.tolerance || std::abs(r15) > spec.tolerance)
    throw CalibrationFailed(fmt::format("calibration: best residuals {:+.2f}% at kappa0 and {:+.2f}% at 1.5 kappa0 exceed {:.0f}%",
                                        100 * r0, 100 * r15, 100 * spec.tolerance));

  CalibrationReport rep;
  rep.neuron = best.sol.neuron;
  rep.alpha = best.alpha;
  rep.f_e_hz = best.sol.f_e_hz;
  rep.latency_k0 = best.sol.latency_k0;
  rep.latency_k15 = best.l15;
  const auto shape = spike_shape(rep.neuron);
  rep.peak_voltage = shape.peak_voltage;
  rep.spike_width = shape.width;
  rep.single_spike_time = shape.t_spike - rep.neuron.input_pulse.t_start;
  rep.kappa_cutoff = find_cutoff(rep.neuron, spec.cutoff_horizon);
  rep.sweep = latency_sweep(rep.neuron, rep.kappa_cutoff, 2.0 * kKappa0, spec.sweep_points, spec.cutoff_horizon);
  rep.evaluations = search.evaluations;
  return rep;
}

}  // namespace afmsnn
