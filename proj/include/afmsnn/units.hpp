#pragma once

#include <numbers>

namespace afmsnn {

// Internal unit system is SI: seconds, rad/s, amperes, volts.
inline constexpr double kPicosecond = 1e-12;
inline constexpr double kNanosecond = 1e-9;
inline constexpr double kMilliampere = 1e-3;
inline constexpr double kPicojoule = 1e-12;
inline constexpr double kPi = std::numbers::pi;

// kappa_0, the reference inter-neuron coupling of a two-neuron chain.
inline constexpr double kKappa0 = 0.011;

inline constexpr double to_ps(double seconds) { return seconds / kPicosecond; }
inline constexpr double from_ps(double ps) { return ps * kPicosecond; }

/// Angular frequency (rad/s) from an ordinary frequency in Hz.
inline constexpr double angular(double hz) { return 2.0 * kPi * hz; }

namespace literals {
constexpr double operator""_ps(long double v) { return static_cast<double>(v) * kPicosecond; }
constexpr double operator""_ps(unsigned long long v) { return static_cast<double>(v) * kPicosecond; }
constexpr double operator""_ns(long double v) { return static_cast<double>(v) * kNanosecond; }
constexpr double operator""_ns(unsigned long long v) { return static_cast<double>(v) * kNanosecond; }
}  // namespace literals

}  // namespace afmsnn
