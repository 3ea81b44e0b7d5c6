#include <cmath>
#include <vector>

#include "afmsnn/spikes.hpp"
#include "doctest.h"

using namespace afmsnn;

TEST_CASE("detect_spikes on synthetic traces") {
  std::vector<double> zeros(100, 0.0);
  CHECK(detect_spikes<double>(zeros, 1e-13, 0.5).empty());

  // Symmetric triangle peaking at sample 10.
  std::vector<double> tri(30, 0.0);
  for (int i = 5; i <= 15; ++i) tri[static_cast<std::size_t>(i)] = 1.0 - std::abs(i - 10) / 5.0;
  auto ev = detect_spikes<double>(tri, 1e-13, 0.5, 0.0, 3);
  REQUIRE(ev.size() == 1);
  CHECK(ev[0].t_spike == doctest::Approx(10e-13));
  CHECK(ev[0].neuron_id == 3);
  CHECK(ev[0].v_peak >= 0.5);

  // Asymmetric samples of a parabola: the vertex is recovered exactly.
  std::vector<double> par;
  for (int i = 0; i < 20; ++i) par.push_back(1.0 - 0.01 * (i - 7.3) * (i - 7.3));
  ev = detect_spikes<double>(par, 1.0, 0.5, 2.0);
  REQUIRE(ev.size() == 1);
  CHECK(ev[0].t_spike == doctest::Approx(9.3));
  CHECK(ev[0].v_peak == doctest::Approx(1.0));
}

TEST_CASE("one event per excursion, strictly increasing") {
  std::vector<double> v(60, 0.0);
  for (int c : {10, 30, 50})
    for (int i = -2; i <= 2; ++i) v[static_cast<std::size_t>(c + i)] = 1.0 - 0.2 * std::abs(i);
  const auto ev = detect_spikes<double>(v, 1.0, 0.3);
  REQUIRE(ev.size() == 3);
  for (std::size_t i = 1; i < ev.size(); ++i) CHECK(ev[i].t_spike > ev[i - 1].t_spike);
  for (const auto& e : ev) CHECK(e.v_peak >= 0.3);
}

TEST_CASE("scaling trace and threshold together leaves spike times unchanged") {
  std::vector<double> v(40, 0.0), w(40, 0.0);
  for (int i = 0; i < 40; ++i) v[static_cast<std::size_t>(i)] = std::exp(-0.1 * (i - 17.4) * (i - 17.4));
  for (int i = 0; i < 40; ++i) w[static_cast<std::size_t>(i)] = 3.7e-5 * v[static_cast<std::size_t>(i)];
  const auto a = detect_spikes<double>(v, 0.1, 0.5);
  const auto b = detect_spikes<double>(w, 0.1, 0.5 * 3.7e-5);
  REQUIRE(a.size() == 1);
  REQUIRE(b.size() == 1);
  CHECK(a[0].t_spike == doctest::Approx(b[0].t_spike).epsilon(1e-12));
}

TEST_CASE("detect_spikes argument errors") {
  std::vector<double> two{1.0, 2.0};
  CHECK_THROWS_AS(detect_spikes<double>(two, 1.0, 0.5), EmptyTraceError);
  std::vector<double> three{0.0, 1.0, 0.0};
  CHECK_THROWS_AS(detect_spikes<double>(three, 1.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(detect_spikes<double>(three, 0.0, 0.5), InvalidArgument);
}
