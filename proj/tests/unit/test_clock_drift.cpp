#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "uwmimo/clock_drift.hpp"
#include "uwmimo/sync_protocol.hpp"

using namespace uwmimo;
using namespace uwmimo::clock;

TEST_CASE("average relative drift") {
  CHECK(average_relative_drift(DriftProfile::constant(1.0), 5.0) == 1.0);
  for (double dt : {1e-3, 0.7, 5.0, 1e4}) {
    CHECK(average_relative_drift(DriftProfile::constant(1.0001), dt) == 1.0001);
  }
  // int_0^2 (1 + 1e-6 t) dt / 2 = 1 + 1e-6
  CHECK(average_relative_drift(DriftProfile::affine(1.0, 1e-6), 2.0) == doctest::Approx(1.0 + 1e-6).epsilon(1e-15));

  SUBCASE("custom profiles use midpoint quadrature") {
    const auto ramp = DriftProfile::custom([](double t) { return 1.0 + 1e-6 * t; });
    CHECK(ramp.average(2.0) == doctest::Approx(1.0 + 1e-6).epsilon(1e-14));
    const auto wave = DriftProfile::custom([](double t) { return 1.0 + 1e-5 * std::sin(t); });
    const double exact = 1.0 + 1e-5 * (1.0 - std::cos(3.0)) / 3.0;
    CHECK(wave.average(3.0) == doctest::Approx(exact).epsilon(1e-10));
  }

  CHECK_THROWS_AS(average_relative_drift(DriftProfile::constant(1.0), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(average_relative_drift(DriftProfile::constant(1.0), -1.0), std::invalid_argument);
}

TEST_CASE("operating frequency") {
  const OscillatorSpec crystal{100e3};
  CHECK(operating_frequency(crystal, 100.0) == 10e6);
  CHECK(operating_frequency(crystal, 0.1) == doctest::Approx(10e3).epsilon(1e-15));
  CHECK(operating_frequency(OscillatorSpec{1.0}, 1.0) == 1.0);
  CHECK_THROWS_AS(operating_frequency(crystal, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(operating_frequency(crystal, -2.0), std::invalid_argument);
}

TEST_CASE("frequency sync error") {
  CHECK(frequency_sync_error(0.0, 100.0) == 0.0);
  CHECK(frequency_sync_error(1.0, 100.0) == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(frequency_sync_error(1.0, 0.1) == doctest::Approx(10.0).epsilon(1e-15));
  CHECK_THROWS_AS(frequency_sync_error(1.0, 0.0), std::invalid_argument);

  SUBCASE("linear in the estimation error") {
    for (double c : {-3.0, 0.5, 7.25}) {
      for (double e : {0.1, 2.0, 13.0}) {
        CHECK(frequency_sync_error(c * e, 100.0) == doctest::Approx(c * frequency_sync_error(e, 100.0)));
      }
    }
  }

  SUBCASE("acoustic over MI residual is the multiplier ratio") {
    const auto mi = sync::magnetic_induction_preset();
    const auto ac = sync::acoustic_preset();
    for (double e : {1e-6, 0.3, 1.0, 42.0}) {
      const double ratio = frequency_sync_error(e, ac.multiplier) / frequency_sync_error(e, mi.multiplier);
      CHECK(std::abs(ratio - 1000.0) <= 1e-12 * 1000.0);
    }
  }
}

TEST_CASE("beacon frequency estimate") {
  SUBCASE("matched clocks") {
    for (double beacon : {10e6, 10e3, 1.0}) {
      const auto r = beacon_frequency_estimate(beacon, 1.0, 0.0, 100.0);
      CHECK(r.estimated_beacon_hz == beacon);
      CHECK(r.offset_hz == 0.0);
      CHECK(r.residual_error_hz == 0.0);
    }
  }
  SUBCASE("drifting slave") {
    const auto r = beacon_frequency_estimate(10e6, 1.0001, 0.0, 100.0);
    CHECK(r.estimated_beacon_hz == doctest::Approx(10.001e6).epsilon(1e-14));
    CHECK(r.offset_hz == doctest::Approx(10.0).epsilon(1e-9));
    CHECK(r.residual_error_hz == 0.0);
  }
  SUBCASE("estimation error only") {
    const auto r = beacon_frequency_estimate(10e6, 1.0, 2.0, 100.0);
    CHECK(r.offset_hz == doctest::Approx(0.02).epsilon(1e-14));
    CHECK(r.residual_error_hz == frequency_sync_error(2.0, 100.0));
  }
  CHECK_THROWS_AS(beacon_frequency_estimate(0.0, 1.0, 0.0, 100.0), std::invalid_argument);
}

TEST_CASE("estimation error model") {
  Rng rng = make_stream(1);
  CHECK(EstimationErrorModel{0.0}.draw(rng) == 0.0);

  const EstimationErrorModel model{2.0};
  double sum = 0.0;
  double sum_sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = model.draw(rng);
    sum += x;
    sum_sq += x * x;
  }
  CHECK(std::abs(sum / n) < 0.03);
  CHECK(std::sqrt(sum_sq / n) == doctest::Approx(2.0).epsilon(0.01));
  CHECK_THROWS_AS(EstimationErrorModel{-1.0}.draw(rng), std::invalid_argument);
}
