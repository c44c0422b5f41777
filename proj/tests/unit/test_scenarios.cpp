#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "uwmimo/error.hpp"
#include "uwmimo/scenarios.hpp"

using namespace uwmimo;
using namespace uwmimo::scenario;

namespace {

// Small but otherwise default configuration for quick sweeps.
ScenarioConfig quick() {
  ScenarioConfig c;
  c.sweep_trials = 50;
  c.deployments = 8;
  c.max_nodes = 6;
  c.ber_trials = 6;
  c.ber_payload_bits = 256;
  c.ber_distances_m = {20.0, 200.0};
  c.threads = 2;
  return c;
}

void check_finite(const CsvTable& t) {
  for (const auto& row : t.rows()) {
    CHECK(row.size() == t.header().size());
    for (double v : row) CHECK(std::isfinite(v));
  }
}

}  // namespace

TEST_CASE("random deployment") {
  DeploymentOptions o;
  o.radius_m = 10.0;
  o.min_spacing_m = 0.5;
  Rng rng = make_stream(1);
  const auto empty = deploy_random(0, o, rng);
  CHECK(empty.slaves.empty());
  CHECK(empty.transmitters().size() == 1);

  for (int trial = 0; trial < 200; ++trial) {
    Rng a = make_stream(5, 0, static_cast<std::uint64_t>(trial));
    Rng b = make_stream(5, 0, static_cast<std::uint64_t>(trial));
    const auto g = deploy_random(5, o, a);
    const auto h = deploy_random(5, o, b);
    REQUIRE(g.slaves.size() == 5);
    CHECK(g.slaves == h.slaves);
    const auto all = g.transmitters();
    for (std::size_t i = 0; i < all.size(); ++i) {
      CHECK(distance(all[i], g.master) <= 10.0);
      for (std::size_t j = i + 1; j < all.size(); ++j) CHECK(distance(all[i], all[j]) >= 0.5);
    }
  }

  o.n_base = 3;
  const auto g = deploy_random(2, o, rng);
  REQUIRE(g.base_stations.size() == 3);
  CHECK(g.base_stations[2][0] == o.bs_offset_m + 2.0 * o.bs_spacing_m);
  CHECK(g.base_stations[0][2] == -o.bs_depth_m);

  o.radius_m = 1.0;
  o.min_spacing_m = 5.0;
  o.max_attempts = 100;
  CHECK_THROWS_AS(deploy_random(3, o, rng), ConfigError);
}

TEST_CASE("deployment evaluation shares draws across media") {
  const ScenarioConfig c;
  const auto e = evaluate_deployment(c, 5, 3);
  const auto again = evaluate_deployment(c, 5, 3);
  CHECK(e.envelopes == again.envelopes);
  CHECK(e.mi_sync == again.mi_sync);
  REQUIRE(e.mi_states.size() == 6);
  REQUIRE(e.acoustic_states.size() == 6);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(e.mi_states[i].envelope == e.acoustic_states[i].envelope);
    CHECK(e.mi_states[i].delay_s == e.acoustic_states[i].delay_s);
    // Same estimation error, different multiplier.
    if (i > 0 && e.mi_states[i].freq_error_hz != 0.0) {
      CHECK(e.acoustic_states[i].freq_error_hz / e.mi_states[i].freq_error_hz == doctest::Approx(1000.0));
    }
  }
  CHECK(e.mi_states[0].freq_error_hz == 0.0);
  CHECK(e.mi_states[0].time_error == 0.0);
  CHECK_FALSE(evaluate_deployment(c, 5, 4).envelopes == e.envelopes);
}

TEST_CASE("sync error sweep") {
  const auto c = quick();
  const auto t = run_sync_error_sweep(c);
  check_finite(t);
  REQUIRE(t.rows().size() == c.sweep_error_std_hz.size());
  const auto& zero = t.rows().front();
  CHECK(zero[1] == 0.0);
  CHECK(zero[2] == 0.0);
  CHECK(zero[3] == 0.0);
  CHECK(zero[4] == 0.0);
  for (std::size_t r = 1; r < t.rows().size(); ++r) {
    const auto& row = t.rows()[r];
    CHECK(row[2] / row[1] == doctest::Approx(1000.0).epsilon(1e-12));
    CHECK(row[3] < row[4]);
  }
  CHECK(run_sync_error_sweep(c).to_string() == t.to_string());
}

TEST_CASE("SNR trace") {
  const ScenarioConfig c;
  const auto t = run_snr_trace(c);
  check_finite(t);
  const auto bound = t.column("bound_bf_db");
  const auto mi = t.column("mi_bf_db");
  const auto ac = t.column("acoustic_bf_db");
  const double b0 = t.rows().front()[bound];
  CHECK(std::abs(t.rows().front()[mi] - b0) < 1.0);
  for (const auto& row : t.rows()) {
    CHECK(row[bound] == b0);
    CHECK(row[ac] <= row[bound] + 1e-9);
    CHECK(row[mi] <= row[bound] + 1e-9);
  }
  CHECK(t.rows().size() == 151);
}

TEST_CASE("communication time and throughput") {
  const auto c = quick();
  const auto ct = run_comm_time_sweep(c);
  check_finite(ct);
  REQUIRE(ct.rows().size() == c.max_nodes - c.min_nodes + 1);
  for (const auto& row : ct.rows()) {
    for (std::size_t j = 2; j < 6; ++j) CHECK(row[j] <= row[1]);
    CHECK(row[2] >= row[3]);
    CHECK(row[4] >= row[5]);
  }
  CHECK(run_comm_time_sweep(c).to_string() == ct.to_string());

  auto serial = c;
  serial.threads = 1;
  CHECK(run_comm_time_sweep(serial).to_string() == ct.to_string());

  const auto tp = run_throughput_sweep(c);
  check_finite(tp);
  for (const auto& row : tp.rows()) {
    CHECK(row[1] > 0.0);
    CHECK(row[2] < row[3]);
    CHECK(row[5] >= row[6]);
    CHECK(row[7] >= row[8]);
    CHECK(row[5] <= row[1]);
  }
}

TEST_CASE("baseband BER sweep") {
  auto c = quick();
  const auto t = run_baseband_ber(c);
  check_finite(t);
  REQUIRE(t.rows().size() == 2);
  for (const auto& row : t.rows()) {
    for (std::size_t j = 2; j < 6; ++j) {
      CHECK(row[j] >= 0.0);
      CHECK(row[j] <= 1.0);
    }
  }
  CHECK(t.rows()[0][1] > t.rows()[1][1]);
  CHECK(run_baseband_ber(c).to_string() == t.to_string());

  SUBCASE("perfect conditions give zero errors") {
    auto p = c;
    p.ber_reference_snr_db = 200.0;
    p.ber_estimation_std_hz = 0.0;
    p.ber_cfo_hz = 0.0;
    p.ber_csi_symbols = 1000000;
    p.ber_distances_m = {20.0};
    // one path, so no fades
    p.excess_path_m = {0.0};
    const auto z = run_baseband_ber(p);
    for (std::size_t j = 2; j < 6; ++j) CHECK(z.rows()[0][j] == 0.0);
  }
}
