#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "uwmimo/mimo_analysis.hpp"
#include "uwmimo/sync_protocol.hpp"

namespace uwmimo::scenario {

/// Every tunable of the experiment layer. Field comments give units; the
/// config-file key of each field is listed in config_keys().
struct ScenarioConfig {
  std::uint64_t seed = 20240601;
  std::uint64_t threads = 0;  ///< 0 = hardware concurrency

  // Media. Multipliers are operating frequency / crystal frequency.
  double crystal_hz = 100e3;
  double mi_bandwidth_hz = 20e3;
  double mi_speed_mps = 3.33e7;
  double mi_frequency_hz = 10e6;
  double ac_bandwidth_hz = 10e3;
  double ac_speed_mps = 1400.0;
  double ac_frequency_hz = 10e3;

  // Sync protocol.
  std::uint64_t uplink_bits = 100;
  std::uint64_t downlink_bits = 200;
  std::uint64_t sweep_nodes = 10;
  double sweep_distance_m = 20.0;
  std::vector<double> sweep_error_std_hz{0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0};
  std::uint64_t sweep_trials = 2000;
  double estimation_std_hz = 3e-3;  ///< epsilon_s spread used by the deployment figures

  // Deployment.
  std::uint64_t slaves = 5;
  double radius_m = 10.0;
  double min_spacing_m = 0.5;
  std::uint64_t deployments = 100;
  std::uint64_t min_nodes = 2;
  std::uint64_t max_nodes = 20;
  double bs_offset_m = 20.0;  ///< horizontal master -> base station
  double bs_depth_m = 15.0;
  double bs_spacing_m = 5.0;  ///< between base stations when n_base > 1

  // Acoustic channel.
  std::vector<double> excess_path_m{0.0, 4.0, 9.0};  ///< one path per entry, 0 = direct
  double scattering_loss = 1.0;
  double spreading_exponent = 0.9;
  double absorption_per_m = 0.0;

  // Link budget.
  double tx_power_mw = 10.0;
  double noise_power_mw = 9.81e-3;
  double eta_db = 25.0;
  double doppler_scale = 1e-7;
  std::uint64_t n_base = 1;
  double csi_bits = 200.0;
  double max_distance_m = 100.0;

  // Time scans.
  double trace_duration_s = 1.5;
  double trace_step_s = 0.01;
  double scan_step_s = 0.05;
  double scan_horizon_s = 0.0;  ///< <= 0: ten coherence times
  mimo::StbcModel stbc_model = mimo::StbcModel::Printed;

  // Baseband BER sweep.
  std::vector<double> ber_distances_m{10.0, 20.0, 50.0, 100.0, 200.0, 500.0, 1000.0};
  double ber_reference_distance_m = 20.0;
  double ber_reference_snr_db = 14.0;
  double ber_carrier_hz = 100e3;
  double ber_sample_rate_hz = 195312.5;
  double ber_estimation_std_hz = 1e-3;
  double ber_cfo_hz = 100.0;
  std::uint64_t ber_csi_symbols = 1;
  std::uint64_t ber_pilot_symbols = 64;
  std::uint64_t ber_payload_bits = 1024;
  std::uint64_t ber_trials = 200;
  std::uint64_t ber_max_lead = 64;

  void validate() const;
  bool operator==(const ScenarioConfig&) const = default;

  sync::MediumParams mi_medium() const;
  sync::MediumParams acoustic_medium() const;
  mimo::LinkBudget link_budget() const;
};

struct ConfigKey {
  std::string_view name;
  std::string_view description;
};

/// Documented keys in render order.
const std::vector<ConfigKey>& config_keys();

/// Reads `key = value` lines; `#` starts a comment. Unknown keys, malformed
/// values and duplicate keys throw ConfigError. Missing keys keep defaults.
ScenarioConfig parse_config(std::string_view text, ScenarioConfig base = {});
ScenarioConfig load_config(const std::string& path, ScenarioConfig base = {});

/// Applies one `key=value` override.
void apply_override(ScenarioConfig& config, std::string_view assignment);

/// Every key with its description as a comment; parse_config(render_config(c)) == c.
std::string render_config(const ScenarioConfig& config);

}  // namespace uwmimo::scenario
