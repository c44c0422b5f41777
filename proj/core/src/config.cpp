#include "uwmimo/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <variant>

#include "uwmimo/csv.hpp"
#include "uwmimo/error.hpp"

namespace uwmimo::scenario {

namespace {

using Field = std::variant<double ScenarioConfig::*, std::uint64_t ScenarioConfig::*,
                           std::vector<double> ScenarioConfig::*, mimo::StbcModel ScenarioConfig::*>;

struct Descriptor {
  std::string_view key;
  std::string_view description;
  Field field;
};

using C = ScenarioConfig;

const std::vector<Descriptor>& descriptors() {
  static const std::vector<Descriptor> table{
      {"seed", "master RNG seed", &C::seed},
      {"threads", "worker threads, 0 = hardware concurrency", &C::threads},
      {"crystal_hz", "crystal oscillator frequency [Hz]", &C::crystal_hz},
      {"mi.bandwidth_hz", "MI link bandwidth [Hz]", &C::mi_bandwidth_hz},
      {"mi.speed_mps", "MI propagation speed [m/s]", &C::mi_speed_mps},
      {"mi.frequency_hz", "MI operating frequency [Hz]", &C::mi_frequency_hz},
      {"ac.bandwidth_hz", "acoustic link bandwidth [Hz]", &C::ac_bandwidth_hz},
      {"ac.speed_mps", "sound speed [m/s]", &C::ac_speed_mps},
      {"ac.frequency_hz", "acoustic operating frequency, also the data carrier f [Hz]", &C::ac_frequency_hz},
      {"sync.uplink_bits", "slave -> master packet length [bits]", &C::uplink_bits},
      {"sync.downlink_bits", "master -> slave packet length [bits]", &C::downlink_bits},
      {"sync.nodes", "nodes (master included) in the sync-error sweep", &C::sweep_nodes},
      {"sync.distance_m", "master-slave distance in the sync-error sweep [m]", &C::sweep_distance_m},
      {"sync.error_std_hz", "estimation-error standard deviations swept [Hz]", &C::sweep_error_std_hz},
      {"sync.trials", "Monte-Carlo rounds per sweep point", &C::sweep_trials},
      {"estimation_std_hz", "estimation-error standard deviation for deployment figures [Hz]",
       &C::estimation_std_hz},
      {"deploy.slaves", "slaves in the SNR-trace deployment", &C::slaves},
      {"deploy.radius_m", "deployment radius around the master [m]", &C::radius_m},
      {"deploy.min_spacing_m", "minimum distance between any two nodes [m]", &C::min_spacing_m},
      {"deploy.count", "random deployments per node count", &C::deployments},
      {"deploy.min_nodes", "smallest node count (master included) in N sweeps", &C::min_nodes},
      {"deploy.max_nodes", "largest node count (master included) in N sweeps", &C::max_nodes},
      {"bs.offset_m", "horizontal distance master -> first base station [m]", &C::bs_offset_m},
      {"bs.depth_m", "base-station depth below the node plane [m]", &C::bs_depth_m},
      {"bs.spacing_m", "spacing between base stations [m]", &C::bs_spacing_m},
      {"channel.excess_path_m", "one path per entry: extra length over the direct distance, 0 = direct [m]",
       &C::excess_path_m},
      {"channel.scattering_loss", "per-path scattering loss xi", &C::scattering_loss},
      {"channel.spreading_exponent", "spreading exponent beta", &C::spreading_exponent},
      {"channel.absorption_per_m", "constant absorption coefficient [1/m]", &C::absorption_per_m},
      {"link.tx_power_mw", "transmit power per node, A^2 [mW]", &C::tx_power_mw},
      {"link.noise_power_mw", "noise power sigma^2 [mW]", &C::noise_power_mw},
      {"link.eta_db", "SNR threshold eta [dB]", &C::eta_db},
      {"link.doppler_scale", "Doppler scaling factor a", &C::doppler_scale},
      {"link.n_base", "number of base stations N_b", &C::n_base},
      {"link.csi_bits", "CSI broadcast length [bits]", &C::csi_bits},
      {"link.max_distance_m", "largest node -> base-station distance for CSI time [m]", &C::max_distance_m},
      {"trace.duration_s", "SNR-trace length [s]", &C::trace_duration_s},
      {"trace.step_s", "SNR-trace sample spacing [s]", &C::trace_step_s},
      {"scan.step_s", "coarse step of the effective-time scan [s]", &C::scan_step_s},
      {"scan.horizon_s", "effective-time scan limit, <= 0 for ten coherence times [s]", &C::scan_horizon_s},
      {"stbc.model", "printed | pairwise (Alamouti pairs with CSI from t = 0)", &C::stbc_model},
      {"ber.distances_m", "TX -> RX distances swept [m]", &C::ber_distances_m},
      {"ber.reference_distance_m", "distance at which ber.reference_snr_db holds [m]",
       &C::ber_reference_distance_m},
      {"ber.reference_snr_db", "per-symbol SNR of one transmitter at the reference distance [dB]",
       &C::ber_reference_snr_db},
      {"ber.carrier_hz", "carrier used for sync-error phase [Hz]", &C::ber_carrier_hz},
      {"ber.sample_rate_hz", "baseband sample rate [Hz]", &C::ber_sample_rate_hz},
      {"ber.estimation_std_hz", "estimation-error standard deviation for the modem runs [Hz]",
       &C::ber_estimation_std_hz},
      {"ber.cfo_hz", "common carrier offset injected at the receiver [Hz]", &C::ber_cfo_hz},
      {"ber.csi_symbols", "noisy symbols behind each beamforming CSI estimate", &C::ber_csi_symbols},
      {"ber.pilot_symbols", "Alamouti pilot block length per antenna", &C::ber_pilot_symbols},
      {"ber.payload_bits", "payload bits per frame (even)", &C::ber_payload_bits},
      {"ber.trials", "frames per sweep point", &C::ber_trials},
      {"ber.max_lead", "largest random silence before a frame [samples]", &C::ber_max_lead},
  };
  return table;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view why) {
  throw ConfigError("invalid value '" + std::string(value) + "' for " + std::string(key) + ": " +
                    std::string(why));
}

double parse_double(std::string_view key, std::string_view text) {
  text = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) bad_value(key, text, "expected a number");
  if (!std::isfinite(v)) bad_value(key, text, "must be finite");
  return v;
}

std::uint64_t parse_uint(std::string_view key, std::string_view text) {
  text = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) bad_value(key, text, "expected an unsigned integer");
  return v;
}

std::vector<double> parse_list(std::string_view key, std::string_view text) {
  std::vector<double> out;
  text = trim(text);
  if (text.empty()) return out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto item = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    out.push_back(parse_double(key, item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

mimo::StbcModel parse_model(std::string_view key, std::string_view text) {
  text = trim(text);
  if (text == "printed") return mimo::StbcModel::Printed;
  if (text == "pairwise") return mimo::StbcModel::PairwiseStaleCsi;
  bad_value(key, text, "expected 'printed' or 'pairwise'");
}

const Descriptor& find(std::string_view key) {
  for (const auto& d : descriptors()) {
    if (d.key == key) return d;
  }
  throw ConfigError("unknown config key '" + std::string(key) + "'");
}

void assign(ScenarioConfig& config, const Descriptor& d, std::string_view value) {
  std::visit(
      [&](auto member) {
        using T = std::remove_reference_t<decltype(config.*member)>;
        if constexpr (std::is_same_v<T, double>) {
          config.*member = parse_double(d.key, value);
        } else if constexpr (std::is_same_v<T, std::uint64_t>) {
          config.*member = parse_uint(d.key, value);
        } else if constexpr (std::is_same_v<T, std::vector<double>>) {
          config.*member = parse_list(d.key, value);
        } else {
          config.*member = parse_model(d.key, value);
        }
      },
      d.field);
}

std::string render_value(const ScenarioConfig& config, const Descriptor& d) {
  return std::visit(
      [&](auto member) -> std::string {
        const auto& v = config.*member;
        using T = std::remove_cvref_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          return format_number(v);
        } else if constexpr (std::is_same_v<T, std::uint64_t>) {
          return std::to_string(v);
        } else if constexpr (std::is_same_v<T, std::vector<double>>) {
          std::string out;
          for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) out += ", ";
            out += format_number(v[i]);
          }
          return out;
        } else {
          return v == mimo::StbcModel::Printed ? "printed" : "pairwise";
        }
      },
      d.field);
}

void positive(double v, const char* what) {
  if (!(v > 0.0)) throw ConfigError(std::string(what) + " must be positive");
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> out;
    for (const auto& d : descriptors()) out.push_back({d.key, d.description});
    return out;
  }();
  return keys;
}

void ScenarioConfig::validate() const {
  positive(crystal_hz, "crystal_hz");
  positive(mi_bandwidth_hz, "mi.bandwidth_hz");
  positive(mi_speed_mps, "mi.speed_mps");
  positive(mi_frequency_hz, "mi.frequency_hz");
  positive(ac_bandwidth_hz, "ac.bandwidth_hz");
  positive(ac_speed_mps, "ac.speed_mps");
  positive(ac_frequency_hz, "ac.frequency_hz");
  if (sweep_nodes < 1) throw ConfigError("sync.nodes must be >= 1");
  if (sweep_distance_m < 0.0) throw ConfigError("sync.distance_m must be non-negative");
  if (sweep_error_std_hz.empty()) throw ConfigError("sync.error_std_hz must list at least one value");
  for (double v : sweep_error_std_hz) {
    if (v < 0.0) throw ConfigError("sync.error_std_hz values must be non-negative");
  }
  if (sweep_trials < 1) throw ConfigError("sync.trials must be >= 1");
  if (estimation_std_hz < 0.0) throw ConfigError("estimation_std_hz must be non-negative");
  positive(radius_m, "deploy.radius_m");
  if (min_spacing_m < 0.0) throw ConfigError("deploy.min_spacing_m must be non-negative");
  if (deployments < 1) throw ConfigError("deploy.count must be >= 1");
  if (min_nodes < 2 || max_nodes < min_nodes) throw ConfigError("need 2 <= deploy.min_nodes <= deploy.max_nodes");
  if (bs_offset_m < 0.0 || bs_depth_m < 0.0 || bs_spacing_m < 0.0) {
    throw ConfigError("base-station geometry must be non-negative");
  }
  if (bs_offset_m == 0.0 && bs_depth_m == 0.0) throw ConfigError("base station cannot coincide with the master");
  if (excess_path_m.empty()) throw ConfigError("channel.excess_path_m must list at least one path");
  for (double v : excess_path_m) {
    if (v < 0.0) throw ConfigError("channel.excess_path_m values must be non-negative");
  }
  positive(scattering_loss, "channel.scattering_loss");
  if (spreading_exponent < 0.0) throw ConfigError("channel.spreading_exponent must be non-negative");
  if (absorption_per_m < 0.0) throw ConfigError("channel.absorption_per_m must be non-negative");
  positive(tx_power_mw, "link.tx_power_mw");
  positive(noise_power_mw, "link.noise_power_mw");
  positive(doppler_scale, "link.doppler_scale");
  if (n_base < 1) throw ConfigError("link.n_base must be >= 1");
  if (csi_bits < 0.0 || max_distance_m < 0.0) throw ConfigError("CSI parameters must be non-negative");
  positive(trace_duration_s, "trace.duration_s");
  positive(trace_step_s, "trace.step_s");
  positive(scan_step_s, "scan.step_s");
  if (ber_distances_m.empty()) throw ConfigError("ber.distances_m must list at least one value");
  for (double v : ber_distances_m) positive(v, "ber.distances_m values");
  positive(ber_reference_distance_m, "ber.reference_distance_m");
  positive(ber_carrier_hz, "ber.carrier_hz");
  positive(ber_sample_rate_hz, "ber.sample_rate_hz");
  if (ber_estimation_std_hz < 0.0) throw ConfigError("ber.estimation_std_hz must be non-negative");
  if (ber_csi_symbols < 1) throw ConfigError("ber.csi_symbols must be >= 1");
  if (ber_pilot_symbols < 1) throw ConfigError("ber.pilot_symbols must be >= 1");
  if (ber_payload_bits < 2 || ber_payload_bits % 2 != 0) throw ConfigError("ber.payload_bits must be even and >= 2");
  if (ber_trials < 1) throw ConfigError("ber.trials must be >= 1");
}

sync::MediumParams ScenarioConfig::mi_medium() const {
  return {mi_bandwidth_hz, mi_speed_mps, mi_frequency_hz, mi_frequency_hz / crystal_hz};
}

sync::MediumParams ScenarioConfig::acoustic_medium() const {
  return {ac_bandwidth_hz, ac_speed_mps, ac_frequency_hz, ac_frequency_hz / crystal_hz};
}

mimo::LinkBudget ScenarioConfig::link_budget() const {
  mimo::LinkBudget b;
  b.amplitude = std::sqrt(tx_power_mw);
  b.noise_power = noise_power_mw;
  b.carrier_hz = ac_frequency_hz;
  b.snr_threshold = mimo::from_db(eta_db);
  b.doppler_scale = doppler_scale;
  b.n_base_stations = n_base;
  b.csi_bits = csi_bits;
  b.max_distance_m = max_distance_m;
  return b;
}

ScenarioConfig parse_config(std::string_view text, ScenarioConfig base) {
  std::set<std::string_view> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const auto key = trim(line.substr(0, eq));
    const auto& d = find(key);
    if (!seen.insert(d.key).second) throw ConfigError("duplicate config key '" + std::string(key) + "'");
    assign(base, d, line.substr(eq + 1));
  }
  base.validate();
  return base;
}

ScenarioConfig load_config(const std::string& path, ScenarioConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

void apply_override(ScenarioConfig& config, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("override '" + std::string(assignment) + "' is not key=value");
  }
  ScenarioConfig updated = config;
  assign(updated, find(trim(assignment.substr(0, eq))), assignment.substr(eq + 1));
  updated.validate();
  config = std::move(updated);
}

std::string render_config(const ScenarioConfig& config) {
  std::string out;
  for (const auto& d : descriptors()) {
    out += "# ";
    out += d.description;
    out += '\n';
    out += d.key;
    out += " = ";
    out += render_value(config, d);
    out += '\n';
  }
  return out;
}

}  // namespace uwmimo::scenario
