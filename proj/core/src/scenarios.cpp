#include "uwmimo/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "uwmimo/acoustic_channel.hpp"
#include "uwmimo/error.hpp"
#include "uwmimo/parallel.hpp"

namespace uwmimo::scenario {

namespace {

// RNG stream tags; each figure draws from its own family.
constexpr std::uint64_t kSyncSweepStream = 1;
constexpr std::uint64_t kBerStream = 2;
constexpr std::uint64_t kBerNoiseStream = 3;
constexpr std::uint64_t kDeploymentStream = 1000;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::uint64_t pack(std::uint64_t hi, std::uint64_t lo) { return (hi << 32) ^ lo; }

double safe_db(double linear) { return mimo::to_db(std::max(linear, 1e-30)); }

std::vector<sync::NodeLink> links_to_master(const DeploymentGeometry& g, const ScenarioConfig& c) {
  std::vector<sync::NodeLink> links;
  for (const auto& s : g.slaves) links.push_back({distance(s, g.master), c.uplink_bits, c.downlink_bits});
  return links;
}

channel::PathSpec path_prototype(const ScenarioConfig& c) {
  channel::PathSpec p;
  p.scattering_loss = c.scattering_loss;
  p.spreading_exponent = c.spreading_exponent;
  p.absorption = channel::constant_absorption(c.absorption_per_m);
  return p;
}

channel::MultipathChannel channel_at(const ScenarioConfig& c, double distance_m, double carrier_hz) {
  const auto paths = channel::bounce_paths(distance_m, c.excess_path_m, path_prototype(c));
  return channel::build_channel(carrier_hz, paths, c.ac_speed_mps);
}

std::vector<mimo::TransmitterState> states_for(const DeploymentEvaluation& e, const sync::SyncErrorReport& report,
                                               std::size_t n_base, double carrier_hz) {
  std::vector<mimo::TransmitterState> out;
  for (std::size_t i = 0; i < report.nodes.size(); ++i) {
    mimo::TransmitterState s;
    s.envelope = e.envelopes[i * n_base];
    s.delay_s = e.delays_s[i * n_base];
    s.freq_error_hz = report.nodes[i].freq_error_hz;
    s.time_error = report.nodes[i].time_error;
    out.push_back(s);
  }
  const auto phases = mimo::optimal_phase_vector(out, carrier_hz);
  for (std::size_t i = 0; i < out.size(); ++i) out[i].phase_control_rad = phases[i];
  return out;
}

mimo::ScanOptions scan_options(const ScenarioConfig& c) {
  mimo::ScanOptions o;
  o.t_step_s = c.scan_step_s;
  o.horizon_s = c.scan_horizon_s;
  o.stbc_model = c.stbc_model;
  return o;
}

double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace

DeploymentOptions deployment_options(const ScenarioConfig& c) {
  DeploymentOptions o;
  o.radius_m = c.radius_m;
  o.min_spacing_m = c.min_spacing_m;
  o.bs_offset_m = c.bs_offset_m;
  o.bs_depth_m = c.bs_depth_m;
  o.bs_spacing_m = c.bs_spacing_m;
  o.n_base = c.n_base;
  return o;
}

DeploymentEvaluation evaluate_deployment(const ScenarioConfig& c, std::size_t n_slaves, std::uint64_t index) {
  Rng rng = make_stream(c.seed, kDeploymentStream + n_slaves, index);
  DeploymentEvaluation e;
  e.geometry = deploy_random(n_slaves, deployment_options(c), rng);

  const double f = c.ac_frequency_hz;
  for (const auto& tx : e.geometry.transmitters()) {
    for (const auto& bs : e.geometry.base_stations) {
      const auto sample = channel::sample_envelope(channel_at(c, distance(tx, bs), f), f, rng);
      e.envelopes.push_back(sample.envelope);
      e.delays_s.push_back(sample.phase_delay_s);
    }
  }

  const clock::EstimationErrorModel model{c.estimation_std_hz};
  std::vector<double> errors(n_slaves);
  for (auto& x : errors) x = model.draw(rng);
  const auto links = links_to_master(e.geometry, c);
  e.mi_sync = sync::run_sync_round(links, c.mi_medium(), errors);
  e.acoustic_sync = sync::run_sync_round(links, c.acoustic_medium(), errors);
  e.mi_states = states_for(e, e.mi_sync, c.n_base, f);
  e.acoustic_states = states_for(e, e.acoustic_sync, c.n_base, f);
  return e;
}

CsvTable run_sync_error_sweep(const ScenarioConfig& c) {
  c.validate();
  const auto mi = c.mi_medium();
  const auto ac = c.acoustic_medium();
  const std::vector<sync::NodeLink> links(c.sweep_nodes - 1, {c.sweep_distance_m, c.uplink_bits, c.downlink_bits});
  const std::size_t slaves = links.size();

  CsvTable table({"estimation_error_std_hz", "mi_freq_error_hz", "acoustic_freq_error_hz", "mi_time_error",
                  "acoustic_time_error", "mi_sync_time_s", "acoustic_sync_time_s"});
  for (std::size_t p = 0; p < c.sweep_error_std_hz.size(); ++p) {
    const clock::EstimationErrorModel model{c.sweep_error_std_hz[p]};
    // [trial] -> {mi f, ac f, mi t, ac t} sums over slaves
    std::vector<std::array<double, 4>> per_trial(c.sweep_trials);
    parallel_for(c.sweep_trials, c.threads, [&](std::size_t k) {
      Rng rng = make_stream(c.seed, kSyncSweepStream, pack(p, k));
      std::vector<double> errors(slaves);
      for (auto& x : errors) x = model.draw(rng);
      const auto rm = sync::run_sync_round(links, mi, errors);
      const auto ra = sync::run_sync_round(links, ac, errors);
      std::array<double, 4> acc{};
      for (std::size_t n = 1; n < rm.nodes.size(); ++n) {
        acc[0] += std::abs(rm.nodes[n].freq_error_hz);
        acc[1] += std::abs(ra.nodes[n].freq_error_hz);
        acc[2] += std::abs(rm.nodes[n].time_error);
        acc[3] += std::abs(ra.nodes[n].time_error);
      }
      per_trial[k] = acc;
    });
    std::array<double, 4> total{};
    for (const auto& a : per_trial) {
      for (std::size_t j = 0; j < 4; ++j) total[j] += a[j];
    }
    const double denom = static_cast<double>(std::max<std::size_t>(slaves, 1) * c.sweep_trials);
    const auto rm = sync::run_sync_round(links, mi, std::vector<double>(slaves, 0.0));
    const auto ra = sync::run_sync_round(links, ac, std::vector<double>(slaves, 0.0));
    table.add_row({c.sweep_error_std_hz[p], total[0] / denom, total[1] / denom, total[2] / denom, total[3] / denom,
                   rm.total_sync_time_s, ra.total_sync_time_s});
  }
  return table;
}

CsvTable run_snr_trace(const ScenarioConfig& c) {
  c.validate();
  const auto budget = c.link_budget();
  const auto e = evaluate_deployment(c, c.slaves, 0);
  std::vector<double> h;
  for (const auto& s : e.mi_states) h.push_back(s.envelope);
  const double bound_bf = mimo::snr_ideal(h, budget, mimo::Scheme::Beamforming);
  const double bound_stbc = mimo::snr_ideal(h, budget, mimo::Scheme::SpaceTimeCoding);

  CsvTable table({"t_s", "bound_bf_db", "mi_bf_db", "acoustic_bf_db", "bound_stbc_db", "mi_stbc_db",
                  "acoustic_stbc_db", "eta_db"});
  const auto steps = static_cast<std::size_t>(std::llround(c.trace_duration_s / c.trace_step_s));
  for (std::size_t i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) * c.trace_step_s;
    using mimo::Scheme;
    table.add_row({t, safe_db(bound_bf),
                   safe_db(mimo::snr_with_errors(e.mi_states, budget, Scheme::Beamforming, t)),
                   safe_db(mimo::snr_with_errors(e.acoustic_states, budget, Scheme::Beamforming, t)),
                   safe_db(bound_stbc),
                   safe_db(mimo::snr_with_errors(e.mi_states, budget, Scheme::SpaceTimeCoding, t, c.stbc_model)),
                   safe_db(mimo::snr_with_errors(e.acoustic_states, budget, Scheme::SpaceTimeCoding, t, c.stbc_model)),
                   c.eta_db});
  }
  return table;
}

namespace {

// Per deployment: {mi bf, ac bf, mi stbc, ac stbc} effective times plus
// capacity and sync totals.
struct DeploymentTimes {
  std::array<double, 4> t_eff{};
  double capacity = 0.0;
  double mi_sync_s = 0.0;
  double acoustic_sync_s = 0.0;
};

std::vector<DeploymentTimes> deployment_times(const ScenarioConfig& c, std::size_t n_slaves, bool with_capacity) {
  const auto budget = c.link_budget();
  const auto scan = scan_options(c);
  std::vector<DeploymentTimes> out(c.deployments);
  parallel_for(c.deployments, c.threads, [&](std::size_t d) {
    const auto e = evaluate_deployment(c, n_slaves, d);
    using mimo::Scheme;
    DeploymentTimes r;
    r.t_eff[0] = mimo::effective_time(e.mi_states, budget, Scheme::Beamforming, scan);
    r.t_eff[1] = mimo::effective_time(e.acoustic_states, budget, Scheme::Beamforming, scan);
    r.t_eff[2] = mimo::effective_time(e.mi_states, budget, Scheme::SpaceTimeCoding, scan);
    r.t_eff[3] = mimo::effective_time(e.acoustic_states, budget, Scheme::SpaceTimeCoding, scan);
    if (with_capacity) {
      const auto h = mimo::channel_matrix(e.envelopes, e.delays_s, c.n_base, c.ac_frequency_hz);
      r.capacity = mimo::capacity(budget.amplitude * budget.amplitude / budget.noise_power, h, c.n_base);
    }
    r.mi_sync_s = e.mi_sync.total_sync_time_s;
    r.acoustic_sync_s = e.acoustic_sync.total_sync_time_s;
    out[d] = r;
  });
  return out;
}

}  // namespace

CsvTable run_comm_time_sweep(const ScenarioConfig& c) {
  c.validate();
  const double tc = mimo::coherence_time(c.ac_frequency_hz, c.doppler_scale);
  CsvTable table({"nodes", "coherence_time_s", "mi_bf_s", "acoustic_bf_s", "mi_stbc_s", "acoustic_stbc_s"});
  for (std::uint64_t n = c.min_nodes; n <= c.max_nodes; ++n) {
    const auto times = deployment_times(c, n - 1, false);
    std::array<double, 4> sum{};
    for (const auto& r : times) {
      for (std::size_t j = 0; j < 4; ++j) sum[j] += r.t_eff[j];
    }
    const double k = static_cast<double>(times.size());
    table.add_row({static_cast<double>(n), tc, sum[0] / k, sum[1] / k, sum[2] / k, sum[3] / k});
  }
  return table;
}

CsvTable run_throughput_sweep(const ScenarioConfig& c) {
  c.validate();
  const auto budget = c.link_budget();
  const double t_csi = mimo::csi_time(budget, c.acoustic_medium());
  CsvTable table({"nodes", "capacity_bps_hz", "mi_sync_time_s", "acoustic_sync_time_s", "csi_time_s", "mi_bf",
                  "acoustic_bf", "mi_stbc", "acoustic_stbc"});
  for (std::uint64_t n = c.min_nodes; n <= c.max_nodes; ++n) {
    const auto times = deployment_times(c, n - 1, true);
    std::vector<double> cap, smi, sac;
    std::array<std::vector<double>, 4> thr;
    for (const auto& r : times) {
      cap.push_back(r.capacity);
      smi.push_back(r.mi_sync_s);
      sac.push_back(r.acoustic_sync_s);
      for (std::size_t j = 0; j < 4; ++j) {
        const double sync_s = j % 2 == 0 ? r.mi_sync_s : r.acoustic_sync_s;
        thr[j].push_back(mimo::throughput_upper_bound(r.t_eff[j], r.capacity, sync_s, t_csi));
      }
    }
    table.add_row({static_cast<double>(n), mean(cap), mean(smi), mean(sac), t_csi, mean(thr[0]), mean(thr[1]),
                   mean(thr[2]), mean(thr[3])});
  }
  return table;
}

// --- Modem -----------------------------------------------------------------

dsp::ModemConfig modem_config(const ScenarioConfig& c) {
  dsp::ModemConfig m;
  m.sample_rate_hz = c.ber_sample_rate_hz;
  m.pilot_symbols = c.ber_pilot_symbols;
  m.detection.search_limit = 2 * c.ber_max_lead + 1;
  return m;
}

namespace {

// Transmit streams after each slave's synchronization error.
void impair_slaves(std::vector<dsp::cvec>& streams, const ModemTrial& t, double fs) {
  for (std::size_t i = 1; i < streams.size(); ++i) {
    dsp::apply_sync_error(streams[i], t.slave_time_error_s, t.slave_freq_error_hz, t.carrier_hz, fs);
  }
}

dsp::cvec over_the_air(const dsp::Modem& modem, std::vector<dsp::cvec> streams, const ModemTrial& t, Rng& rng) {
  const double fs = modem.config().sample_rate_hz;
  impair_slaves(streams, t, fs);
  dsp::cvec rx = dsp::superpose(streams, t.channel, t.lead_samples, modem.taps().size());
  dsp::apply_frequency_offset(rx, t.cfo_hz, fs);
  dsp::add_awgn(rx, t.noise_variance, rng);
  return rx;
}

std::size_t count_errors(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  std::size_t e = 0;
  for (std::size_t i = 0; i < a.size(); ++i) e += (a[i] != 0) != (b[i] != 0) ? 1 : 0;
  return e;
}

}  // namespace

std::size_t beamforming_bit_errors(const dsp::Modem& modem, const ModemTrial& t, std::span<const std::uint8_t> bits,
                                   Rng& rng) {
  detail::require(!t.channel.empty(), "need at least one transmitter");
  detail::require(t.csi.empty() || t.csi.size() == t.channel.size(), "one CSI value per transmitter");
  const dsp::cvec symbols = dsp::bpsk_modulate(bits);
  const dsp::cvec frame = modem.beamforming_frame(symbols);

  std::vector<dsp::cvec> streams;
  for (std::size_t i = 0; i < t.channel.size(); ++i) {
    const dsp::cd ref = t.csi.empty() ? t.channel[i] : t.csi[i];
    const dsp::cd rot = std::polar(1.0, -std::arg(ref));
    dsp::cvec s = frame;
    for (auto& x : s) x *= rot;
    streams.push_back(std::move(s));
  }
  const dsp::cvec rx = over_the_air(modem, std::move(streams), t, rng);
  try {
    const auto r = modem.receive_beamforming(rx, symbols.size());
    return count_errors(bits, r.bits);
  } catch (const NoPacketDetected&) {
  } catch (const InvalidFrame&) {
  }
  return bits.size() / 2;
}

std::size_t alamouti_bit_errors(const dsp::Modem& modem, const ModemTrial& t, std::span<const std::uint8_t> bits,
                                Rng& rng) {
  detail::require(t.channel.size() == 2, "Alamouti needs exactly two transmitters");
  const dsp::cvec symbols = dsp::bpsk_modulate(bits);
  const auto w = modem.alamouti_frames(symbols, rng);
  const dsp::cvec rx = over_the_air(modem, {w.tx1, w.tx2}, t, rng);
  try {
    const auto r = modem.receive_alamouti(rx, w.frame);
    return count_errors(bits, r.bits);
  } catch (const NoPacketDetected&) {
  } catch (const InvalidFrame&) {
  }
  return bits.size() / 2;
}

CsvTable run_baseband_ber(const ScenarioConfig& c) {
  c.validate();
  const dsp::Modem modem(modem_config(c));
  const double f = c.ber_carrier_hz;

  // Noise fixed by the single-transmitter mean power at the reference distance.
  const auto ref = channel_at(c, c.ber_reference_distance_m, f);
  double ref_power = 0.0;
  for (double g : ref.path_gains) ref_power += g * g;
  const double noise_variance = ref_power / mimo::from_db(c.ber_reference_snr_db);

  const std::vector<sync::NodeLink> link{{c.sweep_distance_m, c.uplink_bits, c.downlink_bits}};
  const clock::EstimationErrorModel model{c.ber_estimation_std_hz};

  CsvTable table({"distance_m", "snr_db", "mi_bf_ber", "acoustic_bf_ber", "mi_stbc_ber", "acoustic_stbc_ber"});
  for (std::size_t p = 0; p < c.ber_distances_m.size(); ++p) {
    const auto ch = channel_at(c, c.ber_distances_m[p], f);
    double power = 0.0;
    for (double g : ch.path_gains) power += g * g;

    // [trial] -> errors for {mi bf, ac bf, mi stbc, ac stbc}
    std::vector<std::array<std::size_t, 4>> errors(c.ber_trials);
    parallel_for(c.ber_trials, c.threads, [&](std::size_t k) {
      Rng rng = make_stream(c.seed, kBerStream, pack(p, k));
      ModemTrial base;
      base.noise_variance = noise_variance;
      base.carrier_hz = f;
      base.cfo_hz = c.ber_cfo_hz;
      base.lead_samples = std::uniform_int_distribution<std::size_t>(0, c.ber_max_lead)(rng);
      for (int i = 0; i < 2; ++i) {
        const auto s = channel::sample_envelope(ch, f, rng);
        base.channel.push_back(std::polar(s.envelope, -kTwoPi * f * s.phase_delay_s));
      }
      std::normal_distribution<double> csi_noise(0.0, std::sqrt(0.5 * noise_variance / double(c.ber_csi_symbols)));
      for (const auto& h : base.channel) base.csi.push_back(h + dsp::cd{csi_noise(rng), csi_noise(rng)});
      const auto bits = dsp::random_bits(c.ber_payload_bits, rng);
      const double eps_s = model.draw(rng);

      const sync::MediumParams media[2] = {c.mi_medium(), c.acoustic_medium()};
      for (int m = 0; m < 2; ++m) {
        const auto report = sync::run_sync_round(link, media[m], std::vector<double>{eps_s});
        ModemTrial t = base;
        t.slave_freq_error_hz = report.nodes[1].freq_error_hz;
        t.slave_time_error_s = report.nodes[1].time_error;
        Rng bf_noise = make_stream(c.seed, kBerNoiseStream, pack(p, 2 * k));
        Rng stbc_noise = make_stream(c.seed, kBerNoiseStream, pack(p, 2 * k + 1));
        errors[k][m] = beamforming_bit_errors(modem, t, bits, bf_noise);
        errors[k][2 + m] = alamouti_bit_errors(modem, t, bits, stbc_noise);
      }
    });

    std::array<double, 4> total{};
    for (const auto& e : errors) {
      for (std::size_t j = 0; j < 4; ++j) total[j] += static_cast<double>(e[j]);
    }
    const double n_bits = static_cast<double>(c.ber_trials * c.ber_payload_bits);
    table.add_row({c.ber_distances_m[p], mimo::to_db(power / noise_variance), total[0] / n_bits, total[1] / n_bits,
                   total[2] / n_bits, total[3] / n_bits});
  }
  return table;
}

}  // namespace uwmimo::scenario
