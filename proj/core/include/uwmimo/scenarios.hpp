#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "uwmimo/baseband_chain.hpp"
#include "uwmimo/config.hpp"
#include "uwmimo/csv.hpp"
#include "uwmimo/deployment.hpp"
#include "uwmimo/mimo_analysis.hpp"
#include "uwmimo/sync_protocol.hpp"

namespace uwmimo::scenario {

/// One random deployment with its channel and both synchronization outcomes.
/// The same geometry, channel draws and estimation errors feed both media.
struct DeploymentEvaluation {
  DeploymentGeometry geometry;
  std::vector<double> envelopes;  ///< [transmitter][base station]
  std::vector<double> delays_s;   ///< [transmitter][base station]
  sync::SyncErrorReport mi_sync;
  sync::SyncErrorReport acoustic_sync;
  std::vector<mimo::TransmitterState> mi_states;  ///< towards base station 0
  std::vector<mimo::TransmitterState> acoustic_states;
};

DeploymentOptions deployment_options(const ScenarioConfig& config);

/// Deployment `index` of the `n_slaves` family; depends only on (seed,
/// n_slaves, index), so every figure sees the same deployments.
DeploymentEvaluation evaluate_deployment(const ScenarioConfig& config, std::size_t n_slaves, std::uint64_t index);

/// Mean |epsilon_f| and |epsilon_t| over slaves and rounds for each swept
/// estimation-error spread, MI and acoustic.
CsvTable run_sync_error_sweep(const ScenarioConfig& config);

/// SNR(t) of deployment 0 with `slaves` slaves: bound, MI-synced and
/// acoustic-synced, for beamforming and STBC, in dB.
CsvTable run_snr_trace(const ScenarioConfig& config);

/// Mean effective communication time per node count, scheme and sync medium.
CsvTable run_comm_time_sweep(const ScenarioConfig& config);

/// Mean throughput upper bound per node count, scheme and sync medium, with
/// the capacity and overhead terms behind it.
CsvTable run_throughput_sweep(const ScenarioConfig& config);

/// Modem BER versus TX-RX distance for two transmitters (master and one
/// slave), both schemes, MI and acoustic synchronization.
CsvTable run_baseband_ber(const ScenarioConfig& config);

// --- Modem trials ----------------------------------------------------------

/// One over-the-air frame: per-transmitter complex channel, transmitter-side
/// CSI (beamforming only), slave synchronization error and receiver impairments.
struct ModemTrial {
  std::vector<dsp::cd> channel;  ///< master first
  std::vector<dsp::cd> csi;      ///< beamforming phase references; empty = perfect
  double noise_variance = 0.0;
  double slave_time_error_s = 0.0;
  double slave_freq_error_hz = 0.0;
  double carrier_hz = 100e3;
  double cfo_hz = 0.0;
  std::size_t lead_samples = 0;
};

/// Bit errors in `bits` after the beamforming chain. A frame that is not
/// detected counts as half its bits wrong.
std::size_t beamforming_bit_errors(const dsp::Modem& modem, const ModemTrial& trial,
                                   std::span<const std::uint8_t> bits, Rng& rng);

/// Same for the two-antenna Alamouti chain (channel.size() must be 2).
std::size_t alamouti_bit_errors(const dsp::Modem& modem, const ModemTrial& trial, std::span<const std::uint8_t> bits,
                                Rng& rng);

dsp::ModemConfig modem_config(const ScenarioConfig& config);

}  // namespace uwmimo::scenario
