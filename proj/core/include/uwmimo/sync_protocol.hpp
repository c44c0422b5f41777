#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "uwmimo/clock_drift.hpp"

namespace uwmimo::sync {

/// Signal parameters of the link used for synchronization.
struct MediumParams {
  double bandwidth_hz = 1.0;
  double propagation_speed_mps = 1.0;
  double operating_frequency_hz = 1.0;
  double multiplier = 1.0;  ///< operating frequency / crystal frequency

  void validate() const;
  bool operator==(const MediumParams&) const = default;
};

/// Magnetic-induction link: 10 MHz carrier, 20 kHz bandwidth, 3.33e7 m/s.
MediumParams magnetic_induction_preset(double crystal_frequency_hz = 100e3);
/// Acoustic link: 10 kHz carrier, 10 kHz bandwidth, 1400 m/s.
MediumParams acoustic_preset(double crystal_frequency_hz = 100e3);

/// Master <-> slave link used during one polling slot.
struct NodeLink {
  double distance_m = 0.0;
  std::uint64_t uplink_bits = 0;    ///< slave -> master
  std::uint64_t downlink_bits = 0;  ///< master -> slave
};

struct NodeSyncError {
  std::size_t node_index = 1;  ///< 1 is the master
  double slot_duration_s = 0.0;
  double freq_error_hz = 0.0;
  /// Frequency error times drift time, taken literally (Hz * s). Reported in
  /// "drift units"; downstream phase models read it as seconds.
  double time_error = 0.0;

  bool operator==(const NodeSyncError&) const = default;
};

struct SyncErrorReport {
  std::vector<NodeSyncError> nodes;  ///< nodes[0] is the master
  double total_sync_time_s = 0.0;

  bool operator==(const SyncErrorReport&) const = default;
};

/// (L_up + L_down) / B + 2 d / v
double slot_duration(const NodeLink& link, const MediumParams& medium);

/// Time error of node `node_index` (1-based, master = 1). `links[j]` belongs
/// to node j + 2; slaves are polled in ascending index order, so node n drifts
/// through its own downlink plus every later slot.
double time_sync_error(std::size_t node_index, std::span<const NodeLink> links,
                       const MediumParams& medium, double freq_error_hz);

/// One TDD round with the given per-slave estimation errors (one per link).
SyncErrorReport run_sync_round(std::span<const NodeLink> links, const MediumParams& medium,
                               std::span<const double> estimation_errors_hz);

/// One TDD round drawing each slave's estimation error from `model`.
SyncErrorReport run_sync_round(std::size_t n_nodes, std::span<const NodeLink> links,
                               const MediumParams& medium,
                               const clock::EstimationErrorModel& model, std::uint64_t rng_seed);

}  // namespace uwmimo::sync
