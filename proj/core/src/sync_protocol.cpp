#include "uwmimo/sync_protocol.hpp"

#include <cmath>
#include <stdexcept>

#include "uwmimo/error.hpp"
#include "uwmimo/random.hpp"

namespace uwmimo::sync {

void MediumParams::validate() const {
  detail::require(bandwidth_hz > 0.0 && propagation_speed_mps > 0.0 &&
                      operating_frequency_hz > 0.0 && multiplier > 0.0,
                  "medium parameters must be strictly positive");
}

MediumParams magnetic_induction_preset(double crystal_frequency_hz) {
  detail::require(crystal_frequency_hz > 0.0, "crystal frequency must be positive");
  return {20e3, 3.33e7, 10e6, 10e6 / crystal_frequency_hz};
}

MediumParams acoustic_preset(double crystal_frequency_hz) {
  detail::require(crystal_frequency_hz > 0.0, "crystal frequency must be positive");
  return {10e3, 1.4e3, 10e3, 10e3 / crystal_frequency_hz};
}

namespace {

void validate_link(const NodeLink& link) {
  detail::require(link.distance_m >= 0.0 && std::isfinite(link.distance_m),
                  "link distance must be finite and non-negative");
}

}  // namespace

double slot_duration(const NodeLink& link, const MediumParams& medium) {
  medium.validate();
  validate_link(link);
  const double bits = static_cast<double>(link.uplink_bits + link.downlink_bits);
  return bits / medium.bandwidth_hz + 2.0 * link.distance_m / medium.propagation_speed_mps;
}

double time_sync_error(std::size_t node_index, std::span<const NodeLink> links,
                       const MediumParams& medium, double freq_error_hz) {
  if (node_index == 1) return 0.0;
  const std::size_t n_nodes = links.size() + 1;
  detail::require(node_index >= 2 && node_index <= n_nodes, "node index out of range");
  medium.validate();

  const NodeLink& own = links[node_index - 2];
  validate_link(own);
  double drift_time = static_cast<double>(own.downlink_bits) / medium.bandwidth_hz +
                      own.distance_m / medium.propagation_speed_mps;
  for (std::size_t i = node_index + 1; i <= n_nodes; ++i) drift_time += slot_duration(links[i - 2], medium);
  return freq_error_hz * drift_time;
}

SyncErrorReport run_sync_round(std::span<const NodeLink> links, const MediumParams& medium,
                               std::span<const double> estimation_errors_hz) {
  detail::require(estimation_errors_hz.size() == links.size(),
                  "need exactly one estimation error per slave");
  medium.validate();

  SyncErrorReport report;
  report.nodes.reserve(links.size() + 1);
  report.nodes.push_back({1, 0.0, 0.0, 0.0});
  for (std::size_t j = 0; j < links.size(); ++j) {
    const std::size_t node = j + 2;
    NodeSyncError e;
    e.node_index = node;
    e.slot_duration_s = slot_duration(links[j], medium);
    e.freq_error_hz = clock::frequency_sync_error(estimation_errors_hz[j], medium.multiplier);
    e.time_error = time_sync_error(node, links, medium, e.freq_error_hz);
    report.total_sync_time_s += e.slot_duration_s;
    report.nodes.push_back(e);
  }
  return report;
}

SyncErrorReport run_sync_round(std::size_t n_nodes, std::span<const NodeLink> links,
                               const MediumParams& medium,
                               const clock::EstimationErrorModel& model, std::uint64_t rng_seed) {
  detail::require(n_nodes >= 1, "a sync round needs at least the master node");
  detail::require(links.size() == n_nodes - 1, "need exactly one link per slave");
  Rng rng = make_stream(rng_seed);
  std::vector<double> errors(links.size());
  for (auto& e : errors) e = model.draw(rng);
  return run_sync_round(links, medium, errors);
}

}  // namespace uwmimo::sync
