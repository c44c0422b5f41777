#include "uwmimo/clock_drift.hpp"

#include <cmath>
#include <stdexcept>

#include "uwmimo/error.hpp"

namespace uwmimo::clock {

namespace {
constexpr int kMidpointPanels = 1000;
}

DriftProfile DriftProfile::constant(double ratio) { return DriftProfile(Affine{ratio, 0.0}); }

DriftProfile DriftProfile::affine(double at_zero, double slope) {
  return DriftProfile(Affine{at_zero, slope});
}

DriftProfile DriftProfile::custom(std::function<double(double)> ratio_at) {
  detail::require(static_cast<bool>(ratio_at), "drift profile callable is empty");
  return DriftProfile(std::move(ratio_at));
}

double DriftProfile::operator()(double t) const {
  if (const auto* a = std::get_if<Affine>(&impl_)) return a->at_zero + a->slope * t;
  return std::get<Custom>(impl_)(t);
}

double DriftProfile::average(double interval_s) const {
  detail::require(interval_s > 0.0, "averaging interval must be positive");
  if (const auto* a = std::get_if<Affine>(&impl_)) {
    if (a->slope == 0.0) return a->at_zero;
    return a->at_zero + 0.5 * a->slope * interval_s;
  }
  const auto& fn = std::get<Custom>(impl_);
  const double h = interval_s / kMidpointPanels;
  double sum = 0.0;
  for (int i = 0; i < kMidpointPanels; ++i) sum += fn((i + 0.5) * h);
  return sum / kMidpointPanels;
}

double EstimationErrorModel::draw(Rng& rng) const {
  detail::require(std::isfinite(std_dev_hz) && std_dev_hz >= 0.0,
                  "estimation error std must be finite and non-negative");
  if (std_dev_hz == 0.0) return 0.0;
  std::normal_distribution<double> dist(0.0, std_dev_hz);
  return dist(rng);
}

double average_relative_drift(const DriftProfile& profile, double interval_s) {
  return profile.average(interval_s);
}

double operating_frequency(const OscillatorSpec& oscillator, double multiplier) {
  detail::require(multiplier > 0.0, "frequency multiplier must be positive");
  detail::require(oscillator.nominal_frequency_hz > 0.0, "oscillator frequency must be positive");
  return multiplier * oscillator.nominal_frequency_hz;
}

double frequency_sync_error(double estimation_error_hz, double multiplier) {
  detail::require(multiplier > 0.0, "frequency multiplier must be positive");
  return estimation_error_hz / multiplier;
}

FrequencySyncResult beacon_frequency_estimate(double beacon_hz, double average_drift,
                                              double estimation_error_hz, double multiplier) {
  detail::require(beacon_hz > 0.0, "beacon frequency must be positive");
  detail::require(multiplier > 0.0, "frequency multiplier must be positive");
  FrequencySyncResult r;
  r.estimated_beacon_hz = average_drift * beacon_hz + estimation_error_hz;
  // f_c,1 = f_s,1 / k; keep the drift and estimation terms separate so a
  // perfectly matched clock gives an exact zero offset.
  const double master_crystal_hz = beacon_hz / multiplier;
  r.residual_error_hz = frequency_sync_error(estimation_error_hz, multiplier);
  r.offset_hz = (average_drift - 1.0) * master_crystal_hz + r.residual_error_hz;
  return r;
}

}  // namespace uwmimo::clock
